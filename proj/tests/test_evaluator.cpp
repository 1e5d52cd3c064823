#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "nlgqe/error.hpp"
#include "nlgqe/evaluator.hpp"
#include "nlgqe/rng.hpp"
#include "oracles.hpp"

using namespace nlgqe;

namespace {

std::vector<double> random_vector(Rng& rng, std::size_t n, double lo,
                                  double hi) {
  std::vector<double> out(n);
  for (double& x : out) x = rng.uniform(lo, hi);
  return out;
}

struct TempFile {
  std::string path;
  explicit TempFile(const char* stem) {
    static int counter = 0;
    path = std::string("/tmp/nlgqe_eval_") + stem + "_" +
           std::to_string(++counter) + ".tsv";
  }
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("pearson on the hand-worked fixtures") {
  CHECK(pearson({1, 2, 3}, {1, 2, 3}) == doctest::Approx(1.0));
  CHECK(pearson({1, 2, 3}, {3, 2, 1}) == doctest::Approx(-1.0));
  CHECK(pearson({1, 2, 3, 4}, {2, 1, 4, 3}) == doctest::Approx(0.6));
}

TEST_CASE("pearson rejects degenerate input") {
  CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), UndefinedCorrelationError);
  CHECK_THROWS_AS(pearson({1, 2, 3}, {5, 5, 5}), UndefinedCorrelationError);
  CHECK_THROWS_AS(pearson({1}, {2}), UndefinedCorrelationError);
  CHECK_THROWS_AS(pearson({}, {}), UndefinedCorrelationError);
  CHECK_THROWS_AS(pearson({1, 2}, {1, 2, 3}), DataError);
  // The undefined-correlation error is still a data error to callers.
  CHECK_THROWS_AS(pearson({1, 1}, {1, 2}), DataError);
}

TEST_CASE("average ranks share ties") {
  CHECK(average_ranks({10, 20, 30}) == std::vector<double>{1, 2, 3});
  CHECK(average_ranks({30, 10, 20}) == std::vector<double>{3, 1, 2});
  CHECK(average_ranks({1, 1, 2}) == std::vector<double>{1.5, 1.5, 3});
  CHECK(average_ranks({5, 5, 5, 5}) == std::vector<double>{2.5, 2.5, 2.5, 2.5});
}

TEST_CASE("spearman on the hand-worked fixtures") {
  CHECK(spearman({1, 2, 3}, {10, 200, 3000}) == doctest::Approx(1.0));
  CHECK(spearman({1, 2, 3}, {1, 3, 2}) == doctest::Approx(0.5));
  // Ties: ranks of (1,1,2) are (1.5,1.5,3), then pearson against (1,2,3).
  CHECK(spearman({1, 1, 2}, {1, 2, 3}) ==
        doctest::Approx(oracle::pearson({1.5, 1.5, 3}, {1, 2, 3})));
}

TEST_CASE("spearman survives monotone transforms that break pearson") {
  const std::vector<double> xs{1, 2, 3, 4, 5};
  std::vector<double> cubed;
  for (double x : xs) cubed.push_back(x * x * x);
  CHECK(spearman(xs, cubed) == doctest::Approx(1.0));
  CHECK(pearson(xs, cubed) < 1.0);
}

TEST_CASE("mae and rmse on the unit-error fixture") {
  CHECK(mae({3, 3}, {3, 3}) == 0.0);
  CHECK(rmse({3, 3}, {3, 3}) == 0.0);
  CHECK(mae({4, 4}, {4, 5}) == doctest::Approx(0.5));
  CHECK(rmse({4, 4}, {4, 5}) == doctest::Approx(std::sqrt(0.5)));
  CHECK(rmse({4, 4}, {4, 5}) == doctest::Approx(0.70711).epsilon(1e-4));
  CHECK_THROWS_AS(mae({1}, {1, 2}), DataError);
  CHECK_THROWS_AS(rmse({}, {}), DataError);
}

TEST_CASE("ranking accuracy counts ties as incorrect") {
  CHECK(ranking_accuracy({{true, 0.4}, {true, 0.1}}) == 1.0);
  CHECK(ranking_accuracy({{false, 0.0}, {false, 0.0}}) == 0.0);
  CHECK(ranking_accuracy({{true, 0.2}, {false, -0.1}, {false, 0.0},
                          {true, 0.9}}) == doctest::Approx(0.5));
  CHECK_THROWS_AS(ranking_accuracy({}), DataError);
}

TEST_CASE("mean ranking loss averages only the wrong pairs") {
  CHECK(mean_ranking_loss({{true, 0.4}, {true, 0.2}}) == 0.0);
  CHECK(mean_ranking_loss({{false, -0.3}}) == doctest::Approx(0.3));
  const std::vector<PairOutcome> mixed{
      {true, 0.5}, {false, -0.1}, {true, 0.2}, {false, -0.2}};
  CHECK(mean_ranking_loss(mixed) == doctest::Approx(0.15));
  // Averaged over all four instances instead of the two wrong ones.
  CHECK(mean_ranking_loss(mixed, true) == doctest::Approx(0.075));
  CHECK_THROWS_AS(mean_ranking_loss({}), DataError);
}

TEST_CASE("metrics agree with the brute-force reference on random data") {
  Rng rng(2024);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(49);
    const auto xs = random_vector(rng, n, -5.0, 5.0);
    const auto ys = random_vector(rng, n, -5.0, 5.0);
    CHECK(pearson(xs, ys) == doctest::Approx(oracle::pearson(xs, ys)).epsilon(1e-10));
    CHECK(spearman(xs, ys) ==
          doctest::Approx(oracle::spearman(xs, ys)).epsilon(1e-10));
    CHECK(mae(xs, ys) == doctest::Approx(oracle::mae(xs, ys)).epsilon(1e-10));
    CHECK(rmse(xs, ys) == doctest::Approx(oracle::rmse(xs, ys)).epsilon(1e-10));

    std::vector<PairOutcome> outcomes;
    std::vector<bool> correct;
    std::vector<double> margins;
    for (std::size_t i = 0; i < n; ++i) {
      const double margin = rng.uniform(-1.0, 1.0);
      outcomes.push_back({margin > 0.0, margin});
      correct.push_back(margin > 0.0);
      margins.push_back(margin);
    }
    CHECK(ranking_accuracy(outcomes) ==
          doctest::Approx(oracle::accuracy(correct)).epsilon(1e-10));
    CHECK(mean_ranking_loss(outcomes) ==
          doctest::Approx(oracle::mean_rank_loss(margins)).epsilon(1e-10));
  }
}

TEST_CASE("correlations are invariant under positive affine maps") {
  Rng rng(7);
  const auto xs = random_vector(rng, 20, 0.0, 1.0);
  const auto ys = random_vector(rng, 20, 0.0, 1.0);
  std::vector<double> shifted;
  for (double x : xs) shifted.push_back(3.0 * x + 11.0);
  CHECK(pearson(shifted, ys) == doctest::Approx(pearson(xs, ys)).epsilon(1e-12));
  CHECK(spearman(shifted, ys) ==
        doctest::Approx(spearman(xs, ys)).epsilon(1e-12));
}

TEST_CASE("incomplete beta and the t tail match closed forms") {
  // I_x(a,b) with a=b=1 is the identity.
  CHECK(regularized_incomplete_beta(1, 1, 0.25) == doctest::Approx(0.25));
  CHECK(regularized_incomplete_beta(1, 1, 0.0) == 0.0);
  CHECK(regularized_incomplete_beta(1, 1, 1.0) == 1.0);
  // Symmetry I_x(a,b) = 1 - I_{1-x}(b,a).
  CHECK(regularized_incomplete_beta(2.5, 1.5, 0.3) ==
        doctest::Approx(1.0 - regularized_incomplete_beta(1.5, 2.5, 0.7))
            .epsilon(1e-12));

  // dof 1 is the Cauchy distribution: SF(t) = 1/2 - atan(t)/pi.
  CHECK(student_t_sf(1.0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(student_t_sf(0.0, 1) == doctest::Approx(0.5));
  CHECK(student_t_sf(-1.0, 1) == doctest::Approx(0.75).epsilon(1e-12));
  for (double t : {0.3, 1.7, 4.0}) {
    CHECK(student_t_sf(t, 1) ==
          doctest::Approx(0.5 - std::atan(t) / 3.14159265358979323846)
              .epsilon(1e-10));
  }
  // dof 2 has the closed form SF(t) = 1/2 - t / (2 sqrt(2 + t^2)).
  CHECK(student_t_sf(1.0, 2) ==
        doctest::Approx(0.5 - 1.0 / (2.0 * std::sqrt(3.0))).epsilon(1e-12));
  // Large dof approaches the normal tail.
  CHECK(student_t_sf(1.959963985, 100000) == doctest::Approx(0.025).epsilon(1e-3));
  // Symmetry in t.
  CHECK(student_t_sf(2.2, 7) == doctest::Approx(1.0 - student_t_sf(-2.2, 7)));
}

TEST_CASE("williams test on equal correlations is exactly centred") {
  const WilliamsResult r = williams_test(0.5, 0.5, 0.3, 20);
  CHECK(r.t == doctest::Approx(0.0));
  CHECK(r.p == doctest::Approx(0.5));
}

TEST_CASE("williams test is antisymmetric in its first two arguments") {
  const WilliamsResult ab = williams_test(0.62, 0.41, 0.55, 30);
  const WilliamsResult ba = williams_test(0.41, 0.62, 0.55, 30);
  CHECK(ab.t == doctest::Approx(-ba.t).epsilon(1e-12));
  CHECK(ab.p == doctest::Approx(1.0 - ba.p).epsilon(1e-9));
  CHECK(ab.t > 0.0);
  CHECK(ab.p < 0.5);
}

TEST_CASE("williams test matches its formula on a worked example") {
  const double r12 = 0.62, r13 = 0.41, r23 = 0.55;
  const std::size_t n = 30;
  const double k = 1 - r12 * r12 - r13 * r13 - r23 * r23 + 2 * r12 * r13 * r23;
  const double rbar = (r12 + r13) / 2.0;
  const double expected_t =
      (r12 - r13) *
      std::sqrt((n - 1.0) * (1.0 + r23) /
                (2.0 * k * (n - 1.0) / (n - 3.0) +
                 rbar * rbar * std::pow(1.0 - r23, 3.0)));
  const WilliamsResult r = williams_test(r12, r13, r23, n);
  CHECK(r.t == doctest::Approx(expected_t).epsilon(1e-12));
  CHECK(r.p == doctest::Approx(student_t_sf(expected_t, n - 3.0)).epsilon(1e-12));
}

TEST_CASE("williams test rejects unusable inputs") {
  CHECK_THROWS_AS(williams_test(0.5, 0.4, 0.3, 3), DataError);
  CHECK_THROWS_AS(williams_test(1.0, 0.4, 0.3, 10), DataError);
  CHECK_THROWS_AS(williams_test(0.5, -1.0, 0.3, 10), DataError);
  // Perfectly dependent triple collapses K to zero.
  CHECK_THROWS_AS(williams_test(0.99, 0.99, -0.99, 10), DataError);
}

TEST_CASE("bootstrap dominance and identity fixtures") {
  std::vector<int> all_correct(50, 1), all_wrong(50, 0);
  CHECK(bootstrap_compare(all_correct, all_wrong, 500, 3) == 0.0);
  CHECK(bootstrap_compare(all_wrong, all_correct, 500, 3) == 1.0);
  CHECK(bootstrap_compare(all_correct, all_correct, 500, 3) == 1.0);
}

TEST_CASE("bootstrap 75 vs 60 out of 100 is significant at 0.05") {
  std::vector<int> a(100, 0), b(100, 0);
  for (int i = 0; i < 75; ++i) a[i] = 1;
  for (int i = 20; i < 80; ++i) b[i] = 1;
  const double p = bootstrap_compare(a, b, 1000, 42);
  CHECK(p < 0.05);
  CHECK(bootstrap_compare(a, b, 1000, 42) == p);  // seeded determinism

  // Independent re-implementation of the resample loop over the same stream.
  Rng rng(42);
  std::size_t hits = 0;
  for (int r = 0; r < 1000; ++r) {
    int ca = 0, cb = 0;
    for (int i = 0; i < 100; ++i) {
      const std::size_t idx = rng.uniform_index(100);
      ca += a[idx];
      cb += b[idx];
    }
    if (ca <= cb) ++hits;
  }
  CHECK(p == doctest::Approx(hits / 1000.0));
}

TEST_CASE("bootstrap input validation") {
  CHECK_THROWS_AS(bootstrap_compare({}, {}, 100, 1), DataError);
  CHECK_THROWS_AS(bootstrap_compare({1, 0}, {1}, 100, 1), DataError);
  CHECK_THROWS_AS(bootstrap_compare({1}, {1}, 0, 1), DataError);
}

TEST_CASE("constant baseline reports only error metrics") {
  const MetricReport even = constant_baseline({4, 4, 4});
  CHECK(even.values.at("mae") == 0.0);
  CHECK(even.values.at("rmse") == 0.0);
  CHECK(even.values.count("pearson") == 0);
  CHECK(even.n == 3);
  CHECK(even.task == "rating");

  const MetricReport spread = constant_baseline({1, 5});
  CHECK(spread.values.at("mae") == doctest::Approx(2.0));
  CHECK(spread.values.at("rmse") == doctest::Approx(2.0));
  CHECK(spread.values.at("constant") == doctest::Approx(3.0));

  const MetricReport fixed = constant_baseline({1, 5}, 4.0);
  CHECK(fixed.values.at("mae") == doctest::Approx(2.0));
  CHECK(fixed.values.at("rmse") == doctest::Approx(std::sqrt(5.0)));
}

TEST_CASE("rating report carries all four metrics when defined") {
  const MetricReport r = rating_report({1, 2, 3, 4}, {2, 1, 4, 3});
  CHECK(r.values.at("pearson") == doctest::Approx(0.6));
  CHECK(r.values.at("spearman") == doctest::Approx(0.6));
  CHECK(r.values.at("mae") == doctest::Approx(1.0));
  CHECK(r.values.at("rmse") == doctest::Approx(1.0));
  CHECK(r.n == 4);
  CHECK(r.task == "rating");

  // Constant predictions keep MAE/RMSE but drop the correlations.
  const MetricReport flat = rating_report({3, 3, 3}, {1, 2, 3});
  CHECK(flat.values.count("pearson") == 0);
  CHECK(flat.values.count("spearman") == 0);
  CHECK(flat.values.at("mae") == doctest::Approx(1.0));
}

TEST_CASE("ranking report bundles accuracy and both loss readings") {
  const std::vector<PairOutcome> outcomes{
      {true, 0.5}, {false, -0.1}, {true, 0.2}, {false, -0.2}};
  const MetricReport r = ranking_report(outcomes);
  CHECK(r.values.at("accuracy") == doctest::Approx(0.5));
  CHECK(r.values.at("mean_ranking_loss") == doctest::Approx(0.15));
  CHECK(r.values.at("mean_ranking_loss_all") == doctest::Approx(0.075));
  CHECK(r.n == 4);
  CHECK(r.task == "ranking");
}

TEST_CASE("metric reports serialise to flat json") {
  MetricReport r;
  r.values["pearson"] = 0.25;
  r.values["mae"] = 1.5;
  r.n = 10;
  r.task = "rating";
  const std::string json = metric_report_to_json(r);
  CHECK(json.find("\"pearson\":0.25") != std::string::npos);
  CHECK(json.find("\"mae\":1.5") != std::string::npos);
  CHECK(json.find("\"n\":10") != std::string::npos);
  CHECK(json.find("\"task\":\"rating\"") != std::string::npos);
}

TEST_CASE("rating prediction files round-trip exactly") {
  TempFile file("rating");
  const std::vector<RatingPrediction> preds{
      {"0", 3.25}, {"1", 1.0 / 3.0}, {"two", -0.5}};
  write_rating_predictions(file.path, preds);
  const auto back = read_rating_predictions(file.path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].id == preds[i].id);
    CHECK(back[i].value == preds[i].value);  // full-precision text round-trip
  }
}

TEST_CASE("ranking prediction files round-trip and validate decisions") {
  TempFile file("ranking");
  const std::vector<RankingPrediction> preds{
      {"0", "a", 0.75}, {"1", "b", -0.25}, {"2", "tie", 0.0}};
  write_ranking_predictions(file.path, preds);
  const auto back = read_ranking_predictions(file.path);
  REQUIRE(back.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(back[i].decision == preds[i].decision);
    CHECK(back[i].margin == preds[i].margin);
  }

  {
    std::ofstream out(file.path);
    out << "id\tdecision\tmargin\n0\tmaybe\t0.5\n";
  }
  CHECK_THROWS_AS(read_ranking_predictions(file.path), DataError);
}

TEST_CASE("malformed prediction files name the offending line") {
  TempFile file("malformed");
  {
    std::ofstream out(file.path);
    out << "0\t1.5\nbroken line\n";
  }
  CHECK_THROWS_WITH_AS(read_rating_predictions(file.path),
                       doctest::Contains(":2:"), DataError);
  CHECK_THROWS_AS(read_rating_predictions("/nonexistent/preds.tsv"), DataError);
}
