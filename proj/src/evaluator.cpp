#include "nlgqe/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "nlgqe/error.hpp"
#include "nlgqe/rng.hpp"

namespace nlgqe {
namespace {

double mean_of(const std::vector<double>& xs) {
  return std::accumulate(xs.begin(), xs.end(), 0.0) /
         static_cast<double>(xs.size());
}

void check_aligned(const std::vector<double>& preds,
                   const std::vector<double>& golds) {
  if (preds.size() != golds.size()) {
    throw DataError("prediction/gold length mismatch");
  }
  if (preds.empty()) throw DataError("empty prediction sequence");
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    std::size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

double parse_double(const std::string& s, const std::string& path,
                    std::size_t line_no) {
  try {
    std::size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw DataError(path + ":" + std::to_string(line_no) +
                    ": expected a number, got '" + s + "'");
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double pearson(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DataError("correlation length mismatch");
  const std::size_t n = xs.size();
  if (n < 2) throw UndefinedCorrelationError("correlation needs n >= 2");
  const double mx = mean_of(xs);
  const double my = mean_of(ys);
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    syy += dy * dy;
    sxy += dx * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("correlation undefined for zero variance");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> average_ranks(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && xs[order[j + 1]] == xs[order[i]]) ++j;
    // 1-based ranks i+1..j+1 share their average.
    const double shared = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size()) throw DataError("correlation length mismatch");
  return pearson(average_ranks(xs), average_ranks(ys));
}

double mae(const std::vector<double>& preds, const std::vector<double>& golds) {
  check_aligned(preds, golds);
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    s += std::fabs(preds[i] - golds[i]);
  }
  return s / static_cast<double>(preds.size());
}

double rmse(const std::vector<double>& preds, const std::vector<double>& golds) {
  check_aligned(preds, golds);
  double s = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    const double d = preds[i] - golds[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(preds.size()));
}

double ranking_accuracy(const std::vector<PairOutcome>& outcomes) {
  if (outcomes.empty()) throw DataError("no ranking outcomes");
  std::size_t correct = 0;
  for (const auto& o : outcomes) correct += o.correct ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(outcomes.size());
}

double mean_ranking_loss(const std::vector<PairOutcome>& outcomes,
                         bool over_all_instances) {
  if (outcomes.empty()) throw DataError("no ranking outcomes");
  double loss = 0.0;
  std::size_t wrong = 0;
  for (const auto& o : outcomes) {
    if (o.margin < 0.0) {
      loss += -o.margin;
      ++wrong;
    }
  }
  if (over_all_instances) return loss / static_cast<double>(outcomes.size());
  if (wrong == 0) return 0.0;
  return loss / static_cast<double>(wrong);
}

WilliamsResult williams_test(double r12, double r13, double r23,
                             std::size_t n) {
  if (n < 4) throw DataError("williams test needs n >= 4");
  for (double r : {r12, r13, r23}) {
    if (!(r > -1.0 && r < 1.0)) {
      throw DataError("williams test needs correlations strictly inside (-1,1)");
    }
  }
  const double nn = static_cast<double>(n);
  const double K = 1.0 - r12 * r12 - r13 * r13 - r23 * r23 +
                   2.0 * r12 * r13 * r23;
  if (K <= 0.0) throw DataError("degenerate correlation matrix in williams test");
  const double rbar = (r12 + r13) / 2.0;
  const double denom = 2.0 * K * (nn - 1.0) / (nn - 3.0) +
                       rbar * rbar * std::pow(1.0 - r23, 3.0);
  if (denom <= 0.0) throw DataError("degenerate denominator in williams test");
  WilliamsResult res;
  res.t = (r12 - r13) * std::sqrt((nn - 1.0) * (1.0 + r23) / denom);
  res.p = student_t_sf(res.t, nn - 3.0);
  return res;
}

double bootstrap_compare(const std::vector<int>& outcomes_a,
                         const std::vector<int>& outcomes_b,
                         std::size_t n_resamples, std::uint64_t seed) {
  if (outcomes_a.size() != outcomes_b.size()) {
    throw DataError("bootstrap outcome length mismatch");
  }
  if (outcomes_a.empty()) throw DataError("empty bootstrap outcomes");
  if (n_resamples == 0) throw DataError("bootstrap needs at least one resample");
  const std::size_t n = outcomes_a.size();
  Rng rng(seed);
  std::size_t hits = 0;
  for (std::size_t r = 0; r < n_resamples; ++r) {
    long count_a = 0, count_b = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t idx = rng.uniform_index(n);
      count_a += outcomes_a[idx] ? 1 : 0;
      count_b += outcomes_b[idx] ? 1 : 0;
    }
    if (count_a <= count_b) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n_resamples);
}

MetricReport constant_baseline(const std::vector<double>& golds) {
  if (golds.empty()) throw DataError("no gold ratings");
  return constant_baseline(golds, mean_of(golds));
}

MetricReport constant_baseline(const std::vector<double>& golds, double c) {
  if (golds.empty()) throw DataError("no gold ratings");
  std::vector<double> preds(golds.size(), c);
  MetricReport report;
  report.task = "rating";
  report.n = golds.size();
  report.values["constant"] = c;
  report.values["mae"] = mae(preds, golds);
  report.values["rmse"] = rmse(preds, golds);
  return report;
}

MetricReport rating_report(const std::vector<double>& preds,
                           const std::vector<double>& golds) {
  check_aligned(preds, golds);
  MetricReport report;
  report.task = "rating";
  report.n = preds.size();
  report.values["mae"] = mae(preds, golds);
  report.values["rmse"] = rmse(preds, golds);
  try {
    report.values["pearson"] = pearson(preds, golds);
    report.values["spearman"] = spearman(preds, golds);
  } catch (const UndefinedCorrelationError&) {
  }
  return report;
}

MetricReport ranking_report(const std::vector<PairOutcome>& outcomes) {
  MetricReport report;
  report.task = "ranking";
  report.n = outcomes.size();
  report.values["accuracy"] = ranking_accuracy(outcomes);
  report.values["mean_ranking_loss"] = mean_ranking_loss(outcomes);
  report.values["mean_ranking_loss_all"] = mean_ranking_loss(outcomes, true);
  return report;
}

std::string metric_report_to_json(const MetricReport& report) {
  nlohmann::json j;
  j["task"] = report.task;
  j["n"] = report.n;
  for (const auto& [name, value] : report.values) j[name] = value;
  return j.dump();
}

namespace {

// Continued fraction for the incomplete beta function, Lentz's method.
double betacf(double a, double b, double x) {
  constexpr double kFpMin = 1e-300;
  constexpr double kEps = 3e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kFpMin) d = kFpMin;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 300; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kFpMin) d = kFpMin;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kFpMin) c = kFpMin;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw DataError("beta parameters must be positive");
  if (x < 0.0 || x > 1.0) throw DataError("beta argument outside [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) -
                          std::lgamma(b) + a * std::log(x) +
                          b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * betacf(a, b, x) / a;
  }
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double student_t_sf(double t, double dof) {
  if (!(dof > 0.0)) throw DataError("t distribution needs positive dof");
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(dof / 2.0, 0.5, x);
  return t >= 0.0 ? tail : 1.0 - tail;
}

void write_rating_predictions(const std::string& path,
                              const std::vector<RatingPrediction>& preds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& p : preds) {
    out << p.id << '\t' << format_double(p.value) << '\n';
  }
}

std::vector<RatingPrediction> read_rating_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::vector<RatingPrediction> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 2) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 2 tab-separated fields");
    }
    preds.push_back({fields[0], parse_double(fields[1], path, line_no)});
  }
  return preds;
}

void write_ranking_predictions(const std::string& path,
                               const std::vector<RankingPrediction>& preds) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  for (const auto& p : preds) {
    out << p.id << '\t' << p.decision << '\t' << format_double(p.margin)
        << '\n';
  }
}

std::vector<RankingPrediction> read_ranking_predictions(
    const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot read " + path);
  std::vector<RankingPrediction> preds;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != 3) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 3 tab-separated fields");
    }
    if (fields[1] != "a" && fields[1] != "b" && fields[1] != "tie") {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": decision must be a, b or tie");
    }
    preds.push_back({fields[0], fields[1], parse_double(fields[2], path, line_no)});
  }
  return preds;
}

}  // namespace nlgqe
