#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace nlgqe {

// Flat bundle of metric values for one evaluation run.
struct MetricReport {
  std::map<std::string, double> values;
  std::size_t n = 0;
  std::string task;  // "rating" or "ranking"
};

std::string metric_report_to_json(const MetricReport& report);

// Model outcome on one ranking pair. margin = score(preferred) − score(other);
// a tie decision must carry correct=false.
struct PairOutcome {
  bool correct = false;
  double margin = 0.0;
};

double pearson(const std::vector<double>& xs, const std::vector<double>& ys);

// Pearson over ranks; tied values receive the average of their rank range.
double spearman(const std::vector<double>& xs, const std::vector<double>& ys);

std::vector<double> average_ranks(const std::vector<double>& xs);

double mae(const std::vector<double>& preds, const std::vector<double>& golds);
double rmse(const std::vector<double>& preds, const std::vector<double>& golds);

// Fraction of pairs decided for the human-preferred output; ties never count.
double ranking_accuracy(const std::vector<PairOutcome>& outcomes);

// Mean of (score of worse − score of better) over the wrongly ranked pairs,
// i.e. those with negative margin; 0 when nothing is wrong. With
// over_all_instances the same mass is averaged over every pair instead.
double mean_ranking_loss(const std::vector<PairOutcome>& outcomes,
                         bool over_all_instances = false);

struct WilliamsResult {
  double t = 0.0;
  double p = 1.0;  // one-tailed, H1: r12 > r13
};

// Significance of the difference between two correlations r12 and r13 that
// share variable 1 (the human ratings), given their intercorrelation r23 and
// sample size n.
WilliamsResult williams_test(double r12, double r13, double r23,
                             std::size_t n);

// Paired bootstrap over per-instance correctness: p = fraction of resamples
// where accuracy(a) <= accuracy(b), testing H1 that a is better.
double bootstrap_compare(const std::vector<int>& outcomes_a,
                         const std::vector<int>& outcomes_b,
                         std::size_t n_resamples, std::uint64_t seed);

// Predicts the constant c for every gold; defaults to the gold mean.
// Correlation is undefined for a constant predictor and is omitted.
MetricReport constant_baseline(const std::vector<double>& golds);
MetricReport constant_baseline(const std::vector<double>& golds, double c);

// pearson/spearman/mae/rmse; correlations are omitted on degenerate input
// instead of failing the whole report.
MetricReport rating_report(const std::vector<double>& preds,
                           const std::vector<double>& golds);

MetricReport ranking_report(const std::vector<PairOutcome>& outcomes);

// Numeric kernels behind the t tail probability, exposed for direct checks.
double regularized_incomplete_beta(double a, double b, double x);
double student_t_sf(double t, double dof);

// Prediction files: `id<TAB>value` for ratings, `id<TAB>decision<TAB>margin`
// for rankings (decision in {a, b, tie}).
struct RatingPrediction {
  std::string id;
  double value = 0.0;
};

struct RankingPrediction {
  std::string id;
  std::string decision;
  double margin = 0.0;
};

void write_rating_predictions(const std::string& path,
                              const std::vector<RatingPrediction>& preds);
std::vector<RatingPrediction> read_rating_predictions(const std::string& path);
void write_ranking_predictions(const std::string& path,
                               const std::vector<RankingPrediction>& preds);
std::vector<RankingPrediction> read_ranking_predictions(
    const std::string& path);

}  // namespace nlgqe
