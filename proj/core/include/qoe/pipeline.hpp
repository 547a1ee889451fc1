#pragma once

// Two-level repeated random-split prediction. Stage one fits on random 80%
// splits until the 95% confidence interval of the held-out R^2 is narrower
// than 5% of its mean (500..50000 runs) and averages the coefficients. Stage
// two re-scores that averaged model on fresh 20% subsets (50..250 runs) and
// reports R^2, MSE, MAE and MedAE.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "qoe/regression.hpp"
#include "qoe/session.hpp"

namespace qoe::pipeline {

enum class Source { brisque, eeg, eegz };
enum class Target { rating, level, brisque };
enum class Method { linear, bound_linear, logistic };
enum class Grouping { all, per_image, per_subject };
enum class ErrorPooling { pooled, per_run_mean };

std::string to_string(Source v);
std::string to_string(Target v);
std::string to_string(Method v);
std::string to_string(Grouping v);
Source parse_source(const std::string& s);
Target parse_target(const std::string& s);
Method parse_method(const std::string& s);
Grouping parse_grouping(const std::string& s);

struct RunBounds {
  std::size_t min = 0;
  std::size_t max = 0;
};

struct PredictionSpec {
  Source source = Source::brisque;
  Target target = Target::rating;
  Method method = Method::linear;
  int degree = 1;
  double split_fraction = 0.8;
  double ci_level = 0.95;
  double ci_relative_width = 0.05;
  RunBounds stage1{500, 50000};
  RunBounds stage2{50, 250};
  std::size_t check_every = 100;
  std::uint64_t seed = 0;
  double logistic_lambda = 1.0;
  ErrorPooling error_pooling = ErrorPooling::pooled;
  unsigned workers = 1;  // does not influence results

  // Throws RangeError for inconsistent settings (e.g. logistic on a real target).
  void validate() const;
};

struct RowLabel {
  std::string subject_id;
  std::string image_id;
  int level = 0;
};

// Raw (unexpanded) inputs, one row per rated display event.
struct Dataset {
  Eigen::MatrixXd inputs;
  Eigen::VectorXd targets;
  std::vector<RowLabel> labels;

  std::size_t rows() const noexcept { return static_cast<std::size_t>(inputs.rows()); }
  Dataset subset(const std::vector<std::size_t>& rows) const;
};

// Flattened model parameters: linear coefficients, or per-class weights
// (row-major by class) followed by the five intercepts.
using Coefficients = Eigen::VectorXd;

struct SplitResult {
  Coefficients coefficients;
  double heldout_score = 0.0;
  std::size_t redraws = 0;
};

struct StageResult {
  std::size_t runs = 0;
  double estimate = 0.0;  // mean of per-run held-out R^2
  double ci_halfwidth = 0.0;
  bool converged = false;  // false when the run cap was hit before the CI criterion
  Coefficients averaged_coefficients;
  std::vector<double> per_run_scores;
  std::size_t redraws = 0;
};

struct FinalMetrics {
  double r2 = 0.0;         // stage-two estimate (mean per-run R^2)
  std::optional<double> pooled_r2;
  double mse = 0.0;
  double mae = 0.0;
  double medae = 0.0;
};

struct StageTwoResult {
  StageResult stage;
  FinalMetrics metrics;
  std::vector<double> actual;     // pooled held-out targets
  std::vector<double> predicted;  // pooled predictions
};

// Derives an independent 64-bit seed for (stage, run index) from the master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stage, std::uint64_t index);

// Uniform 80/20 partition from run_seed (train first, then held-out).
struct Partition {
  std::vector<std::size_t> train;
  std::vector<std::size_t> heldout;
};
Partition draw_partition(std::size_t rows, double split_fraction, std::uint64_t run_seed);

// Fits on the training part and scores R^2 on the held-out part. Partitions
// with constant held-out targets (or a single training class for logistic)
// are redrawn. Throws DimensionError for fewer than 5 rows.
SplitResult run_split(const Dataset& data, const PredictionSpec& spec, std::uint64_t run_seed);

// z * s / sqrt(n) with s the sample standard deviation; z = 1.96 at 95%.
double ci_halfwidth(std::span<const double> scores, double level = 0.95);

StageResult stage_one(const Dataset& data, const PredictionSpec& spec);
StageTwoResult stage_two(const Dataset& data, const Coefficients& averaged, const PredictionSpec& spec);

// Expanded feature length and stored coefficient count for a spec and input width.
std::size_t expanded_length(const PredictionSpec& spec, std::size_t input_dim);
std::size_t coefficient_count(const PredictionSpec& spec, std::size_t input_dim);

// Predictions of a flattened model on raw inputs.
std::vector<double> predict_rows(const PredictionSpec& spec, const Coefficients& coef, const Eigen::MatrixXd& inputs);

// Rebuilds a serializable model from flattened coefficients.
nlohmann::ordered_json model_json(const PredictionSpec& spec, const Coefficients& coef, std::size_t input_dim);

struct EvaluationReport {
  PredictionSpec spec;
  Grouping grouping = Grouping::all;
  std::string group;
  std::size_t rows = 0;
  std::size_t input_dim = 0;
  StageResult stage1;
  StageTwoResult stage2;
};

struct SkippedGroup {
  std::string group;
  std::string reason;
};

struct Evaluation {
  PredictionSpec spec;
  Grouping grouping = Grouping::all;
  std::vector<EvaluationReport> reports;
  std::vector<SkippedGroup> skipped;
};

// Builds the dataset for spec.source/spec.target over all sessions.
// EEG sources need traces on every session; rows lacking a channel are dropped.
Dataset build_dataset(const std::vector<session::SubjectSession>& sessions, const session::BrisqueTable& brisque,
                      const PredictionSpec& spec);

Evaluation evaluate(const std::vector<session::SubjectSession>& sessions, const session::BrisqueTable& brisque,
                    const PredictionSpec& spec, Grouping grouping);
Evaluation evaluate_dataset(const Dataset& data, const PredictionSpec& spec, Grouping grouping);

nlohmann::ordered_json to_json(const PredictionSpec& spec);
nlohmann::ordered_json to_json(const EvaluationReport& report);
nlohmann::ordered_json to_json(const Evaluation& evaluation);

}  // namespace qoe::pipeline
