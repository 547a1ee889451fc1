#include "qoe/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <mutex>
#include <random>
#include <thread>

#include "qoe/eeg_features.hpp"
#include "qoe/error.hpp"
#include "qoe/scores.hpp"

namespace qoe::pipeline {

namespace {

constexpr std::size_t kMinRows = 5;
constexpr std::size_t kMaxRedraws = 1000;
constexpr std::uint64_t kStageOne = 1;
constexpr std::uint64_t kStageTwo = 2;
constexpr std::uint64_t kRedrawStream = 0x5eed;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Unbiased draw in [0, n) that does not depend on the standard library's
// distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t n) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x = rng();
  while (x >= limit) x = rng();
  return x % n;
}

// Runs f(k) for k in [begin, end) on `workers` threads. Each index is
// handled exactly once; the first exception is rethrown.
template <class F>
void parallel_for(std::size_t begin, std::size_t end, unsigned workers, F&& f) {
  const std::size_t count = end - begin;
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), count));
  if (threads <= 1) {
    for (std::size_t k = begin; k < end; ++k) f(k);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        for (std::size_t k = begin + t; k < end; k += threads) f(k);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

double z_value(double level) {
  if (!(level > 0.0 && level < 1.0)) throw RangeError("confidence level must lie in (0, 1)");
  if (level == 0.95) return 1.96;
  // Two-sided normal quantile by bisection on erfc.
  const double tail = 1.0 - level;
  double lo = 0.0, hi = 40.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (std::erfc(mid / std::sqrt(2.0)) > tail ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

bool constant(const Eigen::VectorXd& targets, const std::vector<std::size_t>& rows) {
  for (std::size_t k = 1; k < rows.size(); ++k)
    if (targets[static_cast<Eigen::Index>(rows[k])] != targets[static_cast<Eigen::Index>(rows[0])]) return false;
  return true;
}

std::vector<int> classes_of(const Eigen::VectorXd& targets, const std::vector<std::size_t>& rows) {
  std::vector<int> y;
  y.reserve(rows.size());
  for (std::size_t r : rows) {
    const double v = targets[static_cast<Eigen::Index>(r)];
    const double rounded = std::round(v);
    if (rounded != v || rounded < 1.0 || rounded > regression::kClassCount)
      throw RangeError("logistic targets must be integer classes in 1..5");
    y.push_back(static_cast<int>(rounded));
  }
  return y;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) out.row(static_cast<Eigen::Index>(k)) = m.row(static_cast<Eigen::Index>(rows[k]));
  return out;
}

Eigen::VectorXd rows_of(const Eigen::VectorXd& v, const std::vector<std::size_t>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) out[static_cast<Eigen::Index>(k)] = v[static_cast<Eigen::Index>(rows[k])];
  return out;
}

regression::LogisticModel unflatten_logistic(const regression::PolynomialBasis& basis, const Coefficients& coef) {
  const auto p = static_cast<Eigen::Index>(basis.size());
  constexpr Eigen::Index K = regression::kClassCount;
  regression::LogisticModel m{basis, Eigen::MatrixXd(K, p), Eigen::VectorXd(K), {}};
  for (Eigen::Index c = 0; c < K; ++c) m.weights.row(c) = coef.segment(c * p, p).transpose();
  m.intercepts = coef.tail(K);
  return m;
}

Coefficients flatten(const regression::LogisticModel& m) {
  const Eigen::Index p = m.weights.cols();
  constexpr Eigen::Index K = regression::kClassCount;
  Coefficients out(K * p + K);
  for (Eigen::Index c = 0; c < K; ++c) out.segment(c * p, p) = m.weights.row(c).transpose();
  out.tail(K) = m.intercepts;
  return out;
}

Coefficients fit(const PredictionSpec& spec, const regression::PolynomialBasis& basis, const Dataset& data,
                 const std::vector<std::size_t>& train) {
  const Eigen::MatrixXd design = basis.expand_rows(rows_of(data.inputs, train));
  if (spec.method == Method::logistic) {
    regression::LogisticOptions opt;
    opt.lambda = spec.logistic_lambda;
    return flatten(regression::fit_logistic(basis, design, classes_of(data.targets, train), opt));
  }
  return regression::least_squares(design, rows_of(data.targets, train));
}

struct ScoredRun {
  double r2 = 0.0;
  std::vector<double> actual;
  std::vector<double> predicted;
};

// Batches of runs: first up to the stage minimum, then `check_every` at a
// time, stopping on the CI criterion or the stage maximum.
template <class RunFn, class ConsumeFn>
StageResult run_stage(const PredictionSpec& spec, const RunBounds& bounds, RunFn&& run, ConsumeFn&& consume) {
  if (bounds.min < 2 || bounds.max < bounds.min) throw RangeError("stage run bounds must satisfy 2 <= min <= max");
  StageResult stage;
  const double z = z_value(spec.ci_level);
  std::size_t next_stop = bounds.min;
  while (true) {
    const std::size_t begin = stage.runs;
    const std::size_t end = std::min(next_stop, bounds.max);
    std::vector<ScoredRun> batch(end - begin);
    std::vector<Coefficients> coefs(end - begin);
    std::vector<std::size_t> redraws(end - begin);
    parallel_for(begin, end, spec.workers, [&](std::size_t k) { run(k, batch[k - begin], coefs[k - begin], redraws[k - begin]); });
    for (std::size_t k = 0; k < batch.size(); ++k) {
      stage.per_run_scores.push_back(batch[k].r2);
      stage.redraws += redraws[k];
      consume(batch[k], coefs[k]);
    }
    stage.runs = end;

    const double n = static_cast<double>(stage.runs);
    double mean = 0.0;
    for (double s : stage.per_run_scores) mean += s;
    mean /= n;
    double ss = 0.0;
    for (double s : stage.per_run_scores) ss += (s - mean) * (s - mean);
    stage.estimate = mean;
    stage.ci_halfwidth = z * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);

    if (2.0 * stage.ci_halfwidth < spec.ci_relative_width * std::abs(mean)) {
      stage.converged = true;
      break;
    }
    if (stage.runs >= bounds.max) break;
    next_stop = stage.runs + std::max<std::size_t>(1, spec.check_every);
  }
  return stage;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string to_string(Source v) {
  switch (v) {
    case Source::brisque: return "brisque";
    case Source::eeg: return "eeg";
    case Source::eegz: return "eegz";
  }
  return "?";
}

std::string to_string(Target v) {
  switch (v) {
    case Target::rating: return "rating";
    case Target::level: return "level";
    case Target::brisque: return "brisque";
  }
  return "?";
}

std::string to_string(Method v) {
  switch (v) {
    case Method::linear: return "linear";
    case Method::bound_linear: return "bound_linear";
    case Method::logistic: return "logistic";
  }
  return "?";
}

std::string to_string(Grouping v) {
  switch (v) {
    case Grouping::all: return "all";
    case Grouping::per_image: return "per_image";
    case Grouping::per_subject: return "per_subject";
  }
  return "?";
}

Source parse_source(const std::string& s) {
  if (s == "brisque") return Source::brisque;
  if (s == "eeg") return Source::eeg;
  if (s == "eegz") return Source::eegz;
  throw RangeError("unknown source '" + s + "' (brisque, eeg, eegz)");
}

Target parse_target(const std::string& s) {
  if (s == "rating") return Target::rating;
  if (s == "level") return Target::level;
  if (s == "brisque") return Target::brisque;
  throw RangeError("unknown target '" + s + "' (rating, level, brisque)");
}

Method parse_method(const std::string& s) {
  if (s == "linear") return Method::linear;
  if (s == "bound_linear" || s == "bound-linear") return Method::bound_linear;
  if (s == "logistic") return Method::logistic;
  throw RangeError("unknown method '" + s + "' (linear, bound_linear, logistic)");
}

Grouping parse_grouping(const std::string& s) {
  if (s == "all") return Grouping::all;
  if (s == "per_image" || s == "per-image") return Grouping::per_image;
  if (s == "per_subject" || s == "per-subject") return Grouping::per_subject;
  throw RangeError("unknown grouping '" + s + "' (all, per_image, per_subject)");
}

void PredictionSpec::validate() const {
  if (degree < 1 || degree > regression::kMaxDegree) throw RangeError("degree must be 1, 2 or 3");
  if (!(split_fraction > 0.0 && split_fraction < 1.0)) throw RangeError("split fraction must lie in (0, 1)");
  if (!(ci_relative_width > 0.0)) throw RangeError("CI relative width must be positive");
  z_value(ci_level);
  if (method != Method::linear && target == Target::brisque)
    throw RangeError(to_string(method) + " prediction needs an integer Likert-range target (rating or level)");
  if (stage1.min < 2 || stage1.max < stage1.min || stage2.min < 2 || stage2.max < stage2.min)
    throw RangeError("stage run bounds must satisfy 2 <= min <= max");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset d{rows_of(inputs, rows), rows_of(targets, rows), {}};
  d.labels.reserve(rows.size());
  for (std::size_t r : rows) d.labels.push_back(labels[r]);
  return d;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stage, std::uint64_t index) {
  return splitmix64(splitmix64(master ^ splitmix64(stage)) + index);
}

Partition draw_partition(std::size_t rows, double split_fraction, std::uint64_t run_seed) {
  if (rows < 2) throw DimensionError("partition needs at least 2 rows");
  std::vector<std::size_t> perm(rows);
  for (std::size_t k = 0; k < rows; ++k) perm[k] = k;
  std::mt19937_64 rng(run_seed);
  for (std::size_t k = rows - 1; k > 0; --k) std::swap(perm[k], perm[bounded(rng, k + 1)]);
  auto n_train = static_cast<std::size_t>(std::floor(split_fraction * static_cast<double>(rows)));
  n_train = std::clamp<std::size_t>(n_train, 1, rows - 1);
  Partition p{{perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(n_train)},
              {perm.begin() + static_cast<std::ptrdiff_t>(n_train), perm.end()}};
  std::sort(p.train.begin(), p.train.end());
  std::sort(p.heldout.begin(), p.heldout.end());
  return p;
}

std::size_t expanded_length(const PredictionSpec& spec, std::size_t input_dim) {
  return regression::monomial_count(input_dim, spec.degree);
}

std::size_t coefficient_count(const PredictionSpec& spec, std::size_t input_dim) {
  const auto p = expanded_length(spec, input_dim);
  return spec.method == Method::logistic ? regression::kClassCount * (p + 1) : p;
}

std::vector<double> predict_rows(const PredictionSpec& spec, const Coefficients& coef, const Eigen::MatrixXd& inputs) {
  const regression::PolynomialBasis basis(static_cast<std::size_t>(inputs.cols()), spec.degree);
  const Eigen::MatrixXd design = basis.expand_rows(inputs);
  std::vector<double> out(static_cast<std::size_t>(inputs.rows()));
  if (spec.method == Method::logistic) {
    const auto model = unflatten_logistic(basis, coef);
    for (Eigen::Index i = 0; i < design.rows(); ++i)
      out[static_cast<std::size_t>(i)] = regression::predict_expanded(model, design.row(i).transpose());
    return out;
  }
  const Eigen::VectorXd y = design * coef;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    out[static_cast<std::size_t>(i)] = spec.method == Method::bound_linear ? regression::bound(y[i]) : y[i];
  return out;
}

nlohmann::ordered_json model_json(const PredictionSpec& spec, const Coefficients& coef, std::size_t input_dim) {
  const regression::PolynomialBasis basis(input_dim, spec.degree);
  if (spec.method == Method::logistic) {
    auto j = regression::to_json(unflatten_logistic(basis, coef));
    j.erase("solver");
    return j;
  }
  auto j = regression::to_json(regression::LinearModel{basis, coef});
  if (spec.method == Method::bound_linear) j["kind"] = "bound_linear";
  return j;
}

SplitResult run_split(const Dataset& data, const PredictionSpec& spec, std::uint64_t run_seed) {
  if (data.rows() < kMinRows) throw DimensionError("a split needs at least 5 rows, got " + std::to_string(data.rows()));
  const regression::PolynomialBasis basis(static_cast<std::size_t>(data.inputs.cols()), spec.degree);

  for (std::size_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
    const std::uint64_t seed = attempt == 0 ? run_seed : derive_seed(run_seed, kRedrawStream, attempt);
    const Partition part = draw_partition(data.rows(), spec.split_fraction, seed);
    if (constant(data.targets, part.heldout)) continue;
    if (spec.method == Method::logistic && constant(data.targets, part.train)) continue;

    SplitResult out;
    out.coefficients = fit(spec, basis, data, part.train);
    const auto predicted = predict_rows(spec, out.coefficients, rows_of(data.inputs, part.heldout));
    const Eigen::VectorXd actual = rows_of(data.targets, part.heldout);
    out.heldout_score = scores::r2_score({actual.data(), static_cast<std::size_t>(actual.size())}, predicted);
    out.redraws = attempt;
    return out;
  }
  throw DegenerateError("no usable random split found (held-out targets constant in every draw)");
}

double ci_halfwidth(std::span<const double> scores, double level) {
  if (scores.size() < 2) throw DimensionError("confidence interval needs at least 2 scores");
  const double n = static_cast<double>(scores.size());
  double mean = 0.0;
  for (double s : scores) mean += s;
  mean /= n;
  double ss = 0.0;
  for (double s : scores) ss += (s - mean) * (s - mean);
  return z_value(level) * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
}

StageResult stage_one(const Dataset& data, const PredictionSpec& spec) {
  spec.validate();
  Coefficients sum;
  auto stage = run_stage(
      spec, spec.stage1,
      [&](std::size_t k, ScoredRun& run, Coefficients& coef, std::size_t& redraws) {
        auto r = run_split(data, spec, derive_seed(spec.seed, kStageOne, k));
        run.r2 = r.heldout_score;
        coef = std::move(r.coefficients);
        redraws = r.redraws;
      },
      [&](const ScoredRun&, const Coefficients& coef) {
        if (sum.size() == 0) sum = Coefficients::Zero(coef.size());
        sum += coef;
      });
  stage.averaged_coefficients = sum / static_cast<double>(stage.runs);
  return stage;
}

StageTwoResult stage_two(const Dataset& data, const Coefficients& averaged, const PredictionSpec& spec) {
  spec.validate();
  if (data.rows() < kMinRows) throw DimensionError("a split needs at least 5 rows, got " + std::to_string(data.rows()));
  StageTwoResult out;
  double mse_sum = 0.0, mae_sum = 0.0, medae_sum = 0.0;
  out.stage = run_stage(
      spec, spec.stage2,
      [&](std::size_t k, ScoredRun& run, Coefficients&, std::size_t& redraws) {
        const std::uint64_t seed = derive_seed(spec.seed, kStageTwo, k);
        for (std::size_t attempt = 0; attempt < kMaxRedraws; ++attempt) {
          const auto part = draw_partition(data.rows(), spec.split_fraction,
                                           attempt == 0 ? seed : derive_seed(seed, kRedrawStream, attempt));
          if (constant(data.targets, part.heldout)) continue;
          const Eigen::VectorXd actual = rows_of(data.targets, part.heldout);
          run.actual.assign(actual.data(), actual.data() + actual.size());
          run.predicted = predict_rows(spec, averaged, rows_of(data.inputs, part.heldout));
          run.r2 = scores::r2_score(run.actual, run.predicted);
          redraws = attempt;
          return;
        }
        throw DegenerateError("no usable evaluation subset found (targets constant in every draw)");
      },
      [&](const ScoredRun& run, const Coefficients&) {
        out.actual.insert(out.actual.end(), run.actual.begin(), run.actual.end());
        out.predicted.insert(out.predicted.end(), run.predicted.begin(), run.predicted.end());
        const auto m = scores::fit_metrics(run.actual, run.predicted);
        mse_sum += m.mse;
        mae_sum += m.mae;
        medae_sum += m.medae;
      });
  out.stage.averaged_coefficients = averaged;

  const auto pooled = scores::fit_metrics(out.actual, out.predicted);
  out.metrics.r2 = out.stage.estimate;
  out.metrics.pooled_r2 = pooled.r2;
  if (spec.error_pooling == ErrorPooling::pooled) {
    out.metrics.mse = pooled.mse;
    out.metrics.mae = pooled.mae;
    out.metrics.medae = pooled.medae;
  } else {
    const double n = static_cast<double>(out.stage.runs);
    out.metrics.mse = mse_sum / n;
    out.metrics.mae = mae_sum / n;
    out.metrics.medae = medae_sum / n;
  }
  return out;
}

// ---------------------------------------------------------------------------

Dataset build_dataset(const std::vector<session::SubjectSession>& sessions, const session::BrisqueTable& brisque,
                      const PredictionSpec& spec) {
  std::vector<std::vector<double>> inputs;
  std::vector<double> targets;
  std::vector<RowLabel> labels;

  const auto target_value = [&](int q, int level, double b) {
    switch (spec.target) {
      case Target::rating: return static_cast<double>(q);
      case Target::level: return static_cast<double>(level);
      case Target::brisque: return b;
    }
    return 0.0;
  };
  // Level targets use the impaired levels 1..5 only.
  const auto keep = [&](int level) { return spec.target != Target::level || level >= 1; };

  for (const auto& s : sessions) {
    if (spec.source == Source::brisque) {
      for (const auto& r : s.ratings) {
        const auto b = brisque.find({r.image_id, r.level});
        if (b == brisque.end())
          throw ValidationError("no BRISQUE value for image " + r.image_id + " level " + std::to_string(r.level));
        if (!keep(r.level)) continue;
        inputs.push_back({b->second});
        targets.push_back(target_value(r.q, r.level, b->second));
        labels.push_back({s.subject_id, r.image_id, r.level});
      }
      continue;
    }
    if (s.trace.empty()) throw ValidationError("subject " + s.subject_id + " has no EEG trace");
    const auto m = eeg::feature_matrix(s, spec.source == Source::eegz, brisque);
    for (std::size_t k = 0; k < m.rows.size(); ++k) {
      if (!keep(m.level[k])) continue;
      inputs.emplace_back(m.rows[k].values.begin(), m.rows[k].values.end());
      targets.push_back(target_value(m.rating[k], m.level[k], m.brisque[k]));
      labels.push_back({s.subject_id, m.rows[k].image_id, m.level[k]});
    }
  }

  const std::size_t dim = spec.source == Source::brisque ? 1 : session::kChannelCount;
  Dataset d{Eigen::MatrixXd(static_cast<Eigen::Index>(inputs.size()), static_cast<Eigen::Index>(dim)),
            Eigen::VectorXd(static_cast<Eigen::Index>(targets.size())), std::move(labels)};
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    for (std::size_t c = 0; c < dim; ++c) d.inputs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = inputs[i][c];
    d.targets[static_cast<Eigen::Index>(i)] = targets[i];
  }
  return d;
}

Evaluation evaluate_dataset(const Dataset& data, const PredictionSpec& spec, Grouping grouping) {
  spec.validate();
  std::vector<std::string> order;
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < data.rows(); ++i) {
    std::string key = "all";
    if (grouping == Grouping::per_image) key = data.labels[i].image_id;
    if (grouping == Grouping::per_subject) key = data.labels[i].subject_id;
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(i);
  }
  if (order.empty()) order.push_back("all");

  Evaluation ev;
  ev.spec = spec;
  ev.grouping = grouping;
  for (const auto& key : order) {
    const Dataset part = data.subset(groups[key]);
    if (part.rows() < kMinRows) {
      ev.skipped.push_back({key, "too few rows (" + std::to_string(part.rows()) + ")"});
      continue;
    }
    try {
      EvaluationReport r;
      r.spec = spec;
      r.grouping = grouping;
      r.group = key;
      r.rows = part.rows();
      r.input_dim = static_cast<std::size_t>(part.inputs.cols());
      r.stage1 = stage_one(part, spec);
      r.stage2 = stage_two(part, r.stage1.averaged_coefficients, spec);
      ev.reports.push_back(std::move(r));
    } catch (const DegenerateError& e) {
      ev.skipped.push_back({key, e.what()});
    }
  }
  return ev;
}

Evaluation evaluate(const std::vector<session::SubjectSession>& sessions, const session::BrisqueTable& brisque,
                    const PredictionSpec& spec, Grouping grouping) {
  spec.validate();
  return evaluate_dataset(build_dataset(sessions, brisque, spec), spec, grouping);
}

// ---------------------------------------------------------------------------

namespace {

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

nlohmann::ordered_json stage_json(const StageResult& s) {
  return {{"runs", s.runs},
          {"estimate_r2", s.estimate},
          {"ci_halfwidth", s.ci_halfwidth},
          {"converged", s.converged},
          {"redraws", s.redraws}};
}

}  // namespace

nlohmann::ordered_json to_json(const PredictionSpec& spec) {
  return {{"source", to_string(spec.source)},
          {"target", to_string(spec.target)},
          {"method", to_string(spec.method)},
          {"degree", spec.degree},
          {"split_fraction", spec.split_fraction},
          {"ci_level", spec.ci_level},
          {"ci_relative_width", spec.ci_relative_width},
          {"stage1_runs", {{"min", spec.stage1.min}, {"max", spec.stage1.max}}},
          {"stage2_runs", {{"min", spec.stage2.min}, {"max", spec.stage2.max}}},
          {"check_every", spec.check_every},
          {"logistic_lambda", spec.logistic_lambda},
          {"error_pooling", spec.error_pooling == ErrorPooling::pooled ? "pooled" : "per_run_mean"},
          {"seed", spec.seed}};
}

nlohmann::ordered_json to_json(const EvaluationReport& r) {
  return {{"group", r.group},
          {"grouping", to_string(r.grouping)},
          {"rows", r.rows},
          {"input_dim", r.input_dim},
          {"expanded_length", expanded_length(r.spec, r.input_dim)},
          {"coefficient_count", coefficient_count(r.spec, r.input_dim)},
          {"stage1", stage_json(r.stage1)},
          {"stage2", stage_json(r.stage2.stage)},
          {"metrics",
           {{"r2", r.stage2.metrics.r2},
            {"pooled_r2", optional_number(r.stage2.metrics.pooled_r2)},
            {"mse", r.stage2.metrics.mse},
            {"mae", r.stage2.metrics.mae},
            {"medae", r.stage2.metrics.medae}}},
          {"model", model_json(r.spec, r.stage1.averaged_coefficients, r.input_dim)}};
}

nlohmann::ordered_json to_json(const Evaluation& ev) {
  nlohmann::ordered_json reports = nlohmann::ordered_json::array();
  for (const auto& r : ev.reports) reports.push_back(to_json(r));
  nlohmann::ordered_json skipped = nlohmann::ordered_json::array();
  for (const auto& s : ev.skipped) skipped.push_back({{"group", s.group}, {"reason", s.reason}});
  nlohmann::ordered_json j;
  j["spec"] = to_json(ev.spec);
  j["grouping"] = to_string(ev.grouping);
  j["reports"] = reports;
  j["skipped"] = skipped;
  return j;
}

}  // namespace qoe::pipeline
