#pragma once

// Fitting primitives: polynomial basis expansion, least squares, Likert
// bounding, L2-regularized multinomial logistic regression, and the
// exponential QoS->QoE (IQX) curve.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace qoe::regression {

inline constexpr int kClassCount = 5;
inline constexpr int kMaxDegree = 3;

// All monomials of total degree <= d in m variables, graded
// lexicographic: constant first, then degree 1 (x1, ..., xm), then
// degree 2 (x1^2, x1 x2, ..., xm^2), ...
class PolynomialBasis {
 public:
  PolynomialBasis(std::size_t input_dim, int degree);

  std::size_t input_dim() const noexcept { return input_dim_; }
  int degree() const noexcept { return degree_; }
  std::size_t size() const noexcept { return monomials_.size(); }
  const std::vector<std::vector<int>>& monomials() const noexcept { return monomials_; }

  // Throws DimensionError when x.size() != input_dim().
  Eigen::VectorXd expand(std::span<const double> x) const;
  // Row-wise expansion of an n x m input matrix.
  Eigen::MatrixXd expand_rows(const Eigen::MatrixXd& inputs) const;

  bool operator==(const PolynomialBasis&) const = default;

 private:
  struct Factor {
    std::size_t var;
    int power;
  };

  std::size_t input_dim_;
  int degree_;
  std::vector<std::vector<int>> monomials_;
  std::vector<std::vector<Factor>> factors_;
};

// C(m + d, d).
std::size_t monomial_count(std::size_t input_dim, int degree);

struct LinearModel {
  PolynomialBasis basis;
  Eigen::VectorXd coefficients;
};

// Least-squares coefficients for already-expanded rows; the minimum-norm
// solution when the system is rank deficient. Throws DimensionError on
// empty or mismatched input.
Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y);
LinearModel fit_linear(const PolynomialBasis& basis, const Eigen::MatrixXd& design, const Eigen::VectorXd& y);

// Round half away from zero, then clamp to the 1..5 Likert range.
int bound(double value);
std::vector<int> bound(std::span<const double> values);

struct SolverInfo {
  enum class Method { newton_primal, newton_dual, lbfgs };
  Method method = Method::newton_primal;
  int iterations = 0;
  double objective = 0.0;
  double gradient_norm = 0.0;
  std::vector<double> objective_trace;
};

// Per-class weights over the expanded basis plus a per-class intercept;
// class c (1..5) lives in row c-1.
struct LogisticModel {
  PolynomialBasis basis;
  Eigen::MatrixXd weights;     // kClassCount x basis.size()
  Eigen::VectorXd intercepts;  // kClassCount
  SolverInfo info;

  std::size_t coefficient_count() const noexcept {
    return static_cast<std::size_t>(weights.size() + intercepts.size());
  }
};

struct LogisticOptions {
  double lambda = 1.0;
  double tolerance = 1e-6;  // gradient norm relative to max(1, initial gradient norm)
  int max_newton_iterations = 200;
  int max_lbfgs_iterations = 20000;
  // Newton is used while the smaller of the primal and dual systems has at
  // most this many unknowns; L-BFGS otherwise.
  std::size_t newton_max_unknowns = 800;
};

// Minimizes sum_i [logsumexp(s_i) - s_i,y_i] + lambda/2 (|W|^2 + |b|^2) with
// s_i = W x_i + b. Classes must be in 1..5 (RangeError); fewer than two
// distinct classes is DegenerateError; hitting the iteration cap throws
// ConvergenceError carrying the final gradient norm.
LogisticModel fit_logistic(const PolynomialBasis& basis, const Eigen::MatrixXd& design, std::span<const int> y,
                           const LogisticOptions& options = {});

// Multinomial negative log-likelihood plus the L2 term, for verification.
double logistic_objective(const LogisticModel& model, const Eigen::MatrixXd& design, std::span<const int> y,
                          double lambda);
Eigen::VectorXd logistic_gradient(const LogisticModel& model, const Eigen::MatrixXd& design, std::span<const int> y,
                                  double lambda);

double predict(const LinearModel& model, std::span<const double> x);
// Argmax class score; ties go to the lower class.
int predict(const LogisticModel& model, std::span<const double> x);
int predict_expanded(const LogisticModel& model, const Eigen::VectorXd& features);

// QoE = alpha * exp(-beta * QoS) + gamma.
struct IqxModel {
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;
  double residual_sum_squares = 0.0;
  int iterations = 0;
  bool step_converged = false;  // false when the best start ran to the iteration cap

  double operator()(double qos) const;
};

struct IqxOptions {
  std::vector<double> beta_starts{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  int max_iterations = 500;
  double step_tolerance = 1e-10;
};

// Damped Gauss-Newton (Levenberg-Marquardt) from each beta start, with
// alpha/gamma initialized by linear least squares at that beta. Returns the
// start with the smallest residual. Throws DimensionError for < 4 points or
// mismatched lengths, DegenerateError for constant qos, ConvergenceError
// when no start yields finite parameters.
IqxModel fit_iqx(std::span<const double> qos, std::span<const double> qoe, const IqxOptions& options = {});

nlohmann::ordered_json to_json(const PolynomialBasis& basis);
nlohmann::ordered_json to_json(const LinearModel& model);
nlohmann::ordered_json to_json(const LogisticModel& model);
nlohmann::ordered_json to_json(const IqxModel& model);

}  // namespace qoe::regression
