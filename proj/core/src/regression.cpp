#include "qoe/regression.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "qoe/error.hpp"

namespace qoe::regression {

namespace {

void enumerate(std::size_t var, std::size_t dims, int remaining, std::vector<int>& current,
               std::vector<std::vector<int>>& out) {
  if (var + 1 == dims) {
    current[var] = remaining;
    out.push_back(current);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[var] = e;
    enumerate(var + 1, dims, remaining - e, current, out);
  }
  current[var] = 0;
}

}  // namespace

PolynomialBasis::PolynomialBasis(std::size_t input_dim, int degree) : input_dim_(input_dim), degree_(degree) {
  if (input_dim == 0) throw DimensionError("polynomial basis needs at least one input");
  if (degree < 1 || degree > kMaxDegree) throw RangeError("polynomial degree must be 1, 2 or 3");
  std::vector<int> current(input_dim, 0);
  for (int total = 0; total <= degree; ++total) enumerate(0, input_dim, total, current, monomials_);
  factors_.reserve(monomials_.size());
  for (const auto& mono : monomials_) {
    std::vector<Factor> f;
    for (std::size_t v = 0; v < mono.size(); ++v)
      if (mono[v] > 0) f.push_back({v, mono[v]});
    factors_.push_back(std::move(f));
  }
}

Eigen::VectorXd PolynomialBasis::expand(std::span<const double> x) const {
  if (x.size() != input_dim_)
    throw DimensionError("expected " + std::to_string(input_dim_) + " inputs, got " + std::to_string(x.size()));
  Eigen::VectorXd out(static_cast<Eigen::Index>(factors_.size()));
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    double v = 1.0;
    for (const auto& f : factors_[k])
      for (int p = 0; p < f.power; ++p) v *= x[f.var];
    out[static_cast<Eigen::Index>(k)] = v;
  }
  return out;
}

Eigen::MatrixXd PolynomialBasis::expand_rows(const Eigen::MatrixXd& inputs) const {
  if (static_cast<std::size_t>(inputs.cols()) != input_dim_)
    throw DimensionError("expected " + std::to_string(input_dim_) + " input columns, got " +
                         std::to_string(inputs.cols()));
  Eigen::MatrixXd out(inputs.rows(), static_cast<Eigen::Index>(size()));
  std::vector<double> row(input_dim_);
  for (Eigen::Index i = 0; i < inputs.rows(); ++i) {
    for (std::size_t v = 0; v < input_dim_; ++v) row[v] = inputs(i, static_cast<Eigen::Index>(v));
    out.row(i) = expand(row).transpose();
  }
  return out;
}

std::size_t monomial_count(std::size_t input_dim, int degree) {
  std::size_t c = 1;
  for (int k = 1; k <= degree; ++k) c = c * (input_dim + static_cast<std::size_t>(k)) / static_cast<std::size_t>(k);
  return c;
}

Eigen::VectorXd least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  if (design.rows() == 0 || design.cols() == 0) throw DimensionError("least squares on empty input");
  if (design.rows() != y.size()) throw DimensionError("design rows and target length differ");
  return design.completeOrthogonalDecomposition().solve(y);
}

LinearModel fit_linear(const PolynomialBasis& basis, const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  if (static_cast<std::size_t>(design.cols()) != basis.size())
    throw DimensionError("design width does not match the basis size");
  return LinearModel{basis, least_squares(design, y)};
}

int bound(double value) {
  if (!std::isfinite(value)) throw RangeError("cannot bound a non-finite prediction");
  const double r = std::round(value);
  return static_cast<int>(std::clamp(r, 1.0, static_cast<double>(kClassCount)));
}

std::vector<int> bound(std::span<const double> values) {
  std::vector<int> out;
  out.reserve(values.size());
  for (double v : values) out.push_back(bound(v));
  return out;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression.

namespace {

constexpr Eigen::Index K = kClassCount;

// Design with an appended intercept column.
Eigen::MatrixXd augment(const Eigen::MatrixXd& design) {
  Eigen::MatrixXd x(design.rows(), design.cols() + 1);
  x.leftCols(design.cols()) = design;
  x.col(design.cols()).setOnes();
  return x;
}

// Row-wise softmax probabilities and summed negative log-likelihood.
double softmax_loss(const Eigen::MatrixXd& scores, std::span<const int> y, Eigen::MatrixXd& probs) {
  probs.resize(scores.rows(), K);
  double loss = 0.0;
  for (Eigen::Index i = 0; i < scores.rows(); ++i) {
    const double mx = scores.row(i).maxCoeff();
    double z = 0.0;
    for (Eigen::Index a = 0; a < K; ++a) {
      probs(i, a) = std::exp(scores(i, a) - mx);
      z += probs(i, a);
    }
    probs.row(i) /= z;
    loss += mx + std::log(z) - scores(i, y[static_cast<std::size_t>(i)] - 1);
  }
  return loss;
}

double softmax_loss(const Eigen::MatrixXd& scores, std::span<const int> y) {
  Eigen::MatrixXd probs;
  return softmax_loss(scores, y, probs);
}

Eigen::MatrixXd one_hot(std::span<const int> y) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(y.size()), K);
  for (std::size_t i = 0; i < y.size(); ++i) m(static_cast<Eigen::Index>(i), y[i] - 1) = 1.0;
  return m;
}

struct Fit {
  Eigen::MatrixXd theta;  // K x (p + 1), intercept last
  SolverInfo info;
};

constexpr double kArmijo = 1e-4;
constexpr double kMinStep = 1e-14;

[[noreturn]] void fail(const char* solver, double gradient_norm) {
  throw ConvergenceError(std::string("logistic regression (") + solver +
                             ") did not converge; final gradient norm " + std::to_string(gradient_norm),
                         gradient_norm);
}

Fit newton_primal(const Eigen::MatrixXd& x, std::span<const int> y, const LogisticOptions& opt) {
  const Eigen::Index n = x.rows(), p = x.cols();
  const Eigen::MatrixXd targets = one_hot(y);
  Fit fit{Eigen::MatrixXd::Zero(K, p), {}};
  fit.info.method = SolverInfo::Method::newton_primal;

  Eigen::MatrixXd probs;
  auto objective = [&](const Eigen::MatrixXd& theta, Eigen::MatrixXd* pr) {
    const Eigen::MatrixXd s = x * theta.transpose();
    const double loss = pr ? softmax_loss(s, y, *pr) : softmax_loss(s, y);
    return loss + 0.5 * opt.lambda * theta.squaredNorm();
  };

  double f = objective(fit.theta, &probs);
  fit.info.objective_trace.push_back(f);
  Eigen::MatrixXd hessian(K * p, K * p);
  Eigen::VectorXd weights(n);

  double gnorm0 = 0.0;
  for (int it = 0;; ++it) {
    const Eigen::MatrixXd grad = (probs - targets).transpose() * x + opt.lambda * fit.theta;
    const double gnorm = grad.norm();
    if (it == 0) gnorm0 = gnorm;
    fit.info.iterations = it;
    fit.info.objective = f;
    fit.info.gradient_norm = gnorm;
    if (gnorm <= opt.tolerance * std::max(1.0, gnorm0)) return fit;
    if (it >= opt.max_newton_iterations) fail("newton", gnorm);

    for (Eigen::Index a = 0; a < K; ++a) {
      for (Eigen::Index b = a; b < K; ++b) {
        for (Eigen::Index i = 0; i < n; ++i) weights[i] = probs(i, a) * ((a == b ? 1.0 : 0.0) - probs(i, b));
        const Eigen::MatrixXd block = x.transpose() * weights.asDiagonal() * x;
        hessian.block(a * p, b * p, p, p) = block;
        if (a != b) hessian.block(b * p, a * p, p, p) = block.transpose();
      }
    }
    hessian.diagonal().array() += opt.lambda;

    // Jacobi scaling keeps the factorization stable for badly scaled monomials.
    Eigen::VectorXd g(K * p);
    for (Eigen::Index a = 0; a < K; ++a) g.segment(a * p, p) = grad.row(a).transpose();
    const Eigen::VectorXd scale = hessian.diagonal().cwiseSqrt().cwiseInverse();
    const Eigen::MatrixXd scaled = scale.asDiagonal() * hessian * scale.asDiagonal();
    const Eigen::VectorXd z = scaled.ldlt().solve(-scale.cwiseProduct(g));
    Eigen::VectorXd step = scale.cwiseProduct(z);
    double slope = g.dot(step);
    if (!(slope < 0.0) || !step.allFinite()) {
      step = -g;
      slope = -g.squaredNorm();
    }
    Eigen::MatrixXd dtheta(K, p);
    for (Eigen::Index a = 0; a < K; ++a) dtheta.row(a) = step.segment(a * p, p).transpose();

    double t = 1.0;
    while (true) {
      const Eigen::MatrixXd trial = fit.theta + t * dtheta;
      Eigen::MatrixXd trial_probs;
      const double ft = objective(trial, &trial_probs);
      if (ft <= f + kArmijo * t * slope) {
        fit.theta = trial;
        probs = std::move(trial_probs);
        f = ft;
        break;
      }
      t *= 0.5;
      if (t < kMinStep) fail("newton", gnorm);
    }
    fit.info.objective_trace.push_back(f);
  }
}

// Newton in the span of the training rows: theta = A^T x with A n x K. The
// regularized optimum always lies in that span, so this solves the same
// problem with n*K unknowns instead of K*(p+1).
Fit newton_dual(const Eigen::MatrixXd& x, std::span<const int> y, const LogisticOptions& opt) {
  const Eigen::Index n = x.rows();
  const Eigen::MatrixXd targets = one_hot(y);
  const Eigen::MatrixXd gram = x * x.transpose();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, K);
  Eigen::MatrixXd scores = Eigen::MatrixXd::Zero(n, K);
  Eigen::MatrixXd probs;

  Fit fit;
  fit.info.method = SolverInfo::Method::newton_dual;
  auto regularizer = [&](const Eigen::MatrixXd& coef, const Eigen::MatrixXd& s) {
    // trace(A^T G A) = sum of A .* (G A) = sum of A .* S
    return 0.5 * opt.lambda * coef.cwiseProduct(s).sum();
  };
  double f = softmax_loss(scores, y, probs) + regularizer(a, scores);
  fit.info.objective_trace.push_back(f);
  Eigen::MatrixXd jac(n * K, n * K);

  double gnorm0 = 0.0;
  for (int it = 0;; ++it) {
    const Eigen::MatrixXd residual = probs - targets + opt.lambda * a;
    const Eigen::MatrixXd primal_grad = residual.transpose() * x;
    const double gnorm = primal_grad.norm();
    if (it == 0) gnorm0 = gnorm;
    fit.info.iterations = it;
    fit.info.objective = f;
    fit.info.gradient_norm = gnorm;
    if (gnorm <= opt.tolerance * std::max(1.0, gnorm0)) {
      fit.theta = a.transpose() * x;
      return fit;
    }
    if (it >= opt.max_newton_iterations) fail("newton-dual", gnorm);

    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index c = 0; c < K; ++c)
        for (Eigen::Index j = 0; j < n; ++j)
          for (Eigen::Index b = 0; b < K; ++b)
            jac(i * K + c, j * K + b) = probs(i, c) * ((c == b ? 1.0 : 0.0) - probs(i, b)) * gram(i, j);
    jac.diagonal().array() += opt.lambda;

    Eigen::VectorXd rhs(n * K);
    for (Eigen::Index i = 0; i < n; ++i) rhs.segment(i * K, K) = -residual.row(i).transpose();
    const Eigen::VectorXd step = jac.partialPivLu().solve(rhs);
    Eigen::MatrixXd d(n, K);
    for (Eigen::Index i = 0; i < n; ++i) d.row(i) = step.segment(i * K, K).transpose();

    // Directional derivative of f along d is <G F, d>.
    const Eigen::MatrixXd gd = gram * d;
    double slope = residual.cwiseProduct(gd).sum();
    Eigen::MatrixXd dir = d, gdir = gd;
    if (!(slope < 0.0) || !step.allFinite()) {
      dir = -residual;
      gdir = gram * dir;
      slope = residual.cwiseProduct(gdir).sum();
      if (!(slope < 0.0)) fail("newton-dual", gnorm);
    }

    double t = 1.0;
    while (true) {
      const Eigen::MatrixXd trial_a = a + t * dir;
      const Eigen::MatrixXd trial_s = scores + t * gdir;
      Eigen::MatrixXd trial_probs;
      const double ft = softmax_loss(trial_s, y, trial_probs) + regularizer(trial_a, trial_s);
      if (ft <= f + kArmijo * t * slope) {
        a = trial_a;
        scores = trial_s;
        probs = std::move(trial_probs);
        f = ft;
        break;
      }
      t *= 0.5;
      if (t < kMinStep) fail("newton-dual", gnorm);
    }
    fit.info.objective_trace.push_back(f);
  }
}

Fit lbfgs(const Eigen::MatrixXd& x, std::span<const int> y, const LogisticOptions& opt) {
  const Eigen::Index p = x.cols();
  const Eigen::MatrixXd targets = one_hot(y);
  constexpr std::size_t kMemory = 10;

  auto evaluate = [&](const Eigen::VectorXd& theta_flat, Eigen::VectorXd& grad) {
    const Eigen::Map<const Eigen::Matrix<double, K, Eigen::Dynamic>> theta(theta_flat.data(), K, p);
    Eigen::MatrixXd probs;
    const double f = softmax_loss(x * theta.transpose(), y, probs) + 0.5 * opt.lambda * theta_flat.squaredNorm();
    Eigen::Matrix<double, K, Eigen::Dynamic> g = (probs - targets).transpose() * x + opt.lambda * theta;
    grad = Eigen::Map<const Eigen::VectorXd>(g.data(), K * p);
    return f;
  };

  Fit fit;
  fit.info.method = SolverInfo::Method::lbfgs;
  Eigen::VectorXd theta = Eigen::VectorXd::Zero(K * p);
  Eigen::VectorXd grad;
  double f = evaluate(theta, grad);
  fit.info.objective_trace.push_back(f);
  std::vector<Eigen::VectorXd> s_hist, y_hist;
  std::vector<double> rho_hist;

  double gnorm0 = 0.0;
  for (int it = 0;; ++it) {
    const double gnorm = grad.norm();
    if (it == 0) gnorm0 = gnorm;
    fit.info.iterations = it;
    fit.info.objective = f;
    fit.info.gradient_norm = gnorm;
    if (gnorm <= opt.tolerance * std::max(1.0, gnorm0)) break;
    if (it >= opt.max_lbfgs_iterations) fail("l-bfgs", gnorm);

    Eigen::VectorXd q = grad;
    std::vector<double> alpha(s_hist.size());
    for (std::size_t k = s_hist.size(); k-- > 0;) {
      alpha[k] = rho_hist[k] * s_hist[k].dot(q);
      q -= alpha[k] * y_hist[k];
    }
    if (!s_hist.empty()) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
    else q /= std::max(1.0, gnorm);
    for (std::size_t k = 0; k < s_hist.size(); ++k) {
      const double beta = rho_hist[k] * y_hist[k].dot(q);
      q += (alpha[k] - beta) * s_hist[k];
    }
    Eigen::VectorXd dir = -q;
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      dir = -grad / std::max(1.0, gnorm);
      slope = grad.dot(dir);
    }

    double t = 1.0;
    Eigen::VectorXd next, next_grad;
    double fn = 0.0;
    while (true) {
      next = theta + t * dir;
      fn = evaluate(next, next_grad);
      if (fn <= f + kArmijo * t * slope) break;
      t *= 0.5;
      if (t < kMinStep) fail("l-bfgs", gnorm);
    }
    Eigen::VectorXd s = next - theta, yk = next_grad - grad;
    const double sy = s.dot(yk);
    if (sy > 1e-12 * s.norm() * yk.norm()) {
      if (s_hist.size() == kMemory) {
        s_hist.erase(s_hist.begin());
        y_hist.erase(y_hist.begin());
        rho_hist.erase(rho_hist.begin());
      }
      s_hist.push_back(std::move(s));
      y_hist.push_back(std::move(yk));
      rho_hist.push_back(1.0 / sy);
    }
    theta = std::move(next);
    grad = std::move(next_grad);
    f = fn;
    fit.info.objective_trace.push_back(f);
  }
  fit.theta = Eigen::Map<const Eigen::Matrix<double, K, Eigen::Dynamic>>(theta.data(), K, p);
  return fit;
}

void check_classes(std::span<const int> y) {
  bool seen[kClassCount] = {};
  int distinct = 0;
  for (int c : y) {
    if (c < 1 || c > kClassCount) throw RangeError("class label " + std::to_string(c) + " outside 1..5");
    if (!seen[c - 1]) {
      seen[c - 1] = true;
      ++distinct;
    }
  }
  if (distinct < 2) throw DegenerateError("logistic regression needs at least two distinct classes");
}

Eigen::MatrixXd theta_of(const LogisticModel& m) {
  Eigen::MatrixXd theta(K, m.weights.cols() + 1);
  theta.leftCols(m.weights.cols()) = m.weights;
  theta.col(m.weights.cols()) = m.intercepts;
  return theta;
}

}  // namespace

LogisticModel fit_logistic(const PolynomialBasis& basis, const Eigen::MatrixXd& design, std::span<const int> y,
                           const LogisticOptions& options) {
  if (design.rows() == 0) throw DimensionError("logistic regression on empty input");
  if (design.rows() != static_cast<Eigen::Index>(y.size())) throw DimensionError("design rows and labels differ");
  if (static_cast<std::size_t>(design.cols()) != basis.size())
    throw DimensionError("design width does not match the basis size");
  if (!(options.lambda > 0.0)) throw RangeError("logistic regularization must be positive");
  check_classes(y);

  const Eigen::MatrixXd x = augment(design);
  const auto primal = static_cast<std::size_t>(K * x.cols());
  const auto dual = static_cast<std::size_t>(K * x.rows());
  Fit fit;
  if (std::min(primal, dual) > options.newton_max_unknowns) fit = lbfgs(x, y, options);
  else if (dual < primal) fit = newton_dual(x, y, options);
  else fit = newton_primal(x, y, options);

  LogisticModel m{basis, fit.theta.leftCols(design.cols()), fit.theta.col(design.cols()), std::move(fit.info)};
  return m;
}

double logistic_objective(const LogisticModel& model, const Eigen::MatrixXd& design, std::span<const int> y,
                          double lambda) {
  const Eigen::MatrixXd theta = theta_of(model);
  return softmax_loss(augment(design) * theta.transpose(), y) + 0.5 * lambda * theta.squaredNorm();
}

Eigen::VectorXd logistic_gradient(const LogisticModel& model, const Eigen::MatrixXd& design, std::span<const int> y,
                                  double lambda) {
  const Eigen::MatrixXd theta = theta_of(model);
  const Eigen::MatrixXd x = augment(design);
  Eigen::MatrixXd probs;
  softmax_loss(x * theta.transpose(), y, probs);
  const Eigen::MatrixXd g = (probs - one_hot(y)).transpose() * x + lambda * theta;
  return Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
}

double predict(const LinearModel& model, std::span<const double> x) {
  return model.basis.expand(x).dot(model.coefficients);
}

int predict_expanded(const LogisticModel& model, const Eigen::VectorXd& features) {
  if (features.size() != model.weights.cols()) throw DimensionError("feature length does not match the model");
  const Eigen::VectorXd s = model.weights * features + model.intercepts;
  Eigen::Index best = 0;
  for (Eigen::Index c = 1; c < K; ++c)
    if (s[c] > s[best]) best = c;
  return static_cast<int>(best) + 1;
}

int predict(const LogisticModel& model, std::span<const double> x) {
  return predict_expanded(model, model.basis.expand(x));
}

// ---------------------------------------------------------------------------
// IQX exponential fit.

double IqxModel::operator()(double qos) const { return alpha * std::exp(-beta * qos) + gamma; }

namespace {

double iqx_ssr(std::span<const double> qos, std::span<const double> qoe, const Eigen::Vector3d& theta) {
  double ssr = 0.0;
  for (std::size_t i = 0; i < qos.size(); ++i) {
    const double r = theta[0] * std::exp(-theta[1] * qos[i]) + theta[2] - qoe[i];
    ssr += r * r;
  }
  return ssr;
}

IqxModel levenberg_marquardt(std::span<const double> qos, std::span<const double> qoe, double beta0,
                             const IqxOptions& opt) {
  const auto n = static_cast<Eigen::Index>(qos.size());
  Eigen::MatrixXd basis(n, 2);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis(i, 0) = std::exp(-beta0 * qos[static_cast<std::size_t>(i)]);
    basis(i, 1) = 1.0;
    y[i] = qoe[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d linear = basis.colPivHouseholderQr().solve(y);
  Eigen::Vector3d theta(linear[0], beta0, linear[1]);
  double ssr = iqx_ssr(qos, qoe, theta);

  double mu = 1e-3;
  Eigen::Vector3d diag_scale = Eigen::Vector3d::Zero();
  Eigen::MatrixXd aug(n + 3, 3);
  Eigen::VectorXd rhs(n + 3);
  IqxModel out;
  int it = 0;
  for (; it < opt.max_iterations && ssr > 0.0; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double x = qos[static_cast<std::size_t>(i)];
      const double e = std::exp(-theta[1] * x);
      aug(i, 0) = e;
      aug(i, 1) = -theta[0] * x * e;
      aug(i, 2) = 1.0;
      rhs[i] = -(theta[0] * e + theta[2] - y[i]);
    }
    for (Eigen::Index k = 0; k < 3; ++k) diag_scale[k] = std::max(diag_scale[k], aug.col(k).head(n).norm());

    bool accepted = false;
    while (!accepted) {
      aug.bottomRows(3).setZero();
      for (Eigen::Index k = 0; k < 3; ++k) aug(n + k, k) = std::sqrt(mu) * diag_scale[k];
      rhs.tail(3).setZero();
      const Eigen::Vector3d step = aug.colPivHouseholderQr().solve(rhs);
      if (!step.allFinite()) break;
      if (step.norm() < opt.step_tolerance) {
        out.step_converged = true;
        break;
      }
      const Eigen::Vector3d trial = theta + step;
      const double trial_ssr = iqx_ssr(qos, qoe, trial);
      if (std::isfinite(trial_ssr) && trial_ssr < ssr) {
        theta = trial;
        ssr = trial_ssr;
        mu = std::max(mu / 10.0, 1e-15);
        accepted = true;
      } else {
        mu *= 10.0;
        if (mu > 1e20) {
          out.step_converged = true;
          break;
        }
      }
    }
    if (!accepted) break;
  }
  if (ssr == 0.0) out.step_converged = true;
  out.alpha = theta[0];
  out.beta = theta[1];
  out.gamma = theta[2];
  out.residual_sum_squares = ssr;
  out.iterations = it;
  return out;
}

}  // namespace

IqxModel fit_iqx(std::span<const double> qos, std::span<const double> qoe, const IqxOptions& options) {
  if (qos.size() != qoe.size()) throw DimensionError("iqx: qos and qoe lengths differ");
  if (qos.size() < 4) throw DimensionError("iqx: need at least 4 points");
  const auto [lo, hi] = std::minmax_element(qos.begin(), qos.end());
  if (*lo == *hi) throw DegenerateError("iqx: qos is constant");

  IqxModel best;
  bool found = false;
  double best_finite = std::numeric_limits<double>::infinity();
  for (double beta0 : options.beta_starts) {
    const IqxModel m = levenberg_marquardt(qos, qoe, beta0, options);
    const bool finite = std::isfinite(m.alpha) && std::isfinite(m.beta) && std::isfinite(m.gamma) &&
                        std::isfinite(m.residual_sum_squares);
    if (!finite) continue;
    if (!found || m.residual_sum_squares < best.residual_sum_squares) {
      best = m;
      found = true;
    }
    best_finite = std::min(best_finite, m.residual_sum_squares);
  }
  if (!found) throw ConvergenceError("iqx: no start produced finite parameters", best_finite);
  return best;
}

// ---------------------------------------------------------------------------

nlohmann::ordered_json to_json(const PolynomialBasis& basis) {
  return {{"input_dim", basis.input_dim()},
          {"degree", basis.degree()},
          {"monomial_order", "graded-lexicographic"},
          {"monomial_count", basis.size()}};
}

namespace {

const char* method_name(SolverInfo::Method m) {
  switch (m) {
    case SolverInfo::Method::newton_primal: return "newton-primal";
    case SolverInfo::Method::newton_dual: return "newton-dual";
    case SolverInfo::Method::lbfgs: return "l-bfgs";
  }
  return "unknown";
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

nlohmann::ordered_json to_json(const LinearModel& model) {
  return {{"kind", "linear"}, {"basis", to_json(model.basis)}, {"coefficients", to_vector(model.coefficients)}};
}

nlohmann::ordered_json to_json(const LogisticModel& model) {
  nlohmann::ordered_json classes = nlohmann::ordered_json::array();
  for (Eigen::Index c = 0; c < model.weights.rows(); ++c)
    classes.push_back({{"class", c + 1},
                       {"intercept", model.intercepts[c]},
                       {"weights", to_vector(model.weights.row(c).transpose())}});
  return {{"kind", "logistic"},
          {"basis", to_json(model.basis)},
          {"coefficient_count", model.coefficient_count()},
          {"classes", classes},
          {"solver",
           {{"method", method_name(model.info.method)},
            {"iterations", model.info.iterations},
            {"final_objective", model.info.objective},
            {"gradient_norm", model.info.gradient_norm}}}};
}

nlohmann::ordered_json to_json(const IqxModel& model) {
  return {{"alpha", model.alpha},
          {"beta", model.beta},
          {"gamma", model.gamma},
          {"residual_sum_squares", model.residual_sum_squares},
          {"iterations", model.iterations},
          {"step_converged", model.step_converged}};
}

}  // namespace qoe::regression
