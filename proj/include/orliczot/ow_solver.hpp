#pragma once

// Orlicz-Wasserstein distances between discrete measures.
//
//   W_Phi(a, b)          = inf { eta > 0 : min_Q sum_ij q_ij Phi(M_ij / eta) <= 1 }
//   W^lambda_Phi(a, b)   = inf { eta > 0 : g(eta) <= 1 },
//   g(eta)               = min_Q <Q, Phi(M / eta)> - H(Q) / lambda
//
// Both inner minima are nonincreasing in eta, so each distance is the root of a
// monotone scalar function. The entropic one is bracketed in closed form and
// refined by regula falsi; the exact one is bisected over an exact transport
// solver and serves as the small-instance oracle.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "orliczot/entropic_ot.hpp"
#include "orliczot/exact_ot.hpp"
#include "orliczot/measures.hpp"
#include "orliczot/orlicz.hpp"

namespace orliczot {

/// Largest transformed cost handed to a transport solver. Phi(M/eta) beyond
/// this is as good as infinite for any coupling that could reach g <= 1.
inline constexpr double kCostCap = 1e300;

/// Upper bound on k * k' for the exact solvers.
inline constexpr std::size_t kExactSizeLimit = 10000;

enum class SolveStatus { converged, degenerate_zero, max_iters };

inline const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::degenerate_zero:
      return "degenerate_zero";
    case SolveStatus::max_iters:
      return "max_iters";
  }
  return "unknown";
}

/// g(x_low) > 1 > g(x_upp); the distance lies in between.
struct BracketState {
  double x_low = 0.0;
  double x_upp = 0.0;
  double f_low = 0.0;
  double f_upp = 0.0;

  double width() const noexcept { return x_upp - x_low; }
};

struct SolveReport {
  double value = 0.0;
  TransportPlan plan;  // optimal plan at eta = value
  int iterations = 0;
  std::vector<BracketState> trace;
  SolveStatus status = SolveStatus::converged;
  double epsilon = 0.0;
  double objective = 0.0;     // inner objective at eta = value
  long inner_iterations = 0;  // total Sinkhorn sweeps, or exact OT solves
};

class SolveError : public std::runtime_error {
 public:
  SolveError(const std::string& what, SolveReport partial)
      : std::runtime_error(what), report_(std::move(partial)) {}
  const SolveReport& report() const noexcept { return report_; }

 private:
  SolveReport report_;
};

class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct EntropicOwOptions {
  double lambda = 1.0;
  double epsilon = 0.0;  // <= 0 selects 1e-6 * max(M)
  int max_outer = 200;
  SinkhornConfig sinkhorn{};  // lambda is overwritten by `lambda`
};

/// Phi(M / eta) entrywise, capped at kCostCap.
inline Matrix transformed_cost(const Matrix& m, const PhiFunction& phi, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("transformed_cost: eta must be > 0");
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      const double t = m(i, j) / eta;
      out(i, j) = std::isfinite(t) ? std::min(phi(t), kCostCap) : kCostCap;
    }
  return out;
}

inline double default_epsilon(double max_cost) { return 1e-6 * max_cost; }

namespace detail {

inline TransportPlan as_plan(Matrix m, const Vector& r, const Vector& c) {
  return TransportPlan{std::move(m), r, c};
}

}  // namespace detail

/// g(eta) = S(Phi(M / eta), lambda, r, c) for fixed (M, r, c, Phi, lambda).
///
/// Solves that stop early because the dual bound already exceeds 1 report that
/// bound as the objective: a certified g(eta) > 1 is all the bracket needs.
class EntropicObjective {
 public:
  EntropicObjective(Matrix cost, Vector r, Vector c, PhiFunction phi, SinkhornConfig cfg)
      : cost_(std::move(cost)), r_(std::move(r)), c_(std::move(c)), phi_(std::move(phi)), cfg_(cfg) {
    cfg_.certify_above = 1.0;
  }

  /// Throws ConvergenceError when the solve neither converged nor certified g > 1.
  SinkhornResult solve(double eta) {
    SinkhornResult res = sinkhorn(transformed_cost(cost_, phi_, eta), r_, c_, cfg_);
    total_iterations_ += res.iterations;
    if (res.certified_above) {
      res.objective = res.dual_objective;
      return res;
    }
    if (!res.converged)
      throw ConvergenceError("sinkhorn did not converge at eta = " + format_real(eta) + " after " +
                             std::to_string(res.iterations) + " iterations");
    return res;
  }

  double operator()(double eta) { return solve(eta).objective; }

  long total_iterations() const noexcept { return total_iterations_; }

 private:
  Matrix cost_;
  Vector r_;
  Vector c_;
  PhiFunction phi_;
  SinkhornConfig cfg_;
  long total_iterations_ = 0;
};

/// Entropic Orlicz-Wasserstein distance between two weight vectors over a
/// ground-cost matrix (rows: source atoms, columns: target atoms).
inline SolveReport solve_entropic_ow(const Matrix& ground, const Vector& r, const Vector& c,
                                     const PhiFunction& phi, const EntropicOwOptions& opts) {
  SinkhornConfig cfg = opts.sinkhorn;
  cfg.lambda = opts.lambda;
  cfg.validate();
  if (opts.max_outer < 1) throw std::invalid_argument("entropic OW: max_outer must be >= 1");

  // Drop zero-mass atoms; the plan is re-expanded at the end.
  const auto rows = detail::positive_support(r);
  const auto cols = detail::positive_support(c);
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  Vector rr(m.rows()), cc(m.cols());
  for (Eigen::Index i = 0; i < m.rows(); ++i) rr(i) = r(rows[i]);
  for (Eigen::Index j = 0; j < m.cols(); ++j) cc(j) = c(cols[j]);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = ground(rows[i], cols[j]);

  const double max_m = m.size() > 0 ? m.maxCoeff() : 0.0;
  SolveReport report;
  report.epsilon = opts.epsilon > 0.0 ? opts.epsilon : default_epsilon(max_m);

  const auto expand = [&](const Matrix& sub) {
    Matrix full = Matrix::Zero(r.size(), c.size());
    for (Eigen::Index j = 0; j < sub.cols(); ++j)
      for (Eigen::Index i = 0; i < sub.rows(); ++i) full(rows[i], cols[j]) = sub(i, j);
    return detail::as_plan(std::move(full), r, c);
  };

  if (max_m == 0.0) {
    const SinkhornResult flat = sinkhorn(Matrix::Zero(m.rows(), m.cols()), rr, cc, cfg);
    report.value = 0.0;
    report.status = SolveStatus::degenerate_zero;
    report.plan = expand(flat.plan.matrix);
    report.objective = flat.objective;
    report.inner_iterations = flat.iterations;
    return report;
  }

  EntropicObjective g(m, rr, cc, phi, cfg);
  const auto guarded = [&](double eta) {
    try {
      return g.solve(eta);
    } catch (const ConvergenceError& e) {
      report.inner_iterations = g.total_iterations();
      throw SolveError(e.what(), report);
    }
  };

  const double entropy_sum = shannon_entropy(rr) + shannon_entropy(cc);
  const SinkhornResult raw = sinkhorn(m, rr, cc, cfg);
  if (!raw.converged) throw SolveError("sinkhorn did not converge on the ground cost", report);

  BracketState b;
  b.x_upp = max_m / phi.inverse(1.0);
  SinkhornResult upper = guarded(b.x_upp);
  // g(x_upp) <= 1 holds exactly; equality (e.g. a single forced coupling)
  // means the root sits at x_upp itself, so widen once to get a strict bracket.
  for (int k = 0; upper.objective >= 1.0 && k < 64; ++k) {
    b.x_upp *= 2.0;
    upper = guarded(b.x_upp);
  }
  b.f_upp = upper.objective;

  b.x_low = (raw.objective + entropy_sum / (2.0 * opts.lambda)) / phi.inverse(1.0 + entropy_sum / opts.lambda);
  if (!(b.x_low > 1e-12 * b.x_upp)) b.x_low = 1e-12 * b.x_upp;
  b.x_low = std::min(b.x_low, 0.5 * b.x_upp);
  b.f_low = guarded(b.x_low).objective;
  while (!(b.f_low > 1.0)) {
    b.x_low /= 10.0;
    if (b.x_low < 1e-300) {
      report.value = 0.0;
      report.status = SolveStatus::degenerate_zero;
      report.plan = expand(upper.plan.matrix);
      report.objective = upper.objective;
      report.inner_iterations = g.total_iterations();
      return report;
    }
    b.f_low = guarded(b.x_low).objective;
  }
  report.trace.push_back(b);

  // Regula falsi on g - 1. Plain false position parks one end of the bracket
  // forever on convex g, so two consecutive moves of the same end force a
  // bisection step.
  int same_side = 0;
  int last_side = 0;  // -1 low moved, +1 upper moved
  report.status = SolveStatus::converged;
  while (b.width() > report.epsilon) {
    if (report.iterations >= opts.max_outer) {
      report.status = SolveStatus::max_iters;
      break;
    }
    const double lo_shift = b.f_low - 1.0;
    const double up_shift = b.f_upp - 1.0;
    double x_new = (b.x_low * up_shift - b.x_upp * lo_shift) / (up_shift - lo_shift);
    if (same_side >= 2 || !(x_new > b.x_low && x_new < b.x_upp)) {
      x_new = 0.5 * (b.x_low + b.x_upp);
      same_side = 0;
    }
    SinkhornResult at_new = guarded(x_new);
    const int side = at_new.objective < 1.0 ? 1 : -1;
    if (side > 0) {
      b.x_upp = x_new;
      b.f_upp = at_new.objective;
      upper = std::move(at_new);
    } else {
      b.x_low = x_new;
      b.f_low = at_new.objective;
    }
    same_side = side == last_side ? same_side + 1 : 1;
    last_side = side;
    ++report.iterations;
    report.trace.push_back(b);
  }

  report.value = b.x_upp;
  report.objective = b.f_upp;
  report.plan = expand(upper.plan.matrix);
  report.inner_iterations = g.total_iterations();
  return report;
}

inline SolveReport solve_entropic_ow(const DiscreteMeasure& src, const DiscreteMeasure& dst,
                                     const PhiFunction& phi, double lambda, double epsilon = 0.0) {
  EntropicOwOptions opts;
  opts.lambda = lambda;
  opts.epsilon = epsilon;
  if (!(lambda > 0.0)) throw std::invalid_argument("entropic OW: lambda must be > 0");
  if (epsilon < 0.0) throw std::invalid_argument("entropic OW: epsilon must be > 0");
  return solve_entropic_ow(cost_matrix(src, dst).entries, src.weights(), dst.weights(), phi, opts);
}

// ---------------------------------------------------------------------------
// Exact oracle

inline void check_exact_size(Eigen::Index rows, Eigen::Index cols) {
  if (static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols) > kExactSizeLimit)
    throw SizeError("exact solver limited to k * k' <= " + std::to_string(kExactSizeLimit) + ", got " +
                    std::to_string(rows) + " x " + std::to_string(cols));
}

struct ExactOwOptions {
  double epsilon = 0.0;  // <= 0 selects 1e-6 * max(M)
  int max_iters = 200;
};

/// Exact W_Phi by bisection on eta over exact transport solves. Returns the
/// feasible end of the final bracket, so value >= W_Phi and value - W_Phi <= epsilon.
inline SolveReport solve_exact_ow(const Matrix& m, const Vector& r, const Vector& c, const PhiFunction& phi,
                                  const ExactOwOptions& opts = {}) {
  check_exact_size(m.rows(), m.cols());
  const double max_m = m.size() > 0 ? m.maxCoeff() : 0.0;
  SolveReport report;
  report.epsilon = opts.epsilon > 0.0 ? opts.epsilon : default_epsilon(max_m);

  // Identical supports: transport at indicator cost 1{x_i != y_j} is free.
  const Matrix indicator = (m.array() > 0.0).cast<double>().matrix();
  const ExactTransport separation = solve_transport(indicator, r, c);
  ++report.inner_iterations;
  if (max_m == 0.0 || separation.cost <= 1e-14) {
    report.value = 0.0;
    report.status = SolveStatus::degenerate_zero;
    report.plan = detail::as_plan(separation.plan, r, c);
    return report;
  }

  const auto h = [&](double eta) {
    ++report.inner_iterations;
    return solve_transport(transformed_cost(m, phi, eta), r, c);
  };

  // Jensen: sum q Phi(M/eta) >= Phi(<q, M>/eta) >= Phi(W_1/eta), so W_1/Phi^{-1}(1)
  // is a lower bound; max(M)/Phi^{-1}(1) is feasible for every coupling.
  const double w1 = solve_transport(m, r, c).cost;
  ++report.inner_iterations;
  const double phi_inv_1 = phi.inverse(1.0);
  BracketState b;
  b.x_upp = max_m / phi_inv_1;
  b.x_low = std::min(w1 / phi_inv_1, b.x_upp);
  ExactTransport upper = h(b.x_upp);
  b.f_upp = upper.cost;
  b.f_low = h(b.x_low).cost;
  report.trace.push_back(b);

  report.status = SolveStatus::converged;
  while (b.width() > report.epsilon) {
    if (report.iterations >= opts.max_iters) {
      report.status = SolveStatus::max_iters;
      break;
    }
    const double mid = 0.5 * (b.x_low + b.x_upp);
    if (mid <= b.x_low || mid >= b.x_upp) break;
    ExactTransport at_mid = h(mid);
    if (at_mid.cost <= 1.0) {
      b.x_upp = mid;
      b.f_upp = at_mid.cost;
      upper = std::move(at_mid);
    } else {
      b.x_low = mid;
      b.f_low = at_mid.cost;
    }
    ++report.iterations;
    report.trace.push_back(b);
  }
  report.value = b.x_upp;
  report.objective = b.f_upp;
  report.plan = detail::as_plan(std::move(upper.plan), r, c);
  return report;
}

inline SolveReport solve_exact_ow(const DiscreteMeasure& src, const DiscreteMeasure& dst, const PhiFunction& phi,
                                  double epsilon = 0.0) {
  check_exact_size(static_cast<Eigen::Index>(src.size()), static_cast<Eigen::Index>(dst.size()));
  ExactOwOptions opts;
  opts.epsilon = epsilon;
  return solve_exact_ow(cost_matrix(src, dst).entries, src.weights(), dst.weights(), phi, opts);
}

/// Classical W_r = (min_Q sum q_ij M_ij^r)^(1/r), exactly.
inline double wasserstein_r(const DiscreteMeasure& src, const DiscreteMeasure& dst, double order) {
  if (!(order >= 1.0)) throw std::invalid_argument("wasserstein_r: order must be >= 1");
  check_exact_size(static_cast<Eigen::Index>(src.size()), static_cast<Eigen::Index>(dst.size()));
  const CostMatrix m = cost_matrix(src, dst);
  const Matrix powered = m.entries.array().pow(order).matrix();
  const double cost = solve_transport(powered, src.weights(), dst.weights()).cost;
  return std::pow(std::max(cost, 0.0), 1.0 / order);
}

}  // namespace orliczot
