#pragma once

// Entropically regularized optimal transport,
//
//   min_P <P, C> - H(P) / lambda   over couplings P of (r, c),
//
// solved by Sinkhorn iterations on log-domain dual potentials. The optimal
// plan has the Gibbs form P_ij = exp(f_i + g_j - lambda C_ij), so costs with
// lambda * C in the thousands never touch an underflowing kernel.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "orliczot/measures.hpp"

namespace orliczot {

struct SinkhornConfig {
  double lambda = 1.0;  // inverse regularization strength
  long max_iters = 100000;
  double tol = 1e-9;  // marginal violation at which iterations stop
  // Anneal lambda upward from a smooth start when lambda * cost range is large.
  bool scaling = true;
  // Stop early once the dual bound proves the objective exceeds this value.
  std::optional<double> certify_above{};

  void validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("sinkhorn: lambda must be > 0");
    if (!(tol > 0.0)) throw std::invalid_argument("sinkhorn: tol must be > 0");
    if (max_iters < 1) throw std::invalid_argument("sinkhorn: max_iters must be >= 1");
  }
};

struct SinkhornResult {
  TransportPlan plan;
  double objective = 0.0;       // transport_cost - entropy / lambda
  double transport_cost = 0.0;  // <P, C>
  double entropy = 0.0;         // H(P)
  // Weak-duality lower bound on the optimal objective from the last potentials.
  double dual_objective = -std::numeric_limits<double>::infinity();
  bool converged = false;
  // Stopped because dual_objective > certify_above; plan is then approximate.
  bool certified_above = false;
  long iterations = 0;
  double violation = 0.0;
};

class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

// log(sum_k exp(a_k + b_k)) over two contiguous arrays.
inline double log_sum_exp_shifted(const double* a, const double* b, Eigen::Index n) {
  double m = -std::numeric_limits<double>::infinity();
  for (Eigen::Index k = 0; k < n; ++k) m = std::max(m, a[k] + b[k]);
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) s += std::exp(a[k] + b[k] - m);
  return m + std::log(s);
}

inline void check_marginal(const Vector& w, const char* name) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    if (!(w(i) >= 0.0) || !std::isfinite(w(i)))
      throw std::invalid_argument(std::string("sinkhorn: ") + name + " has a negative or non-finite entry");
    total += w(i);
  }
  if (std::abs(total - 1.0) > 1e-8)
    throw std::invalid_argument(std::string("sinkhorn: ") + name + " does not sum to 1");
}

inline std::vector<Eigen::Index> positive_support(const Vector& w) {
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < w.size(); ++i)
    if (w(i) > 0.0) idx.push_back(i);
  return idx;
}

}  // namespace detail

/// Solves the entropic problem for `cost` with marginals r (rows) and c (columns).
///
/// Zero-mass rows and columns are removed before iterating and re-inserted as
/// zeros in the returned plan. Non-convergence within max_iters is reported
/// through `converged`, never hidden.
inline SinkhornResult sinkhorn(const Matrix& cost, const Vector& r, const Vector& c, const SinkhornConfig& cfg) {
  cfg.validate();
  if (cost.rows() != r.size() || cost.cols() != c.size())
    throw std::invalid_argument("sinkhorn: cost shape does not match marginals");
  for (Eigen::Index j = 0; j < cost.cols(); ++j)
    for (Eigen::Index i = 0; i < cost.rows(); ++i) {
      const double v = cost(i, j);
      if (std::isnan(v)) throw std::invalid_argument("sinkhorn: NaN in cost");
      if (!std::isfinite(v) || v < 0.0) throw std::invalid_argument("sinkhorn: cost entries must be finite and >= 0");
    }
  detail::check_marginal(r, "row marginal");
  detail::check_marginal(c, "column marginal");

  const auto rows = detail::positive_support(r);
  const auto cols = detail::positive_support(c);
  const auto m = static_cast<Eigen::Index>(rows.size());
  const auto n = static_cast<Eigen::Index>(cols.size());

  // Work with C'_ij = C_ij - a_i - b_j, a and b the row and column minima. The
  // shift leaves the optimal plan unchanged and anchors every row and column
  // of C' at 0, so huge costs lose no precision. Plans are
  // P_ij = exp(lambda (phi_i + psi_j - C'_ij)) with potentials in cost units.
  Matrix shifted(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) shifted(i, j) = cost(rows[i], cols[j]);
  Vector row_shift(m), col_shift(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    row_shift(i) = shifted.row(i).minCoeff();
    shifted.row(i).array() -= row_shift(i);
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    col_shift(j) = shifted.col(j).minCoeff();
    shifted.col(j).array() -= col_shift(j);
  }
  const Matrix shifted_t = shifted.transpose();

  Vector rr(m), cc(n), log_r(m), log_c(n);
  for (Eigen::Index i = 0; i < m; ++i) {
    rr(i) = r(rows[i]);
    log_r(i) = std::log(rr(i));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    cc(j) = c(cols[j]);
    log_c(j) = std::log(cc(j));
  }
  const double shift_constant = rr.dot(row_shift) + cc.dot(col_shift);

  // Regularization schedule: lambda_0 * range ~ kSmoothStart, doubling up to lambda.
  // At most kMaxHalvings: entries beyond that (capped overflow costs) simply vanish from the kernel,
  // whereas smoothing over them would inflate the potentials until cancellation eats all precision.
  constexpr double kSmoothStart = 32.0;
  constexpr std::size_t kMaxHalvings = 30;
  std::vector<double> schedule;
  const double range = shifted.size() > 0 ? shifted.maxCoeff() : 0.0;
  if (cfg.scaling && cfg.lambda * range > kSmoothStart) {
    for (double l = cfg.lambda; l * range > kSmoothStart && schedule.size() < kMaxHalvings; l *= 0.5)
      schedule.push_back(l);
    schedule.push_back(schedule.back() * 0.5);
    std::reverse(schedule.begin(), schedule.end());
  } else {
    schedule.push_back(cfg.lambda);
  }

  // A hair below tol so the violation recomputed from the assembled plan,
  // which sums in a different order, still lands at or under tol.
  const double final_tol = cfg.tol * (1.0 - 1e-6);
  constexpr double kStageTol = 1e-6;

  Vector phi = Vector::Zero(m);
  Vector psi = Vector::Zero(n);
  Vector work_m(m), work_n(n), lse(m);

  SinkhornResult res;
  long it = 0;
  bool budget_left = true;
  for (std::size_t stage = 0; stage < schedule.size() && budget_left && !res.certified_above; ++stage) {
    const double lam = schedule[stage];
    const bool last = stage + 1 == schedule.size();
    const double stage_tol = last ? final_tol : std::max(final_tol, kStageTol);
    bool updated = false;
    for (;;) {
      work_n = lam * psi;
      for (Eigen::Index i = 0; i < m; ++i) {
        double mx = -std::numeric_limits<double>::infinity();
        const double* row = &shifted_t(0, i);
        for (Eigen::Index j = 0; j < n; ++j) mx = std::max(mx, work_n(j) - lam * row[j]);
        double s = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) s += std::exp(work_n(j) - lam * row[j] - mx);
        lse(i) = mx + std::log(s);
      }
      if (updated) {
        double viol = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) viol = std::max(viol, std::abs(std::exp(lam * phi(i) + lse(i)) - rr(i)));
        if (viol <= stage_tol) {
          if (last) res.converged = true;
          break;
        }
      }
      if (it >= cfg.max_iters) {
        budget_left = false;
        break;
      }
      phi = (log_r - lse) / lam;
      work_m = lam * phi;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double* col = &shifted(0, j);
        double mx = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < m; ++i) mx = std::max(mx, work_m(i) - lam * col[i]);
        double s = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) s += std::exp(work_m(i) - lam * col[i] - mx);
        psi(j) = (log_c(j) - mx - std::log(s)) / lam;
      }
      updated = true;
      ++it;
      // Columns are now exact, so the dual value of the lam-problem reduces to
      // <r, phi> + <c, psi>; it lower-bounds the objective at lam and hence
      // at every larger lambda.
      res.dual_objective = std::max(res.dual_objective, rr.dot(phi) + cc.dot(psi) + shift_constant);
      if (cfg.certify_above && res.dual_objective > *cfg.certify_above) {
        res.certified_above = true;
        break;
      }
    }
  }
  res.iterations = it;

  const double lam = cfg.lambda;
  res.plan.matrix = Matrix::Zero(r.size(), c.size());
  res.plan.row_marginal = r;
  res.plan.col_marginal = c;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) {
      const double p = std::exp(lam * (phi(i) + psi(j) - shifted(i, j)));
      res.plan.matrix(rows[i], cols[j]) = p;
      if (p > 0.0) {
        res.transport_cost += p * cost(rows[i], cols[j]);
        res.entropy -= p * std::log(p);
      }
    }
  res.objective = res.transport_cost - res.entropy / lam;
  res.violation = marginal_violation(res.plan);
  res.converged = res.converged && res.violation <= cfg.tol;
  return res;
}

/// The scalar S(C, lambda, r, c) = min <P, C> - H(P)/lambda. Throws
/// ConvergenceError when the underlying solve did not converge.
inline double regularized_objective(const Matrix& cost, const Vector& r, const Vector& c,
                                    const SinkhornConfig& cfg) {
  const SinkhornResult res = sinkhorn(cost, r, c, cfg);
  if (!res.converged)
    throw ConvergenceError("sinkhorn did not converge in " + std::to_string(res.iterations) +
                           " iterations (violation " + std::to_string(res.violation) + ")");
  return res.objective;
}

}  // namespace orliczot
