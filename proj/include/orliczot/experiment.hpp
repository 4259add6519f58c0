#pragma once

// Outlier-transport experiment: sample a Gaussian 3-mixture and a Laplace
// 4-mixture with a light component at 6, then compare the entropic W1 plan
// with the entropic Orlicz-Wasserstein plan on the same samples.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <vector>

#include "orliczot/entropic_ot.hpp"
#include "orliczot/measures.hpp"
#include "orliczot/mixtures.hpp"
#include "orliczot/ow_solver.hpp"

namespace orliczot {

/// splitmix64 finalizer applied to seed + stream * golden ratio; gives each
/// sampled measure its own reproducible stream.
inline Seed derive_seed(Seed seed, std::uint64_t stream) {
  std::uint64_t z = seed + (stream + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Index of the component mean closest to x (lowest index on ties).
inline std::size_t nearest_component(const MixtureSpec& spec, const Point& x) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < spec.components(); ++k) {
    double d = 0.0;
    for (std::size_t c = 0; c < x.size(); ++c) d += (x[c] - spec.means[k][c]) * (x[c] - spec.means[k][c]);
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  return best;
}

/// Lightest component of a mixture; for the Laplace 4-mixture, the one at 6.
inline std::size_t lightest_component(const MixtureSpec& spec) {
  std::size_t k = 0;
  for (std::size_t i = 1; i < spec.components(); ++i)
    if (spec.weights[i] < spec.weights[k]) k = i;
  return k;
}

/// Target atoms assigned (by nearest mean) to the given component.
inline std::vector<std::size_t> component_atoms(const MixtureSpec& spec, const DiscreteMeasure& samples,
                                                std::size_t component) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < samples.size(); ++j)
    if (nearest_component(spec, samples.atom(j)) == component) out.push_back(j);
  return out;
}

/// Total plan mass into the given columns. Always equals their column
/// marginal for a feasible plan.
inline double column_mass(const Matrix& plan, const std::vector<std::size_t>& columns) {
  double total = 0.0;
  for (const std::size_t j : columns) total += plan.col(static_cast<Eigen::Index>(j)).sum();
  return total;
}

/// Mass into `columns` that is spread across sources: sum over rows of
/// min(mass row i sends into the columns, mass row i sends elsewhere). A plan
/// that feeds the columns from sources dedicated to them scores 0; the product
/// coupling scores the full column mass whenever that is below 1/2.
inline double spread_mass(const Matrix& plan, const std::vector<std::size_t>& columns) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < plan.rows(); ++i) {
    double inside = 0.0;
    for (const std::size_t j : columns) inside += plan(i, static_cast<Eigen::Index>(j));
    const double outside = plan.row(i).sum() - inside;
    total += std::min(inside, std::max(outside, 0.0));
  }
  return total;
}

struct SimulationConfig {
  Seed seed = 1;
  std::size_t n_samples = 300;
  double lambda = 0.01;
  PhiFunction phi = PhiFunction::exp_linear(1.1);
  double epsilon = 0.0;  // <= 0 selects the relative default
  MixtureSpec source = normal_three_mixture();
  MixtureSpec target = laplace_four_mixture();
};

struct SimulationResult {
  DiscreteMeasure source;
  DiscreteMeasure target;
  SinkhornResult w1;
  SolveReport ow;
  std::vector<std::size_t> outlier_columns;
  double w1_outlier_mass = 0.0;  // spread_mass over outlier columns
  double ow_outlier_mass = 0.0;
  double w1_outlier_column_mass = 0.0;  // column_mass, identical for both plans
  double ow_outlier_column_mass = 0.0;
};

inline SimulationResult run_simulation(const SimulationConfig& cfg) {
  SimulationResult out{sample(cfg.source, cfg.n_samples, derive_seed(cfg.seed, 0)),
                       sample(cfg.target, cfg.n_samples, derive_seed(cfg.seed, 1)),
                       {},
                       {},
                       {}};
  const CostMatrix m = cost_matrix(out.source, out.target);

  SinkhornConfig w1_cfg;
  w1_cfg.lambda = cfg.lambda;
  out.w1 = sinkhorn(m.entries, out.source.weights(), out.target.weights(), w1_cfg);
  if (!out.w1.converged) throw ConvergenceError("entropic W1 plan did not converge");

  EntropicOwOptions ow_opts;
  ow_opts.lambda = cfg.lambda;
  ow_opts.epsilon = cfg.epsilon;
  out.ow = solve_entropic_ow(m.entries, out.source.weights(), out.target.weights(), cfg.phi, ow_opts);

  out.outlier_columns = component_atoms(cfg.target, out.target, lightest_component(cfg.target));
  out.w1_outlier_mass = spread_mass(out.w1.plan.matrix, out.outlier_columns);
  out.ow_outlier_mass = spread_mass(out.ow.plan.matrix, out.outlier_columns);
  out.w1_outlier_column_mass = column_mass(out.w1.plan.matrix, out.outlier_columns);
  out.ow_outlier_column_mass = column_mass(out.ow.plan.matrix, out.outlier_columns);
  return out;
}

}  // namespace orliczot
