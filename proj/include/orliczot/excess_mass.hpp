#pragma once

// Excess (outlier) mass of a mixing measure relative to a reference, and the
// tail bounds it obeys in terms of W_Phi:
//
//   mass{ atoms of g farther than eta from every atom of g0 } <= 1 / Phi(eta / W_Phi(g, g0))
//
// and, for Phi dominating exp(x) - 1 in the tail, the cruder 2 exp(-eta / W_Phi).

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "orliczot/measures.hpp"
#include "orliczot/orlicz.hpp"

namespace orliczot {

/// Indices of atoms of g at distance strictly greater than eta from every atom of g0.
inline std::vector<std::size_t> outlier_atoms(const DiscreteMeasure& g, const DiscreteMeasure& g0, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("outlier mass: eta must be > 0");
  if (g.dim() != g0.dim()) throw std::invalid_argument("outlier mass: dimension mismatch");
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < g.atoms().rows(); ++i) {
    bool far = true;
    for (Eigen::Index k = 0; k < g0.atoms().rows() && far; ++k)
      far = (g.atoms().row(i) - g0.atoms().row(k)).norm() > eta;
    if (far) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

inline double outlier_mass(const DiscreteMeasure& g, const DiscreteMeasure& g0, double eta) {
  double mass = 0.0;
  for (const std::size_t i : outlier_atoms(g, g0, eta)) mass += g.weights()(static_cast<Eigen::Index>(i));
  return std::min(mass, 1.0);
}

struct BoundValue {
  double value = 0.0;
  bool infinite = false;  // Phi(eta / w) == 0, bound is vacuous
};

/// 1 / Phi(eta / w) where w is W_Phi(g, g0) or any upper estimate of it.
inline BoundValue tail_bound(const PhiFunction& phi, double eta, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("excess bound: w must be > 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("excess bound: eta must be >= 0");
  const double p = phi(eta / w);
  if (!(p > 0.0)) return {std::numeric_limits<double>::infinity(), true};
  return {1.0 / p, false};
}

/// 2 exp(-eta / w).
inline double exp_tail_bound(double eta, double w) {
  if (!(w > 0.0)) throw std::invalid_argument("excess bound: w must be > 0");
  return 2.0 * std::exp(-eta / w);
}

struct ExcessMassReport {
  double eta = 0.0;
  double outlier_mass = 0.0;
  double tail_bound = 0.0;
  bool tail_infinite = false;
  double exp_tail_bound = 0.0;
  double w_phi_used = 0.0;
  bool w_is_exact = false;
  std::vector<std::size_t> outlier_atom_indices;
  bool violation = false;  // only ever set when w_is_exact
};

inline ExcessMassReport excess_mass_report(const DiscreteMeasure& g, const DiscreteMeasure& g0,
                                           const PhiFunction& phi, double eta, double w, bool w_is_exact) {
  ExcessMassReport rep;
  rep.eta = eta;
  rep.outlier_atom_indices = outlier_atoms(g, g0, eta);
  rep.outlier_mass = outlier_mass(g, g0, eta);
  rep.w_phi_used = w;
  rep.w_is_exact = w_is_exact;
  if (w > 0.0) {
    const BoundValue b = tail_bound(phi, eta, w);
    rep.tail_bound = b.value;
    rep.tail_infinite = b.infinite;
    rep.exp_tail_bound = exp_tail_bound(eta, w);
  } else {
    // W = 0: g == g0 on supports, so nothing can be an outlier.
    rep.tail_bound = 0.0;
    rep.exp_tail_bound = 0.0;
  }
  rep.violation = w_is_exact && !rep.tail_infinite && rep.outlier_mass > rep.tail_bound + 1e-9;
  return rep;
}

inline nlohmann::json to_json(const ExcessMassReport& r) {
  nlohmann::json j;
  j["eta"] = r.eta;
  j["outlier_mass"] = r.outlier_mass;
  j["tail_bound"] = r.tail_infinite ? nlohmann::json("inf") : nlohmann::json(r.tail_bound);
  j["exp_tail_bound"] = r.exp_tail_bound;
  j["w_phi_used"] = r.w_phi_used;
  j["w_source"] = r.w_is_exact ? "exact" : "entropic";
  j["outlier_atom_indices"] = r.outlier_atom_indices;
  j["violation"] = r.violation;
  return j;
}

}  // namespace orliczot
