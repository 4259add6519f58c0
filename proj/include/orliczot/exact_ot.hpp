#pragma once

// Exact discrete optimal transport (the transportation problem) by successive
// shortest augmenting paths with Johnson potentials. Dense Dijkstra over the
// bipartite residual graph; meant for desk-scale instances.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "orliczot/measures.hpp"

namespace orliczot {

struct ExactTransport {
  Matrix plan;
  double cost = 0.0;
  // Dual certificate: row_dual(i) + col_dual(j) <= C_ij everywhere, with
  // equality wherever plan(i, j) > 0.
  Vector row_dual;
  Vector col_dual;
  long augmentations = 0;
};

inline ExactTransport solve_transport(const Matrix& cost, const Vector& r, const Vector& c) {
  const Eigen::Index m = cost.rows();
  const Eigen::Index n = cost.cols();
  if (r.size() != m || c.size() != n) throw std::invalid_argument("exact OT: shape mismatch");
  if (m == 0 || n == 0) throw std::invalid_argument("exact OT: empty problem");
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      if (!std::isfinite(cost(i, j))) throw std::invalid_argument("exact OT: non-finite cost");

  constexpr double inf = std::numeric_limits<double>::infinity();
  const double total = std::max(r.sum(), c.sum());
  const double dust = 1e-14 * total;

  Vector supply = r;
  Vector demand = c;
  Matrix flow = Matrix::Zero(m, n);
  // Node potentials: sources 0..m-1, sinks m..m+n-1.
  std::vector<double> pot(static_cast<std::size_t>(m + n), 0.0);
  std::vector<double> dist(pot.size());
  std::vector<Eigen::Index> parent(pot.size());
  std::vector<char> done(pot.size());

  const auto reduced_forward = [&](Eigen::Index i, Eigen::Index j) {
    return std::max(0.0, cost(i, j) + pot[i] - pot[m + j]);
  };
  const auto reduced_backward = [&](Eigen::Index i, Eigen::Index j) {
    return std::max(0.0, -cost(i, j) + pot[m + j] - pot[i]);
  };

  ExactTransport out;
  for (;;) {
    bool any_supply = false;
    for (Eigen::Index i = 0; i < m; ++i) {
      if (supply(i) <= dust) supply(i) = 0.0;
      any_supply = any_supply || supply(i) > 0.0;
    }
    bool any_demand = false;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (demand(j) <= dust) demand(j) = 0.0;
      any_demand = any_demand || demand(j) > 0.0;
    }
    if (!any_supply || !any_demand) break;

    std::fill(dist.begin(), dist.end(), inf);
    std::fill(parent.begin(), parent.end(), -1);
    std::fill(done.begin(), done.end(), 0);
    for (Eigen::Index i = 0; i < m; ++i)
      if (supply(i) > 0.0) dist[i] = 0.0;

    for (;;) {
      Eigen::Index u = -1;
      double best = inf;
      for (std::size_t v = 0; v < dist.size(); ++v)
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = static_cast<Eigen::Index>(v);
        }
      if (u < 0) break;
      done[u] = 1;
      if (u < m) {
        for (Eigen::Index j = 0; j < n; ++j) {
          const double d = best + reduced_forward(u, j);
          if (d < dist[m + j]) {
            dist[m + j] = d;
            parent[m + j] = u;
          }
        }
      } else {
        const Eigen::Index j = u - m;
        for (Eigen::Index i = 0; i < m; ++i) {
          if (flow(i, j) <= 0.0) continue;
          const double d = best + reduced_backward(i, j);
          if (d < dist[i]) {
            dist[i] = d;
            parent[i] = u;
          }
        }
      }
    }

    Eigen::Index target = -1;
    for (Eigen::Index j = 0; j < n; ++j)
      if (demand(j) > 0.0 && (target < 0 || dist[m + j] < dist[m + target])) target = j;
    if (target < 0 || !std::isfinite(dist[m + target]))
      throw std::runtime_error("exact OT: no augmenting path (unbalanced marginals?)");

    const double cap = dist[m + target];
    for (std::size_t v = 0; v < pot.size(); ++v) pot[v] += std::min(dist[v], cap);

    // Walk back to the originating source to find the bottleneck.
    double push = demand(target);
    Eigen::Index v = m + target;
    while (parent[v] >= 0) {
      const Eigen::Index p = parent[v];
      if (v < m) push = std::min(push, flow(v, p - m));  // backward arc sink p -> source v
      v = p;
    }
    push = std::min(push, supply(v));
    const Eigen::Index source = v;

    v = m + target;
    while (parent[v] >= 0) {
      const Eigen::Index p = parent[v];
      if (v >= m) {
        flow(p, v - m) += push;
      } else {
        double& f = flow(v, p - m);
        f -= push;
        if (f <= dust) f = 0.0;
      }
      v = p;
    }
    supply(source) -= push;
    demand(target) -= push;
    ++out.augmentations;
  }

  out.plan = std::move(flow);
  out.cost = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i)
      if (out.plan(i, j) > 0.0) out.cost += out.plan(i, j) * cost(i, j);
  out.row_dual.resize(m);
  out.col_dual.resize(n);
  for (Eigen::Index i = 0; i < m; ++i) out.row_dual(i) = -pot[i];
  for (Eigen::Index j = 0; j < n; ++j) out.col_dual(j) = pot[m + j];
  return out;
}

/// Minimum transport cost only.
inline double exact_transport_cost(const Matrix& cost, const Vector& r, const Vector& c) {
  return solve_transport(cost, r, c).cost;
}

}  // namespace orliczot
