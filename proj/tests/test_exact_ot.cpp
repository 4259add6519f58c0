#include <algorithm>
#include <cmath>
#include <numeric>

#include <gtest/gtest.h>

#include "orliczot/exact_ot.hpp"
#include "support.hpp"

using namespace orliczot;

namespace {

// On the line, the monotone (north-west corner on sorted atoms) coupling is
// optimal for any cost convex in x - y.
double monotone_cost_1d(const DiscreteMeasure& a, const DiscreteMeasure& b, double order) {
  std::vector<Eigen::Index> ia(a.size()), ib(b.size());
  std::iota(ia.begin(), ia.end(), 0);
  std::iota(ib.begin(), ib.end(), 0);
  std::sort(ia.begin(), ia.end(), [&](auto x, auto y) { return a.atoms()(x, 0) < a.atoms()(y, 0); });
  std::sort(ib.begin(), ib.end(), [&](auto x, auto y) { return b.atoms()(x, 0) < b.atoms()(y, 0); });
  std::size_t p = 0, q = 0;
  double ra = a.weights()(ia[0]), rb = b.weights()(ib[0]), total = 0.0;
  while (p < ia.size() && q < ib.size()) {
    const double t = std::min(ra, rb);
    total += t * std::pow(std::abs(a.atoms()(ia[p], 0) - b.atoms()(ib[q], 0)), order);
    ra -= t;
    rb -= t;
    if (ra <= 1e-15 && ++p < ia.size()) ra = a.weights()(ia[p]);
    if (rb <= 1e-15 && ++q < ib.size()) rb = b.weights()(ib[q]);
  }
  return total;
}

Matrix powered_cost(const DiscreteMeasure& a, const DiscreteMeasure& b, double order) {
  return cost_matrix(a, b).entries.array().pow(order).matrix();
}

}  // namespace

TEST(ExactOT, DiagonalIsFree) {
  const Vector u = Vector::Constant(2, 0.5);
  const auto sol = solve_transport((Matrix(2, 2) << 0, 1, 1, 0).finished(), u, u);
  EXPECT_NEAR(sol.cost, 0.0, 1e-15);
  EXPECT_NEAR(sol.plan(0, 0), 0.5, 1e-15);
}

TEST(ExactOT, ForcedSplit) {
  const Vector r = Vector::Constant(1, 1.0);
  const Vector c = Vector::Constant(2, 0.5);
  const auto sol = solve_transport((Matrix(1, 2) << 1, 3).finished(), r, c);
  EXPECT_NEAR(sol.cost, 2.0, 1e-14);
}

TEST(ExactOT, RejectsNonFiniteCost) {
  const Vector u = Vector::Constant(1, 1.0);
  EXPECT_THROW(solve_transport(Matrix::Constant(1, 1, INFINITY), u, u), std::invalid_argument);
}

TEST(ExactOTProperty, MatchesMonotoneCouplingOnTheLine) {
  proptest::Gen gen(31);
  for (int t = 0; t < 200; ++t) {
    const auto a = gen.measure(1, 9, 1);
    const auto b = gen.measure(1, 9, 1);
    const double order = t % 2 == 0 ? 1.0 : 2.0;
    const double got = exact_transport_cost(powered_cost(a, b, order), a.weights(), b.weights());
    EXPECT_NEAR(got, monotone_cost_1d(a, b, order), 1e-12 * (1.0 + got));
  }
}

TEST(ExactOTProperty, DualCertificate) {
  proptest::Gen gen(32);
  for (int t = 0; t < 200; ++t) {
    const int d = gen.integer(1, 3);
    const auto a = gen.measure(1, 10, d);
    const auto b = gen.measure(1, 10, d);
    const Matrix cost = cost_matrix(a, b).entries;
    const auto sol = solve_transport(cost, a.weights(), b.weights());
    const TransportPlan plan{sol.plan, a.weights(), b.weights()};
    EXPECT_LE(marginal_violation(plan), 1e-12);
    EXPECT_GE(sol.plan.minCoeff(), 0.0);
    const double scale = 1.0 + cost.maxCoeff();
    for (Eigen::Index i = 0; i < cost.rows(); ++i)
      for (Eigen::Index j = 0; j < cost.cols(); ++j) {
        const double slack = cost(i, j) - sol.row_dual(i) - sol.col_dual(j);
        EXPECT_GE(slack, -1e-9 * scale);
        if (sol.plan(i, j) > 1e-12) EXPECT_LE(slack, 1e-9 * scale);
      }
    const double dual = a.weights().dot(sol.row_dual) + b.weights().dot(sol.col_dual);
    EXPECT_NEAR(dual, sol.cost, 1e-9 * scale);
    EXPECT_NEAR((sol.plan.array() * cost.array()).sum(), sol.cost, 1e-12 * scale);
  }
}

TEST(ExactOTProperty, TwoByTwoVertexOracle) {
  proptest::Gen gen(33);
  for (int t = 0; t < 200; ++t) {
    Matrix cost(2, 2);
    for (Eigen::Index i = 0; i < 4; ++i) cost.data()[i] = gen.uniform(0.0, 5.0);
    const double r1 = gen.uniform(0.0, 1.0);
    const double c1 = gen.uniform(0.0, 1.0);
    const Vector r = (Vector(2) << r1, 1.0 - r1).finished();
    const Vector c = (Vector(2) << c1, 1.0 - c1).finished();
    const auto at = [&](double p11) {
      return p11 * cost(0, 0) + (r1 - p11) * cost(0, 1) + (c1 - p11) * cost(1, 0) + (1.0 - r1 - c1 + p11) * cost(1, 1);
    };
    const double best = std::min(at(std::max(0.0, r1 + c1 - 1.0)), at(std::min(r1, c1)));
    EXPECT_NEAR(exact_transport_cost(cost, r, c), best, 1e-12);
  }
}
