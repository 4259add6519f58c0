#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "orliczot/experiment.hpp"
#include "orliczot/mixtures.hpp"

using namespace orliczot;

namespace {

std::vector<double> coords(const DiscreteMeasure& m) {
  return {m.atoms().data(), m.atoms().data() + m.atoms().size()};
}

double mixture_variance(const MixtureSpec& s) {
  // sum w (sigma^2 + mu^2) - mean^2 for the Gaussian kernel
  double mean = 0.0, second = 0.0;
  for (std::size_t k = 0; k < s.components(); ++k) {
    mean += s.weights[k] * s.means[k][0];
    second += s.weights[k] * (s.scales[k] * s.scales[k] + s.means[k][0] * s.means[k][0]);
  }
  return second - mean * mean;
}

}  // namespace

TEST(Mixture, PointMassComponent) {
  const MixtureSpec spec{Kernel::gaussian, {{2.5}}, {0.0}, {1.0}};
  const auto m = sample(spec, 4, 99);
  ASSERT_EQ(m.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(m.atom(i), Point{2.5});
    EXPECT_DOUBLE_EQ(m.weights()(static_cast<Eigen::Index>(i)), 0.25);
  }
}

TEST(Mixture, GaussianSampleMean) {
  const auto spec = normal_three_mixture();
  const double mean = 0.37 * 3 + 0.30 * 4 + 0.33 * 5;
  EXPECT_NEAR(mean, 3.96, 1e-12);
  const double sd = std::sqrt(mixture_variance(spec));
  for (Seed seed : {1ULL, 2ULL, 3ULL}) {
    const auto x = coords(sample(spec, 300, seed));
    double avg = 0.0;
    for (double v : x) avg += v / x.size();
    EXPECT_NEAR(avg, mean, 3.0 * sd / std::sqrt(300.0)) << "seed " << seed;
  }
}

TEST(Mixture, OutlierComponentFraction) {
  const auto spec = laplace_four_mixture();
  for (Seed seed : {1ULL, 2ULL, 3ULL}) {
    const auto m = sample(spec, 300, seed);
    const auto near6 = component_atoms(spec, m, 3);
    EXPECT_NEAR(static_cast<double>(near6.size()) / 300.0, 0.06, 0.05) << "seed " << seed;
  }
}

TEST(Mixture, MixingMeasures) {
  const auto a = mixing_measure(normal_three_mixture());
  EXPECT_EQ(coords(a), (std::vector<double>{3, 4, 5}));
  EXPECT_EQ(a.weights()(0), 0.37);
  EXPECT_EQ(a.weights()(1), 0.30);
  EXPECT_EQ(a.weights()(2), 0.33);
  const auto b = mixing_measure(laplace_four_mixture());
  EXPECT_EQ(coords(b), (std::vector<double>{7, 8, 9, 6}));
  EXPECT_EQ(b.weights()(3), 0.06);
  const MixtureSpec single{Kernel::laplace, {{1.0, 2.0}}, {0.5}, {1.0}};
  EXPECT_EQ(mixing_measure(single), make_measure({{1.0, 2.0}}, {1.0}));
}

TEST(Mixture, MixingWeightsExactlyEqualSpec) {
  const MixtureSpec s{Kernel::gaussian, {{0.0}, {1.0}, {2.0}}, {1, 1, 1}, {0.1, 0.7, 0.2}};
  const auto m = mixing_measure(s);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(m.weights()(static_cast<Eigen::Index>(k)), s.weights[k]);
}

TEST(Mixture, DeterministicPerSeed) {
  for (const auto& spec : {normal_three_mixture(), laplace_four_mixture()}) {
    EXPECT_EQ(sample(spec, 200, 7), sample(spec, 200, 7));
    EXPECT_FALSE(sample(spec, 200, 7) == sample(spec, 200, 8));
  }
}

TEST(Mixture, LaplaceMedianAndScale) {
  const MixtureSpec spec{Kernel::laplace, {{1.5}}, {0.4}, {1.0}};
  auto x = coords(sample(spec, 20001, 5));
  std::nth_element(x.begin(), x.begin() + 10000, x.end());
  // Median of n Laplace draws has sd about b / sqrt(n).
  EXPECT_NEAR(x[10000], 1.5, 4.0 * 0.4 / std::sqrt(20001.0));
  double mad = 0.0;
  for (double v : x) mad += std::abs(v - 1.5) / x.size();
  EXPECT_NEAR(mad, 0.4, 0.02);
}

TEST(Mixture, MultivariateMeans) {
  const MixtureSpec spec{Kernel::gaussian, {{0.0, 10.0}}, {1.0}, {1.0}};
  const auto m = sample(spec, 2000, 3);
  EXPECT_EQ(m.dim(), 2u);
  EXPECT_NEAR(m.atoms().col(1).mean(), 10.0, 4.0 / std::sqrt(2000.0));
}

TEST(Mixture, InvalidSpecsRejected) {
  EXPECT_THROW((MixtureSpec{Kernel::gaussian, {}, {}, {}}.validate()), std::invalid_argument);
  EXPECT_THROW((MixtureSpec{Kernel::gaussian, {{0.0}}, {-1.0}, {1.0}}.validate()), std::invalid_argument);
  EXPECT_THROW((MixtureSpec{Kernel::gaussian, {{0.0}, {1.0}}, {1.0}, {0.5, 0.5}}.validate()), std::invalid_argument);
  EXPECT_THROW((MixtureSpec{Kernel::gaussian, {{0.0}, {1.0}}, {1.0, 1.0}, {0.5, 0.6}}.validate()),
               std::invalid_argument);
  EXPECT_THROW(sample(normal_three_mixture(), 0, 1), std::invalid_argument);
}

TEST(Mixture, JsonRoundTrip) {
  const auto spec = laplace_four_mixture();
  const auto back = mixture_from_json(nlohmann::json::parse(mixture_to_json(spec).dump()));
  EXPECT_EQ(back.kernel, spec.kernel);
  EXPECT_EQ(back.means, spec.means);
  EXPECT_EQ(back.scales, spec.scales);
  EXPECT_EQ(back.weights, spec.weights);
  EXPECT_THROW(mixture_from_json(nlohmann::json::parse(R"({"kernel":"cauchy","means":[0],"scales":[1],"weights":[1]})")),
               std::invalid_argument);
}

TEST(Experiment, SeedStreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
  EXPECT_EQ(derive_seed(5, 1), derive_seed(5, 1));
}

TEST(Experiment, SpreadMassOfSimplePlans) {
  // Column 1 fed by a dedicated source: nothing spread.
  const Matrix dedicated = (Matrix(2, 2) << 0.5, 0.0, 0.0, 0.5).finished();
  EXPECT_EQ(spread_mass(dedicated, {1}), 0.0);
  // Product coupling with a light column: all of its mass is spread.
  const Vector r = (Vector(2) << 0.5, 0.5).finished();
  const Vector c = (Vector(3) << 0.45, 0.45, 0.1).finished();
  const Matrix product = r * c.transpose();
  EXPECT_NEAR(spread_mass(product, {2}), 0.1, 1e-15);
  EXPECT_NEAR(column_mass(product, {2}), 0.1, 1e-15);
}

TEST(Experiment, SingleSampleGivesForcedPlans) {
  SimulationConfig cfg;
  cfg.n_samples = 1;
  const auto res = run_simulation(cfg);
  EXPECT_EQ(res.w1.plan.matrix(0, 0), 1.0);
  EXPECT_EQ(res.ow.plan.matrix(0, 0), 1.0);
  EXPECT_EQ(res.w1_outlier_mass, 0.0);
  EXPECT_EQ(res.ow_outlier_mass, 0.0);
}
