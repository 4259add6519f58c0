#pragma once

// Location mixtures with Gaussian or Laplace kernels, their mixing measures,
// and seeded empirical samples.
//
// Random stream: a single std::mt19937_64 seeded with the user seed (its
// output sequence is fixed by the C++ standard). Each draw consumes exactly
// 1 + 2d uniforms: one for the component, then a pair per coordinate. Gaussian
// noise uses both numbers of the pair (Box-Muller, cosine branch); Laplace
// noise uses the first (inverse CDF). Uniforms are built from the top 53 bits,
// so samples replay bit-for-bit wherever libm agrees.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "orliczot/measures.hpp"

namespace orliczot {

enum class Kernel { gaussian, laplace };

using Seed = std::uint64_t;

/// sum_k w_k * K((x - mean_k) / scale_k). For Laplace, scale is the diversity b
/// of the density exp(-|x - mu| / b) / (2b); for Gaussian it is sigma.
struct MixtureSpec {
  Kernel kernel = Kernel::gaussian;
  std::vector<Point> means;
  std::vector<double> scales;
  std::vector<double> weights;

  std::size_t components() const noexcept { return means.size(); }
  std::size_t dim() const noexcept { return means.empty() ? 0 : means.front().size(); }

  void validate() const {
    if (means.empty()) throw std::invalid_argument("mixture: no components");
    if (scales.size() != means.size() || weights.size() != means.size())
      throw std::invalid_argument("mixture: means, scales and weights differ in length");
    const std::size_t d = dim();
    if (d == 0) throw std::invalid_argument("mixture: means must have dimension >= 1");
    double total = 0.0;
    for (std::size_t k = 0; k < means.size(); ++k) {
      if (means[k].size() != d) throw std::invalid_argument("mixture: mean dimension mismatch");
      // sigma = 0 is allowed as a point mass; negative or NaN is not.
      if (!(scales[k] >= 0.0) || !std::isfinite(scales[k]))
        throw std::invalid_argument("mixture: scales must be >= 0");
      if (!(weights[k] >= 0.0)) throw std::invalid_argument("mixture: weights must be >= 0");
      total += weights[k];
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("mixture: weights must sum to 1");
  }
};

/// The Gaussian 3-mixture of the outlier-transport experiment (means 3, 4, 5).
inline MixtureSpec normal_three_mixture() {
  return {Kernel::gaussian, {{3.0}, {4.0}, {5.0}}, {0.3, 0.3, 0.3}, {0.37, 0.30, 0.33}};
}

/// The Laplace 4-mixture with a light outlier component at 6.
inline MixtureSpec laplace_four_mixture() {
  return {Kernel::laplace, {{7.0}, {8.0}, {9.0}, {6.0}}, {0.3, 0.3, 0.3, 0.1}, {0.30, 0.32, 0.32, 0.06}};
}

/// sum_k w_k delta(mean_k).
inline DiscreteMeasure mixing_measure(const MixtureSpec& spec) {
  spec.validate();
  return DiscreteMeasure(spec.means, spec.weights);
}

namespace detail {

// Uniform on the open interval (0, 1).
inline double open_uniform(std::mt19937_64& rng) {
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace detail

/// n i.i.d. draws as a uniform empirical measure.
inline DiscreteMeasure sample(const MixtureSpec& spec, std::size_t n, Seed seed) {
  spec.validate();
  if (n == 0) throw std::invalid_argument("mixture sample: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<double> cumulative(spec.components());
  double acc = 0.0;
  for (std::size_t k = 0; k < spec.components(); ++k) cumulative[k] = acc += spec.weights[k];

  const std::size_t d = spec.dim();
  std::vector<Point> points(n, Point(d));
  for (std::size_t s = 0; s < n; ++s) {
    const double u = detail::open_uniform(rng) * acc;
    std::size_t comp = spec.components() - 1;
    for (std::size_t k = 0; k < spec.components(); ++k)
      if (u < cumulative[k]) {
        comp = k;
        break;
      }
    for (std::size_t c = 0; c < d; ++c) {
      const double u1 = detail::open_uniform(rng);
      const double u2 = detail::open_uniform(rng);
      double noise = 0.0;
      if (spec.kernel == Kernel::gaussian) {
        noise = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      } else {
        const double t = u1 - 0.5;
        noise = -std::copysign(1.0, t) * std::log1p(-2.0 * std::abs(t));
      }
      points[s][c] = spec.means[comp][c] + spec.scales[comp] * noise;
    }
  }
  return empirical_measure(points);
}

inline std::string to_string(Kernel k) { return k == Kernel::gaussian ? "gaussian" : "laplace"; }

inline MixtureSpec mixture_from_json(const nlohmann::json& j) {
  MixtureSpec spec;
  const std::string kernel = j.at("kernel").get<std::string>();
  if (kernel == "gaussian") {
    spec.kernel = Kernel::gaussian;
  } else if (kernel == "laplace") {
    spec.kernel = Kernel::laplace;
  } else {
    throw std::invalid_argument("mixture JSON: unknown kernel '" + kernel + "'");
  }
  for (const auto& m : j.at("means")) spec.means.push_back(m.is_number() ? Point{m.get<double>()} : m.get<Point>());
  spec.scales = j.at("scales").get<std::vector<double>>();
  spec.weights = j.at("weights").get<std::vector<double>>();
  spec.validate();
  return spec;
}

inline nlohmann::json mixture_to_json(const MixtureSpec& spec) {
  nlohmann::json means = nlohmann::json::array();
  for (const auto& m : spec.means) {
    if (m.size() == 1) {
      means.push_back(m.front());
    } else {
      means.push_back(m);
    }
  }
  return {{"kernel", to_string(spec.kernel)}, {"means", means}, {"scales", spec.scales}, {"weights", spec.weights}};
}

}  // namespace orliczot
