#pragma once

// Hand-rolled generators for property tests and small helpers shared by the
// unit tests and the acceptance binary.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "orliczot/measures.hpp"

namespace orliczot::proptest {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  /// k atoms in R^d with coordinates in [lo, hi) and weights bounded away from 0.
  DiscreteMeasure measure(int k, int d, double lo = -3.0, double hi = 3.0) {
    std::vector<Point> atoms(static_cast<std::size_t>(k), Point(static_cast<std::size_t>(d)));
    std::vector<double> w(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      for (int c = 0; c < d; ++c) atoms[i][c] = uniform(lo, hi);
      w[i] = uniform(0.05, 1.0);
    }
    return DiscreteMeasure(atoms, w);
  }

  DiscreteMeasure measure(int kmin, int kmax, int d) { return measure(integer(kmin, kmax), d); }

  std::mt19937_64& engine() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("orliczot_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string read_text(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string write_measure(const std::filesystem::path& dir, const std::string& name, const DiscreteMeasure& m) {
  const auto path = (dir / name).string();
  write_measure_file(path, m);
  return path;
}

}  // namespace orliczot::proptest
