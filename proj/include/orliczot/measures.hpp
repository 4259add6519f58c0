#pragma once

// Discrete probability measures, Euclidean ground costs and transport plans.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <system_error>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

namespace orliczot {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Point = std::vector<double>;

/// Tiny negative weights above this are treated as float noise and clamped to 0.
inline constexpr double kWeightClampTolerance = 1e-12;

/// A finitely supported probability measure sum_i w_i * delta(x_i) on R^d.
///
/// Weights are normalized to the simplex and zero-weight atoms are dropped at
/// construction, so every stored weight is strictly positive. Duplicate atoms
/// are kept as separate entries.
class DiscreteMeasure {
 public:
  DiscreteMeasure(const std::vector<Point>& atoms, const std::vector<double>& weights) {
    if (atoms.empty()) throw std::invalid_argument("measure: no atoms");
    if (atoms.size() != weights.size())
      throw std::invalid_argument("measure: atoms and weights differ in length");
    const std::size_t dim = atoms.front().size();
    if (dim == 0) throw std::invalid_argument("measure: atoms must have dimension >= 1");

    std::vector<double> w(weights.size());
    double total = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (atoms[i].size() != dim) throw std::invalid_argument("measure: atom dimension mismatch");
      const double wi = weights[i];
      if (!std::isfinite(wi)) throw std::invalid_argument("measure: non-finite weight");
      if (wi < -kWeightClampTolerance) throw std::invalid_argument("measure: negative weight");
      w[i] = wi > 0.0 ? wi : 0.0;
      total += w[i];
    }
    if (!(total > 0.0)) throw std::invalid_argument("measure: weights sum to zero");

    std::vector<std::size_t> keep;
    for (std::size_t i = 0; i < w.size(); ++i)
      if (w[i] > 0.0) keep.push_back(i);

    atoms_.resize(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(dim));
    weights_.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t r = 0; r < keep.size(); ++r) {
      const auto idx = static_cast<Eigen::Index>(r);
      for (std::size_t d = 0; d < dim; ++d) {
        const double x = atoms[keep[r]][d];
        if (!std::isfinite(x)) throw std::invalid_argument("measure: non-finite atom coordinate");
        atoms_(idx, static_cast<Eigen::Index>(d)) = x;
      }
      weights_(idx) = w[keep[r]] / total;
    }
  }

  /// Atoms as rows of a k x d matrix.
  const Matrix& atoms() const noexcept { return atoms_; }
  const Vector& weights() const noexcept { return weights_; }
  std::size_t size() const noexcept { return static_cast<std::size_t>(weights_.size()); }
  std::size_t dim() const noexcept { return static_cast<std::size_t>(atoms_.cols()); }

  Point atom(std::size_t i) const {
    Point p(dim());
    for (std::size_t d = 0; d < dim(); ++d)
      p[d] = atoms_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d));
    return p;
  }

  bool operator==(const DiscreteMeasure& other) const {
    return atoms_.rows() == other.atoms_.rows() && atoms_.cols() == other.atoms_.cols() &&
           atoms_ == other.atoms_ && weights_ == other.weights_;
  }

 private:
  Matrix atoms_;
  Vector weights_;
};

inline DiscreteMeasure make_measure(const std::vector<Point>& atoms,
                                    const std::vector<double>& weights) {
  return DiscreteMeasure(atoms, weights);
}

/// Uniform empirical measure on the given points.
inline DiscreteMeasure empirical_measure(const std::vector<Point>& points) {
  return DiscreteMeasure(points, std::vector<double>(points.size(), 1.0));
}

/// Pairwise Euclidean distances between the atoms of two measures.
struct CostMatrix {
  Matrix entries;
  double max_entry = 0.0;

  Eigen::Index rows() const noexcept { return entries.rows(); }
  Eigen::Index cols() const noexcept { return entries.cols(); }
};

inline CostMatrix cost_matrix(const DiscreteMeasure& src, const DiscreteMeasure& dst) {
  if (src.dim() != dst.dim()) throw std::invalid_argument("cost_matrix: dimension mismatch");
  const Matrix& a = src.atoms();
  const Matrix& b = dst.atoms();
  CostMatrix m;
  m.entries.resize(a.rows(), b.rows());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < b.rows(); ++j)
      m.entries(i, j) = (a.row(i) - b.row(j)).norm();
  m.max_entry = m.entries.size() > 0 ? m.entries.maxCoeff() : 0.0;
  return m;
}

/// A coupling matrix together with the marginals it is meant to satisfy.
struct TransportPlan {
  Matrix matrix;
  Vector row_marginal;
  Vector col_marginal;

  double total_mass() const { return matrix.sum(); }
};

/// max over rows and columns of |sum - prescribed marginal|.
inline double marginal_violation(const TransportPlan& plan) {
  if (plan.matrix.rows() != plan.row_marginal.size() ||
      plan.matrix.cols() != plan.col_marginal.size())
    throw std::invalid_argument("marginal_violation: shape mismatch");
  const Vector rows = plan.matrix.rowwise().sum();
  const Vector cols = plan.matrix.colwise().sum().transpose();
  double v = 0.0;
  if (rows.size() > 0) v = std::max(v, (rows - plan.row_marginal).cwiseAbs().maxCoeff());
  if (cols.size() > 0) v = std::max(v, (cols - plan.col_marginal).cwiseAbs().maxCoeff());
  return v;
}

/// Shannon entropy -sum p log p (natural log, 0 log 0 = 0).
template <typename Derived>
double shannon_entropy(const Eigen::DenseBase<Derived>& p) {
  double h = 0.0;
  for (Eigen::Index j = 0; j < p.cols(); ++j)
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
      const double v = p(i, j);
      if (v > 0.0) h -= v * std::log(v);
    }
  return h;
}

// ---------------------------------------------------------------------------
// Serialization

/// Locale-independent rendering with 17 significant digits; integral values keep a ".0".
inline std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  std::string s(buf, res.ptr);
  if (std::isfinite(v) && s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

inline double parse_real(const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && (*first == ' ' || *first == '\t')) ++first;
  while (last > first && (last[-1] == ' ' || last[-1] == '\t' || last[-1] == '\r')) --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last)
    throw std::invalid_argument("cannot parse number '" + text + "'");
  return v;
}

inline DiscreteMeasure measure_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("atoms") || !j.contains("weights"))
    throw std::invalid_argument("measure JSON needs \"atoms\" and \"weights\"");
  std::vector<Point> atoms;
  for (const auto& a : j.at("atoms")) {
    if (a.is_number()) {
      atoms.push_back({a.get<double>()});
    } else if (a.is_array()) {
      atoms.push_back(a.get<Point>());
    } else {
      throw std::invalid_argument("measure JSON: atom must be a number or an array");
    }
  }
  return DiscreteMeasure(atoms, j.at("weights").get<std::vector<double>>());
}

inline nlohmann::json measure_to_json(const DiscreteMeasure& m) {
  nlohmann::json atoms = nlohmann::json::array();
  for (std::size_t i = 0; i < m.size(); ++i) {
    nlohmann::json a = nlohmann::json::array();
    for (std::size_t d = 0; d < m.dim(); ++d)
      a.push_back(m.atoms()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)));
    atoms.push_back(std::move(a));
  }
  std::vector<double> w(m.weights().data(), m.weights().data() + m.weights().size());
  return {{"atoms", atoms}, {"weights", w}};
}

inline DiscreteMeasure read_measure_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open measure file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed measure file '" + path + "': " + e.what());
  }
  try {
    return measure_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed measure file '" + path + "': " + e.what());
  }
}

/// nlohmann writes doubles as the shortest string that round-trips exactly,
/// independent of the C locale.
inline void write_json_file(const std::string& path, const nlohmann::json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << j.dump(2) << '\n';
}

inline void write_measure_file(const std::string& path, const DiscreteMeasure& m) {
  write_json_file(path, measure_to_json(m));
}

/// CSV with header `i,j,mass` and one row per nonzero entry.
inline void write_plan_csv(std::ostream& out, const Matrix& plan) {
  out << "i,j,mass\n";
  for (Eigen::Index i = 0; i < plan.rows(); ++i)
    for (Eigen::Index j = 0; j < plan.cols(); ++j) {
      const double v = plan(i, j);
      if (v != 0.0) out << i << ',' << j << ',' << format_real(v) << '\n';
    }
}

inline void write_plan_csv(const std::string& path, const Matrix& plan) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_plan_csv(out, plan);
}

/// Reads an `i,j,mass` CSV into a rows x cols matrix.
inline Matrix read_plan_csv(std::istream& in, Eigen::Index rows, Eigen::Index cols) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("i,j,mass", 0) != 0)
    throw std::invalid_argument("plan CSV: missing header");
  Matrix plan = Matrix::Zero(rows, cols);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    std::stringstream ss(line);
    std::string a, b, c;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') || !std::getline(ss, c))
      throw std::invalid_argument("plan CSV: malformed row '" + line + "'");
    const auto i = static_cast<Eigen::Index>(parse_real(a));
    const auto j = static_cast<Eigen::Index>(parse_real(b));
    if (i < 0 || j < 0 || i >= rows || j >= cols)
      throw std::invalid_argument("plan CSV: index out of range");
    plan(i, j) = parse_real(c);
  }
  return plan;
}

}  // namespace orliczot
