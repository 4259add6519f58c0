#pragma once

// Convex Orlicz functions Phi: [0, inf) -> [0, inf) with Phi(0) = 0.
//
// Supported family:
//   pow:p        x^p                    (p >= 1)
//   exp:b        exp(x / b) - 1         (b > 0)
//   exppow:b     exp(x^b) - 1           (b > 1)
//   sup(A,B)     max(A(x), B(x))
//   mix:a(A,B)   a A(x) + (1 - a) B(x)  (0 <= a <= 1)

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace orliczot {

enum class PhiKind { power, exp_linear, exp_power, sup, mixture };

struct PhiValue {
  double value = 0.0;
  bool overflow = false;
};

struct OrliczConditions {
  bool condition_i = false;   // Phi(x)/x -> inf as x -> inf
  bool condition_ii = false;  // Phi(x)/x -> 0 as x -> 0
};

class PhiFunction {
 public:
  static PhiFunction power(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw std::invalid_argument("pow: exponent must be >= 1");
    return PhiFunction(PhiKind::power, p);
  }
  static PhiFunction exp_linear(double beta) {
    if (!(beta > 0.0) || !std::isfinite(beta)) throw std::invalid_argument("exp: beta must be > 0");
    return PhiFunction(PhiKind::exp_linear, beta);
  }
  /// exp(x^beta) - 1. Only beta > 1 is enforced; the contraction theory wants
  /// 1 < beta < 16/15, see in_contraction_regime().
  static PhiFunction exp_power(double beta) {
    if (!(beta > 1.0) || !std::isfinite(beta)) throw std::invalid_argument("exppow: beta must be > 1");
    return PhiFunction(PhiKind::exp_power, beta);
  }
  static PhiFunction sup(const PhiFunction& a, const PhiFunction& b) {
    PhiFunction f(PhiKind::sup, 0.0);
    f.lhs_ = std::make_shared<const PhiFunction>(a);
    f.rhs_ = std::make_shared<const PhiFunction>(b);
    return f;
  }
  static PhiFunction mixture(double alpha, const PhiFunction& a, const PhiFunction& b) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("mix: alpha must lie in [0, 1]");
    PhiFunction f(PhiKind::mixture, alpha);
    f.lhs_ = std::make_shared<const PhiFunction>(a);
    f.rhs_ = std::make_shared<const PhiFunction>(b);
    return f;
  }

  PhiKind kind() const noexcept { return kind_; }
  /// p, beta or alpha depending on kind; unused for sup.
  double parameter() const noexcept { return param_; }
  const PhiFunction& lhs() const { return *lhs_; }
  const PhiFunction& rhs() const { return *rhs_; }

  bool in_contraction_regime() const noexcept {
    return kind_ == PhiKind::exp_power && param_ > 1.0 && param_ < 16.0 / 15.0;
  }

  /// Phi(x), saturating to the largest finite double on overflow.
  PhiValue eval_checked(double x) const {
    if (!(x >= 0.0)) throw std::invalid_argument("Phi: argument must be >= 0");
    if (x == 0.0) return {0.0, false};
    switch (kind_) {
      case PhiKind::power:
        return saturate(std::pow(x, param_));
      case PhiKind::exp_linear:
        return exp_minus_one(x / param_);
      case PhiKind::exp_power:
        return exp_minus_one(std::pow(x, param_));
      case PhiKind::sup: {
        const PhiValue a = lhs_->eval_checked(x);
        const PhiValue b = rhs_->eval_checked(x);
        return a.value >= b.value ? a : b;
      }
      case PhiKind::mixture: {
        const PhiValue a = lhs_->eval_checked(x);
        const PhiValue b = rhs_->eval_checked(x);
        PhiValue r = saturate(param_ * a.value + (1.0 - param_) * b.value);
        r.overflow = r.overflow || (param_ > 0.0 && a.overflow) || (param_ < 1.0 && b.overflow);
        return r;
      }
    }
    return {};
  }

  double operator()(double x) const { return eval_checked(x).value; }

  /// log Phi(x) for x > 0, finite far beyond the overflow point of eval.
  double log_eval(double x) const {
    if (!(x > 0.0)) throw std::invalid_argument("log Phi: argument must be > 0");
    switch (kind_) {
      case PhiKind::power:
        return param_ * std::log(x);
      case PhiKind::exp_linear:
        return log_expm1(x / param_);
      case PhiKind::exp_power:
        return log_expm1(std::pow(x, param_));
      case PhiKind::sup:
        return std::max(lhs_->log_eval(x), rhs_->log_eval(x));
      case PhiKind::mixture: {
        if (param_ == 1.0) return lhs_->log_eval(x);
        if (param_ == 0.0) return rhs_->log_eval(x);
        const double a = std::log(param_) + lhs_->log_eval(x);
        const double b = std::log1p(-param_) + rhs_->log_eval(x);
        const double m = std::max(a, b);
        return m + std::log(std::exp(a - m) + std::exp(b - m));
      }
    }
    return 0.0;
  }

  /// The unique x >= 0 with Phi(x) = y.
  double inverse(double y) const {
    if (!(y >= 0.0)) throw std::invalid_argument("Phi inverse: argument must be >= 0");
    if (y == 0.0) return 0.0;
    switch (kind_) {
      case PhiKind::power:
        return std::pow(y, 1.0 / param_);
      case PhiKind::exp_linear:
        return param_ * std::log1p(y);
      case PhiKind::exp_power:
        return std::pow(std::log1p(y), 1.0 / param_);
      case PhiKind::sup:
      case PhiKind::mixture:
        return bisect_inverse(y);
    }
    return 0.0;
  }

  friend bool operator==(const PhiFunction& a, const PhiFunction& b) {
    if (a.kind_ != b.kind_) return false;
    if (a.kind_ != PhiKind::sup && a.param_ != b.param_) return false;
    if (a.kind_ == PhiKind::sup || a.kind_ == PhiKind::mixture)
      return *a.lhs_ == *b.lhs_ && *a.rhs_ == *b.rhs_;
    return true;
  }

 private:
  PhiFunction(PhiKind kind, double param) : kind_(kind), param_(param) {}

  static PhiValue saturate(double v) {
    if (std::isfinite(v)) return {v, false};
    return {std::numeric_limits<double>::max(), true};
  }

  static PhiValue exp_minus_one(double t) {
    if (t > 700.0) return {std::numeric_limits<double>::max(), true};
    return saturate(std::expm1(t));
  }

  // log(exp(t) - 1), stable for both small and large t.
  static double log_expm1(double t) {
    if (t > 30.0) return t + std::log1p(-std::exp(-t));
    return std::log(std::expm1(t));
  }

  double bisect_inverse(double y) const {
    double lo = 0.0;
    double hi = 1.0;
    while ((*this)(hi) < y) {
      lo = hi;
      hi *= 2.0;
      if (!std::isfinite(hi)) return std::numeric_limits<double>::infinity();
    }
    for (int it = 0; it < 2000; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if ((*this)(mid) < y) {
        lo = mid;
      } else {
        hi = mid;
      }
      if (hi - lo <= 1e-15 * hi) break;
    }
    return 0.5 * (lo + hi);
  }

  PhiKind kind_;
  double param_;
  std::shared_ptr<const PhiFunction> lhs_;
  std::shared_ptr<const PhiFunction> rhs_;
};

/// Growth conditions, decided from the structure of Phi:
///   (i)  Phi(x)/x -> inf as x -> inf   (ii) Phi(x)/x -> 0 as x -> 0.
/// A sup grows as fast as its faster branch and vanishes only if both branches
/// do; a mixture inherits from whichever branches carry positive weight.
inline OrliczConditions check_orlicz_conditions(const PhiFunction& phi) {
  switch (phi.kind()) {
    case PhiKind::power:
      return {phi.parameter() > 1.0, phi.parameter() > 1.0};
    case PhiKind::exp_linear:
      return {true, false};
    case PhiKind::exp_power:
      return {true, true};
    case PhiKind::sup: {
      const auto a = check_orlicz_conditions(phi.lhs());
      const auto b = check_orlicz_conditions(phi.rhs());
      return {a.condition_i || b.condition_i, a.condition_ii && b.condition_ii};
    }
    case PhiKind::mixture: {
      const double alpha = phi.parameter();
      const auto a = check_orlicz_conditions(phi.lhs());
      const auto b = check_orlicz_conditions(phi.rhs());
      return {(alpha > 0.0 && a.condition_i) || (alpha < 1.0 && b.condition_i),
              (alpha == 0.0 || a.condition_ii) && (alpha == 1.0 || b.condition_ii)};
    }
  }
  return {};
}

// ---------------------------------------------------------------------------
// Text descriptors

namespace detail {

inline std::string render_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

class PhiParser {
 public:
  explicit PhiParser(std::string_view text) : text_(text) {}

  PhiFunction parse() {
    PhiFunction f = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) fail("trailing characters");
    return f;
  }

 private:
  PhiFunction parse_expr() {
    skip_ws();
    if (consume("sup(")) {
      PhiFunction a = parse_expr();
      expect(',');
      PhiFunction b = parse_expr();
      expect(')');
      return PhiFunction::sup(a, b);
    }
    if (consume("mix:")) {
      const double alpha = parse_number();
      expect('(');
      PhiFunction a = parse_expr();
      expect(',');
      PhiFunction b = parse_expr();
      expect(')');
      return PhiFunction::mixture(alpha, a, b);
    }
    if (consume("pow:")) return PhiFunction::power(parse_number());
    if (consume("exppow:")) return PhiFunction::exp_power(parse_number());
    if (consume("exp:")) return PhiFunction::exp_linear(parse_number());
    fail("unknown Phi kind");
  }

  double parse_number() {
    skip_ws();
    double v = 0.0;
    const char* first = text_.data() + pos_;
    const char* last = text_.data() + text_.size();
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc() || res.ptr == first) fail("expected a number");
    pos_ += static_cast<std::size_t>(res.ptr - first);
    return v;
  }

  bool consume(std::string_view token) {
    skip_ws();
    if (text_.substr(pos_, token.size()) == token) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (pos_ < text_.size() && text_[pos_] == ' ') ++pos_;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("bad Phi spec '" + std::string(text_) + "' at offset " +
                                std::to_string(pos_) + ": " + what);
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline PhiFunction parse_phi(std::string_view spec) { return detail::PhiParser(spec).parse(); }

inline std::string render_phi(const PhiFunction& phi) {
  using detail::render_number;
  switch (phi.kind()) {
    case PhiKind::power:
      return "pow:" + render_number(phi.parameter());
    case PhiKind::exp_linear:
      return "exp:" + render_number(phi.parameter());
    case PhiKind::exp_power:
      return "exppow:" + render_number(phi.parameter());
    case PhiKind::sup:
      return "sup(" + render_phi(phi.lhs()) + "," + render_phi(phi.rhs()) + ")";
    case PhiKind::mixture:
      return "mix:" + render_number(phi.parameter()) + "(" + render_phi(phi.lhs()) + "," +
             render_phi(phi.rhs()) + ")";
  }
  return {};
}

}  // namespace orliczot
