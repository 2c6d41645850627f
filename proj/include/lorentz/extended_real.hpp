#pragma once

#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>

namespace lorentz {

// A positive real number or +infinity, stored as an explicit state.
class ExtendedReal {
 public:
  static ExtendedReal finite(double value) {
    if (!std::isfinite(value) || value <= 0.0)
      throw std::domain_error("extended real must be a finite positive number or inf");
    return ExtendedReal(value, false);
  }

  static ExtendedReal infinity() { return ExtendedReal(0.0, true); }

  // Accepts "inf" / "infinity" (any case) or a decimal number.
  static ExtendedReal parse(std::string_view text);

  bool is_infinite() const noexcept { return infinite_; }
  bool is_finite() const noexcept { return !infinite_; }

  // The finite value; +inf when infinite.
  double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : value_;
  }

  // 1/value, exactly 0 when infinite.
  double reciprocal() const noexcept { return infinite_ ? 0.0 : 1.0 / value_; }

  std::string to_string() const;

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) noexcept {
    return a.infinite_ == b.infinite_ && (a.infinite_ || a.value_ == b.value_);
  }

 private:
  ExtendedReal(double v, bool inf) : value_(v), infinite_(inf) {}

  double value_;
  bool infinite_;
};

// The Lorentz index q in [1, inf].
class QIndex {
 public:
  static QIndex finite(double q) {
    if (!std::isfinite(q) || q < 1.0) throw std::domain_error("q must satisfy q >= 1");
    return QIndex(ExtendedReal::finite(q));
  }
  static QIndex infinity() { return QIndex(ExtendedReal::infinity()); }
  static QIndex parse(std::string_view text) {
    auto v = ExtendedReal::parse(text);
    if (v.is_infinite()) return infinity();
    return finite(v.value());
  }

  bool is_infinite() const noexcept { return q_.is_infinite(); }
  bool is_finite() const noexcept { return q_.is_finite(); }
  double value() const noexcept { return q_.value(); }
  double reciprocal() const noexcept { return q_.reciprocal(); }

  // Exponent of the Lorentz weights i^{1/q - 1}; -1 for q = inf.
  double weight_exponent() const noexcept { return q_.reciprocal() - 1.0; }

  const ExtendedReal& as_extended() const noexcept { return q_; }
  std::string to_string() const { return q_.to_string(); }

  friend bool operator==(const QIndex& a, const QIndex& b) noexcept { return a.q_ == b.q_; }

 private:
  explicit QIndex(ExtendedReal q) : q_(q) {}
  ExtendedReal q_;
};

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    char x = a[i], y = b[i];
    if (x >= 'A' && x <= 'Z') x = static_cast<char>(x - 'A' + 'a');
    if (y >= 'A' && y <= 'Z') y = static_cast<char>(y - 'A' + 'a');
    if (x != y) return false;
  }
  return true;
}

inline double parse_double(std::string_view text) {
  // std::from_chars for double is available in libstdc++ >= 11.
  double out = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last)
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  return out;
}

// Shortest representation that round-trips.
inline std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  if (ec != std::errc()) return "nan";
  return std::string(buf, ptr);
}

}  // namespace detail

inline ExtendedReal ExtendedReal::parse(std::string_view text) {
  if (detail::iequals(text, "inf") || detail::iequals(text, "infinity") ||
      detail::iequals(text, "+inf"))
    return infinity();
  return finite(detail::parse_double(text));
}

inline std::string ExtendedReal::to_string() const {
  return infinite_ ? std::string("inf") : detail::format_double(value_);
}

}  // namespace lorentz
