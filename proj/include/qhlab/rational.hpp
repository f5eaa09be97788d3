#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>

namespace qhlab {

/// Exact rational number, always kept in lowest terms with positive denominator.
class Rational {
 public:
  Rational() = default;
  Rational(int v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(long v) : v_(v) {}  // NOLINT(google-explicit-constructor)
  Rational(long long v) : v_(static_cast<long>(v)) {}  // NOLINT(google-explicit-constructor)
  Rational(long num, long den) : v_(num, den) {
    if (den == 0) throw std::domain_error("Rational: zero denominator");
    v_.canonicalize();
  }
  explicit Rational(mpq_class v) : v_(std::move(v)) { v_.canonicalize(); }

  /// Parses "p", "-p", "p/q". Throws std::invalid_argument on malformed input.
  static Rational parse(std::string_view text) {
    const auto first = text.find_first_not_of(" \t"), last = text.find_last_not_of(" \t");
    std::string s = first == std::string_view::npos ? std::string() : std::string(text.substr(first, last - first + 1));
    if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");
    auto valid = [](const std::string& part, bool allow_sign) {
      if (part.empty()) return false;
      std::size_t start = (allow_sign && (part[0] == '-' || part[0] == '+')) ? 1 : 0;
      if (start == part.size()) return false;
      for (std::size_t i = start; i < part.size(); ++i)
        if (part[i] < '0' || part[i] > '9') return false;
      return true;
    };
    auto slash = s.find('/');
    std::string num = s.substr(0, slash);
    std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid(num, true) || !valid(den, false))
      throw std::invalid_argument("Rational::parse: malformed rational '" + s + "'");
    if (num[0] == '+') num.erase(0, 1);
    mpz_class n(num), d(den);
    if (d == 0) throw std::invalid_argument("Rational::parse: zero denominator");
    return Rational(mpq_class(n, d));
  }

  [[nodiscard]] const mpq_class& raw() const { return v_; }
  [[nodiscard]] mpz_class num() const { return v_.get_num(); }
  [[nodiscard]] mpz_class den() const { return v_.get_den(); }
  [[nodiscard]] bool is_zero() const { return sgn(v_) == 0; }
  [[nodiscard]] int sign() const { return sgn(v_); }
  [[nodiscard]] bool is_integer() const { return v_.get_den() == 1; }
  [[nodiscard]] double to_double() const { return v_.get_d(); }

  /// Canonical text: "p" for integers, "p/q" otherwise.
  [[nodiscard]] std::string str() const { return v_.get_str(); }

  Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
  Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
  Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
  Rational& operator/=(const Rational& o) {
    if (o.is_zero()) throw std::domain_error("Rational: division by zero");
    v_ /= o.v_;
    return *this;
  }
  friend Rational operator+(Rational a, const Rational& b) { return a += b; }
  friend Rational operator-(Rational a, const Rational& b) { return a -= b; }
  friend Rational operator*(Rational a, const Rational& b) { return a *= b; }
  friend Rational operator/(Rational a, const Rational& b) { return a /= b; }
  friend Rational operator-(const Rational& a) { return Rational(mpq_class(-a.v_)); }

  friend bool operator==(const Rational& a, const Rational& b) { return a.v_ == b.v_; }
  friend bool operator!=(const Rational& a, const Rational& b) { return a.v_ != b.v_; }
  friend bool operator<(const Rational& a, const Rational& b) { return a.v_ < b.v_; }
  friend bool operator>(const Rational& a, const Rational& b) { return a.v_ > b.v_; }
  friend bool operator<=(const Rational& a, const Rational& b) { return a.v_ <= b.v_; }
  friend bool operator>=(const Rational& a, const Rational& b) { return a.v_ >= b.v_; }

  friend std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

  [[nodiscard]] Rational abs() const { return Rational(mpq_class(::abs(v_))); }
  [[nodiscard]] Rational inverse() const { return Rational(1) / *this; }

 private:
  mpq_class v_;
};

inline Rational pow(Rational base, int e) {
  if (e < 0) return pow(base.inverse(), -e);
  Rational out(1);
  while (e-- > 0) out *= base;
  return out;
}

/// Exact square root when the argument is a square of a rational.
inline bool rational_sqrt(const Rational& r, Rational& out) {
  if (r.sign() < 0) return false;
  mpz_class n = r.num(), d = r.den();
  mpz_class sn = sqrt(n), sd = sqrt(d);
  if (sn * sn != n || sd * sd != d) return false;
  out = Rational(mpq_class(sn, sd));
  return true;
}

// Uniform scalar interface shared by Rational, Poly and prime-field elements.
inline bool is_zero(const Rational& r) { return r.is_zero(); }

}  // namespace qhlab

template <>
struct std::hash<qhlab::Rational> {
  std::size_t operator()(const qhlab::Rational& r) const noexcept {
    return std::hash<std::string>{}(r.str());
  }
};
