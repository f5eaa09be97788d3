#pragma once

#include <array>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qhlab/rational.hpp"

namespace qhlab {

/// Fixed ordered variable set: bracket parameters followed by metric parameters.
enum class Var : int { alpha = 0, beta1, beta2, gamma1, gamma2, c1, c2 };
inline constexpr int kNumVars = 7;

inline constexpr std::array<std::string_view, kNumVars> kVarNames = {"alpha", "beta1", "beta2", "gamma1",
                                                                      "gamma2", "c1",    "c2"};

inline Var parse_var(std::string_view name) {
  for (int i = 0; i < kNumVars; ++i)
    if (kVarNames[i] == name) return static_cast<Var>(i);
  throw std::invalid_argument("unknown polynomial variable '" + std::string(name) + "'");
}

/// Exponent vector over the fixed variable set.
struct Monomial {
  std::array<std::uint8_t, kNumVars> exp{};

  [[nodiscard]] int degree() const {
    int d = 0;
    for (auto e : exp) d += e;
    return d;
  }
  friend Monomial operator*(const Monomial& a, const Monomial& b) {
    Monomial m;
    for (int i = 0; i < kNumVars; ++i) m.exp[i] = static_cast<std::uint8_t>(a.exp[i] + b.exp[i]);
    return m;
  }
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.exp == b.exp; }
};

/// Graded lexicographic order, largest monomial first.
struct GrlexGreater {
  bool operator()(const Monomial& a, const Monomial& b) const {
    int da = a.degree(), db = b.degree();
    if (da != db) return da > db;
    return a.exp > b.exp;
  }
};

/// Sparse multivariate polynomial with rational coefficients. Zero coefficients are never stored.
class Poly {
 public:
  using Terms = std::map<Monomial, Rational, GrlexGreater>;

  Poly() = default;
  Poly(int c) : Poly(Rational(c)) {}  // NOLINT(google-explicit-constructor)
  Poly(const Rational& c) {           // NOLINT(google-explicit-constructor)
    if (!c.is_zero()) terms_.emplace(Monomial{}, c);
  }

  static Poly var(Var v) {
    Monomial m;
    m.exp[static_cast<int>(v)] = 1;
    Poly p;
    p.terms_.emplace(m, Rational(1));
    return p;
  }
  static Poly monomial(const Monomial& m, const Rational& c) {
    Poly p;
    if (!c.is_zero()) p.terms_.emplace(m, c);
    return p;
  }

  [[nodiscard]] const Terms& terms() const { return terms_; }
  [[nodiscard]] bool is_zero() const { return terms_.empty(); }
  [[nodiscard]] bool is_constant() const {
    return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.degree() == 0);
  }
  [[nodiscard]] Rational constant_term() const {
    auto it = terms_.find(Monomial{});
    return it == terms_.end() ? Rational(0) : it->second;
  }
  [[nodiscard]] int degree() const { return terms_.empty() ? -1 : terms_.begin()->first.degree(); }
  [[nodiscard]] Rational coefficient(const Monomial& m) const {
    auto it = terms_.find(m);
    return it == terms_.end() ? Rational(0) : it->second;
  }

  Poly& operator+=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, c);
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    for (const auto& [m, c] : o.terms_) add_term(m, -c);
    return *this;
  }
  Poly& operator*=(const Rational& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator-(Poly a) {
    for (auto& [m, c] : a.terms_) c = -c;
    return a;
  }
  friend Poly operator*(Poly a, const Rational& s) { return a *= s; }
  friend Poly operator*(const Rational& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly out;
    for (const auto& [ma, ca] : a.terms_)
      for (const auto& [mb, cb] : b.terms_) out.add_term(ma * mb, ca * cb);
    return out;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Evaluates at a full assignment of the variable set.
  [[nodiscard]] Rational eval(const std::array<Rational, kNumVars>& point) const {
    Rational total(0);
    for (const auto& [m, c] : terms_) {
      Rational t = c;
      for (int i = 0; i < kNumVars; ++i)
        for (int e = 0; e < m.exp[i]; ++e) t *= point[i];
      total += t;
    }
    return total;
  }

  /// Replaces variable v by the polynomial value.
  [[nodiscard]] Poly substitute(Var v, const Poly& value) const {
    const int vi = static_cast<int>(v);
    std::vector<Poly> powers{Poly(1)};
    Poly out;
    for (const auto& [m, c] : terms_) {
      while (static_cast<int>(powers.size()) <= m.exp[vi]) powers.push_back(powers.back() * value);
      Monomial rest = m;
      rest.exp[vi] = 0;
      out += Poly::monomial(rest, c) * powers[m.exp[vi]];
    }
    return out;
  }

  /// Leading coefficient in graded-lex order (zero for the zero polynomial).
  [[nodiscard]] Rational leading_coefficient() const {
    return terms_.empty() ? Rational(0) : terms_.begin()->second;
  }

  [[nodiscard]] std::string str() const {
    if (terms_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      Rational mag = c.abs();
      if (first) {
        if (c.sign() < 0) os << "-";
      } else {
        os << (c.sign() < 0 ? " - " : " + ");
      }
      first = false;
      bool unit = mag == Rational(1);
      bool constant = m.degree() == 0;
      if (!unit || constant) os << mag;
      bool need_star = !unit || constant;
      for (int i = 0; i < kNumVars; ++i) {
        if (m.exp[i] == 0) continue;
        if (need_star) os << "*";
        os << kVarNames[i];
        if (m.exp[i] > 1) os << "^" << static_cast<int>(m.exp[i]);
        need_star = true;
      }
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const Poly& p) { return os << p.str(); }

 private:
  void add_term(const Monomial& m, const Rational& c) {
    if (c.is_zero()) return;
    auto [it, inserted] = terms_.emplace(m, c);
    if (!inserted) {
      it->second += c;
      if (it->second.is_zero()) terms_.erase(it);
    }
  }

  Terms terms_;
};

inline bool is_zero(const Poly& p) { return p.is_zero(); }

inline Poly operator*(const Poly& a, int s) { return a * Rational(s); }

/// lambda with p = lambda * q, if it exists. Fails when q is zero and p is not.
inline std::optional<Rational> proportionality(const Poly& p, const Poly& q) {
  if (q.is_zero()) return p.is_zero() ? std::optional<Rational>(Rational(0)) : std::nullopt;
  if (p.is_zero()) return Rational(0);
  if (p.terms().size() != q.terms().size()) return std::nullopt;
  Rational lambda = p.leading_coefficient() / q.leading_coefficient();
  if (p - q * lambda != Poly()) return std::nullopt;
  return lambda;
}

/// Parses expressions such as "c2*(c1 - 2*c2)" or "3*c1^2 + 3*c1*c2" over the fixed variable set.
class PolyParser {
 public:
  explicit PolyParser(std::string_view text) : s_(text) {}

  Poly parse() {
    Poly p = expr();
    skip_ws();
    if (pos_ != s_.size()) fail("trailing characters");
    return p;
  }

 private:
  Poly expr() {
    Poly acc = term();
    for (;;) {
      skip_ws();
      if (peek('+')) {
        ++pos_;
        acc += term();
      } else if (peek('-')) {
        ++pos_;
        acc -= term();
      } else {
        return acc;
      }
    }
  }
  Poly term() {
    Poly acc = factor();
    for (;;) {
      skip_ws();
      if (peek('*')) {
        ++pos_;
        acc *= factor();
      } else if (pos_ < s_.size() && (s_[pos_] == '(' || std::isalpha(static_cast<unsigned char>(s_[pos_])))) {
        acc *= factor();
      } else {
        return acc;
      }
    }
  }
  Poly factor() {
    skip_ws();
    if (peek('-')) {
      ++pos_;
      return -factor();
    }
    Poly base = atom();
    skip_ws();
    if (peek('^')) {
      ++pos_;
      skip_ws();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected exponent");
      int e = std::stoi(std::string(s_.substr(start, pos_ - start)));
      Poly out(1);
      for (int i = 0; i < e; ++i) out *= base;
      return out;
    }
    return base;
  }
  Poly atom() {
    skip_ws();
    if (peek('(')) {
      ++pos_;
      Poly p = expr();
      skip_ws();
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return p;
    }
    std::size_t start = pos_;
    if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
      while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/')) ++pos_;
      return Poly(Rational::parse(s_.substr(start, pos_ - start)));
    }
    while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) fail("expected operand");
    return Poly::var(parse_var(s_.substr(start, pos_ - start)));
  }
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) const { return pos_ < s_.size() && s_[pos_] == c; }
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("PolyParser: " + what + " at position " + std::to_string(pos_) + " in '" +
                                std::string(s_) + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

inline Poly parse_poly(std::string_view text) { return PolyParser(text).parse(); }

}  // namespace qhlab
