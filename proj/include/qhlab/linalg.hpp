#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "qhlab/matrix.hpp"
#include "qhlab/rational.hpp"

namespace qhlab {

// ---------------------------------------------------------------------------
// Prime field Z/p with p = 2^61 - 1.

struct ModP {
  static constexpr std::uint64_t P = (std::uint64_t{1} << 61) - 1;
  std::uint64_t v = 0;

  ModP() = default;
  ModP(int x) : v(x >= 0 ? static_cast<std::uint64_t>(x) % P : P - (static_cast<std::uint64_t>(-static_cast<long long>(x)) % P)) {}  // NOLINT
  static ModP raw(std::uint64_t x) {
    ModP m;
    m.v = x;
    return m;
  }
  static std::uint64_t reduce(unsigned __int128 x) {
    std::uint64_t lo = static_cast<std::uint64_t>(x & P);
    std::uint64_t hi = static_cast<std::uint64_t>(x >> 61);
    std::uint64_t s = lo + hi;
    s = (s & P) + (s >> 61);
    return s >= P ? s - P : s;
  }
  friend ModP operator+(ModP a, ModP b) {
    std::uint64_t s = a.v + b.v;
    return raw(s >= P ? s - P : s);
  }
  friend ModP operator-(ModP a, ModP b) { return raw(a.v >= b.v ? a.v - b.v : a.v + P - b.v); }
  friend ModP operator-(ModP a) { return raw(a.v == 0 ? 0 : P - a.v); }
  friend ModP operator*(ModP a, ModP b) { return raw(reduce(static_cast<unsigned __int128>(a.v) * b.v)); }
  ModP& operator+=(ModP o) { return *this = *this + o; }
  ModP& operator-=(ModP o) { return *this = *this - o; }
  ModP& operator*=(ModP o) { return *this = *this * o; }
  [[nodiscard]] ModP pow(std::uint64_t e) const {
    ModP base = *this, out = raw(1);
    while (e) {
      if (e & 1) out *= base;
      base *= base;
      e >>= 1;
    }
    return out;
  }
  [[nodiscard]] ModP inverse() const {
    if (v == 0) throw std::domain_error("ModP: inverse of zero");
    return pow(P - 2);
  }
  friend ModP operator/(ModP a, ModP b) { return a * b.inverse(); }
  friend bool operator==(ModP a, ModP b) { return a.v == b.v; }
  friend bool operator!=(ModP a, ModP b) { return a.v != b.v; }
};

inline bool is_zero(const ModP& m) { return m.v == 0; }

/// Image of a rational in Z/p; nullopt when the denominator vanishes mod p.
inline std::optional<ModP> to_modp(const Rational& r) {
  mpz_class n = r.num(), d = r.den();
  mpz_class p(std::to_string(ModP::P));
  mpz_class nm = n % p;
  if (nm < 0) nm += p;
  mpz_class dm = d % p;
  if (dm == 0) return std::nullopt;
  ModP a = ModP::raw(std::stoull(nm.get_str()));
  ModP b = ModP::raw(std::stoull(dm.get_str()));
  return a / b;
}

/// Wang's rational reconstruction: r/s with |r|, s <= sqrt(p/2) and r = s*a mod p.
inline std::optional<Rational> rational_reconstruct(ModP a) {
  using i128 = __int128;
  const i128 p = ModP::P;
  const i128 bound = static_cast<i128>(1) << 30;  // sqrt(p/2) = 2^30
  i128 r0 = p, r1 = a.v, s0 = 0, s1 = 1;
  while (r1 >= bound) {
    i128 q = r0 / r1;
    i128 t = r0 - q * r1;
    r0 = r1;
    r1 = t;
    t = s0 - q * s1;
    s0 = s1;
    s1 = t;
  }
  if (s1 == 0) return std::nullopt;
  i128 sabs = s1 < 0 ? -s1 : s1;
  if (sabs >= bound) return std::nullopt;
  long long num = static_cast<long long>(s1 < 0 ? -r1 : r1);
  long long den = static_cast<long long>(sabs);
  return Rational(static_cast<long>(num), static_cast<long>(den));
}

// ---------------------------------------------------------------------------
// Sparse rows and echelon elimination over a field.

template <class F>
using SparseRow = std::vector<std::pair<std::uint32_t, F>>;

/// Row-major sparse matrix; rows are kept sorted by column.
template <class F>
struct SparseMatrix {
  std::size_t cols = 0;
  std::vector<SparseRow<F>> rows;

  void add_row(SparseRow<F> row) {
    std::sort(row.begin(), row.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    SparseRow<F> merged;
    for (auto& [c, v] : row) {
      if (!merged.empty() && merged.back().first == c)
        merged.back().second += v;
      else
        merged.emplace_back(c, v);
    }
    std::erase_if(merged, [](const auto& e) { return is_zero(e.second); });
    if (!merged.empty()) rows.push_back(std::move(merged));
  }

  [[nodiscard]] std::vector<F> apply(const std::vector<F>& x) const {
    std::vector<F> out(rows.size(), F(0));
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (const auto& [c, v] : rows[r])
        if (!is_zero(x[c])) out[r] += v * x[c];
    return out;
  }
};

/// Incremental row echelon form. Pivot rows have leading coefficient 1.
template <class F>
class SparseEchelon {
 public:
  explicit SparseEchelon(std::size_t cols) : cols_(cols), pivot_of_col_(cols, -1) {}

  /// Reduces the row against existing pivots; keeps it as a new pivot when nonzero.
  bool insert(SparseRow<F> row) {
    SparseRow<F> scratch;
    while (!row.empty()) {
      const std::uint32_t lead = row.front().first;
      const int p = pivot_of_col_[lead];
      if (p < 0) {
        F inv = F(1) / row.front().second;
        for (auto& e : row) e.second = e.second * inv;
        pivot_of_col_[lead] = static_cast<int>(pivots_.size());
        pivots_.push_back(std::move(row));
        return true;
      }
      const F factor = row.front().second;
      const SparseRow<F>& prow = pivots_[p];
      scratch.clear();
      scratch.reserve(row.size() + prow.size());
      std::size_t i = 1, j = 1;
      while (i < row.size() || j < prow.size()) {
        if (j >= prow.size() || (i < row.size() && row[i].first < prow[j].first)) {
          scratch.push_back(row[i++]);
        } else if (i >= row.size() || prow[j].first < row[i].first) {
          scratch.emplace_back(prow[j].first, F(0) - factor * prow[j].second);
          ++j;
        } else {
          F v = row[i].second - factor * prow[j].second;
          if (!is_zero(v)) scratch.emplace_back(row[i].first, v);
          ++i;
          ++j;
        }
      }
      row.swap(scratch);
    }
    return false;
  }

  [[nodiscard]] std::size_t rank() const { return pivots_.size(); }
  [[nodiscard]] std::size_t cols() const { return cols_; }

  [[nodiscard]] std::vector<std::uint32_t> free_columns() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t c = 0; c < cols_; ++c)
      if (pivot_of_col_[c] < 0) out.push_back(c);
    return out;
  }

  /// Kernel basis; the i-th vector is 1 on the i-th free column and 0 on the other free columns.
  [[nodiscard]] std::vector<std::vector<F>> kernel() const {
    std::vector<std::vector<F>> out;
    for (std::uint32_t f : free_columns()) {
      std::vector<F> x(cols_, F(0));
      x[f] = F(1);
      for (std::int64_t c = static_cast<std::int64_t>(cols_) - 1; c >= 0; --c) {
        const int p = pivot_of_col_[c];
        if (p < 0) continue;
        F s(0);
        const SparseRow<F>& row = pivots_[p];
        for (std::size_t k = 1; k < row.size(); ++k)
          if (!is_zero(x[row[k].first])) s += row[k].second * x[row[k].first];
        x[c] = F(0) - s;
      }
      out.push_back(std::move(x));
    }
    return out;
  }

 private:
  std::size_t cols_;
  std::vector<int> pivot_of_col_;
  std::vector<SparseRow<F>> pivots_;
};

/// Exact kernel basis of a sparse rational matrix.
///
/// Elimination runs over Z/p; each kernel vector is lifted by rational reconstruction and
/// verified exactly against every row. The mod-p nullity bounds the rational nullity from
/// above, so a full set of verified lifts is the exact kernel. Falls back to elimination
/// over Q when reconstruction or verification fails.
inline std::vector<RatVector> sparse_nullspace(const SparseMatrix<Rational>& a) {
  auto exact = [&]() {
    SparseEchelon<Rational> ech(a.cols);
    for (const auto& row : a.rows) ech.insert(row);
    return ech.kernel();
  };

  SparseEchelon<ModP> ech(a.cols);
  for (const auto& row : a.rows) {
    SparseRow<ModP> r;
    r.reserve(row.size());
    for (const auto& [c, v] : row) {
      auto m = to_modp(v);
      if (!m) return exact();
      r.emplace_back(c, *m);
    }
    ech.insert(std::move(r));
  }
  std::vector<RatVector> lifted;
  for (const auto& k : ech.kernel()) {
    RatVector x(a.cols);
    for (std::size_t i = 0; i < a.cols; ++i) {
      auto r = rational_reconstruct(k[i]);
      if (!r) return exact();
      x[i] = *r;
    }
    for (const auto& row : a.rows) {
      Rational s(0);
      for (const auto& [c, v] : row)
        if (!x[c].is_zero()) s += v * x[c];
      if (!s.is_zero()) return exact();
    }
    lifted.push_back(std::move(x));
  }
  return lifted;
}

/// Rank over Z/p; a lower bound for the rational rank (equal for all but finitely many primes).
inline std::size_t sparse_rank_modp(const SparseMatrix<Rational>& a) {
  SparseEchelon<ModP> ech(a.cols);
  for (const auto& row : a.rows) {
    SparseRow<ModP> r;
    for (const auto& [c, v] : row) r.emplace_back(c, to_modp(v).value());
    ech.insert(std::move(r));
  }
  return ech.rank();
}

// ---------------------------------------------------------------------------
// Dense routines: fraction-free (Bareiss) elimination on integer-scaled rows.

struct BareissResult {
  std::vector<std::vector<mpz_class>> rows;  // echelon form, integer entries
  std::vector<std::size_t> pivot_cols;
};

inline BareissResult bareiss_echelon(const RatMatrix& m) {
  BareissResult res;
  const std::size_t R = m.rows(), C = m.cols();
  res.rows.assign(R, std::vector<mpz_class>(C));
  for (std::size_t i = 0; i < R; ++i) {
    mpz_class l = 1;
    for (std::size_t j = 0; j < C; ++j) l = lcm(l, m(i, j).den());
    for (std::size_t j = 0; j < C; ++j) res.rows[i][j] = m(i, j).num() * (l / m(i, j).den());
  }
  auto& a = res.rows;
  mpz_class prev = 1;
  std::size_t r = 0;
  for (std::size_t c = 0; c < C && r < R; ++c) {
    std::size_t piv = r;
    while (piv < R && a[piv][c] == 0) ++piv;
    if (piv == R) continue;
    std::swap(a[piv], a[r]);
    for (std::size_t i = r + 1; i < R; ++i) {
      for (std::size_t j = c + 1; j < C; ++j) {
        a[i][j] = (a[r][c] * a[i][j] - a[i][c] * a[r][j]);
        mpz_divexact(a[i][j].get_mpz_t(), a[i][j].get_mpz_t(), prev.get_mpz_t());
      }
      a[i][c] = 0;
    }
    prev = a[r][c];
    res.pivot_cols.push_back(c);
    ++r;
  }
  return res;
}

inline std::size_t rank(const RatMatrix& m) { return bareiss_echelon(m).pivot_cols.size(); }

/// Exact kernel basis; vector i is 1 on the i-th free column, 0 on the other free columns.
inline std::vector<RatVector> nullspace(const RatMatrix& m) {
  BareissResult e = bareiss_echelon(m);
  const std::size_t C = m.cols();
  std::vector<bool> is_pivot(C, false);
  for (auto c : e.pivot_cols) is_pivot[c] = true;
  std::vector<RatVector> out;
  for (std::size_t f = 0; f < C; ++f) {
    if (is_pivot[f]) continue;
    RatVector x(C, Rational(0));
    x[f] = 1;
    for (std::size_t k = e.pivot_cols.size(); k-- > 0;) {
      const std::size_t c = e.pivot_cols[k];
      Rational s(0);
      for (std::size_t j = c + 1; j < C; ++j)
        if (!x[j].is_zero() && e.rows[k][j] != 0) s += Rational(mpq_class(e.rows[k][j])) * x[j];
      x[c] = -s / Rational(mpq_class(e.rows[k][c]));
    }
    out.push_back(std::move(x));
  }
  return out;
}

/// Solves A x = b exactly; nullopt when inconsistent. Free variables are set to zero.
inline std::optional<RatVector> solve(const RatMatrix& a, const RatVector& b) {
  if (b.size() != a.rows()) throw std::invalid_argument("solve: right-hand side length mismatch");
  RatMatrix aug(a.rows(), a.cols() + 1);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) aug(i, j) = a(i, j);
    aug(i, a.cols()) = b[i];
  }
  BareissResult e = bareiss_echelon(aug);
  if (!e.pivot_cols.empty() && e.pivot_cols.back() == a.cols()) return std::nullopt;
  RatVector x(a.cols(), Rational(0));
  for (std::size_t k = e.pivot_cols.size(); k-- > 0;) {
    const std::size_t c = e.pivot_cols[k];
    Rational s = Rational(mpq_class(e.rows[k][a.cols()]));
    for (std::size_t j = c + 1; j < a.cols(); ++j)
      if (!x[j].is_zero() && e.rows[k][j] != 0) s -= Rational(mpq_class(e.rows[k][j])) * x[j];
    x[c] = s / Rational(mpq_class(e.rows[k][c]));
  }
  return x;
}

inline std::optional<RatMatrix> inverse(const RatMatrix& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("inverse: matrix not square");
  const std::size_t n = a.rows();
  RatMatrix out(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    RatVector e(n, Rational(0));
    e[j] = 1;
    auto x = solve(a, e);
    if (!x) return std::nullopt;
    for (std::size_t i = 0; i < n; ++i) out(i, j) = (*x)[i];
  }
  if (!(a * out == RatMatrix::identity(n))) return std::nullopt;
  return out;
}

/// Rank of a list of vectors (as rows).
inline std::size_t rank_of(const std::vector<RatVector>& vs) {
  if (vs.empty()) return 0;
  RatMatrix m(vs.size(), vs.front().size());
  for (std::size_t i = 0; i < vs.size(); ++i)
    for (std::size_t j = 0; j < vs[i].size(); ++j) m(i, j) = vs[i][j];
  return rank(m);
}

}  // namespace qhlab
