#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <vector>

#include "qhlab/lie.hpp"
#include "qhlab/matrix.hpp"
#include "qhlab/models.hpp"

namespace qhlab {

/// Data of a reductive pair needed for invariant Riemannian geometry on m.
struct ReductiveData {
  BilinearMap<Rational> bracket_m;  // [x, y]_m
  BilinearMap<Rational> bracket_h;  // [x, y]_h in h coordinates
  std::vector<RatMatrix> rho;       // isotropy action on m
  std::vector<Rational> metric;     // diagonal metric entries

  [[nodiscard]] std::size_t dim() const { return metric.size(); }
};

inline ReductiveData reductive_data(const HomogeneousModel& m) {
  return {m.bracket_m, m.bracket_h, m.rho, m.metric};
}
inline ReductiveData reductive_data(const HomogeneousModel& m, const std::vector<Rational>& metric) {
  return {m.bracket_m, m.bracket_h, m.rho, metric};
}

/// Lambda(e_i) for each basis vector, from 2g(L(x)y, z) = g([x,y],z) - g([y,z],x) + g([z,x],y).
inline std::vector<RatMatrix> nomizu(const ReductiveData& d) {
  const std::size_t N = d.dim();
  for (const auto& c : d.metric)
    if (c.sign() <= 0) throw std::invalid_argument("nomizu: metric must be positive definite");
  auto br = [&](std::size_t a, std::size_t b, std::size_t c) -> Rational {
    if (a == b) return 0;
    return a < b ? d.bracket_m.value(a, b)[c] : -d.bracket_m.value(b, a)[c];
  };
  std::vector<RatMatrix> L(N, RatMatrix(N, N));
  for (std::size_t x = 0; x < N; ++x)
    for (std::size_t y = 0; y < N; ++y)
      for (std::size_t z = 0; z < N; ++z) {
        Rational v = d.metric[z] * br(x, y, z) - d.metric[x] * br(y, z, x) + d.metric[y] * br(z, x, y);
        if (!v.is_zero()) L[x](z, y) = v / (d.metric[z] * Rational(2));
      }
  for (std::size_t x = 0; x < N; ++x) {
    for (std::size_t a = 0; a < N; ++a)
      for (std::size_t b = 0; b < N; ++b)
        if (d.metric[a] * L[x](a, b) != -(d.metric[b] * L[x](b, a)))
          throw std::logic_error("nomizu: connection is not metric");
    for (std::size_t y = x + 1; y < N; ++y)
      for (std::size_t z = 0; z < N; ++z)
        if (L[x](z, y) - L[y](z, x) != br(x, y, z)) throw std::logic_error("nomizu: connection has torsion");
  }
  return L;
}

struct CurvatureData {
  std::size_t N = 0;
  std::vector<Rational> metric;
  std::vector<RatMatrix> nomizu;  // Lambda(e_i)
  std::vector<RatMatrix> R;       // R[i*N+j] = R(e_i, e_j) as an endomorphism of m
  RatMatrix ricci;
  Rational scalar;

  /// R(e_a, e_b, e_c, e_d) = g(R(e_a, e_b) e_c, e_d).
  [[nodiscard]] Rational lowered(std::size_t a, std::size_t b, std::size_t c, std::size_t d) const {
    return metric[d] * R[a * N + b](d, c);
  }
};

/// Checks antisymmetry in both pairs, pair symmetry and the first Bianchi identity.
inline bool has_curvature_symmetries(const CurvatureData& cd) {
  const std::size_t N = cd.N;
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = 0; b < N; ++b)
      for (std::size_t c = 0; c < N; ++c)
        for (std::size_t d = 0; d < N; ++d) {
          Rational r = cd.lowered(a, b, c, d);
          if (r != -cd.lowered(b, a, c, d) || r != -cd.lowered(a, b, d, c) || r != cd.lowered(c, d, a, b)) return false;
          if (!(r + cd.lowered(b, c, a, d) + cd.lowered(c, a, b, d)).is_zero()) return false;
        }
  return true;
}

/// R(x, y) = [L(x), L(y)] - L([x, y]_m) - rho([x, y]_h).
inline CurvatureData riemann(const ReductiveData& d) {
  CurvatureData cd;
  cd.N = d.dim();
  const std::size_t N = cd.N;
  cd.metric = d.metric;
  cd.nomizu = nomizu(d);
  const auto& L = cd.nomizu;
  cd.R.assign(N * N, RatMatrix(N, N));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = i + 1; j < N; ++j) {
      RatMatrix r = commutator(L[i], L[j]);
      for (const auto& [k, c] : d.bracket_m.upper(i, j)) r = r - L[k] * c;
      for (const auto& [k, c] : d.bracket_h.upper(i, j)) r = r - d.rho[k] * c;
      cd.R[j * N + i] = r * Rational(-1);
      cd.R[i * N + j] = std::move(r);
    }
  if (!has_curvature_symmetries(cd)) throw std::logic_error("riemann: curvature symmetries fail");
  cd.ricci = RatMatrix(N, N);
  for (std::size_t b = 0; b < N; ++b)
    for (std::size_t c = 0; c < N; ++c) {
      Rational s(0);
      for (std::size_t a = 0; a < N; ++a) s += cd.R[a * N + b](a, c);
      cd.ricci(b, c) = s;
    }
  cd.scalar = 0;
  for (std::size_t b = 0; b < N; ++b) cd.scalar += cd.ricci(b, b) / d.metric[b];
  return cd;
}

inline CurvatureData riemann(const HomogeneousModel& m) { return riemann(reductive_data(m)); }

/// Kulkarni-Nomizu product of symmetric matrices.
inline Rational kulkarni_nomizu(const RatMatrix& h, const RatMatrix& k, std::size_t a, std::size_t b, std::size_t c,
                                std::size_t d) {
  return h(a, d) * k(b, c) + h(b, c) * k(a, d) - h(a, c) * k(b, d) - h(b, d) * k(a, c);
}

inline RatMatrix metric_matrix(const std::vector<Rational>& g) {
  RatMatrix G(g.size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) G(i, i) = g[i];
  return G;
}

/// Weyl tensor component W = R - (Ric - scal/(2(N-1)) g) (.) g / (N-2), N >= 4.
inline Rational weyl(const CurvatureData& cd, std::size_t a, std::size_t b, std::size_t c, std::size_t d) {
  const Rational N(static_cast<long>(cd.N));
  RatMatrix G = metric_matrix(cd.metric);
  RatMatrix P = cd.ricci - G * (cd.scalar / (Rational(2) * (N - Rational(1))));
  return cd.lowered(a, b, c, d) - kulkarni_nomizu(P, G, a, b, c, d) / (N - Rational(2));
}

inline bool weyl_vanishes(const CurvatureData& cd) {
  if (cd.N < 4) throw std::invalid_argument("weyl_vanishes: dimension must be at least 4");
  const std::size_t N = cd.N;
  const Rational n(static_cast<long>(N));
  RatMatrix G = metric_matrix(cd.metric);
  RatMatrix P = (cd.ricci - G * (cd.scalar / (Rational(2) * (n - Rational(1))))) * (n - Rational(2)).inverse();
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b)
      for (std::size_t c = 0; c < N; ++c)
        for (std::size_t d = c + 1; d < N; ++d)
          if (cd.lowered(a, b, c, d) != kulkarni_nomizu(P, G, a, b, c, d)) return false;
  return true;
}

/// (nabla_{e_x} R)(e_y, e_z) = [L(x), R(y,z)] - R(L(x) y, z) - R(y, L(x) z).
inline RatMatrix nabla_riemann(const CurvatureData& cd, std::size_t x, std::size_t y, std::size_t z) {
  const std::size_t N = cd.N;
  const RatMatrix& L = cd.nomizu[x];
  RatMatrix out = commutator(L, cd.R[y * N + z]);
  for (std::size_t k = 0; k < N; ++k) {
    if (!L(k, y).is_zero()) out = out - cd.R[k * N + z] * L(k, y);
    if (!L(k, z).is_zero()) out = out - cd.R[y * N + k] * L(k, z);
  }
  return out;
}

inline bool is_locally_symmetric(const CurvatureData& cd) {
  for (std::size_t x = 0; x < cd.N; ++x)
    for (std::size_t y = 0; y < cd.N; ++y)
      for (std::size_t z = y + 1; z < cd.N; ++z)
        if (!nabla_riemann(cd, x, y, z).is_zero()) return false;
  return true;
}

/// (nabla_x g)(y, z) = -g(L(x) y, z) - g(y, L(x) z).
inline bool metric_parallel(const CurvatureData& cd) {
  for (std::size_t x = 0; x < cd.N; ++x)
    for (std::size_t y = 0; y < cd.N; ++y)
      for (std::size_t z = 0; z < cd.N; ++z)
        if (!(cd.metric[z] * cd.nomizu[x](z, y) + cd.metric[y] * cd.nomizu[x](y, z)).is_zero()) return false;
  return true;
}

inline std::optional<Rational> einstein_constant(const CurvatureData& cd) {
  const Rational lambda = cd.ricci(0, 0) / cd.metric[0];
  for (std::size_t i = 0; i < cd.N; ++i)
    for (std::size_t j = 0; j < cd.N; ++j) {
      Rational want = i == j ? lambda * cd.metric[i] : Rational(0);
      if (cd.ricci(i, j) != want) return std::nullopt;
    }
  return lambda;
}

/// Constant sectional curvature k of R restricted to the coordinate subspace idx, if any.
inline std::optional<Rational> constant_sectional(const CurvatureData& cd, const std::vector<std::size_t>& idx) {
  if (idx.size() < 2) return Rational(0);
  const std::size_t a0 = idx[0], b0 = idx[1];
  const Rational k = cd.lowered(a0, b0, b0, a0) / (cd.metric[a0] * cd.metric[b0]);
  // R(x,y)z = k (g(y,z) x - g(x,z) y) on the subspace
  for (auto a : idx)
    for (auto b : idx)
      for (auto c : idx)
        for (auto d : idx) {
          Rational want(0);
          if (b == c && a == d) want += k * cd.metric[a] * cd.metric[b];
          if (a == c && b == d) want -= k * cd.metric[a] * cd.metric[b];
          if (cd.lowered(a, b, c, d) != want) return std::nullopt;
        }
  return k;
}

inline std::optional<Rational> constant_sectional(const CurvatureData& cd) {
  std::vector<std::size_t> all(cd.N);
  std::iota(all.begin(), all.end(), 0);
  return constant_sectional(cd, all);
}

/// The fixed coordinate split R / Im(H) / H^{n-1} of m.
enum class Block { Real = 0, Imag = 1, Horizontal = 2 };

inline Block block_of(std::size_t i) {
  if (i == 0) return Block::Real;
  if (i < 4) return Block::Imag;
  return Block::Horizontal;
}

inline const char* block_name(Block b) {
  switch (b) {
    case Block::Real: return "R";
    case Block::Imag: return "Im";
    default: return "Hn1";
  }
}

struct ProductFactor {
  std::vector<Block> blocks;
  std::vector<std::size_t> indices;
  std::optional<Rational> sectional;
};

/// Finest grouping of the fixed blocks for which Ricci and R are block diagonal.
inline std::vector<ProductFactor> product_blocks(const CurvatureData& cd) {
  std::array<int, 3> parent{0, 1, 2};
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x];
    return x;
  };
  auto unite = [&](std::size_t i, std::size_t j) {
    int a = find(static_cast<int>(block_of(i))), b = find(static_cast<int>(block_of(j)));
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };
  const std::size_t N = cd.N;
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j)
      if (!cd.ricci(i, j).is_zero()) unite(i, j);
  for (std::size_t a = 0; a < N; ++a)
    for (std::size_t b = a + 1; b < N; ++b)
      for (std::size_t c = 0; c < N; ++c)
        for (std::size_t d = c + 1; d < N; ++d)
          if (!cd.lowered(a, b, c, d).is_zero()) {
            unite(a, b);
            unite(a, c);
            unite(a, d);
          }
  std::vector<ProductFactor> out;
  for (int root = 0; root < 3; ++root) {
    if (find(root) != root) continue;
    ProductFactor f;
    for (int b = 0; b < 3; ++b)
      if (find(b) == root) f.blocks.push_back(static_cast<Block>(b));
    for (std::size_t i = 0; i < N; ++i)
      if (find(static_cast<int>(block_of(i))) == root) f.indices.push_back(i);
    if (f.indices.empty()) continue;
    f.sectional = constant_sectional(cd, f.indices);
    out.push_back(std::move(f));
  }
  return out;
}

struct RiemannianFlags {
  std::optional<Rational> einstein;
  bool conformally_flat = false;
  bool locally_symmetric = false;
  std::optional<Rational> constant_sectional;
  std::vector<ProductFactor> product;  // empty when no splitting along the fixed blocks
  Rational scalar;
};

inline RiemannianFlags classify_riemannian(const CurvatureData& cd) {
  RiemannianFlags f;
  f.einstein = einstein_constant(cd);
  f.conformally_flat = weyl_vanishes(cd);
  f.locally_symmetric = is_locally_symmetric(cd);
  f.constant_sectional = constant_sectional(cd);
  f.scalar = cd.scalar;
  auto blocks = product_blocks(cd);
  if (blocks.size() > 1) f.product = std::move(blocks);
  return f;
}

inline RiemannianFlags classify_riemannian(const HomogeneousModel& m) { return classify_riemannian(riemann(m)); }

/// Lie algebra R x|_eta R^{N-1}: [e_0, e_i] = eta e_i, as a simply transitive pair.
inline ReductiveData hyperbolic_extension(std::size_t N, const Rational& eta, const std::vector<Rational>& metric) {
  BilinearMap<Rational> b(N, N);
  for (std::size_t i = 1; i < N; ++i) b.add(0, i, i, eta);
  return {b, BilinearMap<Rational>(N, 0), {}, metric};
}

}  // namespace qhlab
