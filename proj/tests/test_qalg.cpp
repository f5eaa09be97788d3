#include <gtest/gtest.h>

#include <random>

#include "qhlab/lie.hpp"
#include "qhlab/quaternion.hpp"

using namespace qhlab;

namespace {

Quaternion random_q(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> num(-7, 7), den(1, 4);
  auto r = [&] { return Rational(num(rng), den(rng)); };
  return {r(), r(), r(), r()};
}

QVector unit_vector(std::size_t n, std::size_t p, const Quaternion& q) {
  QVector v(n);
  v[p] = q;
  return v;
}

}  // namespace

TEST(Quaternion, HamiltonTable) {
  const Quaternion i = Quaternion::unit(1), j = Quaternion::unit(2), k = Quaternion::unit(3);
  EXPECT_EQ(i * j, k);
  EXPECT_EQ(j * k, i);
  EXPECT_EQ(k * i, j);
  EXPECT_EQ(j * i, -k);
  EXPECT_EQ(i * j * k, Quaternion(-1));
}

TEST(Quaternion, IdentityAndExpansion) {
  const Quaternion q(Rational(3, 2), -1, 2, Rational(-5, 7));
  EXPECT_EQ(Quaternion(1) * q, q);
  EXPECT_EQ(q * Quaternion(1), q);
  EXPECT_EQ(Quaternion(1, 1, 0, 0) * Quaternion(1, 0, 1, 0), Quaternion(1, 1, 1, 1));
}

TEST(Quaternion, Associativity) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    Quaternion a = random_q(rng), b = random_q(rng), c = random_q(rng);
    ASSERT_EQ((a * b) * c, a * (b * c));
  }
}

TEST(Quaternion, ConjugateAndNorm) {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 100; ++t) {
    Quaternion a = random_q(rng), b = random_q(rng);
    EXPECT_EQ((a * b).conj(), b.conj() * a.conj());
    EXPECT_EQ((a * a.conj()).re, a.norm2());
    if (!a.is_zero()) {
      EXPECT_EQ(a * a.inverse(), Quaternion(1));
    }
  }
}

TEST(HermitianMetric, BasisValues) {
  const Quaternion i = Quaternion::unit(1), j = Quaternion::unit(2);
  EXPECT_EQ(hermitian_metric(unit_vector(2, 0, i), unit_vector(2, 0, i)), Rational(1));
  EXPECT_EQ(hermitian_metric(unit_vector(2, 0, i), unit_vector(2, 0, j)), Rational(0));
  EXPECT_EQ(hermitian_metric(unit_vector(2, 0, Quaternion(1, 1)), unit_vector(2, 0, Quaternion(1, -1))), Rational(0));
  EXPECT_THROW(hermitian_metric(QVector(2), QVector(3)), std::invalid_argument);
}

TEST(SpBasis, Sizes) {
  auto sp1 = sp_basis(1, 0);
  ASSERT_EQ(sp1.size(), 3u);
  for (int u = 0; u < 3; ++u) EXPECT_EQ(sp1[u](0, 0), Quaternion::unit(u + 1));
  EXPECT_EQ(sp_basis(3, 0).size(), 21u);
  EXPECT_EQ(sp_basis(1, 2).size(), 21u);
  EXPECT_THROW(sp_basis(0, 0), std::invalid_argument);
}

TEST(SpBasis, MembersSatisfyDefiningEquation) {
  for (auto [p, q] : {std::pair<std::size_t, std::size_t>{3, 0}, {1, 2}, {2, 2}})
    for (const auto& x : sp_basis(p, q)) EXPECT_TRUE(in_sp(x, p));
}

TEST(SpBasis, ClosedUnderCommutator) {
  for (auto [p, q] : {std::pair<std::size_t, std::size_t>{2, 0}, {1, 2}}) {
    std::vector<RatMatrix> real;
    for (const auto& x : sp_basis(p, q)) real.push_back(realify(x));
    MatrixSpan span(real);
    EXPECT_EQ(span.size(), real.size());
    for (std::size_t a = 0; a < real.size(); ++a)
      for (std::size_t b = a + 1; b < real.size(); ++b) ASSERT_TRUE(span.coords(commutator(real[a], real[b])).has_value());
  }
}

TEST(Realify, ComplexStructureAndIdentity) {
  QMatrix i(1, 1), j(1, 1);
  i(0, 0) = Quaternion::unit(1);
  j(0, 0) = Quaternion::unit(2);
  RatMatrix ri = realify(i), rj = realify(j);
  EXPECT_EQ(ri * ri, RatMatrix::identity(4) * Rational(-1));
  EXPECT_EQ(realify(QMatrix::identity(3)), RatMatrix::identity(12));
  EXPECT_EQ((ri * rj).trace(), Rational(0));
}

TEST(Realify, AlgebraHomomorphism) {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 200; ++t) {
    QMatrix a(2, 2), b(2, 2);
    for (std::size_t r = 0; r < 2; ++r)
      for (std::size_t c = 0; c < 2; ++c) {
        a(r, c) = random_q(rng);
        b(r, c) = random_q(rng);
      }
    ASSERT_EQ(realify(a * b), realify(a) * realify(b));
    ASSERT_EQ(realify(a + b), realify(a) + realify(b));
  }
}

TEST(Realify, RealCoordinatesRoundTrip) {
  std::mt19937_64 rng(4);
  QVector v{random_q(rng), random_q(rng), random_q(rng)};
  EXPECT_EQ(from_real(to_real(v)), v);
  QMatrix m = QMatrix::identity(3);
  m(0, 2) = random_q(rng);
  EXPECT_EQ(to_real(m.apply(v)), realify(m).apply(to_real(v)));
}
