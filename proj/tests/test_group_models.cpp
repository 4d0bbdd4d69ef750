#include <ainf/group_models.hpp>

#include <gtest/gtest.h>

using namespace ainf;

namespace {

std::int64_t binom(int n, int k) {
  std::int64_t r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

GroupSpec s3_model() { return GroupSpec::semidirect(3, {1}, WeylPart::inversion(1)); }

FpVector unit(std::size_t n, std::size_t i) {
  FpVector v(n, 0);
  v[i] = 1;
  return v;
}

}  // namespace

TEST(GroupSpec, Validation) {
  EXPECT_THROW(GroupSpec::cyclic(6, 1), GroupSpecError);
  EXPECT_THROW(GroupSpec::cyclic(3, 0), GroupSpecError);
  EXPECT_THROW(GroupSpec::cyclic(2, 13), GroupSpecError);  // order 8192
  EXPECT_THROW(GroupSpec::torus(3, {}), GroupSpecError);
  EXPECT_THROW(GroupSpec::semidirect(2, {2}, WeylPart::inversion(1)), GroupSpecError);  // p | |W|
  EXPECT_THROW(GroupSpec::semidirect(5, {1}, WeylPart::cyclic(2, {{2}}, "Z2", 5)), GroupSpecError);  // 2^2 != 1
  EXPECT_THROW(GroupSpec::semidirect(3, {1, 2}, WeylPart::cyclic(2, {{0, 1}, {1, 0}}, "swap", 9)), GroupSpecError);
  EXPECT_THROW(GroupSpec::semidirect(3, {1, 1}, WeylPart::cyclic(2, {{0, 0}, {0, 0}}, "zero", 3)), GroupSpecError);
  EXPECT_NO_THROW(GroupSpec::semidirect(5, {1}, WeylPart::cyclic(4, {{2}}, "Z4", 5)));
  EXPECT_NO_THROW(GroupSpec::semidirect(3, {1, 1}, WeylPart::cyclic(2, {{0, 1}, {1, 0}}, "swap", 3)));
}

TEST(FiniteGroup, SemidirectIsAGroup) {
  FiniteGroup g(s3_model());
  ASSERT_EQ(g.size(), 6u);
  bool abelian = true;
  for (std::size_t a = 0; a < 6; ++a) {
    EXPECT_EQ(g.mul(0, a), a);
    EXPECT_EQ(g.mul(a, 0), a);
    std::size_t inverses = 0;
    for (std::size_t b = 0; b < 6; ++b) {
      inverses += g.mul(a, b) == 0;
      abelian = abelian && g.mul(a, b) == g.mul(b, a);
      for (std::size_t c = 0; c < 6; ++c) EXPECT_EQ(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
    }
    EXPECT_EQ(inverses, 1u);
  }
  EXPECT_FALSE(abelian);
}

TEST(GroupAlgebra, TruncatedPolynomialStructure) {
  // F_3[Z/9] = F_3[X]/X^9 with X = g - 1 in degree 1/9.
  auto alg = build_group_algebra(GroupSpec::cyclic(3, 2));
  ASSERT_EQ(alg.dim(), 9u);
  EXPECT_TRUE(alg.is_graded());
  EXPECT_TRUE(alg.is_associative());
  EXPECT_TRUE(alg.augmentation_is_multiplicative());
  for (unsigned a = 0; a < 9; ++a) {
    auto i = alg.basis_index({a}, 0);
    EXPECT_EQ(alg.degree(i), InternalDegree(a, 2, 3));
    EXPECT_EQ(alg.augmentation(i), a == 0 ? 1u : 0u);
    for (unsigned b = 0; b < 9; ++b) {
      auto j = alg.basis_index({b}, 0);
      SparseRow expect;
      if (a + b < 9) expect.push_back({alg.basis_index({a + b}, 0), 1});
      EXPECT_EQ(alg.product(i, j), expect);
    }
  }
  EXPECT_EQ(alg.label(alg.basis_index({3}, 0)), "X^3");
}

TEST(GroupAlgebra, GroupCoordinatesAreBinomialExpansions) {
  PrimeField f(3);
  auto alg = build_group_algebra(GroupSpec::cyclic(3, 2));
  for (unsigned a = 0; a < 9; ++a) {
    const auto& c = alg.group_coords(alg.basis_index({a}, 0));
    for (unsigned k = 0; k < 9; ++k) {
      std::int64_t expect = k <= a ? binom(a, k) * ((a - k) % 2 ? -1 : 1) : 0;
      EXPECT_EQ(c[k], f.reduce(expect)) << "a=" << a << " k=" << k;
    }
  }
}

TEST(GroupAlgebra, MultiplyMatchesConvolution) {
  auto alg = build_group_algebra(GroupSpec::torus(3, {1, 1}));
  ASSERT_EQ(alg.dim(), 9u);
  EXPECT_EQ(alg.label(alg.basis_index({1, 1}, 0)), "X1*X2");
  for (std::size_t i = 0; i < alg.dim(); ++i)
    for (std::size_t j = 0; j < alg.dim(); ++j) {
      auto u = unit(9, i), v = unit(9, j);
      EXPECT_EQ(alg.to_group(alg.multiply(u, v)), alg.group_multiply(alg.to_group(u), alg.to_group(v)));
    }
}

TEST(GroupAlgebra, RawSemidirectIsNotGraded) {
  auto raw = build_raw_group_algebra(s3_model());
  EXPECT_FALSE(raw.is_graded());
  auto alg = build_group_algebra(s3_model());
  EXPECT_TRUE(alg.is_regraded());
  EXPECT_TRUE(alg.is_graded());
  EXPECT_TRUE(alg.is_associative());
  EXPECT_TRUE(alg.augmentation_is_multiplicative());
  EXPECT_EQ(alg.dim(), 6u);
}

TEST(Splitting, InversionLiftIsAnEigenvector) {
  // w(g-1)w^{-1} = g^2 - 1 = 2X + X^2, so L = X + X^2 satisfies wLw^{-1} = 2X + X^2 + (2X + X^2)^2 = -L.
  auto spec = s3_model();
  auto choice = equivariant_splitting(spec, 1);
  ASSERT_EQ(choice.lifts.size(), 1u);
  EXPECT_EQ(choice.level(1)[0], (FpVector{0, 1, 1}));
  EXPECT_TRUE(verify_splitting(spec, choice).empty());
}

TEST(Splitting, DeeperLevelsArePowers) {
  auto spec = GroupSpec::semidirect(3, {2}, WeylPart::cyclic(2, {{-1}}, "inversion", 9));
  auto choice = equivariant_splitting(spec, 2);
  EXPECT_TRUE(verify_splitting(spec, choice).empty());
  auto corrupt = choice;
  corrupt.lifts[1][0] = unit(9, 1);  // plain g - 1 is not W-stable
  EXPECT_FALSE(verify_splitting(spec, corrupt).empty());
}

TEST(Splitting, RejectsNonCoprimeW) {
  GroupSpec s;
  s.p = 2;
  s.depths = {1};
  s.weyl = WeylPart::inversion(1);
  EXPECT_THROW(equivariant_splitting(s, 1), GroupSpecError);
}

TEST(PowerInclusion, SendsXToXCubed) {
  // g ↦ h^3: g - 1 ↦ (1 + X)^3 - 1 = X^3 in characteristic 3.
  auto lo = std::make_shared<const GradedGroupAlgebra>(build_group_algebra(GroupSpec::cyclic(3, 1)));
  auto hi = std::make_shared<const GradedGroupAlgebra>(build_group_algebra(GroupSpec::cyclic(3, 2)));
  auto phi = power_inclusion(lo, hi);
  for (unsigned a = 0; a < 3; ++a) {
    auto img = phi.apply(unit(3, lo->basis_index({a}, 0)));
    EXPECT_EQ(img, unit(9, hi->basis_index({3 * a}, 0)));
  }
  EXPECT_THROW(power_inclusion(hi, lo), std::invalid_argument);
}
