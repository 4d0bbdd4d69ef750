#include <ainf/bar_cochains.hpp>

#include <gtest/gtest.h>

#include <random>

using namespace ainf;

namespace {

BarPtr bar(const GroupSpec& s, int cap, BarOptions o = {}) {
  return build_bar(std::make_shared<const GradedGroupAlgebra>(build_group_algebra(s)), cap, o);
}

// Number of homomorphisms G → (F_p, +), by enumerating every function on G.
std::size_t count_homs(const GroupSpec& s) {
  FiniteGroup g(s);
  const std::size_t n = g.size(), p = s.p;
  std::vector<std::uint32_t> phi(n, 0);
  std::size_t count = 0;
  while (true) {
    bool hom = true;
    for (std::size_t a = 0; a < n && hom; ++a)
      for (std::size_t b = 0; b < n && hom; ++b) hom = phi[g.mul(a, b)] == (phi[a] + phi[b]) % p;
    count += hom;
    std::size_t i = 0;
    while (i < n && ++phi[i] == p) phi[i++] = 0;
    if (i == n) break;
  }
  return count;
}

std::size_t log_p(std::size_t v, std::size_t p) {
  std::size_t r = 0;
  for (; v > 1; v /= p) ++r;
  return r;
}

FpVector random_cochain(std::mt19937& rng, const BarComplex& bc, int n) {
  std::uniform_int_distribution<std::uint32_t> d(0, bc.field().p() - 1);
  FpVector v(bc.dim(n));
  for (auto& x : v) x = d(rng);
  return v;
}

FpVector add(const PrimeField& f, FpVector a, const FpVector& b, Residue c = 1) {
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = f.add(a[i], f.mul(c, b[i]));
  return a;
}

}  // namespace

TEST(BarComplex, DimensionsArePowersOfTheAugmentationIdeal) {
  auto bc = bar(GroupSpec::cyclic(3, 1), 5);
  for (int n = 0; n <= 5; ++n) {
    std::size_t expect = 1;
    for (int i = 0; i < n; ++i) expect *= 2;
    EXPECT_EQ(bc->dim(n), expect);
  }
}

TEST(BarComplex, DifferentialSquaresToZero) {
  for (const auto& s : {GroupSpec::cyclic(2, 2), GroupSpec::cyclic(3, 1), GroupSpec::torus(3, {1, 1}),
                        GroupSpec::semidirect(3, {1}, WeylPart::inversion(1))}) {
    auto bc = bar(s, 4);
    for (int n = 0; n + 1 < 4; ++n) EXPECT_TRUE((bc->differential(n + 1) * bc->differential(n)).is_zero());
  }
}

TEST(BarComplex, CupProductIsAssociativeAndLeibniz) {
  std::mt19937 rng(5);
  for (const auto& s : {GroupSpec::cyclic(3, 1), GroupSpec::semidirect(3, {1}, WeylPart::inversion(1))}) {
    auto bc = bar(s, 5);
    const auto& f = bc->field();
    for (int trial = 0; trial < 10; ++trial) {
      for (int a = 0; a <= 2; ++a)
        for (int b = 0; a + b + 1 <= 5 && b <= 2; ++b) {
          auto phi = random_cochain(rng, *bc, a), psi = random_cochain(rng, *bc, b);
          auto lhs = bc->differential(a + b) * bc->product(a, phi, b, psi);
          auto rhs = add(f, bc->product(a + 1, bc->differential(a) * phi, b, psi),
                         bc->product(a, phi, b + 1, bc->differential(b) * psi), f.sign(a));
          EXPECT_EQ(lhs, rhs) << "a=" << a << " b=" << b;
          if (a + b + 1 <= 5) {
            auto chi = random_cochain(rng, *bc, 1);
            EXPECT_EQ(bc->product(a + b, bc->product(a, phi, b, psi), 1, chi),
                      bc->product(a, phi, b + 1, bc->product(b, psi, 1, chi)));
          }
        }
    }
  }
}

TEST(BarComplex, BudgetIsEnforced) {
  try {
    bar(GroupSpec::cyclic(3, 1), 6, BarOptions{10});
    FAIL() << "expected BudgetExceeded";
  } catch (const BudgetExceeded& e) {
    EXPECT_GT(e.words(), e.budget());
    EXPECT_EQ(e.budget(), 10u);
    EXPECT_GE(e.degree(), 1);
  }
}

TEST(Cohomology, CyclicGroupsHaveOneClassPerDegree) {
  for (auto [p, n] : std::vector<std::pair<std::uint32_t, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {3, 2}, {5, 1}}) {
    auto H = cohomology(bar(GroupSpec::cyclic(p, n), 6));
    EXPECT_EQ(H.dims(), std::vector<std::size_t>(6, 1)) << p << "^" << n;
  }
  auto H = cohomology(bar(GroupSpec::cyclic(3, 1), 6));
  std::vector<std::string> labels;
  for (const auto& b : H.space().basis()) labels.push_back(b.label);
  EXPECT_EQ(labels, (std::vector<std::string>{"1", "t", "x", "t*x", "x^2", "t*x^2"}));
  EXPECT_EQ(H.cls("t").int_degree, InternalDegree(1, 1, 3));
  EXPECT_EQ(H.cls("x").int_degree, InternalDegree::integer(1, 3));
  auto Z2 = cohomology(bar(GroupSpec::cyclic(2, 1), 4));
  EXPECT_EQ(Z2.space()[2].label, "t^2");
}

TEST(Cohomology, FirstDegreeCountsHomomorphisms) {
  for (const auto& s : {GroupSpec::cyclic(3, 1), GroupSpec::cyclic(3, 2), GroupSpec::torus(3, {1, 1}),
                        GroupSpec::cyclic(2, 2), GroupSpec::torus(2, {1, 1}),
                        GroupSpec::semidirect(3, {1}, WeylPart::inversion(1)),
                        GroupSpec::semidirect(5, {1}, WeylPart::cyclic(2, {{-1}}, "inversion", 5))}) {
    auto H = cohomology(bar(s, 3));
    EXPECT_EQ(H.dims()[1], log_p(count_homs(s), s.p)) << "order " << s.order();
  }
}

TEST(Cohomology, SymmetricGroupModelMatchesInvariants) {
  // H(Z/3)^{Z/2} with t, x both negated: invariants are 1, t*x, x^2, t*x^3, x^4, ...
  auto H = cohomology(bar(GroupSpec::semidirect(3, {1}, WeylPart::inversion(1)), 7));
  EXPECT_EQ(H.dims(), (std::vector<std::size_t>{1, 0, 0, 1, 1, 0, 0}));
  EXPECT_EQ(cohomology_dims(H.complex()), H.dims());
}

TEST(Cohomology, RankPathAgreesWithRepresentatives) {
  for (const auto& s : {GroupSpec::torus(3, {1, 1}), GroupSpec::cyclic(2, 3), GroupSpec::cyclic(5, 1)}) {
    auto bc = bar(s, 5);
    EXPECT_EQ(cohomology_dims(*bc), cohomology(bc).dims());
  }
}

TEST(Cohomology, CupProducts) {
  auto H = cohomology(bar(GroupSpec::cyclic(3, 1), 6));
  auto idx = [&](const std::string& l) { return H.space().index_of(l); };
  EXPECT_TRUE(is_zero(H.cup(idx("t"), idx("t"))));
  EXPECT_NE(H.cup(idx("t"), idx("x"))[idx("t*x")], 0u);
  EXPECT_NE(H.cup(idx("x"), idx("x"))[idx("x^2")], 0u);
  EXPECT_EQ(H.cup(idx("1"), idx("x"))[idx("x")], 1u);
  auto Z4 = cohomology(bar(GroupSpec::cyclic(2, 2), 4));
  EXPECT_TRUE(is_zero(Z4.cup(Z4.space().index_of("t"), Z4.space().index_of("t"))));
  auto Z2 = cohomology(bar(GroupSpec::cyclic(2, 1), 4));
  EXPECT_EQ(Z2.cup(Z2.space().index_of("t"), Z2.space().index_of("t"))[Z2.space().index_of("t^2")], 1u);
}

TEST(Cohomology, CoordinatesRejectNonCocycles) {
  auto H = cohomology(bar(GroupSpec::cyclic(3, 1), 4));
  FpVector v(H.complex().dim(1), 0);
  v[1] = 1;  // dual of X^2: δ of it is nonzero
  EXPECT_THROW(H.coordinates(1, v), std::invalid_argument);
}

TEST(Restriction, DeepToShallowCyclic) {
  // A homomorphism Z/9 → F_3 vanishes on 3Z/9, so t ↦ 0; the Bockstein class survives.
  auto lo = std::make_shared<const GradedGroupAlgebra>(build_group_algebra(GroupSpec::cyclic(3, 1)));
  auto hi = std::make_shared<const GradedGroupAlgebra>(build_group_algebra(GroupSpec::cyclic(3, 2)));
  auto Hlo = cohomology(build_bar(lo, 5)), Hhi = cohomology(build_bar(hi, 5));
  auto res = restriction(power_inclusion(lo, hi), Hlo, Hhi);
  const auto& m = res.matrix();
  auto at = [&](const std::string& to, const std::string& from) {
    return m.at(Hlo.space().index_of(to), Hhi.space().index_of(from));
  };
  EXPECT_EQ(at("1", "1"), 1u);
  EXPECT_EQ(at("t", "t"), 0u);
  EXPECT_NE(at("x", "x"), 0u);
  EXPECT_EQ(at("t*x", "t*x"), 0u);
  EXPECT_NE(at("x^2", "x^2"), 0u);
}
