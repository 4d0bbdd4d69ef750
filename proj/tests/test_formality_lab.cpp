#include <ainf/formality_lab.hpp>

#include <gtest/gtest.h>

using namespace ainf;

namespace {

// Polynomials in two commuting variables over F_p, written out independently of the library.
using P2 = std::map<std::pair<int, int>, std::int64_t>;

P2 mul(const P2& a, const P2& b, std::int64_t p) {
  P2 out;
  for (const auto& [ma, ca] : a)
    for (const auto& [mb, cb] : b) {
      auto& s = out[{ma.first + mb.first, ma.second + mb.second}];
      s = (s + ca * cb) % p;
    }
  std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
  return out;
}

// Image of x^a y^b under x ↦ gx, y ↦ gy.
P2 substitute(int a, int b, const P2& gx, const P2& gy, std::int64_t p) {
  P2 r{{{0, 0}, 1}};
  for (int i = 0; i < a; ++i) r = mul(r, gx, p);
  for (int i = 0; i < b; ++i) r = mul(r, gy, p);
  return r;
}

// Number of W-fixed vectors in degree-d polynomials, by enumeration; returns dim = log_p(count).
std::size_t brute_fixed_dim(int d, const std::vector<std::pair<P2, P2>>& gens, std::int64_t p) {
  std::vector<std::pair<int, int>> mons;
  for (int a = d; a >= 0; --a) mons.push_back({a, d - a});
  std::vector<std::vector<P2>> images;
  for (const auto& [gx, gy] : gens) {
    std::vector<P2> im;
    for (auto [a, b] : mons) im.push_back(substitute(a, b, gx, gy, p));
    images.push_back(std::move(im));
  }
  std::vector<std::int64_t> c(mons.size(), 0);
  std::size_t count = 0;
  while (true) {
    bool fixed = true;
    for (const auto& im : images) {
      P2 img;
      for (std::size_t k = 0; k < mons.size(); ++k)
        for (const auto& [m, v] : im[k]) img[m] = (img[m] + c[k] * v) % p;
      for (std::size_t k = 0; k < mons.size() && fixed; ++k) {
        auto it = img.find(mons[k]);
        fixed = (it == img.end() ? 0 : it->second) == c[k];
      }
    }
    count += fixed;
    std::size_t i = 0;
    while (i < c.size() && ++c[i] == p) c[i++] = 0;
    if (i == c.size()) break;
  }
  std::size_t dim = 0;
  for (; count > 1; count /= static_cast<std::size_t>(p)) ++dim;
  return dim;
}

}  // namespace

TEST(CommutativeModel, FiniteCyclicModel) {
  auto m = finite_level_model(GroupSpec::cyclic(3, 2));
  ASSERT_EQ(m.generators.size(), 2u);
  EXPECT_EQ(m.generators[0].name, "t");
  EXPECT_EQ(m.generators[0].int_degree, InternalDegree(1, 2, 3));
  EXPECT_TRUE(m.generators[0].exterior);
  EXPECT_EQ(m.generators[1].name, "x");
  // t^2 = 0, t*x = x*t, dims one per degree.
  EXPECT_FALSE(m.multiply(CommutativeModel::Monomial{1, 0}, CommutativeModel::Monomial{1, 0}).has_value());
  for (int d = 0; d < 7; ++d) EXPECT_EQ(m.monomials(d).size(), 1u);
}

TEST(CommutativeModel, ExteriorSignsAnticommute) {
  auto m = finite_level_model(GroupSpec::torus(3, {1, 1}));
  // generators t1, x1, t2, x2 in some order; t1*t2 = -t2*t1.
  std::size_t i1 = 0, i2 = 0;
  for (std::size_t i = 0; i < m.generators.size(); ++i) {
    if (m.generators[i].name == "t1") i1 = i;
    if (m.generators[i].name == "t2") i2 = i;
  }
  CommutativeModel::Monomial a(m.generators.size(), 0), b = a;
  a[i1] = 1;
  b[i2] = 1;
  auto ab = m.multiply(a, b), ba = m.multiply(b, a);
  ASSERT_TRUE(ab && ba);
  EXPECT_EQ(ab->second, ba->second);
  EXPECT_EQ(ab->first, m.field.neg(ba->first));
}

TEST(Invariants, FiniteInversionMatchesEigenvalueCount) {
  // t ↦ -t, x ↦ -x: t^e x^k is fixed iff e + k is even.
  auto rep = invariant_dims(finite_level_model(GroupSpec::semidirect(3, {1}, WeylPart::inversion(1))), 7);
  std::vector<std::size_t> expect;
  for (int d = 0; d <= 7; ++d) expect.push_back(((d % 2) + d / 2) % 2 == 0 ? 1 : 0);
  EXPECT_EQ(rep.dims, expect);
  EXPECT_EQ(rep.dims, (std::vector<std::size_t>{1, 0, 0, 1, 1, 0, 0, 1}));
  EXPECT_TRUE(rep.projector_idempotent);
}

TEST(Invariants, TrivialActionKeepsEverything) {
  auto rep = invariant_dims(ColimitModel::from_spec(3, 2, std::nullopt, 8).ring(), 8);
  EXPECT_EQ(rep.dims, rep.ambient_dims);
  EXPECT_EQ(rep.dims, (std::vector<std::size_t>{1, 0, 2, 0, 3, 0, 4, 0, 5}));
}

TEST(Invariants, ColimitRankTwoInversion) {
  auto model = ColimitModel::from_spec(3, 2, WeylPart::inversion(2), 8);
  auto rep = invariant_dims(model.ring(), 8);
  // x^a y^b is fixed iff a + b is even.
  EXPECT_EQ(rep.dims, (std::vector<std::size_t>{1, 0, 0, 0, 3, 0, 0, 0, 5}));
  std::vector<std::string> gens;
  for (const auto& g : rep.generators) gens.push_back(g.label);
  std::sort(gens.begin(), gens.end());
  EXPECT_EQ(gens, (std::vector<std::string>{"x*y", "x^2", "y^2"}));
  EXPECT_EQ(rep.complete_below, 9);
  EXPECT_TRUE(certify_by_doubling(rep.space()).verdict == Verdict::CertifiedFormal);
}

TEST(Invariants, NonDiagonalActionMatchesEnumeration) {
  // Z/3 rotating the rank-2 torus over F_2: M = [[0,-1],[1,-1]].
  auto w = WeylPart::cyclic(3, {{0, -1}, {1, -1}}, "Z3", 2);
  auto model = ColimitModel::from_spec(2, 2, w, 6);
  auto rep = invariant_dims(model.ring(), 6);
  // Contragredient action: w·x_j = Σ_i M_{w^{-1}}[j][i] x_i; M^{-1} = M^2 = [[-1,1],[-1,0]].
  std::vector<std::pair<P2, P2>> gens;
  for (std::size_t e = 0; e < 3; ++e) {
    const auto& Minv = w.matrices[(3 - e) % 3];
    auto lin = [&](std::size_t j) {
      P2 r;
      if (auto c = ((Minv[j][0] % 2) + 2) % 2) r[{1, 0}] = c;
      if (auto c = ((Minv[j][1] % 2) + 2) % 2) r[{0, 1}] = c;
      return r;
    };
    gens.push_back({lin(0), lin(1)});
  }
  for (int d = 0; d <= 6; ++d) {
    std::size_t expect = d % 2 ? 0 : brute_fixed_dim(d / 2, gens, 2);
    EXPECT_EQ(rep.dims[d], expect) << "degree " << d;
  }
}

TEST(Invariants, RejectsModularW) {
  EXPECT_THROW(ColimitModel::from_spec(2, 1, WeylPart::inversion(1), 4), GroupSpecError);
}

TEST(Certificate, DoublingOnColimitAndFiniteLevels) {
  auto colim = certify_by_doubling(ColimitModel::from_spec(3, 1, std::nullopt, 6).space(), "colim");
  EXPECT_EQ(colim.verdict, Verdict::CertifiedFormal);
  EXPECT_NE(colim.derivation.find("i=2"), std::string::npos);

  auto fin = finite_level_model(GroupSpec::cyclic(3, 1));
  BigradedSpace space({{0, InternalDegree::integer(0, 3), "1"},
                       {1, fin.generators[0].int_degree, "t"},
                       {2, InternalDegree::integer(1, 3), "x"}});
  auto c = certify_by_doubling(space, "Z/3");
  EXPECT_EQ(c.verdict, Verdict::NotApplicable);
  ASSERT_EQ(c.violators.size(), 1u);
  EXPECT_EQ(c.violators[0], "t at (1, 1/3): 1 != 2*1/3");
}

TEST(Certificate, WitnessesFromTransfer) {
  auto transfer_of = [](const GroupSpec& s, int arity, int degree) {
    auto alg = std::make_shared<const GradedGroupAlgebra>(build_group_algebra(s));
    return transfer(build_sdr(build_bar(alg, degree + 1)), arity, degree);
  };
  auto z2 = assess(transfer_of(GroupSpec::cyclic(2, 1), 4, 4), "Z/2");
  EXPECT_EQ(z2.verdict, Verdict::CertifiedFormal);  // t at (1, 1/2) doubles

  auto z3 = assess(transfer_of(GroupSpec::cyclic(3, 1), 3, 4), "Z/3");
  ASSERT_EQ(z3.verdict, Verdict::NonformalWitness);
  EXPECT_EQ(z3.witness->arity, 3);
  EXPECT_EQ(z3.witness->inputs, (std::vector<std::string>{"t", "t", "t"}));
  EXPECT_EQ(z3.witness->output, "x");

  auto z4 = assess(transfer_of(GroupSpec::cyclic(2, 2), 4, 4), "Z/4");
  ASSERT_EQ(z4.verdict, Verdict::NonformalWitness);
  EXPECT_EQ(z4.witness->arity, 4);
  EXPECT_EQ(z4.witness->scalar, 1u);

  auto z5 = assess(transfer_of(GroupSpec::cyclic(5, 1), 4, 4), "Z/5");
  EXPECT_EQ(z5.verdict, Verdict::NotApplicable);
  EXPECT_FALSE(z5.witness.has_value());
}

TEST(Comparison, FiniteSemidirectAgreesWithInvariants) {
  auto c = compare_finite_vs_invariants(GroupSpec::semidirect(3, {1}, WeylPart::inversion(1)), 6);
  EXPECT_TRUE(c.agree());
  EXPECT_EQ(c.bar_dims, (std::vector<std::size_t>{1, 0, 0, 1, 1, 0, 0}));
  auto c2 = compare_finite_vs_invariants(GroupSpec::semidirect(3, {1, 1}, WeylPart::inversion(2)), 3);
  EXPECT_TRUE(c2.agree());
  EXPECT_EQ(c2.bar_dims, (std::vector<std::size_t>{1, 0, 1, 4}));
  auto c3 = compare_finite_vs_invariants(GroupSpec::cyclic(3, 1), 5);
  EXPECT_EQ(c3.bar_dims, std::vector<std::size_t>(6, 1));
  EXPECT_TRUE(c3.agree());
}
