#include <ainf/graded_core.hpp>

#include <gtest/gtest.h>

using namespace ainf;

namespace {

InternalDegree q(std::int64_t num, unsigned e, std::uint32_t p = 3) { return InternalDegree(num, e, p); }

// Three-dimensional space e0, e1, e2 in cohomological degrees 0, 1, 2.
SpacePtr ladder() {
  return std::make_shared<const BigradedSpace>(std::vector<BasisElement>{
      {0, InternalDegree{}, "e0"}, {1, InternalDegree{}, "e1"}, {2, InternalDegree{}, "e2"}});
}

BigradedMap shift_map(SpacePtr v, PrimeField f, std::int64_t a, std::int64_t b) {
  return BigradedMap(v, v, 1, InternalDegree{}, FpMatrix::from_triplets(f, 3, 3, {{1, 0, a}, {2, 1, b}}));
}

}  // namespace

TEST(InternalDegree, NormalizesAndAdds) {
  EXPECT_EQ(q(3, 2), q(1, 1));
  EXPECT_EQ(q(3, 2).to_string(), "1/3");
  EXPECT_EQ(q(1, 1) + q(2, 1), InternalDegree::integer(1, 3));
  EXPECT_EQ((q(1, 1) + q(2, 1)).to_string(), "1");
  EXPECT_EQ(q(4, 1).to_string(), "4/3");
  EXPECT_EQ(q(1, 2).times(9), InternalDegree::integer(1));
  EXPECT_LT(q(1, 2), q(1, 1));
  EXPECT_LT(q(2, 1), InternalDegree::integer(1));
  EXPECT_EQ((q(1, 1) - q(1, 1)).to_string(), "0");
  EXPECT_THROW(q(1, 1, 3) + q(1, 1, 5), std::invalid_argument);
  EXPECT_THROW(InternalDegree(1, 1, 0), std::invalid_argument);
}

TEST(InternalDegree, Doubling) {
  EXPECT_TRUE(InternalDegree::integer(1).doubles_to(2));
  EXPECT_TRUE(q(1, 1, 2).doubles_to(1));  // Z/2: t at (1, 1/2)
  EXPECT_FALSE(q(1, 1).doubles_to(1));    // Z/3: t at (1, 1/3)
  EXPECT_FALSE(InternalDegree::integer(1).doubles_to(3));
}

TEST(BigradedSpace, OrderAndValidation) {
  BigradedSpace s({{2, InternalDegree::integer(1), "x"}, {1, q(1, 1), "t"}, {0, InternalDegree{}, "1"},
                   {1, q(2, 1), "u"}});
  EXPECT_EQ(s[0].label, "1");
  EXPECT_EQ(s[1].label, "t");
  EXPECT_EQ(s[2].label, "u");
  EXPECT_EQ(s[3].label, "x");
  EXPECT_EQ(s.index_of("x"), 3u);
  EXPECT_EQ(s.dims(), (std::vector<std::size_t>{1, 2, 1}));
  EXPECT_THROW(BigradedSpace({{0, InternalDegree{}, "a"}, {1, InternalDegree{}, "a"}}), std::invalid_argument);
  EXPECT_THROW(BigradedSpace({{-1, InternalDegree{}, "a"}}), std::invalid_argument);
  EXPECT_THROW(BigradedSpace({{0, q(-1, 1), "a"}}), std::invalid_argument);
}

TEST(BigradedMap, RejectsEntriesOfTheWrongBidegree) {
  PrimeField f(5);
  auto v = ladder();
  EXPECT_NO_THROW(shift_map(v, f, 1, 1));
  EXPECT_THROW(BigradedMap(v, v, 1, InternalDegree{}, FpMatrix::from_triplets(f, 3, 3, {{2, 0, 1}})),
               std::invalid_argument);
  EXPECT_THROW(BigradedMap(v, v, 0, InternalDegree{}, FpMatrix(f, 2, 3)), std::invalid_argument);
}

TEST(BigradedMap, CompositionAddsBidegrees) {
  PrimeField f(5);
  auto v = ladder();
  auto d = shift_map(v, f, 1, 2);
  auto dd = compose(d, d);
  EXPECT_EQ(dd.coh_shift(), 2);
  EXPECT_EQ(dd.matrix().at(2, 0), 2u);
  EXPECT_EQ(dd.matrix().nnz(), 1u);
}

TEST(KoszulTensor, SignOnOddElements) {
  PrimeField f(5);
  auto v = ladder();
  auto s = shift_map(v, f, 1, 1);
  auto id = BigradedMap::identity(v, f);
  // (id ⊗ s)(e1 ⊗ e0) = (-1)^{1*1} e1 ⊗ e1.
  auto m = koszul_tensor(id, s);
  auto col = m.source().index_of("e1⊗e0"), row = m.target().index_of("e1⊗e1");
  EXPECT_EQ(m.matrix().at(row, col), f.neg(1));
  // (s ⊗ id)(e1 ⊗ e0) = e2 ⊗ e0, no sign.
  auto n = koszul_tensor(s, id);
  EXPECT_EQ(n.matrix().at(n.target().index_of("e2⊗e0"), n.source().index_of("e1⊗e0")), 1u);
}

TEST(KoszulTensor, InterchangeLaw) {
  // (f⊗g)∘(f'⊗g') = (-1)^{|g||f'|} (f∘f')⊗(g∘g'), checked for all odd/even combinations.
  PrimeField f(7);
  auto v = ladder();
  auto odd1 = shift_map(v, f, 2, 3), odd2 = shift_map(v, f, 5, 1);
  auto even = BigradedMap(v, v, 0, InternalDegree{}, FpMatrix::from_triplets(f, 3, 3, {{0, 0, 3}, {1, 1, 4}, {2, 2, 6}}));
  std::vector<BigradedMap> maps{odd1, odd2, even};
  for (const auto& F : maps)
    for (const auto& G : maps)
      for (const auto& Fp : maps)
        for (const auto& Gp : maps) {
          auto lhs = compose(koszul_tensor(F, G), koszul_tensor(Fp, Gp));
          auto rhs = koszul_tensor(compose(F, Fp), compose(G, Gp));
          auto expected = (G.coh_shift() * Fp.coh_shift()) % 2 ? rhs.matrix().scaled(f.neg(1)) : rhs.matrix();
          EXPECT_EQ(lhs.matrix(), expected);
        }
}

TEST(Doubling, ReportsViolators) {
  BigradedSpace ok({{0, InternalDegree::integer(0, 3), "1"}, {2, InternalDegree::integer(1, 3), "x"}});
  EXPECT_TRUE(doubling_check(ok).holds);
  BigradedSpace bad({{0, InternalDegree::integer(0, 3), "1"}, {1, q(1, 1), "t"}, {2, InternalDegree::integer(1, 3), "x"}});
  auto r = doubling_check(bad);
  EXPECT_FALSE(r.holds);
  EXPECT_EQ(r.violations, (std::vector<std::string>{"t"}));
}
