#include <ainf/runner.hpp>

#include <gtest/gtest.h>

#include <filesystem>

using namespace ainf;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / ("ainf_test_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  return d;
}

ExperimentConfig cfg(std::string command, std::string spec, int degree = 6, int arity = 4) {
  ExperimentConfig c;
  c.command = std::move(command);
  c.spec = std::move(spec);
  c.max_degree = degree;
  c.max_arity = arity;
  return c;
}

}  // namespace

TEST(SpecParser, CyclicAndTorus) {
  auto s = parse_spec("cyclic(3^2)");
  EXPECT_EQ(s.p, 3u);
  EXPECT_EQ(s.depths, (std::vector<unsigned>{2}));
  EXPECT_FALSE(s.colimit);
  EXPECT_EQ(s.canonical, "cyclic(3^2)");
  EXPECT_EQ(parse_spec("  torus( 3 , 1 , 2 ) ").canonical, "torus(3,1,2)");
  EXPECT_EQ(parse_spec("torus(5,2,1)").canonical, "cyclic(5^2)");
  EXPECT_EQ(parse_spec("cyclic(3^1) x cyclic(3^2)").depths, (std::vector<unsigned>{1, 2}));
}

TEST(SpecParser, SemidirectAndColimit) {
  auto s = parse_spec("semidirect(torus(3,1,2), inversion)");
  ASSERT_TRUE(s.weyl.has_value());
  EXPECT_EQ(s.weyl->order(), 2u);
  EXPECT_EQ(s.group().order(), 18u);
  auto c = parse_spec("colimit(torus(3,∞,1))");
  EXPECT_TRUE(c.colimit);
  EXPECT_EQ(c.canonical, "colimit(cyclic(3^inf))");
  EXPECT_EQ(parse_spec("colimit(cyclic(3^inf))"), c);
  auto z = parse_spec("semidirect(cyclic(7^1), Z3:[[2]])");
  EXPECT_EQ(z.weyl->order(), 3u);
  EXPECT_THROW(c.group(), GroupSpecError);
}

TEST(SpecParser, RoundTrips) {
  for (const char* text :
       {"cyclic(2^1)", "cyclic(3^2)", "torus(3,1,2)", "semidirect(cyclic(3^1),inversion)",
        "semidirect(torus(3,1,2),Z2:[[0,1],[1,0]])", "cyclic(3^1)xsemidirect(cyclic(3^1),inversion)",
        "colimit(torus(3,inf,2))", "colimit(semidirect(torus(3,∞,2), inversion))"}) {
    auto a = parse_spec(text);
    auto b = parse_spec(canonical_print(a));
    EXPECT_EQ(a, b) << text;
    EXPECT_EQ(canonical_print(b), canonical_print(a));
  }
}

TEST(SpecParser, SyntaxErrorsCarryPositions) {
  try {
    parse_spec("cyclic(6^1)");
    FAIL();
  } catch (const SpecParseError& e) {
    EXPECT_EQ(e.position(), 7u);
  }
  try {
    parse_spec("cyclic(3^inf)");
    FAIL();
  } catch (const SpecParseError& e) {
    EXPECT_EQ(e.position(), 9u);
  }
  try {
    parse_spec("cyclic(3^1) trailing");
    FAIL();
  } catch (const SpecParseError& e) {
    EXPECT_EQ(e.position(), 12u);
  }
  EXPECT_THROW(parse_spec(""), SpecParseError);
  EXPECT_THROW(parse_spec("cyclic(3^0)"), SpecParseError);
  EXPECT_THROW(parse_spec("torus(3,1,9)"), SpecParseError);
  EXPECT_THROW(parse_spec("cyclic(3^1)xcyclic(5^1)"), SpecParseError);
  EXPECT_THROW(parse_spec("colimit(cyclic(3^2))"), SpecParseError);
  EXPECT_THROW(parse_spec("semidirect(torus(3,1,2),Z2:[[1]])"), SpecParseError);
}

TEST(SpecParser, SemanticErrors) {
  EXPECT_THROW(parse_spec("semidirect(cyclic(2^2), inversion)"), GroupSpecError);
  EXPECT_THROW(parse_spec("semidirect(cyclic(5^1), Z2:[[2]])"), GroupSpecError);
  EXPECT_THROW(parse_spec("colimit(semidirect(cyclic(2^inf), inversion))"), GroupSpecError);
}

TEST(Sha256, KnownVector) {
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(ResultCache, StoreLoadAndRejectCorruption) {
  auto dir = fresh_dir("cache");
  ResultCache c(dir.string());
  Json v{{"a", 1}};
  c.store("k", v);
  EXPECT_EQ(c.load("k"), v);
  EXPECT_EQ(c.hits(), 1u);
  {
    std::ofstream out(c.path_of("k"), std::ios::trunc);
    out << R"({"key":"k","digest":"00","payload":{"a":2}})";
  }
  EXPECT_FALSE(c.load("k").has_value());
  EXPECT_EQ(c.rejected(), 1u);
  int calls = 0;
  EXPECT_EQ(c.memo("k", [&] { ++calls; return v; }), v);
  EXPECT_EQ(calls, 1);
  EXPECT_EQ(c.load("k"), v);
  for (const auto& e : fs::directory_iterator(dir)) EXPECT_EQ(e.path().extension(), ".json");
  fs::remove_all(dir);
}

TEST(Runner, TransferZThree) {
  auto r = run(cfg("transfer", "cyclic(3^1)", 6, 3));
  ASSERT_EQ(r.exit_code, kOk) << r.json_text();
  const auto& res = r.report["result"];
  EXPECT_EQ(res["dims"], Json({1, 1, 1, 1, 1, 1, 1}));
  EXPECT_TRUE(res["checks"]["stasheffViolations"].empty());
  EXPECT_TRUE(res["checks"]["internalDegreePreserved"].get<bool>());
  bool found = false;
  for (const auto& block : res["operations"])
    if (block["arity"] == 3)
      for (const auto& e : block["entries"])
        found = found || (e["inputs"] == Json({"t", "t", "t"}) && e["output"] == "x" && e["coeff"] != 0);
  EXPECT_TRUE(found);
  EXPECT_EQ(res["certificate"]["verdict"], "nonformal-witness");
  EXPECT_EQ(res["classes"][1]["intDegree"], Json({1, 1}));
}

TEST(Runner, ColimitCertificate) {
  auto r = run(cfg("certificate", "colimit(torus(3,∞,1))"));
  ASSERT_EQ(r.exit_code, kOk);
  const auto& c = r.report["result"]["certificate"];
  EXPECT_EQ(c["verdict"], "certified-formal");
  EXPECT_NE(c["derivation"].get<std::string>().find("i=2"), std::string::npos);
  EXPECT_NE(render(r, "text").find("verdict: certified-formal"), std::string::npos);
}

TEST(Runner, ErrorsAndExitCodes) {
  auto bad = run(cfg("cohomology", "cyclic(6^1)"));
  EXPECT_EQ(bad.exit_code, kUsage);
  EXPECT_EQ(bad.report["error"]["kind"], "syntax");
  EXPECT_NE(bad.report["error"]["message"].get<std::string>().find("position 7"), std::string::npos);

  EXPECT_EQ(run(cfg("cohomology", "semidirect(cyclic(2^2), inversion)")).report["error"]["kind"], "semantic");
  EXPECT_EQ(run(cfg("nonsense", "cyclic(3^1)")).exit_code, kUsage);
  EXPECT_EQ(run(cfg("transfer", "colimit(cyclic(3^inf))")).exit_code, kUsage);
  auto mismatch = cfg("cohomology", "cyclic(3^1)");
  mismatch.p = 5;
  EXPECT_EQ(run(mismatch).exit_code, kUsage);

  auto budget = cfg("cohomology", "cyclic(3^1)");
  budget.budget = 10;
  auto b = run(budget);
  EXPECT_EQ(b.exit_code, kBudget);
  EXPECT_EQ(b.report["error"]["kind"], "budget");
  EXPECT_EQ(b.report["error"]["budget"], 10);
  EXPECT_TRUE(b.report["error"].contains("degree"));
}

TEST(Runner, DeterministicWithCache) {
  auto dir = fresh_dir("det");
  auto c = cfg("transfer", "semidirect(cyclic(3^1), inversion)", 5, 3);
  c.cache_dir = dir.string();
  auto first = run(c), second = run(c);
  ASSERT_EQ(first.exit_code, kOk);
  EXPECT_EQ(first.json_text(), second.json_text());
  EXPECT_EQ(first.cache_hits, 0u);
  EXPECT_GT(second.cache_hits, 0u);
  // Corrupt every entry; the run must recompute and produce the same bytes.
  for (const auto& e : fs::directory_iterator(dir)) {
    std::ofstream out(e.path(), std::ios::trunc);
    out << "{not json";
  }
  auto third = run(c);
  EXPECT_EQ(third.json_text(), first.json_text());
  EXPECT_EQ(third.cache_hits, 0u);
  EXPECT_EQ(run(c).cache_hits, 1u);
  fs::remove_all(dir);
}

TEST(Runner, EveryCommandSucceedsOnAFiniteGroup) {
  for (const auto& command : runner_commands()) {
    auto r = run(cfg(command, "semidirect(cyclic(3^2), inversion)", 2, 3));
    EXPECT_EQ(r.exit_code, kOk) << command << "\n" << r.json_text();
    EXPECT_TRUE(r.report["verified"].get<bool>()) << command;
  }
}
