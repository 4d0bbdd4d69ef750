#pragma once

// Experiment runner: parse a spec, run one pipeline, cache the result
// content-addressed on disk and render a deterministic report.
// Requires nlohmann/json and OpenSSL (libcrypto).

#include <ainf/bar_cochains.hpp>
#include <ainf/formality_lab.hpp>
#include <ainf/group_models.hpp>
#include <ainf/htt_engine.hpp>
#include <ainf/spec_parser.hpp>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace ainf {

using Json = nlohmann::json;

inline constexpr const char* kArtifactVersion = "ainf-0.1.0+signs1";
inline constexpr int kSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kVerifyFailed = 1, kUsage = 2, kBudget = 3 };

struct ExperimentConfig {
  std::string command;
  std::string spec;
  std::optional<std::uint32_t> p;
  int max_degree = 6;
  int max_arity = 4;
  std::string format = "json";
  std::string cache_dir;
  std::size_t budget = 5'000'000;
};

inline const std::vector<std::string>& runner_commands() {
  static const std::vector<std::string> c{"cohomology", "restriction", "transfer", "certificate",
                                          "invariants", "compare",     "splitting"};
  return c;
}

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 15]);
  }
  return out;
}

/// On-disk cache of JSON payloads. Each entry stores the digest of its payload;
/// entries that fail to parse or verify are treated as misses and rewritten.
class ResultCache {
 public:
  explicit ResultCache(std::string dir = {}) : dir_(std::move(dir)) {
    if (!dir_.empty()) std::filesystem::create_directories(dir_);
  }

  bool enabled() const { return !dir_.empty(); }
  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t rejected() const { return rejected_; }

  std::filesystem::path path_of(const std::string& key) const { return std::filesystem::path(dir_) / (key + ".json"); }

  std::optional<Json> load(const std::string& key) {
    if (!enabled()) return std::nullopt;
    std::ifstream in(path_of(key), std::ios::binary);
    if (!in) return std::nullopt;
    std::stringstream ss;
    ss << in.rdbuf();
    try {
      auto entry = Json::parse(ss.str());
      if (entry.at("key") == key && entry.at("digest") == sha256_hex(entry.at("payload").dump())) {
        ++hits_;
        return entry.at("payload");
      }
    } catch (const Json::exception&) {
    }
    ++rejected_;
    return std::nullopt;
  }

  void store(const std::string& key, const Json& payload) {
    if (!enabled()) return;
    Json entry{{"key", key}, {"digest", sha256_hex(payload.dump())}, {"payload", payload}};
    std::random_device rd;
    auto tmp = path_of(key);
    tmp += ".tmp." + std::to_string(rd()) + std::to_string(rd());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << entry.dump();
      if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
    }
    std::filesystem::rename(tmp, path_of(key));
  }

  /// Cached value of `compute` under `key`.
  Json memo(const std::string& key, const std::function<Json()>& compute) {
    if (auto hit = load(key)) return *hit;
    ++misses_;
    auto v = compute();
    store(key, v);
    return v;
  }

 private:
  std::string dir_;
  std::size_t hits_ = 0, misses_ = 0, rejected_ = 0;
};

struct RunResult {
  int exit_code = kOk;
  Json report;
  std::size_t cache_hits = 0;
  double seconds = 0;

  std::string json_text() const { return report.dump(2) + "\n"; }
};

namespace detail {

inline Json degree_json(const InternalDegree& d) { return Json::array({d.numerator(), d.p_exponent()}); }

inline Json class_table(const BigradedSpace& s) {
  Json out = Json::array();
  for (const auto& b : s.basis())
    out.push_back({{"label", b.label}, {"cohDegree", b.coh_degree}, {"intDegree", degree_json(b.int_degree)}});
  return out;
}

inline Json dims_json(const std::vector<std::size_t>& d) { return Json(d); }

// Sorted by (arity, input labels, output label).
struct TensorEntry {
  int arity;
  std::vector<std::string> inputs;
  std::string output;
  Residue coeff;
  auto key() const { return std::tie(arity, inputs, output); }
};

inline Json tensors_json(std::vector<TensorEntry> entries) {
  std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.key() < b.key(); });
  Json out = Json::array();
  for (const auto& e : entries) {
    if (out.empty() || out.back()["arity"] != e.arity) out.push_back({{"arity", e.arity}, {"entries", Json::array()}});
    out.back()["entries"].push_back({{"inputs", e.inputs}, {"output", e.output}, {"coeff", e.coeff}});
  }
  return out;
}

inline Json certificate_json(const FormalityCertificate& c) {
  Json w = nullptr;
  if (c.witness)
    w = {{"arity", c.witness->arity}, {"inputs", c.witness->inputs}, {"output", c.witness->output},
         {"coeff", c.witness->scalar}};
  BigradedSpace table(c.table);
  return {{"subject", c.subject}, {"verdict", verdict_name(c.verdict)}, {"scope", c.scope},
          {"derivation", c.derivation}, {"violators", c.violators}, {"witness", w},
          {"table", class_table(table)}};
}

inline BarOptions bar_options(const ExperimentConfig& cfg) {
  BarOptions o;
  o.memory_budget = cfg.budget;
  return o;
}

inline AlgebraPtr algebra_for(const GroupSpec& spec) {
  return std::make_shared<const GradedGroupAlgebra>(build_group_algebra(spec));
}

inline Json cohomology_payload(const GroupSpec& spec, const ExperimentConfig& cfg) {
  auto bc = build_bar(algebra_for(spec), cfg.max_degree + 1, bar_options(cfg));
  auto H = cohomology(bc);
  std::vector<TensorEntry> cup;
  const auto& sp = H.space();
  for (std::size_t a = 0; a < sp.size(); ++a)
    for (std::size_t b = 0; b < sp.size(); ++b) {
      if (sp[a].coh_degree + sp[b].coh_degree > cfg.max_degree) continue;
      auto v = H.cup(a, b);
      for (std::size_t k = 0; k < v.size(); ++k)
        if (v[k]) cup.push_back({2, {sp[a].label, sp[b].label}, sp[k].label, v[k]});
    }
  return {{"dims", dims_json(H.dims())}, {"classes", class_table(sp)}, {"operations", tensors_json(cup)}};
}

inline Json colimit_cohomology_payload(const ColimitModel& m) {
  auto ring = m.ring();
  auto sp = m.space();
  std::vector<std::size_t> dims(m.truncation + 1, 0);
  std::vector<TensorEntry> prod;
  for (int d = 0; d <= m.truncation; ++d) dims[d] = ring.monomials(d).size();
  for (int d1 = 0; d1 <= m.truncation; ++d1)
    for (const auto& a : ring.monomials(d1))
      for (int d2 = 0; d1 + d2 <= m.truncation; ++d2)
        for (const auto& b : ring.monomials(d2))
          if (auto r = ring.multiply(a, b))
            prod.push_back({2, {ring.monomial_label(a), ring.monomial_label(b)}, ring.monomial_label(r->second), r->first});
  return {{"dims", dims_json(dims)}, {"classes", class_table(sp)}, {"operations", tensors_json(prod)}};
}

inline bool internal_degrees_preserved(const AInfinityStructure& ai) {
  const auto& sp = ai.space();
  for (const auto& [n, table] : ai.operations)
    for (const auto& [in, out] : table) {
      InternalDegree s = InternalDegree::integer(0, ai.field.p());
      for (auto i : in) s = s + sp[i].int_degree;
      for (const auto& e : out)
        if (sp[e.col].int_degree != s) return false;
    }
  return true;
}

inline Json transfer_payload(const GroupSpec& spec, const ExperimentConfig& cfg, const std::string& subject) {
  auto bc = build_bar(algebra_for(spec), cfg.max_degree + 1, bar_options(cfg));
  auto td = build_sdr(bc);
  auto sdr_failures = verify_sdr(td);
  auto ai = transfer(td, cfg.max_arity, cfg.max_degree);
  auto violations = check_stasheff(ai);
  std::vector<TensorEntry> entries;
  for (const auto& [n, table] : ai.operations)
    for (const auto& [in, out] : table) {
      std::vector<std::string> labels;
      for (auto i : in) labels.push_back(ai.space()[i].label);
      for (const auto& e : out) entries.push_back({n, labels, ai.space()[e.col].label, e.val});
    }
  Json viol = Json::array();
  for (const auto& v : violations)
    viol.push_back({{"arity", v.arity}, {"inputs", v.inputs}, {"output", v.output}, {"residual", v.residual}});
  return {{"dims", dims_json(td.cohomology().dims())},
          {"classes", class_table(ai.space())},
          {"operations", tensors_json(entries)},
          {"checks",
           {{"sdrFailures", sdr_failures},
            {"stasheffMaxArity", ai.arity_cap + 1},
            {"stasheffViolations", viol},
            {"internalDegreePreserved", internal_degrees_preserved(ai)}}},
          {"certificate", certificate_json(assess(ai, subject))}};
}

inline Json invariants_payload(const CommutativeModel& model, int truncation) {
  auto rep = invariant_dims(model, truncation);
  Json blocks = Json::array();
  for (std::size_t k = 0; k < rep.blocks.size(); ++k) {
    if (rep.blocks[k].basis.empty()) continue;
    blocks.push_back({{"cohDegree", rep.blocks[k].coh_degree},
                      {"intDegree", degree_json(rep.blocks[k].int_degree)},
                      {"basis", rep.block_labels[k]}});
  }
  Json gens = Json::array();
  for (const auto& g : rep.generators)
    gens.push_back({{"label", g.label}, {"cohDegree", g.coh_degree}, {"intDegree", degree_json(g.int_degree)}});
  return {{"model", model.description},
          {"dims", dims_json(rep.dims)},
          {"ambientDims", dims_json(rep.ambient_dims)},
          {"invariants", blocks},
          {"generators", gens},
          {"completeBelow", rep.complete_below},
          {"projectorIdempotent", rep.projector_idempotent}};
}

inline Json restriction_payload(const GroupSpec& spec, const ExperimentConfig& cfg) {
  if (!spec.uniform_depth() || spec.depths.front() < 2)
    throw std::invalid_argument("restriction needs equal depths of at least 2 on every factor");
  unsigned n = spec.depths.front();
  GroupSpec lower = spec;
  lower.depths.assign(spec.rank(), n - 1);
  lower.validate();
  AlgebraPtr hi, lo;
  if (spec.weyl && spec.weyl_order() > 1) {
    // One splitting for both levels so the inclusion is homogeneous.
    auto choice = equivariant_splitting(spec, n);
    hi = std::make_shared<const GradedGroupAlgebra>(regrade_by_splitting(GradedGroupAlgebra(spec), choice));
    lo = std::make_shared<const GradedGroupAlgebra>(regrade_by_splitting(GradedGroupAlgebra(lower), choice));
  } else {
    hi = algebra_for(spec);
    lo = algebra_for(lower);
  }
  auto phi = power_inclusion(lo, hi);
  auto H_hi = cohomology(build_bar(hi, cfg.max_degree + 1, bar_options(cfg)));
  auto H_lo = cohomology(build_bar(lo, cfg.max_degree + 1, bar_options(cfg)));
  auto res = restriction(phi, H_lo, H_hi);
  std::vector<TensorEntry> entries;
  for (std::size_t r = 0; r < res.matrix().rows(); ++r)
    for (const auto& e : res.matrix().row(r))
      entries.push_back({1, {H_hi.space()[e.col].label}, H_lo.space()[r].label, e.val});
  return {{"fromDepth", n},
          {"toDepth", n - 1},
          {"classesFrom", class_table(H_hi.space())},
          {"classesTo", class_table(H_lo.space())},
          {"map", tensors_json(entries)}};
}

inline std::string vector_text(const GradedGroupAlgebra& alg, const FpVector& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i]) continue;
    if (!out.empty()) out += " + ";
    if (v[i] != 1) out += std::to_string(v[i]) + "*";
    out += alg.label(i);
  }
  return out.empty() ? "0" : out;
}

inline Json splitting_payload(const GroupSpec& spec) {
  if (!spec.uniform_depth()) throw std::invalid_argument("splitting needs equal depths on every factor");
  auto depth = spec.depths.front();
  auto choice = equivariant_splitting(spec, depth);
  auto failures = verify_splitting(spec, choice);
  Json levels = Json::array();
  for (unsigned n = 1; n <= depth; ++n) {
    GradedGroupAlgebra torus(GroupSpec::torus(spec.p, std::vector<unsigned>(spec.rank(), n)));
    Json lifts = Json::array();
    for (const auto& l : choice.level(n)) lifts.push_back(vector_text(torus, l));
    levels.push_back({{"level", n}, {"lifts", lifts}});
  }
  return {{"depth", depth}, {"levels", levels}, {"failures", failures}};
}

inline Json certificate_payload(const ParsedSpec& ps, const ExperimentConfig& cfg) {
  if (ps.colimit) {
    auto model = ps.colimit_model(cfg.max_degree);
    auto rep = invariant_dims(model.ring(), cfg.max_degree);
    return {{"certificate", certificate_json(certify_by_doubling(rep.space(), ps.weyl ? ps.canonical + " (W-invariants)" : ps.canonical))}};
  }
  auto spec = ps.group();
  auto bc = build_bar(algebra_for(spec), cfg.max_degree + 1, bar_options(cfg));
  auto H = cohomology(bc);
  auto cert = certify_by_doubling(H.space(), ps.canonical);
  if (cert.verdict == Verdict::CertifiedFormal) return {{"certificate", certificate_json(cert)}};
  auto td = build_sdr(bc);
  auto ai = transfer(td, cfg.max_arity, cfg.max_degree);
  return {{"certificate", certificate_json(assess(ai, ps.canonical))}};
}

inline Json compare_payload(const GroupSpec& spec, const ExperimentConfig& cfg) {
  auto c = compare_finite_vs_invariants(spec, cfg.max_degree, bar_options(cfg));
  return {{"barDims", dims_json(c.bar_dims)},
          {"invariantDims", dims_json(c.invariant_dims)},
          {"agree", c.agree()},
          {"mismatches", c.mismatches}};
}

inline bool payload_verified(const std::string& command, const Json& payload) {
  if (command == "transfer") {
    const auto& c = payload.at("checks");
    return c.at("sdrFailures").empty() && c.at("stasheffViolations").empty() && c.at("internalDegreePreserved");
  }
  if (command == "compare") return payload.at("agree");
  if (command == "splitting") return payload.at("failures").empty();
  if (command == "invariants") return payload.at("projectorIdempotent");
  return true;
}

inline Json error_json(const std::string& kind, const std::string& message) {
  return {{"schemaVersion", kSchemaVersion}, {"error", {{"kind", kind}, {"message", message}}}};
}

}  // namespace detail

inline std::string cache_key(const ExperimentConfig& cfg, const ParsedSpec& ps, const std::string& stage) {
  Json k{{"spec", ps.canonical}, {"p", ps.p},        {"maxDegree", cfg.max_degree}, {"maxArity", cfg.max_arity},
         {"version", kArtifactVersion}, {"stage", stage}};
  return sha256_hex(k.dump());
}

/// Runs one pipeline. The report body is deterministic; timing and cache hits
/// are returned separately.
inline RunResult run(const ExperimentConfig& cfg) {
  RunResult rr;
  auto t0 = std::chrono::steady_clock::now();
  auto finish = [&](int code, Json report, const ResultCache* cache) {
    rr.exit_code = code;
    rr.report = std::move(report);
    rr.cache_hits = cache ? cache->hits() : 0;
    rr.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rr;
  };
  const auto& cmds = runner_commands();
  if (std::find(cmds.begin(), cmds.end(), cfg.command) == cmds.end())
    return finish(kUsage, detail::error_json("usage", "unknown command '" + cfg.command + "'"), nullptr);
  if (cfg.max_degree < 1 || cfg.max_arity < 2 || cfg.budget < 1)
    return finish(kUsage, detail::error_json("usage", "caps must satisfy max-degree >= 1, max-arity >= 2, budget >= 1"),
                  nullptr);
  if (cfg.format != "json" && cfg.format != "text")
    return finish(kUsage, detail::error_json("usage", "format must be json or text"), nullptr);

  ParsedSpec ps;
  try {
    ps = parse_spec(cfg.spec);
  } catch (const SpecParseError& e) {
    return finish(kUsage, detail::error_json("syntax", e.what()), nullptr);
  } catch (const std::exception& e) {
    return finish(kUsage, detail::error_json("semantic", e.what()), nullptr);
  }
  if (cfg.p && *cfg.p != ps.p)
    return finish(kUsage,
                  detail::error_json("usage", "--p " + std::to_string(*cfg.p) + " contradicts the spec prime " +
                                                  std::to_string(ps.p)),
                  nullptr);

  ResultCache cache(cfg.cache_dir);
  Json payload;
  try {
    auto key = cache_key(cfg, ps, cfg.command);
    const auto& c = cfg.command;
    if (ps.colimit && c != "cohomology" && c != "certificate" && c != "invariants")
      return finish(kUsage,
                    detail::error_json("usage", "colimit(...) is a symbolic model; '" + c + "' needs a finite group spec"),
                    nullptr);
    payload = cache.memo(key, [&]() -> Json {
      if (c == "cohomology")
        return ps.colimit ? detail::colimit_cohomology_payload(ps.colimit_model(cfg.max_degree))
                          : detail::cohomology_payload(ps.group(), cfg);
      if (c == "transfer") return detail::transfer_payload(ps.group(), cfg, ps.canonical);
      if (c == "restriction") return detail::restriction_payload(ps.group(), cfg);
      if (c == "certificate") return detail::certificate_payload(ps, cfg);
      if (c == "invariants")
        return detail::invariants_payload(
            ps.colimit ? ps.colimit_model(cfg.max_degree).ring() : finite_level_model(ps.group()), cfg.max_degree);
      if (c == "compare") return detail::compare_payload(ps.group(), cfg);
      return detail::splitting_payload(ps.group());
    });
  } catch (const BudgetExceeded& e) {
    Json err = detail::error_json("budget", e.what());
    err["error"]["degree"] = e.degree();
    err["error"]["words"] = e.words();
    err["error"]["budget"] = e.budget();
    return finish(kBudget, err, &cache);
  } catch (const CapOverflow& e) {
    Json err = detail::error_json("cap-overflow", e.what());
    err["error"]["arity"] = e.arity();
    err["error"]["degree"] = e.degree();
    return finish(kUsage, err, &cache);
  } catch (const std::exception& e) {
    return finish(kUsage, detail::error_json("invalid", e.what()), &cache);
  }

  Json report{{"schemaVersion", kSchemaVersion},
              {"config",
               {{"command", cfg.command},
                {"spec", ps.canonical},
                {"kind", ps.colimit ? "colimit-model" : "finite-group"},
                {"p", ps.p},
                {"maxDegree", cfg.max_degree},
                {"maxArity", cfg.max_arity},
                {"budget", cfg.budget},
                {"version", kArtifactVersion}}},
              {"result", payload}};
  bool ok = detail::payload_verified(cfg.command, payload);
  report["verified"] = ok;
  return finish(ok ? kOk : kVerifyFailed, report, &cache);
}

/// Indented plain-text rendering of a report.
inline std::string render_text(const Json& j, int indent = 0) {
  std::ostringstream os;
  std::string pad(indent, ' ');
  auto scalar = [](const Json& v) { return v.is_string() ? v.get<std::string>() : v.dump(); };
  auto flat = [](const Json& v) {
    if (!v.is_array()) return false;
    for (const auto& x : v)
      if (x.is_structured() && !(x.is_array() && x.size() == 2 && x[0].is_number())) return false;
    return true;
  };
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      if (v.is_structured() && !flat(v)) {
        os << pad << k << ":\n" << render_text(v, indent + 2);
      } else {
        os << pad << k << ": " << (v.is_array() ? v.dump() : scalar(v)) << "\n";
      }
    }
  } else if (j.is_array()) {
    for (const auto& v : j) {
      if (v.is_object()) {
        os << pad << "-\n" << render_text(v, indent + 2);
      } else {
        os << pad << "- " << (v.is_array() ? v.dump() : scalar(v)) << "\n";
      }
    }
  } else {
    os << pad << scalar(j) << "\n";
  }
  return os.str();
}

inline std::string render(const RunResult& r, const std::string& format) {
  return format == "text" ? render_text(r.report) : r.json_text();
}

}  // namespace ainf
