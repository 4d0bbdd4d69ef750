#pragma once

// Formality by degree arithmetic, invariant rings of Weyl-type actions on
// graded-commutative models of torus cohomology, and non-formality witnesses.

#include <ainf/bar_cochains.hpp>
#include <ainf/graded_core.hpp>
#include <ainf/group_models.hpp>
#include <ainf/htt_engine.hpp>
#include <ainf/linalg_fp.hpp>

#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ainf {

/// Free graded-commutative algebra on finitely many generators, with a finite
/// group acting linearly on them. Exterior generators square to zero.
struct CommutativeModel {
  struct Generator {
    std::string name;
    int coh_degree;
    InternalDegree int_degree;
    bool exterior;
  };
  using Monomial = std::vector<int>;
  using Poly = std::map<Monomial, Residue, std::greater<>>;

  PrimeField field{2};
  std::vector<Generator> generators;
  // action[w][j] = image of generator j as coefficients on the generators
  std::vector<std::vector<FpVector>> action;
  std::string description;

  std::size_t weyl_order() const { return action.empty() ? 1 : action.size(); }

  int coh_degree(const Monomial& m) const {
    int d = 0;
    for (std::size_t i = 0; i < m.size(); ++i) d += m[i] * generators[i].coh_degree;
    return d;
  }
  InternalDegree int_degree(const Monomial& m) const {
    InternalDegree s = InternalDegree::integer(0, field.p());
    for (std::size_t i = 0; i < m.size(); ++i) s = s + generators[i].int_degree.times(m[i]);
    return s;
  }

  std::string monomial_label(const Monomial& m) const {
    std::string out;
    for (std::size_t i = 0; i < m.size(); ++i) {
      if (!m[i]) continue;
      if (!out.empty()) out += "*";
      out += generators[i].name;
      if (m[i] > 1) out += "^" + std::to_string(m[i]);
    }
    return out.empty() ? "1" : out;
  }

  std::string poly_label(const Poly& f) const {
    std::string out;
    for (const auto& [m, c] : f) {
      if (!out.empty()) out += " + ";
      if (c != 1) out += std::to_string(c) + "*";
      out += monomial_label(m);
    }
    return out.empty() ? "0" : out;
  }

  /// Monomials of cohomological degree d, lexicographically descending.
  std::vector<Monomial> monomials(int d) const {
    std::vector<Monomial> out;
    Monomial cur(generators.size(), 0);
    std::function<void(std::size_t, int)> rec = [&](std::size_t i, int left) {
      if (i == generators.size()) {
        if (left == 0) out.push_back(cur);
        return;
      }
      int deg = generators[i].coh_degree;
      int top = deg == 0 ? 0 : left / deg;
      if (generators[i].exterior) top = std::min(top, 1);
      for (int e = top; e >= 0; --e) {
        cur[i] = e;
        rec(i + 1, left - e * deg);
      }
      cur[i] = 0;
    };
    rec(0, d);
    return out;
  }

  /// Product of monomials with the Koszul sign; nothing when an exterior square appears.
  std::optional<std::pair<Residue, Monomial>> multiply(const Monomial& a, const Monomial& b) const {
    Monomial m(a.size());
    int swaps = 0, odd_after = 0;
    for (std::size_t i = a.size(); i-- > 0;) {
      if (generators[i].exterior && a[i] + b[i] > 1) return std::nullopt;
      m[i] = a[i] + b[i];
      if (generators[i].coh_degree % 2) {
        swaps += b[i] * odd_after;
        odd_after += a[i];
      }
    }
    return std::make_pair(field.sign(swaps), m);
  }

  Poly multiply(const Poly& f, const Poly& g) const {
    Poly out;
    for (const auto& [a, ca] : f)
      for (const auto& [b, cb] : g)
        if (auto r = multiply(a, b)) {
          auto& slot = out[r->second];
          slot = field.add(slot, field.mul(r->first, field.mul(ca, cb)));
        }
    std::erase_if(out, [](const auto& kv) { return kv.second == 0; });
    return out;
  }

  Poly act(std::size_t w, const Monomial& m) const {
    Poly out{{Monomial(m.size(), 0), 1}};
    if (action.empty()) {
      out = Poly{{m, 1}};
      return out;
    }
    for (std::size_t j = 0; j < m.size(); ++j) {
      if (!m[j]) continue;
      Poly image;
      for (std::size_t i = 0; i < generators.size(); ++i)
        if (auto c = action[w][j][i]) {
          Monomial g(m.size(), 0);
          g[i] = 1;
          image[g] = c;
        }
      for (int e = 0; e < m[j]; ++e) out = multiply(out, image);
    }
    return out;
  }
};

namespace detail {

inline std::string generator_name(const std::string& base, std::size_t i, std::size_t rank) {
  return rank == 1 ? base : base + std::to_string(i + 1);
}

// Contragredient action on generator classes: w·x_j = Σ_i M_{w⁻¹}[j][i] x_i.
inline std::vector<std::vector<FpVector>> dual_action(const PrimeField& f, const std::optional<WeylPart>& weyl,
                                                      const std::vector<std::size_t>& family_offsets,
                                                      std::size_t rank, std::size_t total) {
  std::vector<std::vector<FpVector>> out;
  if (!weyl) return out;
  for (std::size_t w = 0; w < weyl->order(); ++w) {
    const auto& m = weyl->matrices[weyl->inverse[w]];
    std::vector<FpVector> rows(total, FpVector(total, 0));
    for (auto off : family_offsets)
      for (std::size_t j = 0; j < rank; ++j)
        for (std::size_t i = 0; i < rank; ++i) rows[off + j][off + i] = f.reduce(m[j][i]);
    out.push_back(std::move(rows));
  }
  return out;
}

inline void check_weyl(std::uint32_t p, std::size_t rank, const std::optional<WeylPart>& weyl) {
  if (!weyl) return;
  if (std::gcd<std::size_t, std::size_t>(weyl->order(), p) != 1)
    throw GroupSpecError("|W| = " + std::to_string(weyl->order()) + " is divisible by p = " + std::to_string(p));
  PrimeField f(p);
  for (const auto& m : weyl->matrices) {
    if (m.size() != rank) throw GroupSpecError("action matrix has wrong size");
    if (ainf::rank(FpMatrix::from_dense(f, m)) != rank)
      throw GroupSpecError("action matrix " + detail::matrix_text(m) + " is not invertible mod " + std::to_string(p));
  }
}

}  // namespace detail

/// H*(Bμ_{p^∞}^r; F_p) = F_p[x_1..x_r], every x_i at bidegree (2, 1), with W
/// acting on the generators through its matrices mod p.
struct ColimitModel {
  std::uint32_t p = 2;
  std::size_t rank = 1;
  std::optional<WeylPart> weyl;
  int truncation = 8;

  static ColimitModel from_spec(std::uint32_t p, std::size_t rank, std::optional<WeylPart> weyl, int truncation) {
    PrimeField check(p);
    (void)check;
    if (rank == 0) throw GroupSpecError("torus part must have rank at least 1");
    if (truncation < 0) throw std::invalid_argument("truncation degree must be non-negative");
    detail::check_weyl(p, rank, weyl);
    return ColimitModel{p, rank, std::move(weyl), truncation};
  }

  CommutativeModel ring() const {
    CommutativeModel m;
    m.field = PrimeField(p);
    static const char* names[] = {"x", "y", "z"};
    for (std::size_t i = 0; i < rank; ++i)
      m.generators.push_back({rank <= 3 ? names[i] : "x" + std::to_string(i + 1), 2, InternalDegree::integer(1, p), false});
    m.action = detail::dual_action(m.field, weyl, {0}, rank, rank);
    m.description = "F_" + std::to_string(p) + "[" + std::to_string(rank) + " generators at (2,1)]";
    if (weyl) m.description += " with W = " + weyl->description;
    return m;
  }

  /// Monomial basis of the whole polynomial ring through the truncation degree.
  BigradedSpace space() const {
    auto r = ring();
    std::vector<BasisElement> b;
    for (int d = 0; d <= truncation; ++d)
      for (const auto& m : r.monomials(d)) b.push_back({d, r.int_degree(m), r.monomial_label(m)});
    return BigradedSpace(std::move(b));
  }
};

/// Additive model Λ(t_i) ⊗ F_p[x_i] of H*(B μ_{p^{n_1}} x ... ; F_p) with t_i at
/// (1, 1/p^{n_i}) and x_i at (2, 1). A factor Z/2 contributes F_2[t] instead.
inline CommutativeModel finite_level_model(const GroupSpec& spec) {
  CommutativeModel m;
  m.field = PrimeField(spec.p);
  const auto r = spec.rank();
  bool any_z2 = false;
  for (auto n : spec.depths) any_z2 = any_z2 || (spec.p == 2 && n == 1);
  if (any_z2 && r > 1 && spec.weyl)
    throw GroupSpecError("finite-level model with a Z/2 factor and a W-action is not supported");
  for (std::size_t i = 0; i < r; ++i) {
    bool z2 = spec.p == 2 && spec.depths[i] == 1;
    m.generators.push_back({detail::generator_name("t", i, r), 1, InternalDegree(1, spec.depths[i], spec.p), !z2});
  }
  std::vector<std::size_t> fams{0};
  if (!any_z2) {
    for (std::size_t i = 0; i < r; ++i)
      m.generators.push_back({detail::generator_name("x", i, r), 2, InternalDegree::integer(1, spec.p), false});
    fams.push_back(r);
  }
  m.action = detail::dual_action(m.field, spec.weyl, fams, r, m.generators.size());
  m.description = "finite-level model of " + std::to_string(spec.order() / spec.weyl_order()) + "-element torus";
  if (spec.weyl) m.description += " with W = " + spec.weyl->description;
  return m;
}

struct InvariantBlock {
  int coh_degree = 0;
  InternalDegree int_degree;
  std::size_t ambient_dim = 0;
  std::vector<CommutativeModel::Poly> basis;  // RREF rows of the image of the averaging projector
  bool projector_idempotent = true;
};

struct MinimalGenerator {
  int coh_degree;
  InternalDegree int_degree;
  std::string label;
};

struct InvariantReport {
  std::vector<InvariantBlock> blocks;  // sorted by (cohDegree, intDegree)
  std::vector<std::size_t> dims;       // per cohomological degree 0..truncation
  std::vector<std::size_t> ambient_dims;
  std::vector<MinimalGenerator> generators;
  int complete_below = 0;  // generator list is complete in degrees < this
  bool projector_idempotent = true;
  std::vector<std::vector<std::string>> block_labels;  // parallel to blocks

  /// The invariant subring's basis as a bigraded space labeled by polynomials.
  BigradedSpace space() const {
    std::vector<BasisElement> b;
    for (std::size_t k = 0; k < blocks.size(); ++k)
      for (std::size_t j = 0; j < blocks[k].basis.size(); ++j)
        b.push_back({blocks[k].coh_degree, blocks[k].int_degree, block_labels[k][j]});
    return BigradedSpace(std::move(b));
  }
};

/// W-invariants degree by degree through `truncation` via (1/|W|) Σ_w w, with
/// minimal generators of the invariant subring found by quotienting decomposables.
inline InvariantReport invariant_dims(const CommutativeModel& model, int truncation) {
  const auto& f = model.field;
  if (std::gcd<std::size_t, std::size_t>(model.weyl_order(), f.p()) != 1)
    throw GroupSpecError("|W| = " + std::to_string(model.weyl_order()) + " is divisible by p = " + std::to_string(f.p()));
  const Residue inv_order = f.inv(f.reduce(static_cast<std::int64_t>(model.weyl_order())));
  InvariantReport rep;
  rep.dims.assign(truncation + 1, 0);
  rep.ambient_dims.assign(truncation + 1, 0);
  rep.complete_below = truncation + 1;

  for (int d = 0; d <= truncation; ++d) {
    std::map<InternalDegree, std::vector<CommutativeModel::Monomial>> by_internal;
    for (auto& m : model.monomials(d)) by_internal[model.int_degree(m)].push_back(std::move(m));
    for (auto& [s, mons] : by_internal) {
      const auto n = mons.size();
      std::map<CommutativeModel::Monomial, std::size_t> index;
      for (std::size_t i = 0; i < n; ++i) index[mons[i]] = i;
      std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> trips;
      for (std::size_t w = 0; w < model.weyl_order(); ++w)
        for (std::size_t c = 0; c < n; ++c)
          for (const auto& [m, v] : model.act(w, mons[c])) trips.emplace_back(index.at(m), c, f.mul(v, inv_order));
      auto P = FpMatrix::from_triplets(f, n, n, std::move(trips));
      InvariantBlock blk;
      blk.coh_degree = d;
      blk.int_degree = s;
      blk.ambient_dim = n;
      blk.projector_idempotent = P * P == P;
      rep.projector_idempotent = rep.projector_idempotent && blk.projector_idempotent;
      auto rr = rref(P.transpose());
      for (std::size_t r = 0; r < rr.rank; ++r) {
        CommutativeModel::Poly poly;
        for (const auto& e : rr.matrix.row(r)) poly[mons[e.col]] = e.val;
        blk.basis.push_back(std::move(poly));
      }
      rep.dims[d] += blk.basis.size();
      rep.ambient_dims[d] += n;
      rep.blocks.push_back(std::move(blk));
    }
  }
  for (const auto& b : rep.blocks) {
    std::vector<std::string> ls;
    for (const auto& poly : b.basis) ls.push_back(model.poly_label(poly));
    rep.block_labels.push_back(std::move(ls));
  }

  // Decomposables in bidegree (d, s) are sums of products of positive-degree invariants.
  for (std::size_t k = 0; k < rep.blocks.size(); ++k) {
    const auto& blk = rep.blocks[k];
    if (blk.coh_degree == 0 && blk.int_degree.is_zero()) continue;
    auto mons = model.monomials(blk.coh_degree);
    std::map<CommutativeModel::Monomial, std::size_t> index;
    for (std::size_t i = 0; i < mons.size(); ++i) index[mons[i]] = i;
    auto to_vec = [&](const CommutativeModel::Poly& poly) {
      FpVector v(mons.size(), 0);
      for (const auto& [m, c] : poly) v[index.at(m)] = c;
      return v;
    };
    std::vector<FpVector> rows;
    for (std::size_t a = 0; a < rep.blocks.size(); ++a)
      for (std::size_t b = 0; b < rep.blocks.size(); ++b) {
        const auto &A = rep.blocks[a], &B = rep.blocks[b];
        bool a_pos = A.coh_degree > 0 || !A.int_degree.is_zero();
        bool b_pos = B.coh_degree > 0 || !B.int_degree.is_zero();
        if (!a_pos || !b_pos || A.coh_degree + B.coh_degree != blk.coh_degree ||
            !(A.int_degree + B.int_degree == blk.int_degree))
          continue;
        for (const auto& x : A.basis)
          for (const auto& y : B.basis) {
            auto pr = model.multiply(x, y);
            if (!pr.empty()) rows.push_back(to_vec(pr));
          }
      }
    auto current = rows.empty() ? 0 : ainf::rank(FpMatrix::from_columns(f, mons.size(), rows));
    for (std::size_t j = 0; j < blk.basis.size(); ++j) {
      rows.push_back(to_vec(blk.basis[j]));
      auto next = ainf::rank(FpMatrix::from_columns(f, mons.size(), rows));
      if (next > current) {
        rep.generators.push_back({blk.coh_degree, blk.int_degree, rep.block_labels[k][j]});
        current = next;
      } else {
        rows.pop_back();
      }
    }
  }
  return rep;
}

enum class Verdict { CertifiedFormal, NotApplicable, NonformalWitness };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::CertifiedFormal: return "certified-formal";
    case Verdict::NotApplicable: return "not-applicable";
    case Verdict::NonformalWitness: return "nonformal-witness";
  }
  return "?";
}

struct Witness {
  int arity = 0;
  std::vector<std::string> inputs;
  std::string output;
  Residue scalar = 0;
};

struct FormalityCertificate {
  std::string subject;
  std::vector<BasisElement> table;
  Verdict verdict = Verdict::NotApplicable;
  std::string scope;
  std::string derivation;
  std::vector<std::string> violators;
  std::optional<Witness> witness;
};

inline constexpr const char* kDoublingDerivation =
    "every basis element satisfies d = 2s. A grading-preserving m_i sends inputs of bidegrees (d_j, s_j) "
    "to cohomological degree sum(d_j) + 2 - i = 2*sum(s_j) + 2 - i and internal degree sum(s_j); the output "
    "also satisfies d = 2s, so 2 - i = 0 and we must have i=2. Hence m_i = 0 for all i != 2.";

/// Certificate-level verdict: pure degree arithmetic on the basis.
inline FormalityCertificate certify_by_doubling(const BigradedSpace& space, std::string subject = {}) {
  FormalityCertificate c;
  c.subject = std::move(subject);
  c.table = space.basis();
  auto chk = doubling_check(space);
  if (chk.holds) {
    c.verdict = Verdict::CertifiedFormal;
    c.scope = "certificate: degree arithmetic, valid in every arity and degree";
    c.derivation = kDoublingDerivation;
  } else {
    c.verdict = Verdict::NotApplicable;
    c.scope = "certificate: degree arithmetic";
    for (const auto& label : chk.violations) {
      const auto& b = space[space.index_of(label)];
      c.violators.push_back(label + " at (" + std::to_string(b.coh_degree) + ", " + b.int_degree.to_string() +
                            "): " + std::to_string(b.coh_degree) + " != 2*" + b.int_degree.to_string());
    }
    c.derivation = "doubling fails on " + std::to_string(chk.violations.size()) +
                   " basis element(s); degree arithmetic does not constrain the higher operations";
  }
  return c;
}

/// First nonzero m_i with i ≥ 3, scanning arities upward and inputs in basis order.
inline std::optional<Witness> nonformality_witness(const AInfinityStructure& ai) {
  for (int n = 3; n <= ai.arity_cap; ++n) {
    auto it = ai.operations.find(n);
    if (it == ai.operations.end() || it->second.empty()) continue;
    const auto& [in, out] = *it->second.begin();
    Witness w{n, {}, ai.space()[out.front().col].label, out.front().val};
    for (auto i : in) w.inputs.push_back(ai.space()[i].label);
    return w;
  }
  return std::nullopt;
}

/// Doubling certificate on the transfer's underlying space, upgraded to a
/// witness when one exists; otherwise the computed vanishing is recorded as scope.
inline FormalityCertificate assess(const AInfinityStructure& ai, std::string subject) {
  auto c = certify_by_doubling(ai.space(), std::move(subject));
  if (c.verdict == Verdict::CertifiedFormal) return c;
  if (auto w = nonformality_witness(ai)) {
    c.verdict = Verdict::NonformalWitness;
    c.witness = std::move(w);
    c.scope = "computation: transferred operations up to arity " + std::to_string(ai.arity_cap) + ", degree " +
              std::to_string(ai.degree_cap);
  } else {
    c.scope = "computation: m_i = 0 for 3 <= i <= " + std::to_string(ai.arity_cap) + " on inputs of total degree <= " +
              std::to_string(ai.degree_cap);
  }
  return c;
}

struct Comparison {
  std::vector<std::size_t> bar_dims;
  std::vector<std::size_t> invariant_dims;
  std::vector<int> mismatches;
  bool agree() const { return mismatches.empty(); }
};

/// Bar cohomology of the full group against W-invariants of the torus model, degrees 0..max_degree.
inline Comparison compare_finite_vs_invariants(const GroupSpec& spec, int max_degree, BarOptions options = {}) {
  Comparison c;
  auto alg = std::make_shared<const GradedGroupAlgebra>(build_group_algebra(spec));
  auto bc = build_bar(alg, max_degree + 1, options);
  c.bar_dims = cohomology_dims(*bc);
  c.bar_dims.resize(max_degree + 1);
  c.invariant_dims = invariant_dims(finite_level_model(spec), max_degree).dims;
  for (int d = 0; d <= max_degree; ++d)
    if (c.bar_dims[d] != c.invariant_dims[d]) c.mismatches.push_back(d);
  return c;
}

}  // namespace ainf
