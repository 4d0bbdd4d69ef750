#pragma once

// Homotopy transfer: a bidegree-preserving strong deformation retract of the
// bar cochains onto their cohomology, and the transferred A∞ operations
//   λ_2 = μ,  λ_n = Σ_{s+t=n} (-1)^{s+1} μ(hλ_s ⊗ hλ_t),  hλ_1 := -id,
//   m_n = p λ_n i^{⊗n}.

#include <ainf/bar_cochains.hpp>
#include <ainf/graded_core.hpp>
#include <ainf/linalg_fp.hpp>

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ainf {

class CapOverflow : public std::runtime_error {
 public:
  CapOverflow(int arity, int degree, int cap)
      : std::runtime_error("cap overflow: arity " + std::to_string(arity) + " needs cochains of degree " +
                           std::to_string(degree) + " but cohomology is only available below the bar cap " +
                           std::to_string(cap)),
        arity_(arity),
        degree_(degree) {}
  int arity() const { return arity_; }
  int degree() const { return degree_; }

 private:
  int arity_;
  int degree_;
};

/// incl, proj per degree 0..top and htp per degree 1..cap; every map preserves
/// internal degree. incl[n]: H → C^n, proj[n]: C^n → H, htp[n]: C^n → C^{n-1}.
class TransferData {
 public:
  const BarComplex& ambient() const { return *bc_; }
  const Cohomology& cohomology() const { return *h_; }
  const BigradedSpace& target() const { return h_->space(); }
  const SpacePtr& target_ptr() const { return h_->space_ptr(); }
  int top_degree() const { return h_->top_degree(); }

  const BigradedMap& incl(int n) const { return incl_.at(n); }
  const BigradedMap& proj(int n) const { return proj_.at(n); }
  const BigradedMap& htp(int n) const { return htp_.at(n); }
  const SpacePtr& cochains(int n) const { return spaces_.at(n); }

  friend TransferData build_sdr(BarPtr bc);

 private:
  BarPtr bc_;
  std::shared_ptr<const Cohomology> h_;
  std::vector<SpacePtr> spaces_;
  std::vector<BigradedMap> incl_, proj_, htp_;
};

/// Decomposes every bidegree block as boundaries ⊕ representatives ⊕ the span of
/// pivot coordinates of δ, then inverts δ from boundaries back to that span.
inline TransferData build_sdr(BarPtr bc) {
  TransferData td;
  td.bc_ = bc;
  td.h_ = std::make_shared<const Cohomology>(cohomology(bc));
  const auto& H = *td.h_;
  const auto& f = bc->field();
  const int top = H.top_degree(), cap = bc->max_degree();
  for (int n = 0; n <= cap; ++n) td.spaces_.push_back(bc->space(n));
  const auto hs = H.space_ptr();
  using Trip = std::tuple<std::size_t, std::size_t, std::int64_t>;

  // Position in C^n → index in the labeled space of C^n.
  std::vector<std::vector<std::size_t>> slot(cap + 1);
  for (int n = 0; n <= cap; ++n) {
    slot[n].resize(bc->dim(n));
    for (std::size_t pos = 0; pos < bc->dim(n); ++pos)
      slot[n][pos] = td.spaces_[n]->index_of(bc->word_label(n, bc->word_at(n, pos)));
  }

  for (int n = 0; n <= cap; ++n) {
    std::vector<Trip> inc, prj, hom;
    for (std::size_t b = 0; b < bc->blocks(n).size(); ++b) {
      const auto& blk = bc->blocks(n)[b];
      const auto size = blk.size();
      std::vector<FpVector> boundaries;
      std::vector<std::size_t> preimages, complement;
      const std::vector<FpVector>* reps = nullptr;
      if (n <= top) {
        const auto& bd = H.blocks(n)[b];
        boundaries = bd.boundaries;
        preimages = bd.boundary_preimages;
        complement = bd.complement;
        reps = &bd.representatives;
      } else {
        // Top degree: only the boundary part is determined; extend it by pivot coordinates.
        auto prev = bc->differential_block(n - 1, blk.degree);
        auto rr = rref(prev);
        preimages = rr.pivot_columns;
        boundaries = detail::matrix_columns(prev, preimages);
        auto ext = rref(FpMatrix::from_columns(f, size, boundaries).transpose());
        std::vector<bool> used(size, false);
        for (auto c : ext.pivot_columns) used[c] = true;
        for (std::size_t c = 0; c < size; ++c)
          if (!used[c]) complement.push_back(c);
      }
      std::vector<FpVector> cols = boundaries;
      if (reps) cols.insert(cols.end(), reps->begin(), reps->end());
      for (auto c : complement) {
        FpVector e(size, 0);
        e[c] = 1;
        cols.push_back(std::move(e));
      }
      if (cols.size() != size) throw std::logic_error("block decomposition has the wrong dimension");
      auto Q = inverse(FpMatrix::from_columns(f, size, cols));
      const auto nb = boundaries.size(), nh = reps ? reps->size() : 0;
      for (std::size_t r = 0; r < nb + nh; ++r) {
        for (const auto& e : Q.row(r)) {
          auto col = slot[n][blk.begin + e.col];
          if (r < nb) {
            auto prev_blk = *bc->block_index(n - 1, blk.degree);
            auto target = slot[n - 1][bc->blocks(n - 1)[prev_blk].begin + preimages[r]];
            hom.emplace_back(target, col, e.val);
          } else {
            prj.emplace_back(H.class_index(n, b, r - nb), col, e.val);
          }
        }
      }
      for (std::size_t k = 0; k < nh; ++k) {
        const auto& v = (*reps)[k];
        for (std::size_t i = 0; i < v.size(); ++i)
          if (v[i]) inc.emplace_back(slot[n][blk.begin + i], H.class_index(n, b, k), v[i]);
      }
    }
    const auto& cn = td.spaces_[n];
    if (n <= top) {
      td.incl_.emplace_back(hs, cn, 0, InternalDegree{}, FpMatrix::from_triplets(f, cn->size(), hs->size(), inc));
      td.proj_.emplace_back(cn, hs, 0, InternalDegree{}, FpMatrix::from_triplets(f, hs->size(), cn->size(), prj));
    }
    auto below = n > 0 ? td.spaces_[n - 1] : std::make_shared<const BigradedSpace>();
    td.htp_.emplace_back(cn, below, -1, InternalDegree{}, FpMatrix::from_triplets(f, below->size(), cn->size(), hom));
  }
  return td;
}

/// Differential δ: C^n → C^{n+1} as a map between the labeled spaces of td.
inline BigradedMap differential_map(const TransferData& td, int n) {
  const auto& bc = td.ambient();
  const auto &src = td.cochains(n), &dst = td.cochains(n + 1);
  std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> trips;
  const auto& d = bc.differential(n);
  for (std::size_t r = 0; r < d.rows(); ++r)
    for (const auto& e : d.row(r))
      trips.emplace_back(dst->index_of(bc.word_label(n + 1, bc.word_at(n + 1, r))),
                         src->index_of(bc.word_label(n, bc.word_at(n, e.col))), e.val);
  return BigradedMap(src, dst, 1, InternalDegree{}, FpMatrix::from_triplets(bc.field(), dst->size(), src->size(), trips));
}

/// Re-checks every SDR identity; returns a description of each failure.
inline std::vector<std::string> verify_sdr(const TransferData& td) {
  std::vector<std::string> failures;
  const auto& f = td.ambient().field();
  const int top = td.top_degree(), cap = td.ambient().max_degree();
  auto fail = [&](const std::string& what, int n) { failures.push_back(what + " fails in degree " + std::to_string(n)); };
  for (int n = 0; n <= top; ++n) {
    if (!(compose(td.proj(n), td.incl(n)).matrix() ==
          [&] {
            // identity on the classes of degree n, zero elsewhere
            std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> t;
            for (std::size_t i = 0; i < td.target().size(); ++i)
              if (td.target()[i].coh_degree == n) t.emplace_back(i, i, 1);
            return FpMatrix::from_triplets(f, td.target().size(), td.target().size(), t);
          }()))
      fail("proj∘incl = id", n);
    auto lhs = compose(td.incl(n), td.proj(n)).matrix();
    auto rhs = FpMatrix::identity(f, td.cochains(n)->size());
    if (n > 0) rhs = rhs - compose(differential_map(td, n - 1), td.htp(n)).matrix();
    if (n < cap) rhs = rhs - compose(td.htp(n + 1), differential_map(td, n)).matrix();
    if (!(lhs == rhs)) fail("incl∘proj = id - dh - hd", n);
    if (!compose(td.htp(n), td.incl(n)).matrix().is_zero()) fail("htp∘incl = 0", n);
  }
  for (int n = 1; n <= cap; ++n) {
    if (n >= 2 && !compose(td.htp(n - 1), td.htp(n)).matrix().is_zero()) fail("htp∘htp = 0", n);
    if (n - 1 <= top && !compose(td.proj(n - 1), td.htp(n)).matrix().is_zero()) fail("proj∘htp = 0", n);
  }
  return failures;
}

/// Transferred operations m_i, 2 ≤ i ≤ arity cap, on every tuple of basis
/// classes whose degrees sum to at most the degree cap. Only nonzero outputs are stored.
struct AInfinityStructure {
  SpacePtr underlying;
  PrimeField field{2};
  int arity_cap = 0;
  int degree_cap = 0;
  std::map<int, std::map<std::vector<std::size_t>, SparseRow>> operations;

  const BigradedSpace& space() const { return *underlying; }

  bool in_range(const std::vector<std::size_t>& inputs) const {
    int s = 0;
    for (auto i : inputs) s += space()[i].coh_degree;
    return static_cast<int>(inputs.size()) <= arity_cap && s <= degree_cap;
  }

  /// m_k on basis classes; empty when zero. Throws outside the computed range.
  const SparseRow& evaluate(const std::vector<std::size_t>& inputs) const {
    static const SparseRow zero;
    if (!in_range(inputs)) throw std::out_of_range("operation outside the computed caps");
    auto a = operations.find(static_cast<int>(inputs.size()));
    if (a == operations.end()) return zero;
    auto it = a->second.find(inputs);
    return it == a->second.end() ? zero : it->second;
  }

  Residue coefficient(const std::vector<std::string>& inputs, const std::string& output) const {
    std::vector<std::size_t> idx;
    for (const auto& l : inputs) idx.push_back(space().index_of(l));
    auto out = space().index_of(output);
    for (const auto& e : evaluate(idx))
      if (e.col == out) return e.val;
    return 0;
  }

  std::size_t nonzero_count(int arity) const {
    auto a = operations.find(arity);
    if (a == operations.end()) return 0;
    std::size_t n = 0;
    for (const auto& [in, out] : a->second) n += out.size();
    return n;
  }
};

namespace detail {

// All tuples of class indices of the given arity with degree sum ≤ cap, lexicographic.
inline void for_each_tuple(const BigradedSpace& space, int arity, int cap,
                           const std::function<void(const std::vector<std::size_t>&)>& fn) {
  std::vector<std::size_t> cur;
  std::function<void(int)> rec = [&](int budget) {
    if (static_cast<int>(cur.size()) == arity) {
      fn(cur);
      return;
    }
    for (std::size_t i = 0; i < space.size(); ++i) {
      int d = space[i].coh_degree;
      if (d > budget) continue;
      cur.push_back(i);
      rec(budget - d);
      cur.pop_back();
    }
  };
  rec(cap);
}

class Transferrer {
 public:
  explicit Transferrer(const TransferData& td) : td_(td), bc_(td.ambient()), f_(bc_.field()) {
    const auto cap = bc_.max_degree();
    for (int n = 0; n <= cap; ++n) {
      // Matrices in position coordinates of C^n.
      std::vector<std::size_t> slot(bc_.dim(n));
      for (std::size_t pos = 0; pos < bc_.dim(n); ++pos)
        slot[pos] = td.cochains(n)->index_of(bc_.word_label(n, bc_.word_at(n, pos)));
      slots_.push_back(std::move(slot));
    }
  }

  /// λ_n evaluated on incl of the given classes, in position coordinates.
  FpVector lambda(const std::vector<std::size_t>& in) {
    const int n = static_cast<int>(in.size());
    FpVector acc(bc_.dim(degree_sum(in, 0, n) + 2 - n), 0);
    for (int s = 1; s < n; ++s) {
      const int t = n - s;
      std::vector<std::size_t> left(in.begin(), in.begin() + s), right(in.begin() + s, in.end());
      int left_deg = degree_sum(in, 0, s);
      Residue sign = f_.mul(f_.sign(s + 1), koszul_sign(f_, 1 - t, left_deg));
      int dl = left_deg + 1 - s, dr = degree_sum(in, s, n) + 1 - t;
      if (dl < 0 || dr < 0) continue;
      const auto& hl = h_lambda(left);
      const auto& hr = h_lambda(right);
      auto prod = bc_.product(dl, hl, dr, hr);
      for (std::size_t i = 0; i < acc.size(); ++i)
        if (prod[i]) acc[i] = f_.add(acc[i], f_.mul(sign, prod[i]));
    }
    return acc;
  }

  /// m_n on basis classes as coordinates on the cohomology basis.
  FpVector operation(const std::vector<std::size_t>& in) {
    const int n = static_cast<int>(in.size());
    int out_deg = degree_sum(in, 0, n) + 2 - n;
    if (degree_sum(in, 0, n) > td_.top_degree()) throw CapOverflow(n, degree_sum(in, 0, n), bc_.max_degree());
    if (out_deg < 0) return FpVector(td_.target().size(), 0);
    return apply_global(td_.proj(out_deg), out_deg, lambda(in), true);
  }

 private:
  int degree_sum(const std::vector<std::size_t>& in, int from, int to) const {
    int s = 0;
    for (int i = from; i < to; ++i) s += td_.target()[in[i]].coh_degree;
    return s;
  }

  // Applies a map whose source is C^n to a position vector; the result is in
  // position coordinates of the target cochains, or in class coordinates.
  FpVector apply_global(const BigradedMap& m, int n, const FpVector& v, bool to_classes) const {
    FpVector labeled(td_.cochains(n)->size(), 0);
    for (std::size_t pos = 0; pos < v.size(); ++pos) labeled[slots_[n][pos]] = v[pos];
    auto out = m.apply(labeled);
    if (to_classes) return out;
    int tn = n + m.coh_shift();
    FpVector res(bc_.dim(tn), 0);
    for (std::size_t pos = 0; pos < res.size(); ++pos) res[pos] = out[slots_[tn][pos]];
    return res;
  }

  const FpVector& h_lambda(const std::vector<std::size_t>& in) {
    auto it = memo_.find(in);
    if (it != memo_.end()) return it->second;
    FpVector v;
    if (in.size() == 1) {
      const auto& c = td_.cohomology().classes()[in[0]];
      v = c.representative;
      for (auto& x : v) x = f_.neg(x);
    } else {
      int n = static_cast<int>(in.size());
      int d = degree_sum(in, 0, n) + 2 - n;
      if (d > bc_.max_degree()) throw CapOverflow(n, d, bc_.max_degree());
      if (d <= 0) throw std::logic_error("homotopy requested below degree 0");
      v = apply_global(td_.htp(d), d, lambda(in), false);
    }
    return memo_.emplace(in, std::move(v)).first->second;
  }

  const TransferData& td_;
  const BarComplex& bc_;
  PrimeField f_;
  std::vector<std::vector<std::size_t>> slots_;
  std::map<std::vector<std::size_t>, FpVector> memo_;
};

}  // namespace detail

inline AInfinityStructure transfer(const TransferData& td, int arity_cap, int degree_cap) {
  if (arity_cap < 2) throw std::invalid_argument("arity cap must be at least 2");
  if (degree_cap > td.top_degree()) throw CapOverflow(2, degree_cap, td.ambient().max_degree());
  AInfinityStructure ai;
  ai.underlying = td.target_ptr();
  ai.field = td.ambient().field();
  ai.arity_cap = arity_cap;
  ai.degree_cap = degree_cap;
  detail::Transferrer tr(td);
  for (int n = 2; n <= arity_cap; ++n) {
    auto& table = ai.operations[n];
    detail::for_each_tuple(ai.space(), n, degree_cap, [&](const std::vector<std::size_t>& in) {
      auto out = tr.operation(in);
      SparseRow row;
      for (std::size_t i = 0; i < out.size(); ++i)
        if (out[i]) row.push_back({i, out[i]});
      if (!row.empty()) table.emplace(in, std::move(row));
    });
  }
  return ai;
}

struct StasheffViolation {
  int arity;
  std::vector<std::string> inputs;
  std::string output;
  Residue residual;
};

/// Evaluates Σ_{r+s+t=n} (-1)^{r+st} m_{r+1+t}(id^r ⊗ m_s ⊗ id^t) on every basis
/// tuple within the caps, for 3 ≤ n ≤ max_arity (default arity cap + 1; m_1 = 0).
inline std::vector<StasheffViolation> check_stasheff(const AInfinityStructure& ai, int max_arity = -1) {
  if (max_arity < 0) max_arity = ai.arity_cap + 1;
  max_arity = std::min(max_arity, ai.arity_cap + 1);
  std::vector<StasheffViolation> out;
  if (!ai.underlying) return out;
  const auto& f = ai.field;
  const auto& sp = ai.space();
  for (int n = 3; n <= max_arity; ++n) {
    detail::for_each_tuple(sp, n, ai.degree_cap, [&](const std::vector<std::size_t>& in) {
      FpVector total(sp.size(), 0);
      for (int s = 2; s <= n - 1; ++s)
        for (int r = 0; r + s <= n; ++r) {
          int t = n - r - s;
          int prefix = 0;
          for (int i = 0; i < r; ++i) prefix += sp[in[i]].coh_degree;
          Residue sign = f.mul(f.sign(r + s * t), koszul_sign(f, 2 - s, prefix));
          std::vector<std::size_t> inner(in.begin() + r, in.begin() + r + s);
          for (const auto& e : ai.evaluate(inner)) {
            std::vector<std::size_t> outer(in.begin(), in.begin() + r);
            outer.push_back(e.col);
            outer.insert(outer.end(), in.begin() + r + s, in.end());
            Residue c = f.mul(sign, e.val);
            for (const auto& g : ai.evaluate(outer)) total[g.col] = f.add(total[g.col], f.mul(c, g.val));
          }
        }
      for (std::size_t k = 0; k < total.size(); ++k)
        if (total[k]) {
          StasheffViolation v{n, {}, sp[k].label, total[k]};
          for (auto i : in) v.inputs.push_back(sp[i].label);
          out.push_back(std::move(v));
        }
    });
  }
  return out;
}

}  // namespace ainf
