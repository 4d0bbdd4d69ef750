#pragma once

// Reduced bar cochains of an augmented graded algebra: C^n = (Ī^{⊗n})^*,
// with (δφ)[a_1|…|a_{n+1}] = Σ_i (-1)^i φ[a_1|…|a_i a_{i+1}|…|a_{n+1}] and the
// cup product dual to deconcatenation.

#include <ainf/graded_core.hpp>
#include <ainf/group_models.hpp>
#include <ainf/linalg_fp.hpp>

#include <algorithm>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ainf {

class BudgetExceeded : public std::runtime_error {
 public:
  BudgetExceeded(int degree, std::size_t words, std::size_t budget)
      : std::runtime_error("bar complex exceeds the memory budget at degree " + std::to_string(degree) + ": " +
                           std::to_string(words) + " words > budget " + std::to_string(budget)),
        degree_(degree),
        words_(words),
        budget_(budget) {}
  int degree() const { return degree_; }
  std::size_t words() const { return words_; }
  std::size_t budget() const { return budget_; }

 private:
  int degree_;
  std::size_t words_;
  std::size_t budget_;
};

struct BarOptions {
  std::size_t memory_budget = 5'000'000;
};

/// Contiguous range of positions in C^n sharing one internal degree.
struct DegreeBlock {
  InternalDegree degree;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t size() const { return end - begin; }
};

class BarComplex {
 public:
  BarComplex(AlgebraPtr alg, int max_degree, BarOptions options = {})
      : alg_(std::move(alg)), field_(alg_->field()), max_degree_(max_degree) {
    if (max_degree < 1) throw std::invalid_argument("bar complex degree cap must be at least 1");
    if (!alg_->is_graded()) throw std::invalid_argument("bar complex needs a graded algebra");
    build_letters();
    std::size_t total = 0, d = 1;
    for (int n = 0; n <= max_degree_; ++n) {
      total += d;
      if (total > options.memory_budget) throw BudgetExceeded(n, total, options.memory_budget);
      d *= letters();
    }
    for (int n = 0; n <= max_degree_; ++n) build_degree(n);
    for (int n = 0; n < max_degree_; ++n) differentials_.push_back(build_differential(n));
  }

  const GradedGroupAlgebra& algebra() const { return *alg_; }
  const AlgebraPtr& algebra_ptr() const { return alg_; }
  const PrimeField& field() const { return field_; }
  int max_degree() const { return max_degree_; }

  std::size_t letters() const { return letter_basis_.size(); }
  std::size_t letter_algebra_index(std::size_t l) const { return letter_basis_.at(l); }
  const InternalDegree& letter_degree(std::size_t l) const { return alg_->degree(letter_basis_.at(l)); }
  std::string letter_label(std::size_t l) const {
    auto b = letter_basis_.at(l);
    return alg_->augmentation(b) ? alg_->label(b) + "-1" : alg_->label(b);
  }
  /// Product of two letters in letter coordinates.
  const SparseRow& letter_product(std::size_t a, std::size_t b) const { return letter_products_.at(a * letters() + b); }

  std::size_t dim(int n) const { return degrees_.at(n).word_at.size(); }
  std::size_t word_at(int n, std::size_t pos) const { return degrees_.at(n).word_at.at(pos); }
  std::size_t position_of(int n, std::size_t word) const { return degrees_.at(n).pos_of.at(word); }
  const InternalDegree& degree_at(int n, std::size_t pos) const { return degrees_.at(n).int_degree.at(pos); }
  const std::vector<DegreeBlock>& blocks(int n) const { return degrees_.at(n).blocks; }

  std::optional<std::size_t> block_index(int n, const InternalDegree& s) const {
    const auto& bl = blocks(n);
    auto it = std::lower_bound(bl.begin(), bl.end(), s, [](const DegreeBlock& b, const InternalDegree& d) {
      return b.degree < d;
    });
    if (it == bl.end() || it->degree != s) return std::nullopt;
    return static_cast<std::size_t>(it - bl.begin());
  }

  std::vector<std::size_t> letters_of(int n, std::size_t word) const {
    std::vector<std::size_t> out(n);
    for (int i = n; i-- > 0;) {
      out[i] = word % letters();
      word /= letters();
    }
    return out;
  }
  std::size_t word_of(const std::vector<std::size_t>& ls) const {
    std::size_t w = 0;
    for (auto l : ls) w = w * letters() + l;
    return w;
  }

  /// δ: C^n → C^{n+1}, rows indexed by positions of C^{n+1}.
  const FpMatrix& differential(int n) const { return differentials_.at(n); }

  /// Block of δ from internal degree s in C^n to internal degree s in C^{n+1}.
  FpMatrix differential_block(int n, const InternalDegree& s) const {
    auto src = block_index(n, s), dst = block_index(n + 1, s);
    std::size_t c0 = src ? blocks(n)[*src].begin : 0, c1 = src ? blocks(n)[*src].end : 0;
    std::size_t r0 = dst ? blocks(n + 1)[*dst].begin : 0, r1 = dst ? blocks(n + 1)[*dst].end : 0;
    return differential(n).block(r0, r1, c0, c1);
  }

  /// Cup product of φ ∈ C^a and ψ ∈ C^b (position coordinates).
  FpVector product(int a, const FpVector& phi, int b, const FpVector& psi) const {
    if (a + b > max_degree_) throw std::out_of_range("cup product leaves the constructed range");
    FpVector out(dim(a + b), 0);
    std::size_t shift = 1;
    for (int i = 0; i < b; ++i) shift *= letters();
    for (std::size_t i = 0; i < phi.size(); ++i) {
      if (!phi[i]) continue;
      auto w1 = word_at(a, i) * shift;
      for (std::size_t j = 0; j < psi.size(); ++j)
        if (psi[j]) out[position_of(a + b, w1 + word_at(b, j))] = field_.mul(phi[i], psi[j]);
    }
    return out;
  }

  /// Labeled space of C^n; labels are zero-padded letter indices.
  SpacePtr space(int n) const {
    std::vector<BasisElement> els;
    els.reserve(dim(n));
    for (std::size_t pos = 0; pos < dim(n); ++pos) els.push_back({n, degree_at(n, pos), word_label(n, word_at(n, pos))});
    return std::make_shared<const BigradedSpace>(std::move(els));
  }

  std::string word_label(int n, std::size_t word) const {
    std::ostringstream os;
    auto width = std::to_string(letters() ? letters() - 1 : 0).size();
    os << '[';
    auto ls = letters_of(n, word);
    for (std::size_t i = 0; i < ls.size(); ++i) os << (i ? "|" : "") << std::setw(width) << std::setfill('0') << ls[i];
    os << ']';
    return os.str();
  }

  /// Human-readable word, e.g. [X|X^2].
  std::string word_text(int n, std::size_t word) const {
    std::string s = "[";
    auto ls = letters_of(n, word);
    for (std::size_t i = 0; i < ls.size(); ++i) s += (i ? "|" : "") + letter_label(ls[i]);
    return s + "]";
  }

 private:
  struct Degree {
    std::vector<std::size_t> word_at;
    std::vector<std::size_t> pos_of;
    std::vector<InternalDegree> int_degree;
    std::vector<DegreeBlock> blocks;
  };

  void build_letters() {
    auto unit = alg_->unit_index();
    for (std::size_t b = 0; b < alg_->dim(); ++b)
      if (b != unit) letter_basis_.push_back(b);
    std::vector<std::size_t> letter_of(alg_->dim(), static_cast<std::size_t>(-1));
    for (std::size_t l = 0; l < letter_basis_.size(); ++l) letter_of[letter_basis_[l]] = l;
    const auto m = letters();
    letter_products_.assign(m * m, {});
    // Letter l is b - ε(b)·1; expand the product and drop the unit coordinate,
    // which vanishes because Ī is an ideal.
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t y = 0; y < m; ++y) {
        auto bx = letter_basis_[x], by = letter_basis_[y];
        FpVector u(alg_->dim(), 0), v(alg_->dim(), 0);
        u[bx] = 1;
        v[by] = 1;
        u[unit] = field_.sub(u[unit], alg_->augmentation(bx));
        v[unit] = field_.sub(v[unit], alg_->augmentation(by));
        auto prod = alg_->multiply(u, v);
        SparseRow row;
        Residue unit_coeff = prod[unit];
        for (std::size_t b = 0; b < prod.size(); ++b) {
          if (b == unit || !prod[b]) continue;
          unit_coeff = field_.add(unit_coeff, field_.mul(prod[b], alg_->augmentation(b)));
          row.push_back({letter_of[b], prod[b]});
        }
        if (unit_coeff) throw std::logic_error("augmentation ideal is not closed under multiplication");
        std::sort(row.begin(), row.end(), [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
        letter_products_[x * m + y] = std::move(row);
      }
  }

  void build_degree(int n) {
    Degree d;
    std::size_t count = 1;
    for (int i = 0; i < n; ++i) count *= letters();
    std::vector<InternalDegree> wdeg(count);
    for (std::size_t w = 0; w < count; ++w) {
      InternalDegree s;
      for (auto l : letters_of(n, w)) s = s + letter_degree(l);
      wdeg[w] = s;
    }
    d.word_at.resize(count);
    for (std::size_t w = 0; w < count; ++w) d.word_at[w] = w;
    std::stable_sort(d.word_at.begin(), d.word_at.end(),
                     [&](std::size_t a, std::size_t b) { return wdeg[a] < wdeg[b]; });
    d.pos_of.resize(count);
    d.int_degree.resize(count);
    for (std::size_t pos = 0; pos < count; ++pos) {
      d.pos_of[d.word_at[pos]] = pos;
      d.int_degree[pos] = wdeg[d.word_at[pos]];
      if (d.blocks.empty() || d.blocks.back().degree != d.int_degree[pos])
        d.blocks.push_back({d.int_degree[pos], pos, pos});
      d.blocks.back().end = pos + 1;
    }
    degrees_.push_back(std::move(d));
  }

  FpMatrix build_differential(int n) {
    const auto rows = dim(n + 1), cols = dim(n);
    std::vector<SparseRow> data(rows);
    std::vector<std::pair<std::size_t, Residue>> acc;
    for (std::size_t pos = 0; pos < rows; ++pos) {
      auto ls = letters_of(n + 1, word_at(n + 1, pos));
      acc.clear();
      for (int i = 0; i < n; ++i) {
        Residue sign = field_.sign(i + 1);
        for (const auto& e : letter_product(ls[i], ls[i + 1])) {
          std::vector<std::size_t> merged;
          merged.reserve(n);
          merged.insert(merged.end(), ls.begin(), ls.begin() + i);
          merged.push_back(e.col);
          merged.insert(merged.end(), ls.begin() + i + 2, ls.end());
          acc.emplace_back(position_of(n, word_of(merged)), field_.mul(sign, e.val));
        }
      }
      std::sort(acc.begin(), acc.end());
      SparseRow row;
      for (std::size_t k = 0; k < acc.size();) {
        Residue v = 0;
        std::size_t l = k;
        for (; l < acc.size() && acc[l].first == acc[k].first; ++l) v = field_.add(v, acc[l].second);
        if (v) row.push_back({acc[k].first, v});
        k = l;
      }
      data[pos] = std::move(row);
    }
    return FpMatrix::from_rows(field_, cols, std::move(data));
  }

  AlgebraPtr alg_;
  PrimeField field_;
  int max_degree_;
  std::vector<std::size_t> letter_basis_;
  std::vector<SparseRow> letter_products_;
  std::vector<Degree> degrees_;
  std::vector<FpMatrix> differentials_;
};

using BarPtr = std::shared_ptr<const BarComplex>;

inline BarPtr build_bar(AlgebraPtr alg, int max_degree, BarOptions options = {}) {
  return std::make_shared<const BarComplex>(std::move(alg), max_degree, options);
}

/// Blockwise decomposition C^n_s = B ⊕ H ⊕ L. Vectors are local to the block.
struct BlockDecomposition {
  InternalDegree degree;
  std::size_t begin = 0, end = 0;
  std::vector<FpVector> boundaries;             // δ(e_j) for j in `boundary_preimages`
  std::vector<std::size_t> boundary_preimages;  // local indices in the same internal degree of C^{n-1}
  std::vector<FpVector> representatives;        // cocycles spanning a complement of B in Z
  std::vector<std::size_t> complement;          // local pivot columns of δ out of this block
};

struct CohomologyClass {
  int degree = 0;
  InternalDegree int_degree;
  std::string label;
  FpVector representative;  // position coordinates in C^degree
  std::size_t block = 0;    // index into BarComplex::blocks(degree)
  std::size_t slot = 0;     // index into that block's representatives
};

namespace detail {

inline std::vector<FpVector> matrix_columns(const FpMatrix& m, const std::vector<std::size_t>& cols) {
  auto t = m.transpose();
  std::vector<FpVector> out;
  for (auto c : cols) {
    FpVector v(m.rows(), 0);
    for (const auto& e : t.row(c)) v[e.col] = e.val;
    out.push_back(std::move(v));
  }
  return out;
}

inline std::string cyclic_label(std::uint64_t order, int d) {
  if (d == 0) return "1";
  if (order == 2) return d == 1 ? "t" : "t^" + std::to_string(d);
  auto k = d / 2;
  std::string x = k == 0 ? "" : (k == 1 ? "x" : "x^" + std::to_string(k));
  if (d % 2 == 0) return x;
  return k == 0 ? "t" : "t*" + x;
}

}  // namespace detail

/// Cohomology of a bar complex in degrees 0..top with chosen representatives.
class Cohomology {
 public:
  Cohomology(BarPtr bc, int top) : bc_(std::move(bc)), top_(top) {
    if (top < 0 || top >= bc_->max_degree())
      throw std::out_of_range("cohomology is only reliable below the bar degree cap");
    const auto& f = bc_->field();
    blocks_.resize(top + 1);
    for (int n = 0; n <= top; ++n) {
      for (const auto& blk : bc_->blocks(n)) {
        BlockDecomposition bd;
        bd.degree = blk.degree;
        bd.begin = blk.begin;
        bd.end = blk.end;
        if (n > 0) {
          auto prev = bc_->differential_block(n - 1, blk.degree);
          auto rr = rref(prev);
          bd.boundary_preimages = rr.pivot_columns;
          bd.boundaries = detail::matrix_columns(prev, rr.pivot_columns);
        }
        auto next = bc_->differential_block(n, blk.degree);
        auto cycles = kernel_basis(next);
        bd.complement = rref(next).pivot_columns;
        std::vector<FpVector> cols = bd.boundaries;
        cols.insert(cols.end(), cycles.begin(), cycles.end());
        auto rr = rref(FpMatrix::from_columns(f, blk.size(), cols));
        for (auto c : rr.pivot_columns)
          if (c >= bd.boundaries.size()) bd.representatives.push_back(cycles[c - bd.boundaries.size()]);
        blocks_[n].push_back(std::move(bd));
      }
    }
    label_classes();
  }

  const BarComplex& complex() const { return *bc_; }
  const BarPtr& complex_ptr() const { return bc_; }
  int top_degree() const { return top_; }
  const BigradedSpace& space() const { return *space_; }
  const SpacePtr& space_ptr() const { return space_; }
  const std::vector<CohomologyClass>& classes() const { return classes_; }  // in space order
  const CohomologyClass& cls(const std::string& label) const { return classes_.at(space_->index_of(label)); }
  const std::vector<BlockDecomposition>& blocks(int n) const { return blocks_.at(n); }

  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d(top_ + 1, 0);
    for (const auto& c : classes_) ++d[c.degree];
    return d;
  }

  /// Coefficients of the class of cocycle z ∈ C^n on the basis of space(),
  /// solved against [boundaries | representatives] block by block.
  FpVector coordinates(int n, const FpVector& z) const {
    const auto& f = bc_->field();
    FpVector out(classes_.size(), 0);
    for (std::size_t b = 0; b < blocks_.at(n).size(); ++b) {
      const auto& bd = blocks_[n][b];
      FpVector local(z.begin() + bd.begin, z.begin() + bd.end);
      if (is_zero(local)) continue;
      std::vector<FpVector> cols = bd.boundaries;
      cols.insert(cols.end(), bd.representatives.begin(), bd.representatives.end());
      auto x = solve(FpMatrix::from_columns(f, bd.end - bd.begin, cols), local);
      if (!x) throw std::invalid_argument("cochain is not a cocycle in degree " + std::to_string(n));
      for (std::size_t k = 0; k < bd.representatives.size(); ++k)
        if (auto c = (*x)[bd.boundaries.size() + k]) out[class_index_[n][b][k]] = c;
    }
    return out;
  }

  /// Cup product of two classes, as coordinates on space().
  FpVector cup(std::size_t a, std::size_t b) const {
    const auto &ca = classes_.at(a), &cb = classes_.at(b);
    if (ca.degree + cb.degree > top_) throw std::out_of_range("cup product above the computed range");
    return coordinates(ca.degree + cb.degree, bc_->product(ca.degree, ca.representative, cb.degree, cb.representative));
  }

  std::size_t class_index(int n, std::size_t block, std::size_t slot) const { return class_index_.at(n).at(block).at(slot); }

 private:
  void label_classes() {
    const auto& spec = bc_->algebra().spec();
    bool cyclic = spec.rank() == 1 && spec.weyl_order() == 1;
    auto order = spec.torus_order();
    std::vector<CohomologyClass> raw;
    for (int n = 0; n <= top_; ++n) {
      std::size_t total = 0;
      for (const auto& bd : blocks_[n]) total += bd.representatives.size();
      auto width = std::to_string(total ? total - 1 : 0).size();
      std::size_t k = 0;
      for (std::size_t b = 0; b < blocks_[n].size(); ++b) {
        const auto& bd = blocks_[n][b];
        for (std::size_t s = 0; s < bd.representatives.size(); ++s, ++k) {
          CohomologyClass c;
          c.degree = n;
          c.int_degree = bd.degree;
          c.block = b;
          c.slot = s;
          if (cyclic && total == 1) {
            c.label = detail::cyclic_label(order, n);
          } else {
            std::ostringstream os;
            os << 'h' << n << '_' << std::setw(width) << std::setfill('0') << k;
            c.label = os.str();
          }
          c.representative = FpVector(bc_->dim(n), 0);
          for (std::size_t i = 0; i < bd.representatives[s].size(); ++i)
            c.representative[bd.begin + i] = bd.representatives[s][i];
          raw.push_back(std::move(c));
        }
      }
    }
    std::vector<BasisElement> els;
    for (const auto& c : raw) els.push_back({c.degree, c.int_degree, c.label});
    space_ = std::make_shared<const BigradedSpace>(std::move(els));
    classes_.resize(raw.size());
    class_index_.resize(top_ + 1);
    for (int n = 0; n <= top_; ++n) {
      class_index_[n].resize(blocks_[n].size());
      for (std::size_t b = 0; b < blocks_[n].size(); ++b) class_index_[n][b].resize(blocks_[n][b].representatives.size());
    }
    for (auto& c : raw) {
      auto idx = space_->index_of(c.label);
      class_index_[c.degree][c.block][c.slot] = idx;
      classes_[idx] = std::move(c);
    }
  }

  BarPtr bc_;
  int top_;
  std::vector<std::vector<BlockDecomposition>> blocks_;
  std::vector<CohomologyClass> classes_;
  std::vector<std::vector<std::vector<std::size_t>>> class_index_;
  SpacePtr space_;
};

/// Cohomology in degrees 0..cap-1 with representatives.
inline Cohomology cohomology(BarPtr bc) {
  auto top = bc->max_degree() - 1;
  return Cohomology(std::move(bc), top);
}

/// Ranks of every differential block, keyed by (degree n, internal degree).
struct BlockRank {
  int degree;
  InternalDegree int_degree;
  std::size_t rank;
};

inline std::vector<BlockRank> differential_ranks(const BarComplex& bc) {
  std::vector<BlockRank> out;
  for (int n = 0; n < bc.max_degree(); ++n)
    for (const auto& blk : bc.blocks(n)) out.push_back({n, blk.degree, rank(bc.differential_block(n, blk.degree))});
  return out;
}

/// Per-degree cohomology dimensions from block ranks only (degrees 0..cap-1).
inline std::vector<std::size_t> cohomology_dims(const BarComplex& bc, const std::vector<BlockRank>& ranks) {
  std::vector<std::size_t> dims(bc.max_degree(), 0);
  auto rank_of = [&](int n, const InternalDegree& s) -> std::size_t {
    if (n < 0) return 0;
    for (const auto& r : ranks)
      if (r.degree == n && r.int_degree == s) return r.rank;
    return 0;
  };
  for (int n = 0; n < bc.max_degree(); ++n)
    for (const auto& blk : bc.blocks(n)) dims[n] += blk.size() - rank_of(n, blk.degree) - rank_of(n - 1, blk.degree);
  return dims;
}

inline std::vector<std::size_t> cohomology_dims(const BarComplex& bc) {
  return cohomology_dims(bc, differential_ranks(bc));
}

/// Cochain-level pullback C^n(target) → C^n(source) along an augmentation-preserving
/// algebra map source → target. Rows are source positions.
inline FpMatrix cochain_pullback(const AlgebraMap& phi, const BarComplex& source, const BarComplex& target, int n) {
  const auto& f = source.field();
  const auto &S = source.algebra(), &T = target.algebra();
  auto by_source = phi.matrix.transpose();
  for (std::size_t b = 0; b < S.dim(); ++b) {
    Residue e = 0;
    for (const auto& x : by_source.row(b)) e = f.add(e, f.mul(x.val, T.augmentation(x.col)));
    if (e != S.augmentation(b)) throw std::invalid_argument("algebra map does not preserve the augmentation");
  }
  // Image of each source letter in target letters.
  std::vector<std::size_t> target_letter(T.dim(), static_cast<std::size_t>(-1));
  for (std::size_t l = 0; l < target.letters(); ++l) target_letter[target.letter_algebra_index(l)] = l;
  auto unit_s = S.unit_index();
  std::vector<SparseRow> images(source.letters());
  for (std::size_t l = 0; l < source.letters(); ++l) {
    auto b = source.letter_algebra_index(l);
    FpVector u(S.dim(), 0);
    u[b] = 1;
    u[unit_s] = f.sub(u[unit_s], S.augmentation(b));
    auto v = phi.apply(u);
    for (std::size_t c = 0; c < v.size(); ++c)
      if (v[c] && c != T.unit_index()) images[l].push_back({target_letter[c], v[c]});
    std::sort(images[l].begin(), images[l].end(), [](const SparseEntry& a, const SparseEntry& b) { return a.col < b.col; });
  }
  std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> trips;
  for (std::size_t pos = 0; pos < source.dim(n); ++pos) {
    auto ls = source.letters_of(n, source.word_at(n, pos));
    std::vector<std::pair<std::size_t, Residue>> terms{{0, 1}};
    for (auto l : ls) {
      std::vector<std::pair<std::size_t, Residue>> next;
      for (const auto& [w, c] : terms)
        for (const auto& e : images[l]) next.emplace_back(w * target.letters() + e.col, f.mul(c, e.val));
      terms = std::move(next);
    }
    for (const auto& [w, c] : terms) trips.emplace_back(pos, target.position_of(n, w), c);
  }
  return FpMatrix::from_triplets(f, source.dim(n), target.dim(n), std::move(trips));
}

/// Map H^*(target) → H^*(source) induced by phi, on the chosen class bases.
inline BigradedMap restriction(const AlgebraMap& phi, const Cohomology& source, const Cohomology& target) {
  const auto& f = source.complex().field();
  int top = std::min(source.top_degree(), target.top_degree());
  std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> trips;
  for (int n = 0; n <= top; ++n) {
    auto pull = cochain_pullback(phi, source.complex(), target.complex(), n);
    for (std::size_t j = 0; j < target.classes().size(); ++j) {
      const auto& c = target.classes()[j];
      if (c.degree != n) continue;
      auto coords = source.coordinates(n, pull * c.representative);
      for (std::size_t i = 0; i < coords.size(); ++i)
        if (coords[i]) trips.emplace_back(i, j, coords[i]);
    }
  }
  // Classes above the common range map to zero.
  return BigradedMap(target.space_ptr(), source.space_ptr(), 0, InternalDegree{},
                     FpMatrix::from_triplets(f, source.classes().size(), target.classes().size(), std::move(trips)));
}

}  // namespace ainf
