#pragma once

// Finite approximations mu_{p^n}^r ⋊ W, their group algebras over F_p with
// the internal grading |X_{n,i}| = 1/p^n, and W-equivariant consistent lifts
// of the generators of J/J^2.

#include <ainf/graded_core.hpp>
#include <ainf/linalg_fp.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ainf {

using IntMatrix = std::vector<std::vector<std::int64_t>>;

class GroupSpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace detail {

inline std::int64_t ipow(std::int64_t b, unsigned e) {
  std::int64_t r = 1;
  while (e--) r *= b;
  return r;
}

inline std::int64_t mod(std::int64_t v, std::int64_t m) {
  auto r = v % m;
  return r < 0 ? r + m : r;
}

inline IntMatrix identity_matrix(std::size_t r) {
  IntMatrix m(r, std::vector<std::int64_t>(r, 0));
  for (std::size_t i = 0; i < r; ++i) m[i][i] = 1;
  return m;
}

// Row i reduced modulo moduli[i].
inline IntMatrix reduce_rows(IntMatrix m, const std::vector<std::int64_t>& moduli) {
  for (std::size_t i = 0; i < m.size(); ++i)
    for (auto& v : m[i]) v = mod(v, moduli[i]);
  return m;
}

inline IntMatrix mat_mul(const IntMatrix& a, const IntMatrix& b, const std::vector<std::int64_t>& moduli) {
  auto r = a.size();
  IntMatrix c(r, std::vector<std::int64_t>(r, 0));
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t k = 0; k < r; ++k)
      for (std::size_t j = 0; j < r; ++j) c[i][j] = mod(c[i][j] + a[i][k] * b[k][j], moduli[i]);
  return c;
}

inline std::string matrix_text(const IntMatrix& m) {
  std::ostringstream os;
  os << '[';
  for (std::size_t i = 0; i < m.size(); ++i) {
    os << (i ? ",[" : "[");
    for (std::size_t j = 0; j < m[i].size(); ++j) os << (j ? "," : "") << m[i][j];
    os << ']';
  }
  os << ']';
  return os.str();
}

}  // namespace detail

/// Finite group W of order prime to p acting on the torus part by integer matrices.
/// Elements are indexed 0..order-1 with 0 the identity.
struct WeylPart {
  std::string description;
  std::vector<IntMatrix> matrices;  // integer action matrix of each element (unreduced)
  std::vector<std::vector<std::size_t>> table;
  std::vector<std::size_t> inverse;

  std::size_t order() const { return matrices.size(); }

  /// Cyclic group of order k whose generator acts by `generator`. Powers are
  /// reduced modulo `modulus` when it is nonzero (a power of p large enough for every depth).
  static WeylPart cyclic(std::size_t k, const IntMatrix& generator, std::string description,
                         std::int64_t modulus = 0) {
    if (k == 0) throw GroupSpecError("Weyl group order must be positive");
    auto r = generator.size();
    for (const auto& row : generator)
      if (row.size() != r) throw GroupSpecError("action matrix must be square");
    WeylPart w;
    w.description = std::move(description);
    w.matrices.push_back(detail::identity_matrix(r));
    for (std::size_t j = 1; j < k; ++j) {
      IntMatrix next(r, std::vector<std::int64_t>(r, 0));
      for (std::size_t a = 0; a < r; ++a)
        for (std::size_t b = 0; b < r; ++b) {
          __int128 acc = 0;
          for (std::size_t c = 0; c < r; ++c) acc += static_cast<__int128>(w.matrices.back()[a][c]) * generator[c][b];
          next[a][b] = static_cast<std::int64_t>(modulus ? acc % modulus : acc);
        }
      w.matrices.push_back(std::move(next));
    }
    w.table.assign(k, std::vector<std::size_t>(k));
    w.inverse.assign(k, 0);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) w.table[a][b] = (a + b) % k;
      w.inverse[a] = (k - a) % k;
    }
    return w;
  }

  static WeylPart inversion(std::size_t r) {
    IntMatrix m(r, std::vector<std::int64_t>(r, 0));
    for (std::size_t i = 0; i < r; ++i) m[i][i] = -1;
    return cyclic(2, m, "inversion");
  }

  /// Direct product acting block-diagonally on a torus of rank ra + rb.
  static WeylPart product(const WeylPart& a, std::size_t ra, const WeylPart& b, std::size_t rb) {
    WeylPart w;
    w.description = a.description + " x " + b.description;
    auto ka = a.order(), kb = b.order();
    for (std::size_t i = 0; i < ka; ++i)
      for (std::size_t j = 0; j < kb; ++j) {
        IntMatrix m(ra + rb, std::vector<std::int64_t>(ra + rb, 0));
        for (std::size_t x = 0; x < ra; ++x)
          for (std::size_t y = 0; y < ra; ++y) m[x][y] = a.matrices[i][x][y];
        for (std::size_t x = 0; x < rb; ++x)
          for (std::size_t y = 0; y < rb; ++y) m[ra + x][ra + y] = b.matrices[j][x][y];
        w.matrices.push_back(std::move(m));
      }
    w.table.assign(ka * kb, std::vector<std::size_t>(ka * kb));
    w.inverse.assign(ka * kb, 0);
    for (std::size_t x = 0; x < ka * kb; ++x) {
      for (std::size_t y = 0; y < ka * kb; ++y)
        w.table[x][y] = a.table[x / kb][y / kb] * kb + b.table[x % kb][y % kb];
      w.inverse[x] = a.inverse[x / kb] * kb + b.inverse[x % kb];
    }
    return w;
  }
};

/// mu_{p^{n_1}} x ... x mu_{p^{n_r}}, optionally split-extended by W.
struct GroupSpec {
  std::uint32_t p = 2;
  std::vector<unsigned> depths;
  std::optional<WeylPart> weyl;

  std::size_t rank() const { return depths.size(); }
  std::size_t weyl_order() const { return weyl ? weyl->order() : 1; }

  std::vector<std::int64_t> moduli() const {
    std::vector<std::int64_t> m;
    for (auto n : depths) m.push_back(detail::ipow(p, n));
    return m;
  }
  std::size_t torus_order() const {
    std::size_t s = 1;
    for (auto m : moduli()) s *= static_cast<std::size_t>(m);
    return s;
  }
  std::size_t order() const { return torus_order() * weyl_order(); }

  bool uniform_depth() const {
    return std::all_of(depths.begin(), depths.end(), [&](unsigned n) { return n == depths.front(); });
  }

  /// Action matrices reduced modulo p^{n_i} row by row.
  IntMatrix action(std::size_t w) const {
    if (!weyl) return detail::identity_matrix(rank());
    return detail::reduce_rows(weyl->matrices.at(w), moduli());
  }

  /// Same rank and action, every depth replaced by n.
  GroupSpec at_depth(unsigned n) const {
    GroupSpec s = *this;
    s.depths.assign(depths.size(), n);
    s.validate();
    return s;
  }

  static GroupSpec torus(std::uint32_t p, std::vector<unsigned> depths) {
    GroupSpec s;
    s.p = p;
    s.depths = std::move(depths);
    s.validate();
    return s;
  }

  static GroupSpec cyclic(std::uint32_t p, unsigned n) { return torus(p, {n}); }

  static GroupSpec semidirect(std::uint32_t p, std::vector<unsigned> depths, WeylPart w) {
    GroupSpec s;
    s.p = p;
    s.depths = std::move(depths);
    s.weyl = std::move(w);
    s.validate();
    return s;
  }

  /// Throws GroupSpecError on any violated invariant.
  void validate() const {
    if (!PrimeField::is_prime(p)) throw GroupSpecError(std::to_string(p) + " is not prime");
    if (depths.empty()) throw GroupSpecError("torus part must have rank at least 1");
    for (auto n : depths)
      if (n == 0) throw GroupSpecError("cyclic factor depth must be at least 1");
    if (order() > 4096) throw GroupSpecError("group of order " + std::to_string(order()) + " is too large");
    if (!weyl) return;
    const auto& w = *weyl;
    auto k = w.order();
    if (k > 64) throw GroupSpecError("Weyl group of order " + std::to_string(k) + " exceeds the limit of 64");
    if (std::gcd<std::size_t, std::size_t>(k, p) != 1)
      throw GroupSpecError("|W| = " + std::to_string(k) + " is divisible by p = " + std::to_string(p) +
                           "; only the coprime (split) case is modelled");
    auto r = rank();
    auto mods = moduli();
    PrimeField f(p);
    for (std::size_t e = 0; e < k; ++e) {
      const auto& m = w.matrices[e];
      if (m.size() != r) throw GroupSpecError("action matrix has wrong size");
      for (std::size_t i = 0; i < r; ++i) {
        if (m[i].size() != r) throw GroupSpecError("action matrix has wrong size");
        for (std::size_t j = 0; j < r; ++j)
          if (depths[i] != depths[j] && detail::mod(m[i][j], mods[i]) != 0)
            throw GroupSpecError("action mixes cyclic factors of different depth");
      }
      std::vector<std::vector<std::int64_t>> red(r, std::vector<std::int64_t>(r));
      for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j) red[i][j] = m[i][j];
      if (rank_of(FpMatrix::from_dense(f, red)) != r)
        throw GroupSpecError("action matrix " + detail::matrix_text(m) + " is not invertible mod " +
                             std::to_string(p));
    }
    if (!(detail::reduce_rows(w.matrices[0], mods) == detail::reduce_rows(detail::identity_matrix(r), mods)))
      throw GroupSpecError("identity element of W must act trivially");
    for (std::size_t a = 0; a < k; ++a)
      for (std::size_t b = 0; b < k; ++b) {
        auto lhs = detail::mat_mul(action(a), action(b), mods);
        if (!(lhs == action(w.table[a][b])))
          throw GroupSpecError("action matrices do not define a homomorphism from W (" + w.description + ")");
      }
  }

 private:
  static std::size_t rank_of(const FpMatrix& m) { return ainf::rank(m); }
};

/// Multiplication of the finite group mu^r ⋊ W. Elements are indexed
/// torusIndex * |W| + w, torus coordinates exponent-lexicographic.
class FiniteGroup {
 public:
  explicit FiniteGroup(const GroupSpec& spec) : spec_(spec), moduli_(spec.moduli()) {
    k_ = spec.weyl_order();
    torus_ = spec.torus_order();
    for (std::size_t w = 0; w < k_; ++w) actions_.push_back(spec.action(w));
    auto n = size();
    table_.assign(n * n, 0);
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) table_[a * n + b] = static_cast<std::uint32_t>(compute_mul(a, b));
  }

  std::size_t size() const { return torus_ * k_; }
  std::size_t weyl_order() const { return k_; }
  std::size_t torus_order() const { return torus_; }
  std::size_t mul(std::size_t a, std::size_t b) const { return table_[a * size() + b]; }
  const GroupSpec& spec() const { return spec_; }

  std::vector<std::int64_t> torus_coords(std::size_t t_index) const {
    std::vector<std::int64_t> t(moduli_.size());
    for (std::size_t i = moduli_.size(); i-- > 0;) {
      t[i] = static_cast<std::int64_t>(t_index % moduli_[i]);
      t_index /= moduli_[i];
    }
    return t;
  }
  std::size_t torus_index(const std::vector<std::int64_t>& t) const {
    std::size_t idx = 0;
    for (std::size_t i = 0; i < moduli_.size(); ++i)
      idx = idx * moduli_[i] + static_cast<std::size_t>(detail::mod(t[i], moduli_[i]));
    return idx;
  }
  std::size_t element(const std::vector<std::int64_t>& t, std::size_t w) const { return torus_index(t) * k_ + w; }
  std::size_t weyl_of(std::size_t g) const { return g % k_; }
  std::size_t torus_of(std::size_t g) const { return g / k_; }

  /// Torus element w·t.
  std::vector<std::int64_t> act(std::size_t w, const std::vector<std::int64_t>& t) const {
    const auto& m = actions_[w];
    std::vector<std::int64_t> out(t.size(), 0);
    for (std::size_t i = 0; i < t.size(); ++i) {
      std::int64_t acc = 0;
      for (std::size_t j = 0; j < t.size(); ++j) acc = detail::mod(acc + m[i][j] * t[j], moduli_[i]);
      out[i] = acc;
    }
    return out;
  }

 private:
  std::size_t compute_mul(std::size_t a, std::size_t b) const {
    auto t1 = torus_coords(torus_of(a)), t2 = act(weyl_of(a), torus_coords(torus_of(b)));
    for (std::size_t i = 0; i < t1.size(); ++i) t1[i] += t2[i];
    std::size_t w = spec_.weyl ? spec_.weyl->table[weyl_of(a)][weyl_of(b)] : 0;
    return element(t1, w);
  }

  GroupSpec spec_;
  std::vector<std::int64_t> moduli_;
  std::size_t k_ = 1, torus_ = 1;
  std::vector<IntMatrix> actions_;
  std::vector<std::uint32_t> table_;
};

/// Group algebra F_p[mu^r ⋊ W] in the monomial basis X^a·w, where X_i is either
/// g_i - 1 or a supplied lift. Degrees are Σ a_i / p^{n_i}; W sits in degree zero.
class GradedGroupAlgebra {
 public:
  /// `lifts`, when given, holds one element per torus factor in torus group
  /// coordinates (index = torus index) replacing X_i = g_i - 1.
  GradedGroupAlgebra(const GroupSpec& spec, std::optional<std::vector<FpVector>> lifts = std::nullopt)
      : spec_(spec), field_(spec.p), group_(std::make_shared<const FiniteGroup>(spec)), lifts_(std::move(lifts)) {
    build();
  }

  const GroupSpec& spec() const { return spec_; }
  const PrimeField& field() const { return field_; }
  const FiniteGroup& group() const { return *group_; }
  std::size_t dim() const { return labels_.size(); }
  const std::vector<unsigned>& exponents(std::size_t i) const { return exponents_.at(i); }
  std::size_t weyl_index(std::size_t i) const { return weyl_.at(i); }
  const InternalDegree& degree(std::size_t i) const { return degrees_.at(i); }
  const std::string& label(std::size_t i) const { return labels_.at(i); }
  Residue augmentation(std::size_t i) const { return augmentation_.at(i); }
  const FpVector& group_coords(std::size_t i) const { return group_coords_.at(i); }
  bool is_regraded() const { return lifts_.has_value(); }
  const std::optional<std::vector<FpVector>>& lifts() const { return lifts_; }

  /// Product b_i b_j in basis coordinates.
  const SparseRow& product(std::size_t i, std::size_t j) const { return table_.at(i * dim() + j); }

  std::size_t basis_index(const std::vector<unsigned>& a, std::size_t w) const {
    auto it = index_.find({a, w});
    if (it == index_.end()) throw std::out_of_range("no such monomial");
    return it->second;
  }
  std::size_t unit_index() const { return basis_index(std::vector<unsigned>(spec_.rank(), 0), 0); }

  FpVector multiply(const FpVector& u, const FpVector& v) const {
    FpVector out(dim(), 0);
    for (std::size_t i = 0; i < dim(); ++i) {
      if (!u[i]) continue;
      for (std::size_t j = 0; j < dim(); ++j) {
        if (!v[j]) continue;
        auto c = field_.mul(u[i], v[j]);
        for (const auto& e : product(i, j)) out[e.col] = field_.add(out[e.col], field_.mul(c, e.val));
      }
    }
    return out;
  }

  /// Convolution in group coordinates.
  FpVector group_multiply(const FpVector& u, const FpVector& v) const {
    FpVector out(group_->size(), 0);
    for (std::size_t g = 0; g < u.size(); ++g) {
      if (!u[g]) continue;
      for (std::size_t h = 0; h < v.size(); ++h)
        if (v[h]) {
          auto gh = group_->mul(g, h);
          out[gh] = field_.add(out[gh], field_.mul(u[g], v[h]));
        }
    }
    return out;
  }

  FpVector to_basis(const FpVector& group_vec) const { return to_basis_ * group_vec; }
  FpVector to_group(const FpVector& basis_vec) const {
    FpVector out(group_->size(), 0);
    for (std::size_t i = 0; i < dim(); ++i)
      if (basis_vec[i])
        for (std::size_t g = 0; g < group_->size(); ++g)
          out[g] = field_.add(out[g], field_.mul(basis_vec[i], group_coords_[i][g]));
    return out;
  }

  /// Every nonzero structure constant c_{ij}^k satisfies deg k = deg i + deg j.
  bool is_graded() const {
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j)
        for (const auto& e : product(i, j))
          if (degrees_[e.col] != degrees_[i] + degrees_[j]) return false;
    return true;
  }

  /// Full check of (b_i b_j) b_k = b_i (b_j b_k) when dim ≤ full_limit, otherwise
  /// a deterministic sample of triples.
  bool is_associative(std::size_t full_limit = 200, std::size_t samples = 20000) const {
    auto n = dim();
    auto check = [&](std::size_t i, std::size_t j, std::size_t k) {
      FpVector l(n, 0), r(n, 0);
      for (const auto& e : product(i, j))
        for (const auto& f : product(e.col, k)) l[f.col] = field_.add(l[f.col], field_.mul(e.val, f.val));
      for (const auto& e : product(j, k))
        for (const auto& f : product(i, e.col)) r[f.col] = field_.add(r[f.col], field_.mul(e.val, f.val));
      return l == r;
    };
    if (n <= full_limit) {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k)
            if (!check(i, j, k)) return false;
      return true;
    }
    std::uint64_t s = 0x9e3779b97f4a7c15ULL;
    for (std::size_t t = 0; t < samples; ++t) {
      s ^= s << 13;
      s ^= s >> 7;
      s ^= s << 17;
      if (!check(s % n, (s >> 16) % n, (s >> 32) % n)) return false;
    }
    return true;
  }

  /// ε(b_i b_j) = ε(b_i) ε(b_j) for all pairs.
  bool augmentation_is_multiplicative() const {
    for (std::size_t i = 0; i < dim(); ++i)
      for (std::size_t j = 0; j < dim(); ++j) {
        Residue e = 0;
        for (const auto& t : product(i, j)) e = field_.add(e, field_.mul(t.val, augmentation_[t.col]));
        if (e != field_.mul(augmentation_[i], augmentation_[j])) return false;
      }
    return true;
  }

  /// Conjugation u ↦ w u w^{-1} in basis coordinates.
  FpVector conjugate(std::size_t w, const FpVector& u) const {
    auto gu = to_group(u);
    FpVector out(group_->size(), 0);
    for (std::size_t g = 0; g < gu.size(); ++g) {
      if (!gu[g]) continue;
      auto t = group_->act(w, group_->torus_coords(group_->torus_of(g)));
      auto wg = spec_.weyl ? spec_.weyl->table[spec_.weyl->table[w][group_->weyl_of(g)]][spec_.weyl->inverse[w]] : 0;
      out[group_->element(t, wg)] = gu[g];
    }
    return to_basis(out);
  }

  friend bool operator==(const GradedGroupAlgebra& a, const GradedGroupAlgebra& b) {
    return a.labels_ == b.labels_ && a.degrees_ == b.degrees_ && a.table_ == b.table_ &&
           a.group_coords_ == b.group_coords_;
  }

 private:
  void build() {
    const auto& G = *group_;
    const auto r = spec_.rank();
    const auto k = G.weyl_order();
    const auto mods = spec_.moduli();
    const auto N = G.size();

    // Generators in full group coordinates.
    std::vector<FpVector> gens(r, FpVector(N, 0));
    for (std::size_t i = 0; i < r; ++i) {
      if (lifts_) {
        const auto& l = lifts_->at(i);
        if (l.size() != G.torus_order()) throw std::invalid_argument("lift has wrong length");
        for (std::size_t t = 0; t < l.size(); ++t) gens[i][t * k] = l[t] % field_.p();
      } else {
        std::vector<std::int64_t> e(r, 0);
        e[i] = 1;
        gens[i][G.element(e, 0)] = 1;
        gens[i][0] = field_.neg(1);
      }
    }

    // Monomials X^a in exponent-lexicographic order, built from X^{a - e_last}.
    std::vector<std::vector<unsigned>> monos{std::vector<unsigned>(r, 0)};
    for (std::size_t i = 0; i < r; ++i) {
      std::vector<std::vector<unsigned>> next;
      for (const auto& m : monos)
        for (std::int64_t a = 0; a < mods[i]; ++a) {
          auto mm = m;
          mm[i] = static_cast<unsigned>(a);
          next.push_back(mm);
        }
      monos = std::move(next);
    }
    std::map<std::vector<unsigned>, FpVector> mono_vec;
    FpVector one(N, 0);
    one[0] = 1;
    for (const auto& a : monos) {
      FpVector v = one;
      for (std::size_t i = 0; i < r; ++i)
        for (unsigned e = 0; e < a[i]; ++e) v = group_multiply(v, gens[i]);
      mono_vec.emplace(a, std::move(v));
    }

    for (const auto& a : monos) {
      InternalDegree deg;
      for (std::size_t i = 0; i < r; ++i) deg = deg + InternalDegree(a[i], spec_.depths[i], spec_.p);
      for (std::size_t w = 0; w < k; ++w) {
        FpVector wv(N, 0);
        wv[w] = 1;  // torus index 0, Weyl element w
        auto v = w == 0 ? mono_vec.at(a) : group_multiply(mono_vec.at(a), wv);
        index_.emplace(std::pair{a, w}, labels_.size());
        exponents_.push_back(a);
        weyl_.push_back(w);
        degrees_.push_back(deg);
        labels_.push_back(monomial_label(a, w));
        Residue aug = 0;
        for (auto c : v) aug = field_.add(aug, c);
        augmentation_.push_back(aug);
        group_coords_.push_back(std::move(v));
      }
    }

    try {
      to_basis_ = inverse(FpMatrix::from_columns(field_, N, group_coords_));
    } catch (const std::domain_error&) {
      throw std::invalid_argument("supplied generators do not give a basis of the group algebra");
    }
    table_.assign(N * N, {});
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        auto v = to_basis_ * group_multiply(group_coords_[i], group_coords_[j]);
        SparseRow row;
        for (std::size_t c = 0; c < N; ++c)
          if (v[c]) row.push_back({c, v[c]});
        table_[i * N + j] = std::move(row);
      }
  }

  std::string monomial_label(const std::vector<unsigned>& a, std::size_t w) const {
    std::ostringstream os;
    bool any = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (!a[i]) continue;
      if (any) os << '*';
      os << 'X';
      if (a.size() > 1) os << i + 1;
      if (a[i] > 1) os << '^' << a[i];
      any = true;
    }
    if (w) {
      if (any) os << '*';
      os << 'w' << w;
      any = true;
    }
    if (!any) os << '1';
    return os.str();
  }

  GroupSpec spec_;
  PrimeField field_;
  std::shared_ptr<const FiniteGroup> group_;
  std::optional<std::vector<FpVector>> lifts_;
  std::vector<std::vector<unsigned>> exponents_;
  std::vector<std::size_t> weyl_;
  std::vector<InternalDegree> degrees_;
  std::vector<std::string> labels_;
  std::vector<Residue> augmentation_;
  std::vector<FpVector> group_coords_;
  std::map<std::pair<std::vector<unsigned>, std::size_t>, std::size_t> index_;
  FpMatrix to_basis_{PrimeField(2), 0, 0};
  std::vector<SparseRow> table_;
};

using AlgebraPtr = std::shared_ptr<const GradedGroupAlgebra>;

/// Lifts X̃_{n,i} for levels n = 1..depth, each in the monomial basis of the
/// torus algebra F_p[mu_{p^n}^r] (exponent-lexicographic).
struct SplittingChoice {
  std::uint32_t p = 2;
  std::size_t rank = 0;
  unsigned depth = 0;
  std::vector<std::vector<FpVector>> lifts;  // lifts[n-1][i]

  const std::vector<FpVector>& level(unsigned n) const { return lifts.at(n - 1); }
};

/// Algebra homomorphism between group algebras; matrix is target.dim() × source.dim().
struct AlgebraMap {
  AlgebraPtr source;
  AlgebraPtr target;
  FpMatrix matrix;

  FpVector apply(const FpVector& v) const { return matrix * v; }
};

namespace detail {

inline GroupSpec torus_only(const GroupSpec& s) { return GroupSpec::torus(s.p, s.depths); }

// Converts torus-algebra basis coordinates to torus group coordinates.
inline FpVector torus_basis_to_group(const GradedGroupAlgebra& torus_alg, const FpVector& v) {
  return torus_alg.to_group(v);
}

// p-th root along X_{n+1}^{p·a} = X_n^a: coefficients on monomials whose exponents
// are all divisible by p move to the lower level.
inline FpVector descend_power(const GradedGroupAlgebra& higher, const GradedGroupAlgebra& lower, const FpVector& v) {
  FpVector out(lower.dim(), 0);
  auto p = higher.spec().p;
  for (std::size_t i = 0; i < higher.dim(); ++i) {
    if (!v[i]) continue;
    auto a = higher.exponents(i);
    for (auto& e : a) {
      if (e % p) throw std::logic_error("p-th power left the image of the lower level");
      e /= p;
    }
    out[lower.basis_index(a, 0)] = v[i];
  }
  return out;
}

inline FpVector power(const GradedGroupAlgebra& alg, const FpVector& v, unsigned e) {
  FpVector r(alg.dim(), 0);
  r[alg.unit_index()] = 1;
  for (unsigned i = 0; i < e; ++i) r = alg.multiply(r, v);
  return r;
}

}  // namespace detail

/// Algebra map induced by (t, w) ↦ (p·t, w) from depth n to depth n+1, or the
/// identity when depths agree. Verified multiplicative and degree-preserving.
inline AlgebraMap power_inclusion(AlgebraPtr lower, AlgebraPtr higher) {
  const auto &ls = lower->spec(), &hs = higher->spec();
  if (ls.p != hs.p || ls.rank() != hs.rank() || ls.weyl_order() != hs.weyl_order())
    throw std::invalid_argument("power_inclusion: incompatible groups");
  bool same = ls.depths == hs.depths;
  for (std::size_t i = 0; i < ls.rank(); ++i)
    if (!same && hs.depths[i] != ls.depths[i] + 1)
      throw std::invalid_argument("power_inclusion: depths must increase by exactly one");
  if (ls.weyl) {
    auto lm = ls.moduli();
    for (std::size_t w = 0; w < ls.weyl_order(); ++w)
      if (!(detail::reduce_rows(hs.action(w), lm) == ls.action(w)))
        throw std::invalid_argument("power_inclusion: Weyl actions are not compatible");
  }
  const auto &LG = lower->group(), &HG = higher->group();
  std::int64_t scale = same ? 1 : ls.p;
  std::vector<std::size_t> image(LG.size());
  for (std::size_t g = 0; g < LG.size(); ++g) {
    auto t = LG.torus_coords(LG.torus_of(g));
    for (auto& x : t) x *= scale;
    image[g] = HG.element(t, LG.weyl_of(g));
  }
  const auto& f = lower->field();
  std::vector<FpVector> cols;
  for (std::size_t i = 0; i < lower->dim(); ++i) {
    FpVector gv(HG.size(), 0);
    const auto& src = lower->group_coords(i);
    for (std::size_t g = 0; g < src.size(); ++g)
      if (src[g]) gv[image[g]] = f.add(gv[image[g]], src[g]);
    cols.push_back(higher->to_basis(gv));
  }
  AlgebraMap m{lower, higher, FpMatrix::from_columns(f, higher->dim(), cols)};
  for (std::size_t i = 0; i < lower->dim(); ++i)
    for (std::size_t r = 0; r < higher->dim(); ++r)
      if (cols[i][r] && higher->degree(r) != lower->degree(i))
        throw std::invalid_argument("power_inclusion: image of " + lower->label(i) + " is not homogeneous of degree " +
                                    lower->degree(i).to_string());
  for (std::size_t i = 0; i < lower->dim(); ++i)
    for (std::size_t j = 0; j < lower->dim(); ++j) {
      FpVector prod(lower->dim(), 0);
      for (const auto& e : lower->product(i, j)) prod[e.col] = e.val;
      if (m.apply(prod) != higher->multiply(cols[i], cols[j]))
        throw std::logic_error("power_inclusion is not multiplicative");
    }
  return m;
}

/// W acting on the raw torus algebra of `torus_alg` through conjugation in the
/// full group of `spec`, returned in torus-algebra basis coordinates.
inline FpVector weyl_act_on_torus(const GroupSpec& spec, const GradedGroupAlgebra& torus_alg, std::size_t w,
                                  const FpVector& v) {
  FiniteGroup G(spec);
  const auto& T = torus_alg.group();
  auto gv = torus_alg.to_group(v);
  FpVector out(T.size(), 0);
  for (std::size_t t = 0; t < gv.size(); ++t)
    if (gv[t]) out[T.torus_index(G.act(w, T.torus_coords(t)))] = gv[t];
  return torus_alg.to_basis(out);
}

/// Checks the three invariants of a splitting choice; returns human-readable failures.
inline std::vector<std::string> verify_splitting(const GroupSpec& spec, const SplittingChoice& choice) {
  std::vector<std::string> failures;
  PrimeField f(spec.p);
  std::vector<std::shared_ptr<GradedGroupAlgebra>> algs;
  for (unsigned n = 1; n <= choice.depth; ++n)
    algs.push_back(std::make_shared<GradedGroupAlgebra>(GroupSpec::torus(spec.p, std::vector<unsigned>(choice.rank, n))));
  for (unsigned n = 1; n <= choice.depth; ++n) {
    const auto& A = *algs[n - 1];
    auto level_spec = spec.at_depth(n);
    const auto& L = choice.level(n);
    // X̃_i ≡ X_i mod J^2
    for (std::size_t i = 0; i < choice.rank; ++i) {
      for (std::size_t b = 0; b < A.dim(); ++b) {
        unsigned total = 0;
        for (auto e : A.exponents(b)) total += e;
        if (total > 1) continue;
        Residue expect = (total == 1 && A.exponents(b)[i] == 1) ? 1 : 0;
        if (L[i][b] != expect)
          failures.push_back("level " + std::to_string(n) + ": lift " + std::to_string(i + 1) +
                             " is not congruent to X modulo J^2");
      }
    }
    // W-stable span
    if (spec.weyl) {
      auto span = FpMatrix::from_columns(f, A.dim(), L);
      for (std::size_t w = 0; w < spec.weyl_order(); ++w)
        for (std::size_t i = 0; i < choice.rank; ++i)
          if (!solve(span, weyl_act_on_torus(level_spec, A, w, L[i])))
            failures.push_back("level " + std::to_string(n) + ": span of lifts is not W-stable");
    }
    // consistency with the next level
    if (n < choice.depth) {
      const auto& H = *algs[n];
      auto inc = power_inclusion(algs[n - 1], algs[n]);
      for (std::size_t i = 0; i < choice.rank; ++i)
        if (detail::power(H, choice.level(n + 1)[i], spec.p) != inc.apply(L[i]))
          failures.push_back("level " + std::to_string(n) + ": lift " + std::to_string(i + 1) +
                             " is not the p-th power of the level-" + std::to_string(n + 1) + " lift");
    }
  }
  return failures;
}

/// Averages the obvious section J/J^2 → J over W at the top depth, then derives
/// every lower level by p-th powers.
inline SplittingChoice equivariant_splitting(const GroupSpec& spec, unsigned depth) {
  if (depth == 0) throw std::invalid_argument("splitting depth must be at least 1");
  if (!spec.uniform_depth()) throw std::invalid_argument("equivariant splitting needs equal depths on every factor");
  if (spec.weyl && std::gcd<std::size_t, std::size_t>(spec.weyl_order(), spec.p) != 1)
    throw GroupSpecError("p divides |W|: F_p W is not semisimple");
  const PrimeField f(spec.p);
  const auto r = spec.rank();
  const auto k = spec.weyl_order();
  auto top_spec = spec.at_depth(depth);
  auto top = std::make_shared<GradedGroupAlgebra>(GroupSpec::torus(spec.p, std::vector<unsigned>(r, depth)));

  std::vector<FpVector> x(r);
  for (std::size_t j = 0; j < r; ++j) {
    std::vector<unsigned> a(r, 0);
    a[j] = 1;
    x[j] = FpVector(top->dim(), 0);
    x[j][top->basis_index(a, 0)] = 1;
  }
  // ρ(w)_{ji} = M_w[j][i] mod p: the action on J/J^2.
  auto rho = [&](std::size_t w, std::size_t j, std::size_t i) {
    return f.reduce(top_spec.action(w)[j][i]);
  };
  Residue inv_k = f.inv(f.reduce(static_cast<std::int64_t>(k)));
  std::vector<FpVector> lift(r, FpVector(top->dim(), 0));
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t w = 0; w < k; ++w) {
      std::size_t winv = spec.weyl ? spec.weyl->inverse[w] : 0;
      FpVector s(top->dim(), 0);
      for (std::size_t j = 0; j < r; ++j) {
        auto c = rho(winv, j, i);
        if (!c) continue;
        for (std::size_t b = 0; b < s.size(); ++b) s[b] = f.add(s[b], f.mul(c, x[j][b]));
      }
      auto ws = weyl_act_on_torus(top_spec, *top, w, s);
      for (std::size_t b = 0; b < ws.size(); ++b) lift[i][b] = f.add(lift[i][b], ws[b]);
    }
    for (auto& c : lift[i]) c = f.mul(c, inv_k);
  }

  SplittingChoice choice;
  choice.p = spec.p;
  choice.rank = r;
  choice.depth = depth;
  choice.lifts.resize(depth);
  choice.lifts[depth - 1] = lift;
  auto higher = top;
  for (unsigned n = depth - 1; n >= 1; --n) {
    auto lower = std::make_shared<GradedGroupAlgebra>(GroupSpec::torus(spec.p, std::vector<unsigned>(r, n)));
    for (std::size_t i = 0; i < r; ++i)
      choice.lifts[n - 1].push_back(
          detail::descend_power(*higher, *lower, detail::power(*higher, choice.lifts[n][i], spec.p)));
    higher = lower;
  }
  auto failures = verify_splitting(spec, choice);
  if (!failures.empty()) throw std::logic_error("equivariant splitting failed verification: " + failures.front());
  return choice;
}

/// Rebuilds `alg` on the lifted generators of the matching level and checks that
/// conjugation by W preserves the internal degree of every basis element.
inline GradedGroupAlgebra regrade_by_splitting(const GradedGroupAlgebra& alg, const SplittingChoice& choice) {
  const auto& spec = alg.spec();
  if (choice.p != spec.p || choice.rank != spec.rank() || !spec.uniform_depth() || spec.depths.front() > choice.depth)
    throw std::invalid_argument("splitting choice does not match the algebra");
  unsigned n = spec.depths.front();
  GradedGroupAlgebra torus(GroupSpec::torus(spec.p, spec.depths));
  std::vector<FpVector> lifts;
  for (const auto& l : choice.level(n)) lifts.push_back(torus.to_group(l));
  GradedGroupAlgebra out(spec, lifts);
  for (std::size_t w = 0; w < spec.weyl_order(); ++w)
    for (std::size_t b = 0; b < out.dim(); ++b) {
      FpVector e(out.dim(), 0);
      e[b] = 1;
      auto c = out.conjugate(w, e);
      for (std::size_t j = 0; j < c.size(); ++j)
        if (c[j] && out.degree(j) != out.degree(b))
          throw std::invalid_argument("splitting choice is not W-equivariant: conjugation moves " + out.label(b));
    }
  if (!out.is_graded()) throw std::invalid_argument("regraded algebra is not graded");
  return out;
}

/// Raw monomial basis in g_i - 1; graded whenever W is trivial.
inline GradedGroupAlgebra build_raw_group_algebra(const GroupSpec& spec) {
  spec.validate();
  return GradedGroupAlgebra(spec);
}

/// Graded group algebra of `spec`. When W is present the generators are
/// replaced by the canonical equivariant lifts so that the grading is multiplicative.
inline GradedGroupAlgebra build_group_algebra(const GroupSpec& spec) {
  spec.validate();
  if (!spec.weyl || spec.weyl_order() == 1) return GradedGroupAlgebra(spec);
  if (!spec.uniform_depth()) throw GroupSpecError("a Weyl action needs equal depths on every cyclic factor");
  auto choice = equivariant_splitting(spec, spec.depths.front());
  return regrade_by_splitting(GradedGroupAlgebra(spec), choice);
}

}  // namespace ainf
