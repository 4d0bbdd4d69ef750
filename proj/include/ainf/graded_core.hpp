#pragma once

// Bigraded vector spaces over F_p: a non-negative cohomological degree and an
// exact internal degree with p-power denominator.

#include <ainf/linalg_fp.hpp>

#include <compare>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ainf {

/// Exact rational numerator / p^exponent in lowest terms. Basis elements carry
/// non-negative values; map shifts may be negative.
class InternalDegree {
 public:
  InternalDegree() = default;

  InternalDegree(std::int64_t numerator, unsigned p_exponent, std::uint32_t p)
      : num_(numerator), exp_(p_exponent), p_(p) {
    if (p_exponent > 0 && p < 2) throw std::invalid_argument("internal degree needs a prime base");
    normalize();
  }

  static InternalDegree integer(std::int64_t n, std::uint32_t p = 0) { return InternalDegree(n, 0, p); }

  std::int64_t numerator() const { return num_; }
  unsigned p_exponent() const { return exp_; }
  std::uint32_t prime() const { return p_; }
  bool is_zero() const { return num_ == 0; }
  bool is_nonnegative() const { return num_ >= 0; }

  friend InternalDegree operator+(const InternalDegree& a, const InternalDegree& b) {
    auto p = common_prime(a, b);
    auto e = std::max(a.exp_, b.exp_);
    return InternalDegree(static_cast<std::int64_t>(a.scaled_to(e, p) + b.scaled_to(e, p)), e, p);
  }
  friend InternalDegree operator-(const InternalDegree& a) {
    InternalDegree r = a;
    r.num_ = -r.num_;
    return r;
  }
  friend InternalDegree operator-(const InternalDegree& a, const InternalDegree& b) { return a + (-b); }

  InternalDegree times(std::int64_t k) const {
    InternalDegree r = *this;
    r.num_ *= k;
    r.normalize();
    return r;
  }

  friend bool operator==(const InternalDegree& a, const InternalDegree& b) {
    return a.num_ == b.num_ && (a.num_ == 0 || (a.exp_ == b.exp_ && (a.exp_ == 0 || a.p_ == b.p_)));
  }
  friend std::strong_ordering operator<=>(const InternalDegree& a, const InternalDegree& b) {
    auto p = common_prime(a, b);
    auto e = std::max(a.exp_, b.exp_);
    auto l = a.scaled_to(e, p), r = b.scaled_to(e, p);
    return l < r ? std::strong_ordering::less : (l > r ? std::strong_ordering::greater : std::strong_ordering::equal);
  }

  /// True when the integer d equals twice this value.
  bool doubles_to(std::int64_t d) const { return InternalDegree(d, 0, p_) == times(2); }

  std::string to_string() const {
    std::ostringstream os;
    os << num_;
    if (exp_ > 0) {
      std::int64_t den = 1;
      for (unsigned i = 0; i < exp_; ++i) den *= p_;
      os << '/' << den;
    }
    return os.str();
  }

  friend std::ostream& operator<<(std::ostream& os, const InternalDegree& d) { return os << d.to_string(); }

 private:
  static std::uint32_t common_prime(const InternalDegree& a, const InternalDegree& b) {
    if (a.p_ && b.p_ && a.p_ != b.p_ && (a.exp_ || b.exp_))
      throw std::invalid_argument("internal degrees over different primes");
    return a.p_ ? a.p_ : b.p_;
  }

  __int128 scaled_to(unsigned e, std::uint32_t p) const {
    __int128 v = num_;
    for (unsigned i = exp_; i < e; ++i) v *= p;
    return v;
  }

  void normalize() {
    if (num_ == 0) {
      exp_ = 0;
      return;
    }
    while (exp_ > 0 && num_ % static_cast<std::int64_t>(p_) == 0) {
      num_ /= static_cast<std::int64_t>(p_);
      --exp_;
    }
  }

  std::int64_t num_ = 0;
  unsigned exp_ = 0;
  std::uint32_t p_ = 0;
};

inline InternalDegree internal_add(const InternalDegree& a, const InternalDegree& b) { return a + b; }

struct BasisElement {
  int coh_degree = 0;
  InternalDegree int_degree;
  std::string label;
};

/// Ordered labeled basis. Order is (cohDegree, intDegree, label).
class BigradedSpace {
 public:
  BigradedSpace() = default;

  explicit BigradedSpace(std::vector<BasisElement> basis) : basis_(std::move(basis)) {
    for (const auto& b : basis_) {
      if (b.coh_degree < 0 || !b.int_degree.is_nonnegative())
        throw std::invalid_argument("basis element '" + b.label + "' has a negative degree");
    }
    std::stable_sort(basis_.begin(), basis_.end(), [](const BasisElement& a, const BasisElement& b) {
      if (a.coh_degree != b.coh_degree) return a.coh_degree < b.coh_degree;
      if (a.int_degree != b.int_degree) return a.int_degree < b.int_degree;
      return a.label < b.label;
    });
    for (std::size_t i = 0; i < basis_.size(); ++i) {
      if (!index_.emplace(basis_[i].label, i).second)
        throw std::invalid_argument("duplicate basis label '" + basis_[i].label + "'");
    }
  }

  std::size_t size() const { return basis_.size(); }
  bool empty() const { return basis_.empty(); }
  const BasisElement& operator[](std::size_t i) const { return basis_.at(i); }
  const std::vector<BasisElement>& basis() const { return basis_; }

  std::size_t index_of(const std::string& label) const {
    auto it = index_.find(label);
    if (it == index_.end()) throw std::out_of_range("no basis element '" + label + "'");
    return it->second;
  }
  bool contains(const std::string& label) const { return index_.count(label) > 0; }

  /// Number of basis elements in each cohomological degree 0..max.
  std::vector<std::size_t> dims() const {
    std::vector<std::size_t> d;
    for (const auto& b : basis_) {
      if (static_cast<std::size_t>(b.coh_degree) >= d.size()) d.resize(b.coh_degree + 1, 0);
      ++d[b.coh_degree];
    }
    return d;
  }

  friend bool operator==(const BigradedSpace& a, const BigradedSpace& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      const auto &x = a.basis_[i], &y = b.basis_[i];
      if (x.coh_degree != y.coh_degree || x.int_degree != y.int_degree || x.label != y.label) return false;
    }
    return true;
  }

 private:
  std::vector<BasisElement> basis_;
  std::map<std::string, std::size_t> index_;
};

using SpacePtr = std::shared_ptr<const BigradedSpace>;

/// (-1)^(a*b) in F_p.
inline Residue koszul_sign(const PrimeField& f, std::int64_t a, std::int64_t b) {
  return f.sign((a & 1) & (b & 1));
}

inline BigradedSpace tensor_space(const BigradedSpace& a, const BigradedSpace& b) {
  std::vector<BasisElement> out;
  out.reserve(a.size() * b.size());
  for (const auto& x : a.basis())
    for (const auto& y : b.basis())
      out.push_back({x.coh_degree + y.coh_degree, x.int_degree + y.int_degree, x.label + "⊗" + y.label});
  return BigradedSpace(std::move(out));
}

/// Linear map between bigraded spaces homogeneous of bidegree (cohShift, intShift).
/// The matrix has target.size() rows and source.size() columns.
class BigradedMap {
 public:
  BigradedMap(SpacePtr source, SpacePtr target, int coh_shift, InternalDegree int_shift, FpMatrix matrix)
      : source_(std::move(source)),
        target_(std::move(target)),
        coh_shift_(coh_shift),
        int_shift_(int_shift),
        matrix_(std::move(matrix)) {
    if (matrix_.rows() != target_->size() || matrix_.cols() != source_->size())
      throw std::invalid_argument("BigradedMap matrix does not match its spaces");
    for (std::size_t r = 0; r < matrix_.rows(); ++r) {
      for (const auto& e : matrix_.row(r)) {
        const auto &s = (*source_)[e.col], &t = (*target_)[r];
        if (t.coh_degree != s.coh_degree + coh_shift_ || t.int_degree != s.int_degree + int_shift_)
          throw std::invalid_argument("BigradedMap entry " + s.label + " -> " + t.label +
                                      " does not have the declared bidegree");
      }
    }
  }

  static BigradedMap zero(SpacePtr source, SpacePtr target, int coh_shift, InternalDegree int_shift,
                          PrimeField f) {
    auto rows = target->size(), cols = source->size();
    return BigradedMap(std::move(source), std::move(target), coh_shift, int_shift, FpMatrix(f, rows, cols));
  }

  static BigradedMap identity(SpacePtr space, PrimeField f) {
    auto n = space->size();
    return BigradedMap(space, space, 0, InternalDegree{}, FpMatrix::identity(f, n));
  }

  const BigradedSpace& source() const { return *source_; }
  const BigradedSpace& target() const { return *target_; }
  const SpacePtr& source_ptr() const { return source_; }
  const SpacePtr& target_ptr() const { return target_; }
  int coh_shift() const { return coh_shift_; }
  const InternalDegree& int_shift() const { return int_shift_; }
  const FpMatrix& matrix() const { return matrix_; }
  const PrimeField& field() const { return matrix_.field(); }

  FpVector apply(const FpVector& v) const { return matrix_ * v; }

  BigradedMap operator+(const BigradedMap& o) const { return combine(o, false); }
  BigradedMap operator-(const BigradedMap& o) const { return combine(o, true); }

 private:
  BigradedMap combine(const BigradedMap& o, bool subtract) const {
    if (!(*source_ == *o.source_) || !(*target_ == *o.target_))
      throw std::invalid_argument("adding maps between different spaces");
    if (matrix_.is_zero()) return BigradedMap(source_, target_, o.coh_shift_, o.int_shift_,
                                              subtract ? o.matrix_.scaled(field().p() - 1) : o.matrix_);
    if (o.matrix_.is_zero()) return *this;
    if (coh_shift_ != o.coh_shift_ || int_shift_ != o.int_shift_)
      throw std::invalid_argument("adding maps of different bidegree");
    return BigradedMap(source_, target_, coh_shift_, int_shift_, subtract ? matrix_ - o.matrix_ : matrix_ + o.matrix_);
  }

  SpacePtr source_;
  SpacePtr target_;
  int coh_shift_;
  InternalDegree int_shift_;
  FpMatrix matrix_;
};

/// g ∘ f.
inline BigradedMap compose(const BigradedMap& g, const BigradedMap& f) {
  if (!(f.target() == g.source())) throw std::invalid_argument("compose: spaces do not match");
  return BigradedMap(f.source_ptr(), g.target_ptr(), f.coh_shift() + g.coh_shift(), f.int_shift() + g.int_shift(),
                     g.matrix() * f.matrix());
}

/// (f⊗g)(a⊗b) = (-1)^(|g||a|) f(a)⊗g(b) with |·| the cohomological degree.
inline BigradedMap koszul_tensor(const BigradedMap& f, const BigradedMap& g) {
  if (!(f.field() == g.field())) throw std::invalid_argument("koszul_tensor: different fields");
  const auto& F = f.field();
  auto src = std::make_shared<const BigradedSpace>(tensor_space(f.source(), g.source()));
  auto tgt = std::make_shared<const BigradedSpace>(tensor_space(f.target(), g.target()));
  auto ft = f.matrix().transpose(), gt = g.matrix().transpose();  // rows indexed by source element
  std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> trips;
  for (std::size_t a = 0; a < f.source().size(); ++a) {
    const auto& sa = f.source()[a];
    Residue sign = koszul_sign(F, g.coh_shift(), sa.coh_degree);
    for (std::size_t b = 0; b < g.source().size(); ++b) {
      auto col = src->index_of(sa.label + "⊗" + g.source()[b].label);
      for (const auto& fe : ft.row(a))
        for (const auto& ge : gt.row(b)) {
          auto row = tgt->index_of(f.target()[fe.col].label + "⊗" + g.target()[ge.col].label);
          trips.emplace_back(row, col, F.mul(sign, F.mul(fe.val, ge.val)));
        }
    }
  }
  auto m = FpMatrix::from_triplets(F, tgt->size(), src->size(), std::move(trips));
  return BigradedMap(src, tgt, f.coh_shift() + g.coh_shift(), f.int_shift() + g.int_shift(), std::move(m));
}

struct DoublingResult {
  bool holds = true;
  std::vector<std::string> violations;
};

/// Checks cohDegree = 2 * intDegree on every basis element.
inline DoublingResult doubling_check(const BigradedSpace& space) {
  DoublingResult r;
  for (const auto& b : space.basis()) {
    if (!b.int_degree.doubles_to(b.coh_degree)) {
      r.holds = false;
      r.violations.push_back(b.label);
    }
  }
  return r;
}

}  // namespace ainf
