#pragma once

// Exact sparse linear algebra over prime fields F_p.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace ainf {

using Residue = std::uint32_t;
using FpVector = std::vector<Residue>;

class PrimeField {
 public:
  explicit PrimeField(std::uint32_t p) : p_(p) {
    if (!is_prime(p)) {
      std::ostringstream os;
      os << p << " is not prime";
      throw std::invalid_argument(os.str());
    }
  }

  static bool is_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
      if (n % d == 0) return false;
    return true;
  }

  std::uint32_t p() const { return p_; }

  Residue reduce(std::int64_t v) const {
    auto r = v % static_cast<std::int64_t>(p_);
    return static_cast<Residue>(r < 0 ? r + p_ : r);
  }
  Residue add(Residue a, Residue b) const {
    auto s = a + b;
    return s >= p_ ? s - p_ : s;
  }
  Residue sub(Residue a, Residue b) const { return a >= b ? a - b : a + p_ - b; }
  Residue neg(Residue a) const { return a == 0 ? 0 : p_ - a; }
  Residue mul(Residue a, Residue b) const {
    return static_cast<Residue>(static_cast<std::uint64_t>(a) * b % p_);
  }
  /// (-1)^k as a residue.
  Residue sign(std::int64_t k) const { return (k % 2 == 0) ? 1 : p_ - 1; }

  Residue inv(Residue a) const {
    if (a % p_ == 0) throw std::domain_error("inverse of zero in F_p");
    std::int64_t t = 0, new_t = 1, r = p_, new_r = a;
    while (new_r != 0) {
      auto q = r / new_r;
      std::tie(t, new_t) = std::pair{new_t, t - q * new_t};
      std::tie(r, new_r) = std::pair{new_r, r - q * new_r};
    }
    return reduce(t);
  }

  Residue pow(Residue a, std::uint64_t e) const {
    Residue r = 1 % p_;
    while (e) {
      if (e & 1) r = mul(r, a);
      a = mul(a, a);
      e >>= 1;
    }
    return r;
  }

  friend bool operator==(const PrimeField&, const PrimeField&) = default;

 private:
  std::uint32_t p_;
};

struct SparseEntry {
  std::size_t col;
  Residue val;
  friend bool operator==(const SparseEntry&, const SparseEntry&) = default;
};

/// Sorted by column, no zero values.
using SparseRow = std::vector<SparseEntry>;

namespace detail {

// a + c*b for sorted sparse rows.
inline SparseRow axpy(const PrimeField& f, const SparseRow& a, Residue c, const SparseRow& b) {
  SparseRow out;
  out.reserve(a.size() + b.size());
  std::size_t i = 0, j = 0;
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && a[i].col < b[j].col)) {
      out.push_back(a[i++]);
    } else if (i == a.size() || b[j].col < a[i].col) {
      out.push_back({b[j].col, f.mul(c, b[j].val)});
      ++j;
    } else {
      auto v = f.add(a[i].val, f.mul(c, b[j].val));
      if (v) out.push_back({a[i].col, v});
      ++i;
      ++j;
    }
  }
  return out;
}

inline void scale(const PrimeField& f, SparseRow& r, Residue c) {
  for (auto& e : r) e.val = f.mul(e.val, c);
}

}  // namespace detail

/// Sparse matrix over F_p stored by rows. Immutable after construction.
class FpMatrix {
 public:
  FpMatrix(PrimeField field, std::size_t rows, std::size_t cols)
      : field_(field), rows_(rows), cols_(cols), data_(rows) {}

  /// Accumulates duplicate positions; arbitrary integers are reduced mod p.
  static FpMatrix from_triplets(PrimeField field, std::size_t rows, std::size_t cols,
                                std::vector<std::tuple<std::size_t, std::size_t, std::int64_t>> trips) {
    std::sort(trips.begin(), trips.end(), [](const auto& a, const auto& b) {
      return std::tie(std::get<0>(a), std::get<1>(a)) < std::tie(std::get<0>(b), std::get<1>(b));
    });
    FpMatrix m(field, rows, cols);
    for (std::size_t k = 0; k < trips.size();) {
      auto [r, c, v] = trips[k];
      if (r >= rows || c >= cols) throw std::out_of_range("FpMatrix entry out of bounds");
      Residue acc = field.reduce(v);
      std::size_t l = k + 1;
      for (; l < trips.size() && std::get<0>(trips[l]) == r && std::get<1>(trips[l]) == c; ++l)
        acc = field.add(acc, field.reduce(std::get<2>(trips[l])));
      if (acc) m.data_[r].push_back({c, acc});
      k = l;
    }
    return m;
  }

  static FpMatrix from_dense(PrimeField field, const std::vector<std::vector<std::int64_t>>& rows) {
    std::size_t cols = rows.empty() ? 0 : rows.front().size();
    FpMatrix m(field, rows.size(), cols);
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) throw std::invalid_argument("ragged dense matrix");
      for (std::size_t c = 0; c < cols; ++c)
        if (auto v = field.reduce(rows[r][c])) m.data_[r].push_back({c, v});
    }
    return m;
  }

  /// Rows must be sorted and free of zeros; validated.
  static FpMatrix from_rows(PrimeField field, std::size_t cols, std::vector<SparseRow> rows) {
    FpMatrix m(field, rows.size(), cols);
    for (auto& row : rows) {
      for (std::size_t k = 0; k < row.size(); ++k) {
        if (row[k].col >= cols || row[k].val == 0 || row[k].val >= field.p() ||
            (k && row[k - 1].col >= row[k].col))
          throw std::invalid_argument("malformed sparse row");
      }
    }
    m.data_ = std::move(rows);
    return m;
  }

  static FpMatrix from_columns(PrimeField field, std::size_t rows, const std::vector<FpVector>& cols) {
    FpMatrix m(field, rows, cols.size());
    for (std::size_t c = 0; c < cols.size(); ++c) {
      if (cols[c].size() != rows) throw std::invalid_argument("column length mismatch");
      for (std::size_t r = 0; r < rows; ++r)
        if (auto v = cols[c][r] % field.p()) m.data_[r].push_back({c, v});
    }
    return m;
  }

  static FpMatrix identity(PrimeField field, std::size_t n) {
    FpMatrix m(field, n, n);
    for (std::size_t i = 0; i < n; ++i) m.data_[i].push_back({i, 1});
    return m;
  }

  const PrimeField& field() const { return field_; }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  const SparseRow& row(std::size_t r) const { return data_.at(r); }

  std::size_t nnz() const {
    std::size_t n = 0;
    for (const auto& r : data_) n += r.size();
    return n;
  }

  Residue at(std::size_t r, std::size_t c) const {
    const auto& row = data_.at(r);
    auto it = std::lower_bound(row.begin(), row.end(), c,
                               [](const SparseEntry& e, std::size_t col) { return e.col < col; });
    return (it != row.end() && it->col == c) ? it->val : 0;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const auto& r) { return r.empty(); });
  }

  FpMatrix transpose() const {
    FpMatrix t(field_, cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& e : data_[r]) t.data_[e.col].push_back({r, e.val});
    return t;
  }

  FpVector operator*(const FpVector& v) const {
    if (v.size() != cols_) throw std::invalid_argument("matrix-vector dimension mismatch");
    FpVector out(rows_, 0);
    for (std::size_t r = 0; r < rows_; ++r) {
      std::uint64_t acc = 0;
      for (const auto& e : data_[r]) acc += static_cast<std::uint64_t>(e.val) * v[e.col];
      out[r] = static_cast<Residue>(acc % field_.p());
    }
    return out;
  }

  FpMatrix operator*(const FpMatrix& b) const {
    if (cols_ != b.rows_ || !(field_ == b.field_))
      throw std::invalid_argument("matrix product dimension mismatch");
    FpMatrix out(field_, rows_, b.cols_);
    std::vector<Residue> acc(b.cols_, 0);
    std::vector<std::size_t> touched;
    for (std::size_t r = 0; r < rows_; ++r) {
      for (const auto& e : data_[r]) {
        for (const auto& f : b.data_[e.col]) {
          if (acc[f.col] == 0) touched.push_back(f.col);
          acc[f.col] = field_.add(acc[f.col], field_.mul(e.val, f.val));
          if (acc[f.col] == 0) acc[f.col] = field_.p();  // keep the slot marked as touched
        }
      }
      std::sort(touched.begin(), touched.end());
      for (auto c : touched) {
        Residue v = acc[c] % field_.p();
        if (v) out.data_[r].push_back({c, v});
        acc[c] = 0;
      }
      touched.clear();
    }
    return out;
  }

  FpMatrix operator+(const FpMatrix& b) const { return combine(b, 1); }
  FpMatrix operator-(const FpMatrix& b) const { return combine(b, field_.p() - 1); }

  FpMatrix scaled(Residue c) const {
    FpMatrix out = *this;
    c %= field_.p();
    if (c == 0) return FpMatrix(field_, rows_, cols_);
    for (auto& r : out.data_) detail::scale(field_, r, c);
    return out;
  }

  /// Rows [r0, r1) by columns [c0, c1), reindexed from zero.
  FpMatrix block(std::size_t r0, std::size_t r1, std::size_t c0, std::size_t c1) const {
    FpMatrix out(field_, r1 - r0, c1 - c0);
    for (std::size_t r = r0; r < r1; ++r)
      for (const auto& e : data_[r])
        if (e.col >= c0 && e.col < c1) out.data_[r - r0].push_back({e.col - c0, e.val});
    return out;
  }

  std::vector<std::vector<Residue>> to_dense() const {
    std::vector<std::vector<Residue>> d(rows_, std::vector<Residue>(cols_, 0));
    for (std::size_t r = 0; r < rows_; ++r)
      for (const auto& e : data_[r]) d[r][e.col] = e.val;
    return d;
  }

  friend bool operator==(const FpMatrix& a, const FpMatrix& b) {
    return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

 private:
  FpMatrix combine(const FpMatrix& b, Residue c) const {
    if (rows_ != b.rows_ || cols_ != b.cols_ || !(field_ == b.field_))
      throw std::invalid_argument("matrix sum dimension mismatch");
    FpMatrix out(field_, rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) out.data_[r] = detail::axpy(field_, data_[r], c, b.data_[r]);
    return out;
  }

  PrimeField field_;
  std::size_t rows_;
  std::size_t cols_;
  std::vector<SparseRow> data_;
};

struct RrefResult {
  FpMatrix matrix;
  std::vector<std::size_t> pivot_columns;
  std::size_t rank;
};

namespace detail {

// Forward elimination by leading column. Each stored pivot row has leading
// coefficient 1; pivots[c] is empty when column c carries no pivot.
inline std::vector<SparseRow> echelon_pivots(const FpMatrix& m) {
  const auto& f = m.field();
  std::vector<SparseRow> pivots(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    SparseRow row = m.row(r);
    while (!row.empty()) {
      auto c = row.front().col;
      if (pivots[c].empty()) {
        detail::scale(f, row, f.inv(row.front().val));
        pivots[c] = std::move(row);
        break;
      }
      row = axpy(f, row, f.neg(row.front().val), pivots[c]);
    }
  }
  return pivots;
}

}  // namespace detail

/// Reduced row echelon form. The RREF of a matrix is unique, so the pivot
/// set is the leftmost-column / first-row choice regardless of elimination order.
inline RrefResult rref(const FpMatrix& m) {
  const auto& f = m.field();
  auto pivots = detail::echelon_pivots(m);
  std::vector<std::size_t> pcols;
  for (std::size_t c = 0; c < pivots.size(); ++c)
    if (!pivots[c].empty()) pcols.push_back(c);

  // Back substitution from the rightmost pivot leftwards; rows to the right are
  // already fully reduced so each pass only introduces non-pivot columns.
  for (auto it = pcols.rbegin(); it != pcols.rend(); ++it) {
    auto& row = pivots[*it];
    for (;;) {
      auto hit = std::find_if(row.begin() + 1, row.end(),
                              [&](const SparseEntry& e) { return !pivots[e.col].empty(); });
      if (hit == row.end()) break;
      auto c = hit->col;
      row = detail::axpy(f, row, f.neg(hit->val), pivots[c]);
    }
  }
  std::vector<SparseRow> rows;
  rows.reserve(m.rows());
  for (auto c : pcols) rows.push_back(std::move(pivots[c]));
  rows.resize(m.rows());
  return {FpMatrix::from_rows(f, m.cols(), std::move(rows)), pcols, pcols.size()};
}

/// Rank only. Skips back substitution.
inline std::size_t rank(const FpMatrix& m) {
  // Eliminating along the shorter side keeps the pivot table small.
  if (m.rows() < m.cols()) {
    auto t = m.transpose();
    auto piv = detail::echelon_pivots(t);
    return static_cast<std::size_t>(std::count_if(piv.begin(), piv.end(), [](const auto& r) { return !r.empty(); }));
  }
  auto piv = detail::echelon_pivots(m);
  return static_cast<std::size_t>(std::count_if(piv.begin(), piv.end(), [](const auto& r) { return !r.empty(); }));
}

/// Standard free-variable basis of the null space, one vector per non-pivot column
/// in increasing column order.
inline std::vector<FpVector> kernel_basis(const FpMatrix& m) {
  const auto& f = m.field();
  auto rr = rref(m);
  std::vector<bool> is_pivot(m.cols(), false);
  for (auto c : rr.pivot_columns) is_pivot[c] = true;
  std::vector<FpVector> basis;
  for (std::size_t free = 0; free < m.cols(); ++free) {
    if (is_pivot[free]) continue;
    FpVector v(m.cols(), 0);
    v[free] = 1;
    for (std::size_t k = 0; k < rr.rank; ++k) {
      Residue a = rr.matrix.at(k, free);
      if (a) v[rr.pivot_columns[k]] = f.neg(a);
    }
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Solution of m·x = b with all free variables zero, or nullopt when inconsistent.
inline std::optional<FpVector> solve(const FpMatrix& m, const FpVector& b) {
  if (b.size() != m.rows()) throw std::invalid_argument("solve: right-hand side has wrong length");
  const auto& f = m.field();
  std::vector<SparseRow> aug(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    aug[r] = m.row(r);
    if (auto v = b[r] % f.p()) aug[r].push_back({m.cols(), v});
  }
  auto rr = rref(FpMatrix::from_rows(f, m.cols() + 1, std::move(aug)));
  if (!rr.pivot_columns.empty() && rr.pivot_columns.back() == m.cols()) return std::nullopt;
  FpVector x(m.cols(), 0);
  for (std::size_t k = 0; k < rr.rank; ++k) x[rr.pivot_columns[k]] = rr.matrix.at(k, m.cols());
  return x;
}

/// Inverse of a square invertible matrix.
inline FpMatrix inverse(const FpMatrix& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("inverse of non-square matrix");
  const auto n = m.rows();
  if (n == 0) return m;
  std::vector<SparseRow> aug(n);
  for (std::size_t r = 0; r < n; ++r) {
    aug[r] = m.row(r);
    aug[r].push_back({n + r, 1});
  }
  auto rr = rref(FpMatrix::from_rows(m.field(), 2 * n, std::move(aug)));
  if (rr.rank < n || rr.pivot_columns[n - 1] != n - 1) throw std::domain_error("matrix is singular");
  return rr.matrix.block(0, n, n, 2 * n);
}

inline bool is_zero(const FpVector& v) {
  return std::all_of(v.begin(), v.end(), [](Residue x) { return x == 0; });
}

}  // namespace ainf
