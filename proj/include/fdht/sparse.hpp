#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "fdht/dht.hpp"

namespace fdht {

/// One structural nonzero of a sparse matrix.
struct Entry {
  std::size_t row = 0;
  std::size_t col = 0;
  double value = 0.0;

  friend bool operator==(const Entry&, const Entry&) = default;
};

/// Thrown when operand shapes do not compose.
class DimensionMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Sparse real matrix with explicit constants. Entries are kept sorted by
/// (row, col); absent entries are structural zeros, so every stored constant is
/// finite and nonzero.
class SparseRealMatrix {
 public:
  SparseRealMatrix() = default;

  SparseRealMatrix(std::size_t rows, std::size_t cols, std::vector<Entry> entries)
      : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("SparseRealMatrix: dimensions must be positive");
    }
    std::sort(entries_.begin(), entries_.end(), [](const Entry& a, const Entry& b) {
      return std::tie(a.row, a.col) < std::tie(b.row, b.col);
    });
    for (std::size_t i = 0; i < entries_.size(); ++i) {
      const Entry& e = entries_[i];
      if (e.row >= rows || e.col >= cols) {
        throw std::invalid_argument("SparseRealMatrix: entry (" + std::to_string(e.row) + ", " +
                                    std::to_string(e.col) + ") out of range");
      }
      if (!std::isfinite(e.value) || e.value == 0.0) {
        throw std::invalid_argument("SparseRealMatrix: constants must be finite and nonzero");
      }
      if (i > 0 && entries_[i - 1].row == e.row && entries_[i - 1].col == e.col) {
        throw std::invalid_argument("SparseRealMatrix: duplicate entry");
      }
    }
    row_start_.assign(rows_ + 1, 0);
    for (const Entry& e : entries_) ++row_start_[e.row + 1];
    for (std::size_t r = 0; r < rows_; ++r) row_start_[r + 1] += row_start_[r];
  }

  static SparseRealMatrix identity(std::size_t n) {
    std::vector<Entry> e;
    e.reserve(n);
    for (std::size_t i = 0; i < n; ++i) e.push_back({i, i, 1.0});
    return {n, n, std::move(e)};
  }

  static SparseRealMatrix diagonal(std::span<const double> d) {
    std::vector<Entry> e;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (d[i] != 0.0) e.push_back({i, i, d[i]});
    }
    return {d.size(), d.size(), std::move(e)};
  }

  /// Nonzero entries of `m`; exact zeros become structural zeros.
  static SparseRealMatrix from_dense(const DenseMatrix& m) {
    std::vector<Entry> e;
    for (std::size_t r = 0; r < m.rows(); ++r)
      for (std::size_t c = 0; c < m.cols(); ++c)
        if (m(r, c) != 0.0) e.push_back({r, c, m(r, c)});
    return {m.rows(), m.cols(), std::move(e)};
  }

  /// Build from a row-major initializer; zeros are dropped.
  static SparseRealMatrix from_rows(std::size_t rows, std::size_t cols,
                                    std::initializer_list<double> values) {
    return from_dense(DenseMatrix(rows, cols, std::vector<double>(values)));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nonzeros() const { return entries_.size(); }
  std::span<const Entry> entries() const { return entries_; }

  /// Entries of row r in ascending column order.
  std::span<const Entry> row(std::size_t r) const {
    return std::span<const Entry>(entries_).subspan(row_start_[r],
                                                    row_start_[r + 1] - row_start_[r]);
  }

  DenseMatrix to_dense() const {
    DenseMatrix m(rows_, cols_);
    for (const Entry& e : entries_) m(e.row, e.col) = e.value;
    return m;
  }

  friend bool operator==(const SparseRealMatrix& a, const SparseRealMatrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.entries_ == b.entries_;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Entry> entries_;
  std::vector<std::size_t> row_start_;
};

/// y = M x, each row accumulated in ascending column order.
inline std::vector<double> apply(const SparseRealMatrix& m, std::span<const double> x) {
  if (x.size() != m.cols()) {
    throw DimensionMismatch("apply: vector length " + std::to_string(x.size()) +
                            " does not match matrix columns " + std::to_string(m.cols()));
  }
  std::vector<double> y(m.rows(), 0.0);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    const auto entries = m.row(r);
    if (entries.empty()) continue;
    double acc = entries[0].value * x[entries[0].col];
    for (std::size_t i = 1; i < entries.size(); ++i) acc += entries[i].value * x[entries[i].col];
    y[r] = acc;
  }
  return y;
}

/// Block-diagonal [[a, 0], [0, b]].
inline SparseRealMatrix block_diagonal(const SparseRealMatrix& a, const SparseRealMatrix& b) {
  std::vector<Entry> e(a.entries().begin(), a.entries().end());
  for (const Entry& x : b.entries()) e.push_back({x.row + a.rows(), x.col + a.cols(), x.value});
  return {a.rows() + b.rows(), a.cols() + b.cols(), std::move(e)};
}

/// Kronecker product [[1, 1], [1, -1]] (x) I_n.
inline SparseRealMatrix hadamard2_kron_identity(std::size_t n) {
  std::vector<Entry> e;
  for (std::size_t i = 0; i < n; ++i) {
    e.push_back({i, i, 1.0});
    e.push_back({i, i + n, 1.0});
    e.push_back({i + n, i, 1.0});
    e.push_back({i + n, i + n, -1.0});
  }
  return {2 * n, 2 * n, std::move(e)};
}

/// Permutation matrix P with (P x)[i] = x[source[i]].
inline SparseRealMatrix gather(std::span<const std::size_t> source, std::size_t cols) {
  std::vector<Entry> e;
  for (std::size_t i = 0; i < source.size(); ++i) e.push_back({i, source[i], 1.0});
  return {source.size(), cols, std::move(e)};
}

/// Left-multiply by the permutation that gathers rows: row i of the result is
/// row source[i] of m.
inline SparseRealMatrix permute_rows(const SparseRealMatrix& m,
                                     std::span<const std::size_t> source) {
  if (source.size() != m.rows()) {
    throw DimensionMismatch("permute_rows: permutation length differs from row count");
  }
  std::vector<Entry> e;
  for (std::size_t i = 0; i < source.size(); ++i)
    for (const Entry& x : m.row(source[i])) e.push_back({i, x.col, x.value});
  return {m.rows(), m.cols(), std::move(e)};
}

}  // namespace fdht
