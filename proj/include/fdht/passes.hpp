#pragma once

// Mechanical rewrites that turn a dense transform matrix into sparse factors.
// Each pass returns the remaining dense matrix together with the sparse factor
// it split off; the caller decides the order in which passes are applied.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdht/dht.hpp"
#include "fdht/sparse.hpp"

namespace fdht {

/// Thrown when a pass's precondition does not hold for its input.
class PassNotApplicable : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// reduced * a1 == input.
struct HadamardSplit {
  DenseMatrix reduced;
  SparseRealMatrix a1;
};

/// Splits an even-length Hartley-like matrix with h(k, i + N/2) = (-1)^k h(k, i)
/// into reduced * (Had2 (x) I_{N/2}). Even rows of `reduced` only touch the
/// sums x_i + x_{i+N/2}; odd rows only touch the differences.
inline HadamardSplit pass_hadamard_split(const DenseMatrix& h, double tol = 1e-12) {
  const std::size_t n = h.rows();
  if (h.cols() != n) throw PassNotApplicable("hadamard split: matrix is not square");
  if (n % 2 != 0) {
    throw PassNotApplicable("hadamard split: blocklength " + std::to_string(n) + " is odd");
  }
  const std::size_t half = n / 2;
  DenseMatrix reduced(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double sign = k % 2 == 0 ? 1.0 : -1.0;
    for (std::size_t i = 0; i < half; ++i) {
      if (std::abs(h(k, i + half) - sign * h(k, i)) > tol) {
        throw PassNotApplicable("hadamard split: entry (" + std::to_string(k) + ", " +
                                std::to_string(i + half) +
                                ") breaks the half-period sign property");
      }
      reduced(k, k % 2 == 0 ? i : i + half) = h(k, i);
    }
  }
  return {std::move(reduced), hadamard2_kron_identity(half)};
}

/// balanced + layer == input, exactly.
struct IntegerPeel {
  DenseMatrix balanced;
  SparseRealMatrix layer;
};

/// Moves integer parts out of the entries with magnitude above one so that the
/// remainders share magnitudes with entries already present.
///
/// For each entry m with |m| > 1 and m not an integer, the integer s removed is
/// the one of smallest magnitude for which |m - s| equals (within `tol`) the
/// magnitude of some non-integer entry already in [-1, 1]. When no such class
/// exists the integer part trunc(m) is removed. Entries in [-1, 1] and integer
/// entries are left alone.
inline IntegerPeel pass_integer_peel(const DenseMatrix& m, double tol = 1e-12) {
  std::vector<double> classes;
  for (double x : m.data()) {
    const double a = std::abs(x);
    if (a <= 1.0 && a > tol && std::abs(a - std::round(a)) > tol) classes.push_back(a);
  }
  auto matches_class = [&](double r) {
    for (double c : classes)
      if (std::abs(std::abs(r) - c) <= tol) return true;
    return false;
  };

  DenseMatrix balanced = m;
  std::vector<Entry> layer;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double x = m(r, c);
      if (std::abs(x) <= 1.0 || std::abs(x - std::round(x)) <= tol) continue;
      const double whole = std::trunc(x);
      double s = whole;
      // Candidate integers nearest zero first: trunc, then the next one out.
      for (double cand : {whole, whole + (x > 0 ? 1.0 : -1.0)}) {
        if (matches_class(x - cand)) {
          s = cand;
          break;
        }
      }
      if (s == 0.0) continue;
      balanced(r, c) = x - s;
      layer.push_back({r, c, s});
    }
  return {std::move(balanced), SparseRealMatrix(m.rows(), m.cols(), std::move(layer))};
}

/// reduced * butterflies == input.
struct ColumnCombine {
  DenseMatrix reduced;
  SparseRealMatrix butterflies;
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
};

/// Pairs up columns (i, j) whose entries agree in magnitude row by row and
/// replaces them by the new variables x_i + x_j (slot i) and x_i - x_j (slot j).
/// Columns are paired greedily in ascending order; all-zero columns are skipped.
inline ColumnCombine pass_column_combine(const DenseMatrix& m, double tol = 1e-12) {
  const std::size_t rows = m.rows();
  const std::size_t cols = m.cols();
  auto zero_column = [&](std::size_t c) {
    for (std::size_t r = 0; r < rows; ++r)
      if (std::abs(m(r, c)) > tol) return false;
    return true;
  };
  auto agree = [&](std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < rows; ++r)
      if (std::abs(std::abs(m(r, i)) - std::abs(m(r, j))) > tol) return false;
    return true;
  };

  std::vector<bool> used(cols, false);
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < cols; ++i) {
    if (used[i] || zero_column(i)) continue;
    for (std::size_t j = i + 1; j < cols; ++j) {
      if (used[j] || !agree(i, j)) continue;
      used[i] = used[j] = true;
      pairs.emplace_back(i, j);
      break;
    }
  }
  if (pairs.empty()) throw PassNotApplicable("column combine: no pair of columns agrees");

  DenseMatrix reduced = m;
  std::vector<Entry> butterflies;
  for (std::size_t c = 0; c < cols; ++c)
    if (!used[c]) butterflies.push_back({c, c, 1.0});
  for (auto [i, j] : pairs) {
    butterflies.push_back({i, i, 1.0});
    butterflies.push_back({i, j, 1.0});
    butterflies.push_back({j, i, 1.0});
    butterflies.push_back({j, j, -1.0});
    for (std::size_t r = 0; r < rows; ++r) {
      const double a = m(r, i);
      const double b = m(r, j);
      reduced(r, i) = 0.0;
      reduced(r, j) = 0.0;
      if (std::abs(a) <= tol) continue;
      // a x_i + b x_j with |a| == |b| is a (x_i + x_j) or a (x_i - x_j).
      if ((a > 0) == (b > 0)) {
        reduced(r, i) = a;
      } else {
        reduced(r, j) = a;
      }
    }
  }
  return {std::move(reduced), SparseRealMatrix(cols, cols, std::move(butterflies)), pairs};
}

/// post_additions * multipliers == input.
struct DiagonalSplit {
  SparseRealMatrix post_additions;
  SparseRealMatrix multipliers;
};

/// Pulls a common magnitude out of each column: when every nonzero of column c
/// has the same magnitude g != 1, g moves into the diagonal factor and the
/// column keeps only signs. Other columns are left as they are.
inline DiagonalSplit pass_diagonal_split(const DenseMatrix& input, double tol = 1e-12) {
  // Earlier passes leave round-off on integer entries; snap it so counting
  // does not see 0.9999999999999999 as a multiplier.
  DenseMatrix m = input;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c)
      if (const double n = std::round(m(r, c)); std::abs(m(r, c) - n) <= tol) m(r, c) = n;
  std::vector<double> scale(m.cols(), 1.0);
  for (std::size_t c = 0; c < m.cols(); ++c) {
    double g = 0.0;
    bool uniform = true;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      const double a = std::abs(m(r, c));
      if (a <= tol) continue;
      if (g == 0.0) {
        g = a;
      } else if (std::abs(a - g) > tol) {
        uniform = false;
      }
    }
    if (uniform && g != 0.0) scale[c] = g;
  }
  std::vector<Entry> post;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const double a = m(r, c);
      if (std::abs(a) <= tol) continue;
      const double v = scale[c] == 1.0 ? a : (a > 0 ? 1.0 : -1.0);
      post.push_back({r, c, v});
    }
  return {SparseRealMatrix(m.rows(), m.cols(), std::move(post)),
          SparseRealMatrix::diagonal(scale)};
}

}  // namespace fdht
