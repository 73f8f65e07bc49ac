#pragma once

// Reference definitions of the discrete Hartley transform. Everything in this
// header is the slow, direct route; the fast kernels are checked against it.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace fdht {

/// cos(x) + sin(x), the Hartley kernel.
inline double cas(double x) { return std::cos(x) + std::sin(x); }

/// cos(x) - sin(x). Satisfies cas(a - b) = cos(b) cas(a) - sin(b) cas_prime(a).
inline double cas_prime(double x) { return std::cos(x) - std::sin(x); }

namespace detail {

inline void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument(std::string(what) + ": non-finite entry");
    }
  }
}

}  // namespace detail

/// A non-empty, fixed-length vector of finite reals. The tag keeps time-domain
/// signals and Hartley-domain spectra from being mixed up at API boundaries.
template <class Tag>
class RealVector {
 public:
  explicit RealVector(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument(std::string(Tag::name) + ": empty");
    detail::require_finite(values_, Tag::name);
  }
  RealVector(std::initializer_list<double> values)
      : RealVector(std::vector<double>(values)) {}
  explicit RealVector(std::span<const double> values)
      : RealVector(std::vector<double>(values.begin(), values.end())) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const& { return values_; }
  // Temporaries hand over their storage so range-for over a call result is safe.
  std::vector<double> values() && { return std::move(values_); }
  auto begin() const { return values_.begin(); }
  auto end() const { return values_.end(); }

  friend bool operator==(const RealVector&, const RealVector&) = default;

 private:
  std::vector<double> values_;
};

struct SignalTag {
  static constexpr const char* name = "Signal";
};
struct SpectrumTag {
  static constexpr const char* name = "Spectrum";
};

using Signal = RealVector<SignalTag>;
using Spectrum = RealVector<SpectrumTag>;

/// DFT of a real signal.
class ComplexSpectrum {
 public:
  ComplexSpectrum() = default;
  explicit ComplexSpectrum(std::vector<std::complex<double>> values)
      : values_(std::move(values)) {
    for (const auto& z : values_) {
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
        throw std::invalid_argument("ComplexSpectrum: non-finite entry");
      }
    }
  }

  std::size_t size() const { return values_.size(); }
  const std::complex<double>& operator[](std::size_t i) const { return values_[i]; }
  std::span<const std::complex<double>> values() const& { return values_; }
  std::vector<std::complex<double>> values() && { return std::move(values_); }

  /// Largest |F_k - conj(F_{N-k})|.
  double conjugate_symmetry_error() const {
    const std::size_t n = values_.size();
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max(worst, std::abs(values_[k] - std::conj(values_[(n - k) % n])));
    }
    return worst;
  }

 private:
  std::vector<std::complex<double>> values_;
};

/// Row-major dense real matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("DenseMatrix: dimensions must be positive");
    }
  }
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (rows == 0 || cols == 0) {
      throw std::invalid_argument("DenseMatrix: dimensions must be positive");
    }
    if (data_.size() != rows * cols) {
      throw std::invalid_argument("DenseMatrix: entry count does not match shape");
    }
    detail::require_finite(data_, "DenseMatrix");
  }

  static DenseMatrix identity(std::size_t n) {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  std::span<const double> data() const { return data_; }

  DenseMatrix transpose() const {
    DenseMatrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
  }

  friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.cols() != b.rows()) {
    throw std::invalid_argument("DenseMatrix product: inner dimensions differ");
  }
  DenseMatrix out(a.rows(), b.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double x = a(r, k);
      if (x == 0.0) continue;
      for (std::size_t c = 0; c < b.cols(); ++c) out(r, c) += x * b(k, c);
    }
  return out;
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument("DenseMatrix sum: shapes differ");
  }
  DenseMatrix out(a.rows(), a.cols());
  for (std::size_t r = 0; r < a.rows(); ++r)
    for (std::size_t c = 0; c < a.cols(); ++c) out(r, c) = a(r, c) + b(r, c);
  return out;
}

/// max |a - b| over all entries; +inf when shapes differ.
inline double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    return std::numeric_limits<double>::infinity();
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
  }
  return worst;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
  return worst;
}

/// The N x N Hartley matrix, entry (k, i) = cas(2 pi k i / N).
///
/// The product k*i is reduced mod N before scaling, so every entry is evaluated
/// at an angle in [0, 2 pi).
inline DenseMatrix hartley_matrix(std::size_t n) {
  if (n == 0) throw std::invalid_argument("hartley_matrix: N must be positive");
  DenseMatrix h(n, n);
  const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      h(k, i) = cas(step * static_cast<double>((k * i) % n));
    }
  return h;
}

/// Direct O(N^2) evaluation: V_k = sum_i v_i cas(2 pi k i / N).
inline Spectrum naive_dht(const Signal& v) {
  const std::size_t n = v.size();
  if (n == 0) return Spectrum{};
  const DenseMatrix h = hartley_matrix(n);
  std::vector<double> out(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += h(k, i) * v[i];
    out[k] = acc;
  }
  return Spectrum(std::move(out));
}

/// The DHT is its own inverse up to 1/N.
inline Signal inverse_dht(const Spectrum& spectrum) {
  const std::size_t n = spectrum.size();
  if (n == 0) return Signal{};
  const Spectrum twice = naive_dht(Signal(spectrum.values()));
  std::vector<double> out(n);
  const double scale = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = twice[i] * scale;
  return Signal(std::move(out));
}

/// F_k = ((H_k + H_{N-k}) - j (H_k - H_{N-k})) / 2, indices mod N.
inline ComplexSpectrum dht_to_dft(const Spectrum& h) {
  const std::size_t n = h.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = h[k];
    const double b = h[(n - k) % n];
    out[k] = {0.5 * (a + b), -0.5 * (a - b)};
  }
  return ComplexSpectrum(std::move(out));
}

/// Thrown when a complex spectrum cannot have come from a real signal.
class NotRealSignalError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// H_k = Re F_k - Im F_k. The input must be conjugate symmetric to within
/// `tolerance` scaled by max(1, max |F_k|).
inline Spectrum dft_to_dht(const ComplexSpectrum& f, double tolerance = 1e-9) {
  double scale = 1.0;
  for (const auto& z : f.values()) scale = std::max(scale, std::abs(z));
  const double err = f.conjugate_symmetry_error();
  if (err > tolerance * scale) {
    throw NotRealSignalError("dft_to_dht: spectrum is not conjugate symmetric (error " +
                             std::to_string(err) + ")");
  }
  std::vector<double> out(f.size());
  for (std::size_t k = 0; k < f.size(); ++k) out[k] = f[k].real() - f[k].imag();
  return Spectrum(std::move(out));
}

}  // namespace fdht
