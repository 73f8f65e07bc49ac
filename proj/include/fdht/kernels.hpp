#pragma once

// Built-in minimal-multiplication DHT kernels for N in {3, 5, 6, 12, 24}.

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fdht/dht.hpp"
#include "fdht/factorization.hpp"
#include "fdht/slp.hpp"
#include "fdht/sparse.hpp"

namespace fdht {

inline constexpr std::array<std::size_t, 5> kSupportedLengths{3, 5, 6, 12, 24};

inline std::string supported_lengths_text() {
  std::string s = "{";
  for (std::size_t i = 0; i < kSupportedLengths.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(kSupportedLengths[i]);
  }
  return s + "}";
}

class UnsupportedLength : public std::invalid_argument {
 public:
  explicit UnsupportedLength(std::size_t n)
      : std::invalid_argument("no fast kernel for length " + std::to_string(n) +
                              "; supported lengths are " + supported_lengths_text()),
        length_(n) {}
  std::size_t length() const { return length_; }

 private:
  std::size_t length_;
};

/// Closed-form transform constants.
namespace constants {

/// (sqrt(3) - 1) / 2 = cas(2 pi / 3)
inline double three_point() { return (std::sqrt(3.0) - 1.0) / 2.0; }

/// sqrt(2) sqrt(5 - sqrt(5)) / 2 = 2 sin(pi / 5)
inline double five_point_e() { return std::sqrt(2.0) * std::sqrt(5.0 - std::sqrt(5.0)) / 2.0; }

/// sqrt(2) sqrt(5 + sqrt(5)) / 2 = 2 sin(2 pi / 5)
inline double five_point_f() { return std::sqrt(2.0) * std::sqrt(5.0 + std::sqrt(5.0)) / 2.0; }

// Entries of the 5-point Hartley matrix, row 1 left to right after the leading 1.
inline double five_point_a() {
  return (std::sqrt(5.0) - 1.0 + std::sqrt(2.0) * std::sqrt(5.0 + std::sqrt(5.0))) / 4.0;
}
inline double five_point_b() {
  return -(std::sqrt(5.0) + 1.0 - std::sqrt(2.0) * std::sqrt(5.0 - std::sqrt(5.0))) / 4.0;
}
inline double five_point_c() {
  return -(std::sqrt(5.0) + 1.0 + std::sqrt(2.0) * std::sqrt(5.0 - std::sqrt(5.0))) / 4.0;
}
inline double five_point_d() {
  return (std::sqrt(5.0) - 1.0 - std::sqrt(2.0) * std::sqrt(5.0 + std::sqrt(5.0))) / 4.0;
}

}  // namespace constants

namespace detail {

inline SparseRealMatrix dense_rows(std::size_t rows, std::size_t cols,
                                   std::initializer_list<double> values) {
  return SparseRealMatrix::from_rows(rows, cols, values);
}

/// Odd-frequency half of a 12-point transform:
///   W_k = sum_{i<6} y_i cas(pi (2k + 1) i / 6),  k = 0..5.
/// Two multiplications by (sqrt(3) - 1) / 2 and 20 additions.
inline LayeredFactorization odd_frequency_6() {
  const double a = constants::three_point();
  // e = y0 + y3, f = y0 - y3, s12 = y1 + y2, d12 = y2 - y1, s45 = y4 + y5, d45 = y4 - y5
  const auto pre = dense_rows(6, 6, {
      1,  0, 0, 1, 0,  0,
      1,  0, 0, -1, 0, 0,
      0,  1, 1, 0, 0,  0,
      0, -1, 1, 0, 0,  0,
      0,  0, 0, 0, 1,  1,
      0,  0, 0, 0, 1, -1,
  });
  // a (s12 + d45) and a (d12 + s45)
  const auto gather_products = dense_rows(2, 6, {
      0, 0, 1, 0, 0, 1,
      0, 0, 0, 1, 1, 0,
  });
  const auto multiply = SparseRealMatrix::diagonal(std::vector<double>{a, a});
  const auto scatter = dense_rows(6, 2, {
      1,  0,
      0,  0,
      -1, 0,
      0,  1,
      0,  0,
      0, -1,
  });
  // Integer parts of each row, in the combined variables.
  const auto layer = dense_rows(6, 6, {
      1, 0,  1,  0,  0,  0,
      0, 1,  0, -1,  1,  0,
      1, 0,  0,  0,  0, -1,
      0, 1,  0,  1,  0,  0,
      1, 0, -1,  0,  0,  1,
      0, 1,  0,  0, -1,  0,
  });
  return {6, 6, {Stage({pre}), Stage({scatter, multiply, gather_products}, layer)}};
}

/// Odd-input, odd-frequency core of the 24-point transform:
///   O_k = sum_{m<6} z_m cas(pi (2k + 1)(2m + 1) / 12),  k = 0..5.
/// Six multiplications and 14 additions.
inline LayeredFactorization odd_odd_6() {
  const double g = std::sqrt(6.0) / 2.0;
  const double h = std::sqrt(2.0) / 2.0;
  const double r2 = std::sqrt(2.0);
  // z0 + z2, z3 + z5, z3 - z5, z2 - z0, z1, z1, z4, z4
  const auto pre1 = dense_rows(8, 6, {
      1, 0, 1, 0, 0,  0,
      0, 0, 0, 1, 0,  1,
      0, 0, 0, 1, 0, -1,
      -1, 0, 1, 0, 0, 0,
      0, 1, 0, 0, 0,  0,
      0, 1, 0, 0, 0,  0,
      0, 0, 0, 0, 1,  0,
      0, 0, 0, 0, 1,  0,
  });
  // z0 + z2, 2 z1 + z3 - z5, z3 + z5, 2 z4 + z2 - z0, z4 - z2 + z0, z1 - z3 + z5
  const auto pre2 = dense_rows(6, 8, {
      1, 0,  0,  0, 0, 0, 0, 0,
      0, 0,  1,  0, 1, 1, 0, 0,
      0, 1,  0,  0, 0, 0, 0, 0,
      0, 0,  0,  1, 0, 0, 1, 1,
      0, 0,  0, -1, 0, 0, 1, 0,
      0, 0, -1,  0, 1, 0, 0, 0,
  });
  const auto multiply = SparseRealMatrix::diagonal(std::vector<double>{g, h, g, h, r2, r2});
  const auto post = dense_rows(6, 6, {
      1,  1, 0,  0, 0, 0,
      0,  0, 0,  0, 1, 0,
      1, -1, 0,  0, 0, 0,
      0,  0, 1, -1, 0, 0,
      0,  0, 0,  0, 0, 1,
      0,  0, 1,  1, 0, 0,
  });
  return {6, 6, {Stage({post, multiply, pre2, pre1})}};
}

/// Hadamard split of an even length 2m transform followed by `even` on the sums
/// and `odd` on the differences, with outputs interleaved back to natural order.
inline LayeredFactorization even_odd_split(const LayeredFactorization& even,
                                           const LayeredFactorization& odd) {
  const std::size_t half = even.n_input();
  const LayeredFactorization split(2 * half, 2 * half,
                                   {Stage({hadamard2_kron_identity(half)})});
  std::vector<std::size_t> interleave(2 * half);
  for (std::size_t k = 0; k < half; ++k) {
    interleave[2 * k] = k;
    interleave[2 * k + 1] = half + k;
  }
  return permute_outputs(then(split, direct_sum(even, odd)), interleave);
}

}  // namespace detail

/// V = (C B A + L) v with a single multiplication by (sqrt(3) - 1) / 2.
inline LayeredFactorization factorization_3() {
  const double a = constants::three_point();
  const auto pre = detail::dense_rows(3, 3, {1, 0, 0, 0, 1, 1, 0, 1, -1});
  const auto multiply = SparseRealMatrix::diagonal(std::vector<double>{1, 1, a});
  const auto post = detail::dense_rows(3, 3, {1, 1, 0, 1, 0, 1, 1, 0, -1});
  const auto layer = detail::dense_rows(3, 3, {0, 0, 0, 0, 0, -1, 0, -1, 0});
  return {3, 3, {Stage({post, multiply, pre}, layer)}};
}

/// 5-point transform. The sine half is a 2x2 rotation done with three
/// multiplications through a 6-wide intermediate; the cosine half needs
/// -5/4 and sqrt(5)/4.
inline LayeredFactorization factorization_5() {
  const double e = constants::five_point_e() / 2.0;
  const double f = constants::five_point_f() / 2.0;
  // v0, v1 + v4, v2 + v3, v2 - v3, v1 - v4
  const auto pre = detail::dense_rows(5, 5, {
      1, 0, 0,  0,  0,
      0, 1, 0,  0,  1,
      0, 0, 1,  1,  0,
      0, 0, 1, -1,  0,
      0, 1, 0,  0, -1,
  });
  const auto rot_in = detail::dense_rows(6, 5, {
      1, 0, 0,  0, 0,
      0, 1, 0,  0, 0,
      0, 0, 1,  0, 0,
      0, 0, 0,  1, 0,
      0, 0, 0, -1, 1,
      0, 0, 0,  0, 1,
  });
  const auto rot_mul = SparseRealMatrix::diagonal(std::vector<double>{1, 1, 1, f + e, f, f - e});
  const auto rot_out = detail::dense_rows(5, 6, {
      1, 0, 0, 0,  0, 0,
      0, 1, 0, 0,  0, 0,
      0, 0, 1, 0,  0, 0,
      0, 0, 0, 1,  1, 0,
      0, 0, 0, 0, -1, 1,
  });
  const auto sum_diff = detail::dense_rows(5, 5, {
      1, 0,  0, 0, 0,
      0, 1,  1, 0, 0,
      0, 1, -1, 0, 0,
      0, 0,  0, 1, 0,
      0, 0,  0, 0, 1,
  });
  const auto dc = detail::dense_rows(5, 5, {
      1, 1, 0, 0, 0,
      0, 1, 0, 0, 0,
      0, 0, 1, 0, 0,
      0, 0, 0, 1, 0,
      0, 0, 0, 0, 1,
  });
  const auto multiply =
      SparseRealMatrix::diagonal(std::vector<double>{1, -1.25, std::sqrt(5.0) / 4.0, 1, 1});
  const auto post1 = detail::dense_rows(5, 5, {
      1, 0, 0, 0, 0,
      1, 1, 0, 0, 0,
      0, 0, 1, 0, 0,
      0, 0, 0, 1, 0,
      0, 0, 0, 0, 1,
  });
  const auto post2 = detail::dense_rows(5, 5, {
      1, 0,  0, 0, 0,
      0, 1,  1, 0, 0,
      0, 1, -1, 0, 0,
      0, 0,  0, 1, 0,
      0, 0,  0, 0, 1,
  });
  const auto post3 = detail::dense_rows(5, 5, {
      1, 0, 0,  0,  0,
      0, 1, 0,  1,  0,
      0, 0, 1,  0, -1,
      0, 0, 1,  0,  1,
      0, 1, 0, -1,  0,
  });
  return {5, 5,
          {Stage({post3, post2, post1, multiply, dc, sum_diff, rot_out, rot_mul, rot_in, pre})}};
}

/// The rectangular rotation factors M1 M2 M3 M4, whose product is
/// [[1], [1 1; 1 -1], [e f; f -e]] on (x0 | x1 x2 | x3 x4).
inline std::vector<SparseRealMatrix> five_point_rotation_chain() {
  const double e = constants::five_point_e();
  const double f = constants::five_point_f();
  return {
      detail::dense_rows(5, 5, {
          1, 0,  0, 0, 0,
          0, 1,  1, 0, 0,
          0, 1, -1, 0, 0,
          0, 0,  0, 1, 0,
          0, 0,  0, 0, 1,
      }),
      detail::dense_rows(5, 6, {
          1, 0, 0, 0,  0, 0,
          0, 1, 0, 0,  0, 0,
          0, 0, 1, 0,  0, 0,
          0, 0, 0, 1,  1, 0,
          0, 0, 0, 0, -1, 1,
      }),
      SparseRealMatrix::diagonal(std::vector<double>{1, 1, 1, f + e, f, f - e}),
      detail::dense_rows(6, 5, {
          1, 0, 0,  0, 0,
          0, 1, 0,  0, 0,
          0, 0, 1,  0, 0,
          0, 0, 0,  1, 0,
          0, 0, 0, -1, 1,
          0, 0, 0,  0, 1,
      }),
  };
}

/// The 5-point chain C3 C2 C1 B M1 M2 M3 M4 A1 with unscaled constants and a
/// first factor that repeats two rows. It is not a DHT (rank 3 input stage,
/// no 1/4 scalings) and is kept only so audits can report its operation count.
inline LayeredFactorization unscaled_chain_5() {
  const auto a1 = detail::dense_rows(5, 5, {
      1, 0, 0,  0,  0,
      0, 1, 0,  0, -1,
      0, 0, 1, -1,  0,
      0, 0, 1, -1,  0,
      0, 1, 0,  0, -1,
  });
  const auto b = SparseRealMatrix::diagonal(std::vector<double>{1, std::sqrt(5.0), 1, 1, 1});
  const auto c1 = detail::dense_rows(5, 5, {
      1,  1, 0, 0, 0,
      1, -1, 0, 0, 0,
      0,  0, 1, 0, 0,
      0,  0, 0, 1, 0,
      0,  0, 0, 0, 1,
  });
  const auto c2 = detail::dense_rows(5, 5, {
      1, 0,  0, 0, 0,
      0, 1,  1, 0, 0,
      0, 1, -1, 0, 0,
      0, 0,  0, 1, 0,
      0, 0,  0, 0, 1,
  });
  const auto c3 = detail::dense_rows(5, 5, {
      1, 0, 0,  0,  0,
      0, 1, 0,  1,  0,
      0, 0, 1,  0,  1,
      0, 1, 0, -1,  0,
      0, 0, 1,  0, -1,
  });
  std::vector<SparseRealMatrix> chain{c3, c2, c1, b};
  for (auto& m : five_point_rotation_chain()) chain.push_back(std::move(m));
  chain.push_back(a1);
  return {5, 5, {Stage(std::move(chain))}};
}

/// V = (C B A2 + L) A1 v: Hadamard split, then two multiplications by
/// (sqrt(3) - 1) / 2.
inline LayeredFactorization factorization_6() {
  const double a = constants::three_point();
  const auto a2 = detail::dense_rows(6, 6, {
      1, 0,  0, 0, 0,  0,
      0, 1,  1, 0, 0,  0,
      0, 1, -1, 0, 0,  0,
      0, 0,  0, 1, 0,  0,
      0, 0,  0, 0, 1,  1,
      0, 0,  0, 0, 1, -1,
  });
  const auto multiply = SparseRealMatrix::diagonal(std::vector<double>{1, 1, a, 1, a, 1});
  const auto post = detail::dense_rows(6, 6, {
      1, 1, 0, 0,  0,  0,
      0, 0, 0, 1,  1,  0,
      1, 0, 1, 0,  0,  0,
      0, 0, 0, 1,  0, -1,
      1, 0, -1, 0, 0,  0,
      0, 0, 0, 1, -1,  0,
  });
  const auto layer = detail::dense_rows(6, 6, {
      0,  0,  0, 0, 0,  0,
      0,  0,  0, 0, 1,  0,
      0,  0, -1, 0, 0,  0,
      0,  0,  0, 0, 0,  0,
      0, -1,  0, 0, 0,  0,
      0,  0,  0, 0, 0, -1,
  });
  return {6, 6,
          {Stage({hadamard2_kron_identity(3)}), Stage({post, multiply, a2}, layer)}};
}

/// Hadamard split into a 6-point transform on the sums and the odd-frequency
/// block on the differences.
inline LayeredFactorization factorization_12() {
  return detail::even_odd_split(factorization_6(), detail::odd_frequency_6());
}

/// Hadamard split into the 12-point transform on the sums. The differences
/// split again by input parity: even inputs reuse the 12-point odd-frequency
/// block, odd inputs go through a six-multiplication core, and a final
/// butterfly joins the two.
inline LayeredFactorization factorization_24() {
  std::vector<std::size_t> parity(12);
  for (std::size_t m = 0; m < 6; ++m) {
    parity[m] = 2 * m;
    parity[6 + m] = 2 * m + 1;
  }
  const LayeredFactorization deinterleave(12, 12, {Stage({gather(parity, 12)})});
  const LayeredFactorization join(12, 12, {Stage({hadamard2_kron_identity(6)})});
  const LayeredFactorization odd =
      then(then(deinterleave, direct_sum(detail::odd_frequency_6(), detail::odd_odd_6())), join);
  return detail::even_odd_split(factorization_12(), odd);
}

inline LayeredFactorization builtin_factorization(std::size_t n) {
  switch (n) {
    case 3: return factorization_3();
    case 5: return factorization_5();
    case 6: return factorization_6();
    case 12: return factorization_12();
    case 24: return factorization_24();
    default: throw UnsupportedLength(n);
  }
}

/// Target operation counts per length and the accepted budgets.
struct ComplexityTarget {
  std::size_t blocklength;
  std::size_t claimed_multiplications;
  std::size_t claimed_additions;
  /// Largest accepted counts.
  std::size_t multiplication_budget;
  std::size_t addition_budget;
  /// Whether the addition count must equal the claim rather than stay within budget.
  bool exact_additions;
};

inline constexpr std::array<ComplexityTarget, 5> kComplexityTargets{{
    {3, 1, 7, 1, 7, true},
    {5, 3, 17, 4, 17, true},
    {6, 2, 20, 2, 20, true},
    {12, 4, 52, 4, 57, false},
    {24, 12, 138, 12, 152, false},
}};

inline const ComplexityTarget& complexity_target(std::size_t n) {
  for (const auto& t : kComplexityTargets)
    if (t.blocklength == n) return t;
  throw UnsupportedLength(n);
}

inline bool within_budget(const OpCount& ops, const ComplexityTarget& t) {
  const bool adds_ok = t.exact_additions ? ops.additions == t.claimed_additions
                                         : ops.additions <= t.addition_budget;
  return ops.multiplications <= t.multiplication_budget && adds_ok;
}

struct FastKernel {
  std::size_t blocklength = 0;
  LayeredFactorization factorization;
  StraightLineProgram program;
  OpCount ops;

  explicit FastKernel(LayeredFactorization f)
      : blocklength(f.n_input()),
        factorization(std::move(f)),
        program(emit_slp(factorization)),
        ops(count_ops(factorization)) {}

  std::vector<double> operator()(std::span<const double> v) const { return run_slp(program, v); }
};

inline FastKernel build_kernel_3() { return FastKernel(factorization_3()); }
inline FastKernel build_kernel_5() { return FastKernel(factorization_5()); }
inline FastKernel build_kernel_6() { return FastKernel(factorization_6()); }
inline FastKernel build_kernel_12() { return FastKernel(factorization_12()); }
inline FastKernel build_kernel_24() { return FastKernel(factorization_24()); }

/// The five built-in kernels, compiled once.
class KernelRegistry {
 public:
  KernelRegistry() {
    for (std::size_t n : kSupportedLengths) kernels_.emplace(n, FastKernel(builtin_factorization(n)));
  }

  static const KernelRegistry& instance() {
    static const KernelRegistry registry;
    return registry;
  }

  const FastKernel& at(std::size_t n) const {
    const auto it = kernels_.find(n);
    if (it == kernels_.end()) throw UnsupportedLength(n);
    return it->second;
  }

  bool supports(std::size_t n) const { return kernels_.contains(n); }
  const std::map<std::size_t, FastKernel>& kernels() const { return kernels_; }

 private:
  std::map<std::size_t, FastKernel> kernels_;
};

inline Spectrum fast_dht(const Signal& v) {
  return Spectrum(KernelRegistry::instance().at(v.size())(v.values()));
}

inline Signal fast_idht(const Spectrum& spectrum) {
  const std::size_t n = spectrum.size();
  std::vector<double> out = KernelRegistry::instance().at(n)(spectrum.values());
  const double scale = 1.0 / static_cast<double>(n);
  for (double& x : out) x *= scale;
  return Signal(std::move(out));
}

inline ComplexSpectrum fast_dft(const Signal& v) { return dht_to_dft(fast_dht(v)); }

enum class Direction { Forward, Inverse };

/// Applies the transform to every signal; all must share one supported length.
inline std::vector<Spectrum> batch_transform(const std::vector<Signal>& signals,
                                             Direction direction) {
  std::vector<Spectrum> out;
  if (signals.empty()) return out;
  const std::size_t n = signals.front().size();
  for (const auto& s : signals) {
    if (s.size() != n) {
      throw DimensionMismatch("batch_transform: mixed lengths " + std::to_string(n) + " and " +
                              std::to_string(s.size()));
    }
  }
  const FastKernel& kernel = KernelRegistry::instance().at(n);
  out.reserve(signals.size());
  const double scale = direction == Direction::Inverse ? 1.0 / static_cast<double>(n) : 1.0;
  for (const auto& s : signals) {
    std::vector<double> y = kernel(s.values());
    if (direction == Direction::Inverse)
      for (double& x : y) x *= scale;
    out.emplace_back(std::move(y));
  }
  return out;
}

}  // namespace fdht
