#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "fdht/dht.hpp"
#include "fdht/factorization.hpp"

namespace fdht {

struct VerificationReport {
  std::size_t blocklength = 0;
  double tolerance = 0.0;
  /// max |reconstruct_dense(f) - hartley_matrix(N)|
  double dense_error = std::numeric_limits<double>::infinity();
  /// max |evaluate(f, v) - naive_dht(v)| over the random trials
  double oracle_error = std::numeric_limits<double>::infinity();
  std::size_t trials = 0;
  OpCount ops;
  bool passed = false;
};

/// Uniform [-1, 1] vectors from a fixed seed.
inline std::vector<std::vector<double>> random_vectors(std::size_t count, std::size_t length,
                                                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<std::vector<double>> out(count, std::vector<double>(length));
  for (auto& v : out)
    for (double& x : v) x = dist(rng);
  return out;
}

/// Checks that `f` computes the N-point DHT: densely against hartley_matrix(N)
/// and pointwise against naive_dht on `trials` seeded random vectors. A shape
/// mismatch is a failed report, not an error.
inline VerificationReport verify(const LayeredFactorization& f, std::size_t n, double tol,
                                 std::size_t trials = 100, std::uint64_t seed = 0x5eed) {
  VerificationReport report;
  report.blocklength = n;
  report.tolerance = tol;
  report.ops = count_ops(f);
  if (n == 0 || f.n_input() != n || f.n_output() != n) return report;

  report.dense_error = max_abs_diff(reconstruct_dense(f), hartley_matrix(n));
  double worst = 0.0;
  for (const auto& v : random_vectors(trials, n, seed)) {
    const auto fast = evaluate(f, v);
    const auto slow = naive_dht(Signal(v));
    worst = std::max(worst, max_abs_diff(fast, slow.values()));
  }
  report.oracle_error = worst;
  report.trials = trials;
  report.passed = report.dense_error <= tol && report.oracle_error <= tol;
  return report;
}

}  // namespace fdht
