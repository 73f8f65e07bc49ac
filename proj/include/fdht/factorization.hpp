#pragma once

// Layered factorizations: a transform written as nested stages
//
//   V = ( ... ((C_n B_n A_n + L_{n-1}) C_{n-1} B_{n-1} A_{n-1} ...) + L_0 ) v
//
// stored innermost first. Each stage is a chain of sparse factors applied right
// to left plus an optional layer matrix that reads the same stage input as the
// chain and is added to the chain's result.

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdht/dht.hpp"
#include "fdht/sparse.hpp"

namespace fdht {

class Stage {
 public:
  /// `chain` is listed left to right as written, i.e. chain.back() acts first.
  explicit Stage(std::vector<SparseRealMatrix> chain,
                 std::optional<SparseRealMatrix> layer = std::nullopt)
      : chain_(std::move(chain)), layer_(std::move(layer)) {
    if (chain_.empty()) throw std::invalid_argument("Stage: empty product chain");
    for (std::size_t i = 0; i + 1 < chain_.size(); ++i) {
      if (chain_[i].cols() != chain_[i + 1].rows()) {
        throw DimensionMismatch("Stage: chain factor " + std::to_string(i) + " has " +
                                std::to_string(chain_[i].cols()) + " columns but factor " +
                                std::to_string(i + 1) + " has " +
                                std::to_string(chain_[i + 1].rows()) + " rows");
      }
    }
    if (layer_ && (layer_->rows() != output_size() || layer_->cols() != input_size())) {
      throw DimensionMismatch("Stage: layer shape differs from the chain composite");
    }
  }

  std::size_t input_size() const { return chain_.back().cols(); }
  std::size_t output_size() const { return chain_.front().rows(); }
  const std::vector<SparseRealMatrix>& chain() const { return chain_; }
  const std::optional<SparseRealMatrix>& layer() const { return layer_; }

  friend bool operator==(const Stage&, const Stage&) = default;

 private:
  std::vector<SparseRealMatrix> chain_;
  std::optional<SparseRealMatrix> layer_;
};

class LayeredFactorization {
 public:
  LayeredFactorization(std::size_t n_input, std::size_t n_output, std::vector<Stage> stages)
      : n_input_(n_input), n_output_(n_output), stages_(std::move(stages)) {
    if (stages_.empty()) throw std::invalid_argument("LayeredFactorization: no stages");
    std::size_t dim = n_input_;
    for (std::size_t k = 0; k < stages_.size(); ++k) {
      if (stages_[k].input_size() != dim) {
        throw DimensionMismatch("LayeredFactorization: stage " + std::to_string(k) +
                                " expects input of size " +
                                std::to_string(stages_[k].input_size()) + ", got " +
                                std::to_string(dim));
      }
      dim = stages_[k].output_size();
    }
    if (dim != n_output_) {
      throw DimensionMismatch("LayeredFactorization: last stage output size " +
                              std::to_string(dim) + " differs from n_output " +
                              std::to_string(n_output_));
    }
  }

  static LayeredFactorization identity(std::size_t n) {
    return {n, n, {Stage({SparseRealMatrix::identity(n)})}};
  }

  std::size_t n_input() const { return n_input_; }
  std::size_t n_output() const { return n_output_; }
  const std::vector<Stage>& stages() const { return stages_; }

  friend bool operator==(const LayeredFactorization&, const LayeredFactorization&) = default;

 private:
  std::size_t n_input_;
  std::size_t n_output_;
  std::vector<Stage> stages_;
};

/// out = Chain in + Layer in.
inline std::vector<double> evaluate(const Stage& stage, std::span<const double> in) {
  if (in.size() != stage.input_size()) {
    throw DimensionMismatch("evaluate: stage input size mismatch");
  }
  std::vector<double> x(in.begin(), in.end());
  for (auto it = stage.chain().rbegin(); it != stage.chain().rend(); ++it) x = fdht::apply(*it, x);
  if (stage.layer()) {
    const std::vector<double> l = fdht::apply(*stage.layer(), in);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (!stage.layer()->row(i).empty()) x[i] += l[i];
    }
  }
  return x;
}

inline std::vector<double> evaluate(const LayeredFactorization& f, std::span<const double> v) {
  if (v.size() != f.n_input()) {
    throw DimensionMismatch("evaluate: input length " + std::to_string(v.size()) +
                            " differs from n_input " + std::to_string(f.n_input()));
  }
  std::vector<double> x(v.begin(), v.end());
  for (const Stage& s : f.stages()) x = evaluate(s, x);
  return x;
}

/// Dense operator of one stage.
inline DenseMatrix reconstruct_dense(const Stage& stage) {
  DenseMatrix m = stage.chain().back().to_dense();
  for (auto it = std::next(stage.chain().rbegin()); it != stage.chain().rend(); ++it) {
    m = it->to_dense() * m;
  }
  if (stage.layer()) m = m + stage.layer()->to_dense();
  return m;
}

/// Dense n_output x n_input matrix of the whole factorization.
inline DenseMatrix reconstruct_dense(const LayeredFactorization& f) {
  DenseMatrix m = reconstruct_dense(f.stages().front());
  for (std::size_t k = 1; k < f.stages().size(); ++k) m = reconstruct_dense(f.stages()[k]) * m;
  return m;
}

// ---------------------------------------------------------------------------
// Operation counting
// ---------------------------------------------------------------------------

/// Arithmetic cost of a factorization. A multiplication is nontrivial when its
/// constant is not +1 or -1; `rational_multiplications` is the subset whose
/// constant is a small rational (p/q with q <= 64).
struct OpCount {
  std::size_t multiplications = 0;
  std::size_t additions = 0;
  std::size_t rational_multiplications = 0;

  friend bool operator==(const OpCount&, const OpCount&) = default;
};

namespace detail {

inline bool is_unit(double c) { return c == 1.0 || c == -1.0; }

inline bool is_small_rational(double c) {
  for (int q = 1; q <= 64; ++q) {
    const double p = c * q;
    if (std::abs(p - std::round(p)) <= 1e-12 * std::max(1.0, std::abs(p))) return true;
  }
  return false;
}

/// Identifies rows that are equal up to an overall sign, so that they are
/// computed once. Returns, for each row, the index of the first row in its
/// class.
inline std::vector<std::size_t> row_representatives(const SparseRealMatrix& m,
                                                    const std::vector<bool>& live_in) {
  std::map<std::vector<std::pair<std::size_t, double>>, std::size_t> seen;
  std::vector<std::size_t> rep(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::vector<std::pair<std::size_t, double>> key;
    for (const Entry& e : m.row(r))
      if (live_in[e.col]) key.emplace_back(e.col, e.value);
    if (!key.empty() && key.front().second < 0) {
      for (auto& kv : key) kv.second = -kv.second;
    }
    auto [it, inserted] = seen.emplace(std::move(key), r);
    rep[r] = it->second;
  }
  return rep;
}

/// Cost of applying `m` to a vector whose live (structurally nonzero) slots are
/// `live_in`. Updates `live_in` to the output liveness.
inline void count_matrix(const SparseRealMatrix& m, std::vector<bool>& live_in, OpCount& ops) {
  const auto rep = row_representatives(m, live_in);
  std::set<std::pair<std::size_t, double>> products;
  std::vector<bool> live_out(m.rows(), false);
  for (std::size_t r = 0; r < m.rows(); ++r) {
    std::size_t terms = 0;
    for (const Entry& e : m.row(r)) {
      if (!live_in[e.col]) continue;
      ++terms;
      if (rep[r] == r && !is_unit(e.value) &&
          products.emplace(e.col, std::abs(e.value)).second) {
        ++ops.multiplications;
        if (is_small_rational(e.value)) ++ops.rational_multiplications;
      }
    }
    live_out[r] = terms > 0;
    if (rep[r] == r && terms > 1) ops.additions += terms - 1;
  }
  live_in = std::move(live_out);
}

}  // namespace detail

/// Counts the work of evaluating `f` as a straight-line program.
///
/// Each sparse row with k live terms costs k - 1 additions; each distinct
/// (column, |constant|) product with a constant other than +-1 costs one
/// multiplication; rows that repeat an earlier row of the same factor up to
/// sign are free. A stage with a layer costs one further addition for every
/// output row in which both the chain and the layer are structurally nonzero.
inline OpCount count_ops(const LayeredFactorization& f) {
  OpCount ops;
  std::vector<bool> live(f.n_input(), true);
  for (const Stage& stage : f.stages()) {
    const std::vector<bool> stage_in = live;
    for (auto it = stage.chain().rbegin(); it != stage.chain().rend(); ++it) {
      detail::count_matrix(*it, live, ops);
    }
    if (stage.layer()) {
      std::vector<bool> layer_live = stage_in;
      detail::count_matrix(*stage.layer(), layer_live, ops);
      for (std::size_t r = 0; r < live.size(); ++r) {
        if (live[r] && layer_live[r]) ++ops.additions;
        live[r] = live[r] || layer_live[r];
      }
    }
  }
  return ops;
}

// ---------------------------------------------------------------------------
// Composition helpers used to assemble the longer kernels
// ---------------------------------------------------------------------------

/// `second` applied after `first`.
inline LayeredFactorization then(const LayeredFactorization& first,
                                 const LayeredFactorization& second) {
  std::vector<Stage> stages = first.stages();
  stages.insert(stages.end(), second.stages().begin(), second.stages().end());
  return {first.n_input(), second.n_output(), std::move(stages)};
}

/// Block-diagonal combination: the first a.n_input() inputs feed `a`, the rest
/// feed `b`; outputs are stacked the same way. The shorter factorization is
/// padded with identity stages, and shorter chains with identity factors on the
/// output side.
inline LayeredFactorization direct_sum(const LayeredFactorization& a,
                                       const LayeredFactorization& b) {
  const std::size_t depth = std::max(a.stages().size(), b.stages().size());
  auto stage_at = [](const LayeredFactorization& f, std::size_t k) {
    if (k < f.stages().size()) return f.stages()[k];
    return Stage({SparseRealMatrix::identity(f.n_output())});
  };
  auto padded_chain = [](const Stage& s, std::size_t length) {
    std::vector<SparseRealMatrix> chain;
    for (std::size_t i = s.chain().size(); i < length; ++i) {
      chain.push_back(SparseRealMatrix::identity(s.output_size()));
    }
    chain.insert(chain.end(), s.chain().begin(), s.chain().end());
    return chain;
  };
  auto layer_or_empty = [](const Stage& s) {
    return s.layer() ? *s.layer() : SparseRealMatrix(s.output_size(), s.input_size(), {});
  };

  std::vector<Stage> stages;
  for (std::size_t k = 0; k < depth; ++k) {
    const Stage sa = stage_at(a, k);
    const Stage sb = stage_at(b, k);
    const std::size_t length = std::max(sa.chain().size(), sb.chain().size());
    const auto ca = padded_chain(sa, length);
    const auto cb = padded_chain(sb, length);
    std::vector<SparseRealMatrix> chain;
    for (std::size_t i = 0; i < length; ++i) chain.push_back(block_diagonal(ca[i], cb[i]));
    std::optional<SparseRealMatrix> layer;
    if (sa.layer() || sb.layer()) layer = block_diagonal(layer_or_empty(sa), layer_or_empty(sb));
    stages.emplace_back(std::move(chain), std::move(layer));
  }
  return {a.n_input() + b.n_input(), a.n_output() + b.n_output(), std::move(stages)};
}

/// Reorders outputs: output i of the result is output source[i] of `f`. The
/// permutation is folded into the last stage, so it costs nothing.
inline LayeredFactorization permute_outputs(const LayeredFactorization& f,
                                            std::span<const std::size_t> source) {
  std::vector<Stage> stages = f.stages();
  const Stage& last = stages.back();
  std::vector<SparseRealMatrix> chain = last.chain();
  chain.front() = permute_rows(chain.front(), source);
  std::optional<SparseRealMatrix> layer;
  if (last.layer()) layer = permute_rows(*last.layer(), source);
  stages.back() = Stage(std::move(chain), std::move(layer));
  return {f.n_input(), f.n_output(), std::move(stages)};
}

}  // namespace fdht
