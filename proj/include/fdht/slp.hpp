#pragma once

// Straight-line programs: the branch-free instruction list a factorization
// compiles to. Every instruction defines exactly one new register, numbered by
// its position in the program.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fdht/factorization.hpp"

namespace fdht {

enum class OpCode : std::uint8_t { Load, Add, Sub, MulConst, Neg };

struct Instruction {
  OpCode op = OpCode::Load;
  std::size_t a = 0;  // input slot for Load, first operand otherwise
  std::size_t b = 0;  // second operand for Add/Sub
  double constant = 0.0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

/// Marks an output that is identically zero (a structurally empty row).
inline constexpr std::size_t kZeroRegister = static_cast<std::size_t>(-1);

struct StraightLineProgram {
  std::size_t n_input = 0;
  std::size_t n_output = 0;
  std::vector<Instruction> instructions;
  std::vector<std::size_t> output_map;

  std::size_t count(OpCode op) const {
    std::size_t n = 0;
    for (const auto& ins : instructions) n += ins.op == op ? 1 : 0;
    return n;
  }

  /// ADD/SUB and MUL_CONST tallies in OpCount form.
  OpCount tally() const {
    OpCount ops;
    ops.additions = count(OpCode::Add) + count(OpCode::Sub);
    ops.multiplications = count(OpCode::MulConst);
    for (const auto& ins : instructions) {
      if (ins.op == OpCode::MulConst && detail::is_small_rational(ins.constant)) {
        ++ops.rational_multiplications;
      }
    }
    return ops;
  }
};

namespace detail {

/// A value during emission: a register and a pending sign. Negations are
/// folded into later additions where possible, and only materialised as NEG
/// instructions at factor boundaries.
struct Term {
  std::size_t reg = kZeroRegister;
  bool negated = false;
  bool live() const { return reg != kZeroRegister; }
};

class SlpBuilder {
 public:
  explicit SlpBuilder(std::size_t n_input) { program_.n_input = n_input; }

  std::size_t push(Instruction ins) {
    program_.instructions.push_back(ins);
    return program_.instructions.size() - 1;
  }

  std::vector<std::size_t> load_inputs() {
    std::vector<std::size_t> regs;
    for (std::size_t i = 0; i < program_.n_input; ++i) regs.push_back(push({OpCode::Load, i}));
    return regs;
  }

  /// t0 + t1 with signs, in that operand order.
  Term add(Term t0, Term t1) {
    if (!t0.negated && !t1.negated) return {push({OpCode::Add, t0.reg, t1.reg}), false};
    if (!t0.negated && t1.negated) return {push({OpCode::Sub, t0.reg, t1.reg}), false};
    if (t0.negated && !t1.negated) return {push({OpCode::Sub, t1.reg, t0.reg}), false};
    return {push({OpCode::Add, t0.reg, t1.reg}), true};
  }

  std::size_t materialise(Term t) {
    if (!t.live()) return kZeroRegister;
    if (!t.negated) return t.reg;
    return push({OpCode::Neg, t.reg});
  }

  /// Emits y = M x for registers x; mirrors the cost model in count_ops.
  std::vector<std::size_t> apply(const SparseRealMatrix& m, const std::vector<std::size_t>& x) {
    const auto rows = emit_rows(m, x);
    std::vector<std::size_t> out(rows.size());
    std::map<std::size_t, std::size_t> negated;  // register -> its NEG
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (!rows[r].negated) {
        out[r] = rows[r].reg;
      } else {
        auto it = negated.find(rows[r].reg);
        if (it == negated.end()) it = negated.emplace(rows[r].reg, materialise(rows[r])).first;
        out[r] = it->second;
      }
    }
    return out;
  }

  /// Row values of M x as signed terms, before any NEG is materialised.
  std::vector<Term> emit_rows(const SparseRealMatrix& m, const std::vector<std::size_t>& x) {
    std::vector<bool> live(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) live[i] = x[i] != kZeroRegister;
    const auto rep = row_representatives(m, live);
    std::map<std::pair<std::size_t, double>, std::size_t> products;
    std::vector<Term> rows(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
      if (rep[r] != r) {
        // Same as an earlier row up to sign.
        const auto first = m.row(rep[r]);
        const auto here = m.row(r);
        Term t = rows[rep[r]];
        if (t.live() && first.size() > 0 && here.size() > 0) {
          const double ref = first_live_value(first, live);
          const double cur = first_live_value(here, live);
          if ((ref < 0) != (cur < 0)) t.negated = !t.negated;
        }
        rows[r] = t;
        continue;
      }
      Term acc;
      for (const Entry& e : m.row(r)) {
        if (!live[e.col]) continue;
        Term t;
        if (e.value == 1.0) {
          t = {x[e.col], false};
        } else if (e.value == -1.0) {
          t = {x[e.col], true};
        } else {
          const auto key = std::make_pair(e.col, std::abs(e.value));
          auto it = products.find(key);
          if (it == products.end()) {
            it = products.emplace(key, push({OpCode::MulConst, x[e.col], 0, std::abs(e.value)}))
                     .first;
          }
          t = {it->second, e.value < 0};
        }
        acc = acc.live() ? add(acc, t) : t;
      }
      rows[r] = acc;
    }
    return rows;
  }

  StraightLineProgram finish(std::vector<std::size_t> outputs) {
    program_.n_output = outputs.size();
    program_.output_map = std::move(outputs);
    return std::move(program_);
  }

 private:
  static double first_live_value(std::span<const Entry> row, const std::vector<bool>& live) {
    for (const Entry& e : row)
      if (live[e.col]) return e.value;
    return 0.0;
  }

  StraightLineProgram program_;
};

}  // namespace detail

/// Compiles a factorization to a straight-line program. The ADD/SUB and
/// MUL_CONST counts of the result equal count_ops(f).
inline StraightLineProgram emit_slp(const LayeredFactorization& f) {
  detail::SlpBuilder builder(f.n_input());
  std::vector<std::size_t> regs = builder.load_inputs();
  for (const Stage& stage : f.stages()) {
    const std::vector<std::size_t> stage_in = regs;
    const auto& chain = stage.chain();
    for (std::size_t i = chain.size(); i-- > 1;) regs = builder.apply(chain[i], regs);
    if (!stage.layer()) {
      regs = builder.apply(chain.front(), regs);
      continue;
    }
    // Keep the signs of the last chain factor and of the layer pending so the
    // merge can absorb them.
    const auto chain_rows = builder.emit_rows(chain.front(), regs);
    const auto layer_rows = builder.emit_rows(*stage.layer(), stage_in);
    std::vector<std::size_t> out(chain_rows.size());
    for (std::size_t r = 0; r < out.size(); ++r) {
      const detail::Term& c = chain_rows[r];
      const detail::Term& l = layer_rows[r];
      if (c.live() && l.live()) {
        out[r] = builder.materialise(builder.add(c, l));
      } else {
        out[r] = builder.materialise(c.live() ? c : l);
      }
    }
    regs = std::move(out);
  }
  return builder.finish(std::move(regs));
}

/// Evaluates the program in order.
inline std::vector<double> run_slp(const StraightLineProgram& p, std::span<const double> v) {
  if (v.size() != p.n_input) {
    throw DimensionMismatch("run_slp: input length " + std::to_string(v.size()) +
                            " differs from n_input " + std::to_string(p.n_input));
  }
  std::vector<double> reg(p.instructions.size());
  for (std::size_t i = 0; i < p.instructions.size(); ++i) {
    const Instruction& ins = p.instructions[i];
    switch (ins.op) {
      case OpCode::Load: reg[i] = v[ins.a]; break;
      case OpCode::Add: reg[i] = reg[ins.a] + reg[ins.b]; break;
      case OpCode::Sub: reg[i] = reg[ins.a] - reg[ins.b]; break;
      case OpCode::MulConst: reg[i] = ins.constant * reg[ins.a]; break;
      case OpCode::Neg: reg[i] = -reg[ins.a]; break;
    }
  }
  std::vector<double> out(p.output_map.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = p.output_map[i] == kZeroRegister ? 0.0 : reg[p.output_map[i]];
  }
  return out;
}

inline const char* to_string(OpCode op) {
  switch (op) {
    case OpCode::Load: return "LOAD";
    case OpCode::Add: return "ADD";
    case OpCode::Sub: return "SUB";
    case OpCode::MulConst: return "MUL_CONST";
    case OpCode::Neg: return "NEG";
  }
  return "?";
}

}  // namespace fdht
