#pragma once

// JSON form of factorizations and verification reports:
//
//   {"n_input": 3, "n_output": 3,
//    "stages": [{"chain": [{"rows": 3, "cols": 3, "entries": [[r, c, value], ...]}, ...],
//                "layer": {...} | null}]}

#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"

#include "fdht/factorization.hpp"
#include "fdht/verify.hpp"

namespace fdht {

inline nlohmann::json to_json(const SparseRealMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (const Entry& e : m.entries()) entries.push_back({e.row, e.col, e.value});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"entries", std::move(entries)}};
}

inline SparseRealMatrix sparse_from_json(const nlohmann::json& j) {
  std::vector<Entry> entries;
  for (const auto& e : j.at("entries")) {
    if (!e.is_array() || e.size() != 3) {
      throw std::invalid_argument("sparse matrix entry must be [row, col, value]");
    }
    entries.push_back({e[0].get<std::size_t>(), e[1].get<std::size_t>(), e[2].get<double>()});
  }
  return {j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>(), std::move(entries)};
}

inline nlohmann::json to_json(const LayeredFactorization& f) {
  nlohmann::json stages = nlohmann::json::array();
  for (const Stage& s : f.stages()) {
    nlohmann::json chain = nlohmann::json::array();
    for (const auto& m : s.chain()) chain.push_back(to_json(m));
    stages.push_back({{"chain", std::move(chain)},
                      {"layer", s.layer() ? to_json(*s.layer()) : nlohmann::json(nullptr)}});
  }
  return {{"n_input", f.n_input()}, {"n_output", f.n_output()}, {"stages", std::move(stages)}};
}

inline LayeredFactorization factorization_from_json(const nlohmann::json& j) {
  std::vector<Stage> stages;
  for (const auto& s : j.at("stages")) {
    std::vector<SparseRealMatrix> chain;
    for (const auto& m : s.at("chain")) chain.push_back(sparse_from_json(m));
    std::optional<SparseRealMatrix> layer;
    if (s.contains("layer") && !s.at("layer").is_null()) layer = sparse_from_json(s.at("layer"));
    stages.emplace_back(std::move(chain), std::move(layer));
  }
  return {j.at("n_input").get<std::size_t>(), j.at("n_output").get<std::size_t>(),
          std::move(stages)};
}

inline nlohmann::json to_json(const OpCount& ops) {
  return {{"multiplications", ops.multiplications},
          {"additions", ops.additions},
          {"rational_multiplications", ops.rational_multiplications}};
}

inline nlohmann::json to_json(const VerificationReport& r) {
  return {{"N", r.blocklength},          {"tolerance", r.tolerance},
          {"dense_error", r.dense_error}, {"oracle_error", r.oracle_error},
          {"trials", r.trials},           {"ops", to_json(r.ops)},
          {"pass", r.passed}};
}

}  // namespace fdht
