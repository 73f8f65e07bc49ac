#pragma once

// Command implementations behind the fdht executable. Each command writes to
// the given streams and returns the process exit status.

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "fdht/fdht.hpp"
#include "fdht/serialize.hpp"

namespace fdht::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

enum class FileFormat { Csv, Json };
enum class Mode { Fast, Naive };

class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Shortest decimal text that parses back to the same double.
inline std::string format_number(double x) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return {buf, res.ptr};
}

inline FileFormat format_for_path(const std::string& path) {
  const auto dot = path.rfind('.');
  if (dot != std::string::npos && path.substr(dot) == ".json") return FileFormat::Json;
  return FileFormat::Csv;
}

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

inline double parse_number(std::string_view field, std::size_t line) {
  const auto text = trim(field);
  double value = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw InputError("line " + std::to_string(line) + ": not a number: '" + std::string(text) +
                     "'");
  }
  return value;
}

}  // namespace detail

/// One signal per non-blank line, comma separated, no header.
inline std::vector<std::vector<double>> parse_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (detail::trim(line).empty()) continue;
    std::vector<double> row;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      row.push_back(detail::parse_number(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

inline std::vector<std::vector<double>> parse_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw InputError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_array()) throw InputError("JSON input must be an array of arrays of numbers");
  std::vector<std::vector<double>> rows;
  for (const auto& r : doc) {
    if (!r.is_array()) throw InputError("JSON input must be an array of arrays of numbers");
    std::vector<double> row;
    for (const auto& x : r) {
      if (!x.is_number()) throw InputError("JSON input contains a non-numeric entry");
      row.push_back(x.get<double>());
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Parses a signal file and checks that every vector is non-empty and of one length.
inline std::vector<std::vector<double>> read_signals(std::istream& in, FileFormat format) {
  auto rows = format == FileFormat::Json ? parse_json(in) : parse_csv(in);
  if (rows.empty()) throw InputError("no signals in input");
  for (const auto& r : rows) {
    if (r.empty()) throw InputError("empty signal in input");
    if (r.size() != rows.front().size()) {
      throw InputError("mixed signal lengths " + std::to_string(rows.front().size()) + " and " +
                       std::to_string(r.size()));
    }
  }
  return rows;
}

inline void write_signals(std::ostream& out, const std::vector<std::vector<double>>& rows,
                          FileFormat format) {
  if (format == FileFormat::Csv) {
    for (const auto& r : rows) {
      for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << format_number(r[i]);
      out << '\n';
    }
    return;
  }
  out << '[';
  for (std::size_t k = 0; k < rows.size(); ++k) {
    out << (k ? ",\n " : "") << '[';
    for (std::size_t i = 0; i < rows[k].size(); ++i)
      out << (i ? ", " : "") << format_number(rows[k][i]);
    out << ']';
  }
  out << "]\n";
}

struct TransformOptions {
  std::string input;
  std::optional<std::string> output;
  Direction direction = Direction::Forward;
  Mode mode = Mode::Fast;
  std::optional<FileFormat> format;
  bool counts = false;
};

inline int cmd_transform(const TransformOptions& opt, std::ostream& out, std::ostream& err) {
  const FileFormat format = opt.format.value_or(format_for_path(opt.input));
  std::vector<std::vector<double>> rows;
  try {
    std::ifstream in(opt.input);
    if (!in) throw InputError("cannot open " + opt.input);
    rows = read_signals(in, format);
  } catch (const InputError& e) {
    err << "error: " << opt.input << ": " << e.what() << '\n';
    return kExitFailure;
  }

  const std::size_t n = rows.front().size();
  if (opt.mode == Mode::Fast && !KernelRegistry::instance().supports(n)) {
    err << "error: no fast kernel for length " << n
        << "; supported lengths: " << supported_lengths_text() << '\n';
    return kExitFailure;
  }

  std::vector<std::vector<double>> result;
  result.reserve(rows.size());
  try {
    if (opt.mode == Mode::Fast) {
      std::vector<Signal> signals(rows.begin(), rows.end());
      for (const auto& s : batch_transform(signals, opt.direction))
        result.emplace_back(s.begin(), s.end());
    } else {
      for (auto& r : rows) {
        if (opt.direction == Direction::Forward) {
          const Spectrum y = naive_dht(Signal(std::move(r)));
          result.emplace_back(y.begin(), y.end());
        } else {
          const Signal y = inverse_dht(Spectrum(std::move(r)));
          result.emplace_back(y.begin(), y.end());
        }
      }
    }
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  if (opt.output) {
    std::ofstream file(*opt.output);
    if (!file) {
      err << "error: cannot write " << *opt.output << '\n';
      return kExitFailure;
    }
    write_signals(file, result, format);
  } else {
    write_signals(out, result, format);
  }

  if (opt.counts && opt.mode == Mode::Fast) {
    const OpCount ops = KernelRegistry::instance().at(n).ops;
    err << "N=" << n << " per transform: " << ops.multiplications << " multiplications ("
        << ops.rational_multiplications << " rational), " << ops.additions << " additions; "
        << result.size() << " transforms\n";
  }
  return kExitOk;
}

/// One row of a verification or counts audit.
struct AuditRecord {
  std::size_t blocklength = 0;
  OpCount ops;
  ComplexityTarget target{};
  VerificationReport report;
  bool multiplications_within_budget = false;
  bool additions_within_budget = false;
  bool passed = false;
};

inline AuditRecord audit(const LayeredFactorization& f, std::size_t n, double tol) {
  AuditRecord rec;
  rec.blocklength = n;
  rec.target = complexity_target(n);
  rec.report = verify(f, n, tol);
  rec.ops = rec.report.ops;
  rec.multiplications_within_budget = rec.ops.multiplications <= rec.target.multiplication_budget;
  if (rec.target.exact_additions)
    rec.additions_within_budget = rec.ops.additions == rec.target.claimed_additions;
  else
    rec.additions_within_budget = rec.ops.additions <= rec.target.addition_budget;
  rec.passed = rec.report.passed && within_budget(rec.ops, rec.target);
  return rec;
}

inline nlohmann::json to_json(const AuditRecord& r) {
  return {{"N", r.blocklength},
          {"multiplications", r.ops.multiplications},
          {"rational_multiplications", r.ops.rational_multiplications},
          {"additions", r.ops.additions},
          {"claimed_mul", r.target.claimed_multiplications},
          {"claimed_add", r.target.claimed_additions},
          {"mul_budget", r.target.multiplication_budget},
          {"add_budget", r.target.addition_budget},
          {"dense_error", r.report.dense_error},
          {"oracle_error", r.report.oracle_error},
          {"tolerance", r.report.tolerance},
          {"excess_mul", r.ops.multiplications > r.target.claimed_multiplications},
          {"excess_add", r.ops.additions > r.target.claimed_additions},
          {"pass", r.passed}};
}

inline nlohmann::json audit_report_json(const std::vector<AuditRecord>& records) {
  nlohmann::json rows = nlohmann::json::array();
  bool all = true;
  for (const auto& r : records) {
    rows.push_back(to_json(r));
    all = all && r.passed;
  }
  return {{"records", std::move(rows)}, {"pass", all}};
}

namespace detail {

inline std::string sci(double x) {
  std::ostringstream s;
  s << std::scientific << std::setprecision(2) << x;
  return s.str();
}

}  // namespace detail

inline void print_audit_table(std::ostream& out, const std::vector<AuditRecord>& records) {
  out << std::left << std::setw(4) << "N" << std::right << std::setw(5) << "mul" << std::setw(7)
      << "claim" << std::setw(6) << "rat" << std::setw(6) << "add" << std::setw(7) << "claim"
      << std::setw(8) << "budget" << std::setw(12) << "dense_err" << std::setw(12) << "oracle_err"
      << "  result\n";
  for (const auto& r : records) {
    out << std::left << std::setw(4) << r.blocklength << std::right << std::setw(5)
        << r.ops.multiplications << std::setw(7) << r.target.claimed_multiplications
        << std::setw(6) << r.ops.rational_multiplications << std::setw(6) << r.ops.additions
        << std::setw(7) << r.target.claimed_additions << std::setw(8)
        << (std::to_string(r.target.multiplication_budget) + "/" +
            std::to_string(r.target.addition_budget))
        << std::setw(12) << detail::sci(r.report.dense_error) << std::setw(12)
        << detail::sci(r.report.oracle_error) << "  " << (r.passed ? "PASS" : "FAIL");
    if (!r.report.passed) out << " (error above tolerance " << detail::sci(r.report.tolerance) << ")";
    if (!r.multiplications_within_budget) out << " (multiplications over budget)";
    if (!r.additions_within_budget) out << " (additions off target)";
    out << '\n';
  }
}

struct VerifyOptions {
  std::optional<std::size_t> n;
  bool all = false;
  double tol = 1e-12;
  bool json = false;
  /// Verify a factorization read from this JSON file instead of the built-in one.
  std::optional<std::string> factorization;
};

inline int cmd_verify(const VerifyOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.all == opt.n.has_value()) {
    err << "error: give either a length N or --all\n";
    return kExitUsage;
  }
  if (opt.n && !KernelRegistry::instance().supports(*opt.n)) {
    err << "error: unsupported length " << *opt.n << "; supported lengths: "
        << supported_lengths_text() << '\n';
    return kExitUsage;
  }
  if (opt.factorization && opt.all) {
    err << "error: --factorization needs a single length N\n";
    return kExitUsage;
  }

  std::vector<AuditRecord> records;
  if (opt.all) {
    for (std::size_t n : kSupportedLengths)
      records.push_back(audit(KernelRegistry::instance().at(n).factorization, n, opt.tol));
  } else if (opt.factorization) {
    try {
      std::ifstream in(*opt.factorization);
      if (!in) throw InputError("cannot open " + *opt.factorization);
      records.push_back(audit(factorization_from_json(nlohmann::json::parse(in)), *opt.n, opt.tol));
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitFailure;
    }
  } else {
    records.push_back(audit(KernelRegistry::instance().at(*opt.n).factorization, *opt.n, opt.tol));
  }

  if (opt.json)
    out << audit_report_json(records).dump(2) << '\n';
  else
    print_audit_table(out, records);
  const bool all_pass =
      std::all_of(records.begin(), records.end(), [](const AuditRecord& r) { return r.passed; });
  return all_pass ? kExitOk : kExitFailure;
}

struct CountsOptions {
  bool json = false;
};

/// Achieved against claimed counts for every built-in kernel. Always exits 0.
inline int cmd_counts(const CountsOptions& opt, std::ostream& out) {
  std::vector<AuditRecord> records;
  for (std::size_t n : kSupportedLengths)
    records.push_back(audit(KernelRegistry::instance().at(n).factorization, n, 1e-12));
  if (opt.json) {
    out << audit_report_json(records).dump(2) << '\n';
    return kExitOk;
  }
  out << std::left << std::setw(4) << "N" << std::right << std::setw(8) << "mu" << std::setw(9)
      << "claimed" << std::setw(10) << "rational" << std::setw(8) << "alpha" << std::setw(9)
      << "claimed" << "  flags\n";
  for (const auto& r : records) {
    out << std::left << std::setw(4) << r.blocklength << std::right << std::setw(8)
        << r.ops.multiplications << std::setw(9) << r.target.claimed_multiplications
        << std::setw(10) << r.ops.rational_multiplications << std::setw(8) << r.ops.additions
        << std::setw(9) << r.target.claimed_additions << "  ";
    std::string flags;
    auto flag = [&flags](const std::string& text) { flags += (flags.empty() ? "" : ", ") + text; };
    if (r.ops.multiplications > r.target.claimed_multiplications)
      flag("excess mu +" + std::to_string(r.ops.multiplications - r.target.claimed_multiplications));
    if (r.ops.additions > r.target.claimed_additions)
      flag("excess alpha +" + std::to_string(r.ops.additions - r.target.claimed_additions));
    out << (flags.empty() ? "-" : flags) << '\n';
  }
  return kExitOk;
}

struct BenchOptions {
  std::optional<std::size_t> n;
  bool all = false;
  std::size_t iters = 20;
  std::uint64_t seed = 1;
  bool json = false;
  std::size_t batch = 256;
};

struct BenchRecord {
  std::size_t blocklength = 0;
  double fast_ns = 0.0;
  double naive_ns = 0.0;
  std::size_t naive_multiplications = 0;
  std::size_t naive_additions = 0;
  OpCount fast_ops;
  /// Sum of all fast outputs over the batch; fixed for a fixed seed.
  double checksum = 0.0;
};

namespace detail {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class F>
double median_ns_per_call(std::size_t iters, std::size_t calls, F&& body) {
  std::vector<double> samples;
  for (std::size_t i = 0; i < iters; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    body();
    const auto t1 = std::chrono::steady_clock::now();
    samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count() /
                      static_cast<double>(calls));
  }
  return median(std::move(samples));
}

}  // namespace detail

inline BenchRecord bench_one(std::size_t n, std::size_t iters, std::uint64_t seed,
                             std::size_t batch) {
  const FastKernel& kernel = KernelRegistry::instance().at(n);
  std::vector<Signal> inputs;
  for (auto& v : random_vectors(batch, n, seed)) inputs.emplace_back(std::move(v));

  BenchRecord rec;
  rec.blocklength = n;
  rec.fast_ops = kernel.ops;
  rec.naive_multiplications = n * n;
  rec.naive_additions = n * (n - 1);
  double sink = 0.0;
  rec.fast_ns = detail::median_ns_per_call(iters, batch, [&] {
    for (const auto& s : inputs) sink += kernel(s.values())[0];
  });
  rec.naive_ns = detail::median_ns_per_call(iters, batch, [&] {
    for (const auto& s : inputs) sink += naive_dht(s)[0];
  });
  for (const auto& s : inputs)
    for (double y : kernel(s.values())) rec.checksum += y;
  [[maybe_unused]] static volatile double keep;  // keeps the timed loops from being elided
  keep = sink;
  return rec;
}

inline int cmd_bench(const BenchOptions& opt, std::ostream& out, std::ostream& err) {
  if (opt.all == opt.n.has_value()) {
    err << "error: give either a length N or --all\n";
    return kExitUsage;
  }
  if (opt.iters < 1) {
    err << "error: --iters must be at least 1\n";
    return kExitUsage;
  }
  if (opt.n && !KernelRegistry::instance().supports(*opt.n)) {
    err << "error: unsupported length " << *opt.n << "; supported lengths: "
        << supported_lengths_text() << '\n';
    return kExitUsage;
  }

  std::vector<std::size_t> lengths;
  if (opt.all)
    lengths.assign(kSupportedLengths.begin(), kSupportedLengths.end());
  else
    lengths.push_back(*opt.n);

  nlohmann::json rows = nlohmann::json::array();
  if (!opt.json) {
    out << "seed " << opt.seed << ", " << opt.iters << " iterations of " << opt.batch
        << " transforms, median ns per transform\n";
    out << std::left << std::setw(4) << "N" << std::right << std::setw(10) << "fast_ns"
        << std::setw(10) << "naive_ns" << std::setw(10) << "fast_mul" << std::setw(11)
        << "naive_mul" << std::setw(10) << "fast_add" << std::setw(11) << "naive_add"
        << "  checksum\n";
  }
  for (std::size_t n : lengths) {
    const BenchRecord r = bench_one(n, opt.iters, opt.seed, opt.batch);
    if (opt.json) {
      rows.push_back({{"N", n},
                      {"fast_ns", r.fast_ns},
                      {"naive_ns", r.naive_ns},
                      {"fast_multiplications", r.fast_ops.multiplications},
                      {"naive_multiplications", r.naive_multiplications},
                      {"fast_additions", r.fast_ops.additions},
                      {"naive_additions", r.naive_additions},
                      {"checksum", r.checksum}});
      continue;
    }
    out << std::left << std::setw(4) << n << std::right << std::fixed << std::setprecision(1)
        << std::setw(10) << r.fast_ns << std::setw(10) << r.naive_ns << std::setw(10)
        << r.fast_ops.multiplications << std::setw(11) << r.naive_multiplications << std::setw(10)
        << r.fast_ops.additions << std::setw(11) << r.naive_additions << "  "
        << format_number(r.checksum) << '\n';
    out.unsetf(std::ios::floatfield);
  }
  if (opt.json)
    out << nlohmann::json{{"seed", opt.seed}, {"iters", opt.iters}, {"records", rows}}.dump(2)
        << '\n';
  return kExitOk;
}

}  // namespace fdht::cli
