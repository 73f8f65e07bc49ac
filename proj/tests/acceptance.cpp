// One line per acceptance criterion; exit status is nonzero if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "fdht/fdht.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
constexpr std::size_t kLengths[] = {3, 5, 6, 12, 24};

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok) { pass = pass && ok; }
};

int failures = 0;

void report(int id, const char* title, Outcome& o) {
  if (!o.pass) ++failures;
  std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << id << ": " << title << " -- "
            << o.detail.str() << std::endl;
}

template <class F>
void criterion(int id, const char* title, F body) {
  Outcome o;
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  report(id, title, o);
}

std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", x);
  return buf;
}

const fdht::FastKernel& kernel(std::size_t n) { return fdht::KernelRegistry::instance().at(n); }

int run_cli(const std::string& args) {
  const auto log = fs::path(FDHT_SCRATCH_DIR) / "acceptance_cli.log";
  const std::string cmd =
      std::string("\"") + FDHT_CLI_PATH + "\" " + args + " >>\"" + log.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::vector<std::vector<double>> read_file(const fs::path& p) {
  std::ifstream in(p);
  return fdht::cli::read_signals(in, fdht::cli::format_for_path(p.string()));
}

}  // namespace

int main() {
  criterion(1, "fast_dht matches naive_dht on 1000 random signals per length", [](Outcome& o) {
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t n : kLengths) {
      double worst = 0.0;
      for (const auto& v : fdht::random_vectors(1000, n, 0xacce55 + n)) {
        const fdht::Signal s(v);
        worst = std::max(worst, fdht::max_abs_diff(fdht::fast_dht(s).values(),
                                                   fdht::naive_dht(s).values()));
      }
      o.require(worst <= 1e-12);
      o.detail << "N=" << n << " " << sci(worst) << "; ";
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    o.require(took.count() < 60.0);
    o.detail << "tol 1e-12, " << took.count() << " s";
  });

  criterion(2, "dense reconstruction equals the Hartley matrix", [](Outcome& o) {
    for (std::size_t n : kLengths) {
      const double err =
          fdht::max_abs_diff(fdht::reconstruct_dense(kernel(n).factorization), oracle::hartley(n));
      o.require(err <= 1e-12);
      o.detail << "N=" << n << " " << sci(err) << "; ";
    }
    o.detail << "tol 1e-12";
  });

  criterion(3, "nontrivial multiplications 1/2/4/12 for N=3/6/12/24, at most 4 for N=5",
            [](Outcome& o) {
              const std::pair<std::size_t, std::size_t> exact[] = {{3, 1}, {6, 2}, {12, 4}, {24, 12}};
              for (auto [n, mu] : exact) {
                const auto m = kernel(n).ops.multiplications;
                o.require(m == mu);
                o.detail << "N=" << n << " " << m << "/" << mu << "; ";
              }
              const auto ops5 = kernel(5).ops;
              o.require(ops5.multiplications <= 4);
              const auto literal = fdht::count_ops(fdht::unscaled_chain_5());
              const bool literal_ok = fdht::verify(fdht::unscaled_chain_5(), 5, 1e-12).passed;
              o.detail << "N=5 kernel " << ops5.multiplications << " ("
                       << ops5.rational_multiplications << " rational, "
                       << ops5.multiplications - ops5.rational_multiplications
                       << " irrational) against at most 4, claimed 3; unscaled chain "
                       << literal.multiplications << " but "
                       << (literal_ok ? "verifies" : "is not a DHT");
            });

  criterion(4, "additions 7/17/20 exactly, at most 57 and 152 for N=12/24", [](Outcome& o) {
    for (std::size_t n : kLengths) {
      const auto& t = fdht::complexity_target(n);
      const auto a = kernel(n).ops.additions;
      const bool ok = t.exact_additions ? a == t.claimed_additions : a <= t.addition_budget;
      o.require(ok);
      o.detail << "N=" << n << " " << a << (t.exact_additions ? "==" : "<=")
               << (t.exact_additions ? t.claimed_additions : t.addition_budget) << "; ";
    }
    std::ostringstream table;
    o.require(fdht::cli::cmd_counts({}, table) == 0);
    for (std::size_t n : kLengths)
      o.require(table.str().find(" " + std::to_string(kernel(n).ops.additions) + " ") !=
                std::string::npos);
    o.detail << "printed by counts";
  });

  criterion(5, "applying fast_dht twice gives N times the input", [](Outcome& o) {
    for (std::size_t n : kLengths) {
      double worst = 0.0;
      for (const auto& v : fdht::random_vectors(100, n, 0x1dea + n)) {
        const auto twice = fdht::fast_dht(fdht::Signal(fdht::fast_dht(fdht::Signal(v)).values()));
        for (std::size_t i = 0; i < n; ++i)
          worst = std::max(worst, std::abs(twice[i] - static_cast<double>(n) * v[i]));
      }
      o.require(worst <= 1e-10);
      o.detail << "N=" << n << " " << sci(worst) << "; ";
    }
    o.detail << "tol 1e-10";
  });

  criterion(6, "half-shift sign rule and exact Had2 x I split for even N up to 64",
            [](Outcome& o) {
              double worst = 0.0;
              bool exact = true;
              for (std::size_t n = 2; n <= 64; n += 2) {
                const auto h = fdht::hartley_matrix(n);
                const std::size_t half = n / 2;
                for (std::size_t k = 0; k < n; ++k)
                  for (std::size_t i = 0; i < half; ++i) {
                    const double sign = k % 2 ? -1.0 : 1.0;
                    worst = std::max(worst, std::abs(h(k, i + half) - sign * h(k, i)));
                  }
                std::vector<fdht::Entry> had;
                for (std::size_t i = 0; i < half; ++i) {
                  had.push_back({i, i, 1.0});
                  had.push_back({i, i + half, 1.0});
                  had.push_back({i + half, i, 1.0});
                  had.push_back({i + half, i + half, -1.0});
                }
                exact = exact && fdht::pass_hadamard_split(h).a1 ==
                                     fdht::SparseRealMatrix(n, n, std::move(had));
              }
              o.require(worst <= 1e-12 && exact);
              o.detail << "max deviation " << sci(worst) << ", A1 "
                       << (exact ? "exact" : "differs");
            });

  criterion(7, "fast_dft matches direct DFT summation; dht/dft round trip", [](Outcome& o) {
    double dft_err = 0.0, trip_err = 0.0;
    for (std::size_t n : kLengths) {
      for (const auto& v : fdht::random_vectors(100, n, 0xdf7 + n)) {
        const auto f = fdht::fast_dft(fdht::Signal(v));
        const auto direct = oracle::dft(v);
        for (std::size_t k = 0; k < n; ++k) dft_err = std::max(dft_err, std::abs(f[k] - direct[k]));
        const auto h = fdht::fast_dht(fdht::Signal(v));
        const auto back = fdht::dft_to_dht(fdht::dht_to_dft(h));
        trip_err = std::max(trip_err, fdht::max_abs_diff(back.values(), h.values()));
      }
    }
    o.require(dft_err <= 1e-11 && trip_err <= 1e-12);
    o.detail << "dft " << sci(dft_err) << " (tol 1e-11), round trip " << sci(trip_err)
             << " (tol 1e-12)";
  });

  criterion(8, "straight-line programs: tallies equal counts, outputs match evaluation",
            [](Outcome& o) {
              double worst = 0.0;
              for (std::size_t n : kLengths) {
                const auto& k = kernel(n);
                const auto program = fdht::emit_slp(k.factorization);
                o.require(program.tally() == fdht::count_ops(k.factorization));
                for (const auto& v : fdht::random_vectors(100, n, 0x51b + n))
                  worst = std::max(worst, fdht::max_abs_diff(fdht::run_slp(program, v),
                                                             fdht::evaluate(k.factorization, v)));
              }
              o.require(worst <= 1e-13);
              o.detail << "tallies equal, max output gap " << sci(worst) << " (tol 1e-13)";
            });

  criterion(9, "integer peel, column combine, diagonal split on H3", [](Outcome& o) {
    const auto peel = fdht::pass_integer_peel(fdht::hartley_matrix(3));
    const auto comb = fdht::pass_column_combine(peel.balanced);
    const auto diag = fdht::pass_diagonal_split(comb.reduced);
    const fdht::LayeredFactorization f(
        3, 3,
        {fdht::Stage({diag.post_additions, diag.multipliers, comb.butterflies}, peel.layer)});
    const auto ops = fdht::count_ops(f);
    const auto r = fdht::verify(f, 3, 1e-12);
    o.require(ops.multiplications == 1 && ops.additions == 7 && r.passed);
    o.detail << "{" << ops.multiplications << "," << ops.additions << "}, dense error "
             << sci(r.dense_error);
  });

  criterion(10, "CLI verify --all and file round trips", [](Outcome& o) {
    const int verify_status = run_cli("verify --all --tol 1e-12");
    o.require(verify_status == 0);
    o.detail << "verify --all exit " << verify_status << "; ";
    for (const char* name : {"signals.csv", "signals.json"}) {
      const fs::path in = fs::path(FDHT_TEST_DATA) / name;
      const std::string ext = in.extension().string();
      const fs::path mid = fs::path(FDHT_SCRATCH_DIR) / ("acceptance_mid" + ext);
      const fs::path back = fs::path(FDHT_SCRATCH_DIR) / ("acceptance_back" + ext);
      const int a = run_cli("transform --input \"" + in.string() + "\" --output \"" +
                            mid.string() + "\"");
      const int b = run_cli("transform --direction inverse --input \"" + mid.string() +
                            "\" --output \"" + back.string() + "\"");
      const auto orig = read_file(in);
      const auto got = read_file(back);
      double worst = orig.size() == got.size() ? 0.0 : 1.0;
      for (std::size_t r = 0; r < std::min(orig.size(), got.size()); ++r)
        worst = std::max(worst, fdht::max_abs_diff(orig[r], got[r]));
      o.require(a == 0 && b == 0 && worst <= 1e-12);
      o.detail << ext.substr(1) << " round trip " << sci(worst) << "; ";
    }
    o.detail << "tol 1e-12";
  });

  std::cout << (failures ? std::to_string(failures) + " of 10 criteria failed"
                         : std::string("all 10 criteria passed"))
            << std::endl;
  return failures ? 1 : 0;
}
