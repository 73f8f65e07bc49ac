#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "commands.hpp"
#include "json.hpp"
#include "oracles.hpp"

namespace {

namespace fs = std::filesystem;
namespace cli = fdht::cli;
using Rows = std::vector<std::vector<double>>;

const fs::path kData = FDHT_TEST_DATA;
const fs::path kScratch = fs::path(FDHT_SCRATCH_DIR) / "cli_scratch";

std::string data(const char* name) { return (kData / name).string(); }

fs::path scratch(const std::string& name) {
  fs::create_directories(kScratch);
  return kScratch / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Rows read_rows(const fs::path& p) {
  std::ifstream in(p);
  return cli::read_signals(in, cli::format_for_path(p.string()));
}

Rows parse_rows(const std::string& text, cli::FileFormat format) {
  std::istringstream in(text);
  return cli::read_signals(in, format);
}

double max_diff(const Rows& a, const Rows& b) {
  EXPECT_EQ(a.size(), b.size());
  double worst = 0.0;
  for (std::size_t r = 0; r < std::min(a.size(), b.size()); ++r) {
    EXPECT_EQ(a[r].size(), b[r].size());
    worst = std::max(worst, fdht::max_abs_diff(a[r], b[r]));
  }
  return worst;
}

struct Run {
  int status;
  std::string out;
  std::string err;
};

// Runs the installed binary; stdout and stderr go through files.
Run run(const std::string& args) {
  static int counter = 0;
  const auto out = scratch("out" + std::to_string(counter) + ".txt");
  const auto err = scratch("err" + std::to_string(counter) + ".txt");
  ++counter;
  const std::string cmd = std::string("\"") + FDHT_CLI_PATH + "\" " + args + " >\"" +
                          out.string() + "\" 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  return {WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(out), slurp(err)};
}

cli::TransformOptions transform_opts(std::string input) {
  cli::TransformOptions o;
  o.input = std::move(input);
  return o;
}

// ---------------------------------------------------------------------------
// Number formatting and parsing
// ---------------------------------------------------------------------------

TEST(Format, ShortestRoundTrip) {
  EXPECT_EQ(cli::format_number(6.0), "6");
  EXPECT_EQ(cli::format_number(0.1), "0.1");
  EXPECT_EQ(cli::format_number(-2.5e-300), "-2.5e-300");
  for (const auto& v : fdht::random_vectors(1, 500, 4)) {
    for (double x : v) {
      const std::string s = cli::format_number(x);
      EXPECT_LE(s.size(), 25u);
      EXPECT_EQ(std::stod(s), x);
    }
  }
}

TEST(Format, ExtensionPicksFormat) {
  EXPECT_EQ(cli::format_for_path("a/b.json"), cli::FileFormat::Json);
  EXPECT_EQ(cli::format_for_path("a.csv"), cli::FileFormat::Csv);
  EXPECT_EQ(cli::format_for_path("noext"), cli::FileFormat::Csv);
}

TEST(Parse, CsvSkipsBlankLines) {
  const auto rows = read_rows(data("signals.csv"));
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[1], (std::vector<double>{0.5, -0.25, 0.125, 1e-3, -7}));
  EXPECT_EQ(rows[2][3], 0.3333333333333333);
}

TEST(Parse, JsonArrays) {
  const auto rows = read_rows(data("signals.json"));
  ASSERT_EQ(rows.size(), 3u);
  for (const auto& r : rows) EXPECT_EQ(r.size(), 12u);
}

TEST(Parse, Errors) {
  EXPECT_THROW(parse_rows("1,2,3\n4,5\n", cli::FileFormat::Csv), cli::InputError);
  EXPECT_THROW(parse_rows("1,x\n", cli::FileFormat::Csv), cli::InputError);
  EXPECT_THROW(parse_rows("1,,2\n", cli::FileFormat::Csv), cli::InputError);
  EXPECT_THROW(parse_rows("\n\n", cli::FileFormat::Csv), cli::InputError);
  EXPECT_THROW(parse_rows("[[1,2],[3]]", cli::FileFormat::Json), cli::InputError);
  EXPECT_THROW(parse_rows("{\"a\": 1}", cli::FileFormat::Json), cli::InputError);
  EXPECT_THROW(parse_rows("[[1, \"2\"]]", cli::FileFormat::Json), cli::InputError);
  EXPECT_THROW(parse_rows("[[1, 2]", cli::FileFormat::Json), cli::InputError);
  EXPECT_THROW(parse_rows("[]", cli::FileFormat::Json), cli::InputError);
}

TEST(Parse, MixedLengthMessage) {
  try {
    parse_rows("1,2,3\n4,5\n", cli::FileFormat::Csv);
    FAIL();
  } catch (const cli::InputError& e) {
    EXPECT_NE(std::string(e.what()).find("mixed signal lengths 3 and 2"), std::string::npos);
  }
}

TEST(Write, CsvAndJsonReparse) {
  const Rows rows{{1, -0.5, 1e-17}, {3.25, 0, -2}};
  for (auto f : {cli::FileFormat::Csv, cli::FileFormat::Json}) {
    std::ostringstream out;
    cli::write_signals(out, rows, f);
    EXPECT_EQ(parse_rows(out.str(), f), rows);
  }
  std::ostringstream csv;
  cli::write_signals(csv, rows, cli::FileFormat::Csv);
  EXPECT_EQ(csv.str(), "1,-0.5,1e-17\n3.25,0,-2\n");
}

// ---------------------------------------------------------------------------
// transform
// ---------------------------------------------------------------------------

TEST(Transform, ThreePointExample) {
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_transform(transform_opts(data("three.csv")), out, err), cli::kExitOk);
  const auto rows = parse_rows(out.str(), cli::FileFormat::Csv);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_LE(fdht::max_abs_diff(rows[0], std::vector<double>{6, -2.3660254037844386,
                                                            -0.6339745962155614}),
            1e-14);
  EXPECT_TRUE(err.str().empty());
}

TEST(Transform, NaiveExampleText) {
  auto opt = transform_opts(data("three.csv"));
  opt.mode = cli::Mode::Naive;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_transform(opt, out, err), cli::kExitOk);
  const std::string text = out.str();
  EXPECT_EQ(text.substr(0, 2), "6,");
  EXPECT_EQ(std::count(text.begin(), text.end(), ','), 2);
}

TEST(Transform, FastAndNaiveAgree) {
  for (const char* file : {"signals.csv", "signals.json", "three.csv"}) {
    auto fast = transform_opts(data(file));
    auto naive = fast;
    naive.mode = cli::Mode::Naive;
    const auto format = cli::format_for_path(file);
    for (auto dir : {fdht::Direction::Forward, fdht::Direction::Inverse}) {
      fast.direction = naive.direction = dir;
      std::ostringstream fo, no, err;
      ASSERT_EQ(cli::cmd_transform(fast, fo, err), cli::kExitOk) << err.str();
      ASSERT_EQ(cli::cmd_transform(naive, no, err), cli::kExitOk) << err.str();
      EXPECT_LE(max_diff(parse_rows(fo.str(), format), parse_rows(no.str(), format)), 1e-12)
          << file;
    }
  }
}

TEST(Transform, ForwardMatchesOracle) {
  const auto input = read_rows(data("signals.json"));
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_transform(transform_opts(data("signals.json")), out, err), cli::kExitOk);
  const auto rows = parse_rows(out.str(), cli::FileFormat::Json);
  ASSERT_EQ(rows.size(), input.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    EXPECT_LE(fdht::max_abs_diff(rows[r], oracle::dht(input[r])), 1e-12);
}

TEST(Transform, FileRoundTripBothFormats) {
  for (const char* file : {"signals.csv", "signals.json"}) {
    const std::string ext = fs::path(file).extension().string();
    const auto spectrum = scratch(std::string("spectrum") + ext);
    const auto back = scratch(std::string("back") + ext);
    std::ostringstream out, err;

    auto fwd = transform_opts(data(file));
    fwd.output = spectrum.string();
    ASSERT_EQ(cli::cmd_transform(fwd, out, err), cli::kExitOk) << err.str();

    auto inv = transform_opts(spectrum.string());
    inv.output = back.string();
    inv.direction = fdht::Direction::Inverse;
    ASSERT_EQ(cli::cmd_transform(inv, out, err), cli::kExitOk) << err.str();

    EXPECT_LE(max_diff(read_rows(back), read_rows(data(file))), 1e-12) << file;
    EXPECT_TRUE(out.str().empty());
  }
}

TEST(Transform, FormatOverride) {
  auto opt = transform_opts(data("three.csv"));
  opt.format = cli::FileFormat::Json;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_transform(opt, out, err), cli::kExitFailure);
  EXPECT_NE(err.str().find("error:"), std::string::npos);
}

TEST(Transform, UnsupportedLength) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_transform(transform_opts(data("length7.csv")), out, err), cli::kExitFailure);
  EXPECT_TRUE(out.str().empty());
  for (const char* n : {"7", "3", "5", "6", "12", "24"})
    EXPECT_NE(err.str().find(n), std::string::npos) << n;

  auto naive = transform_opts(data("length7.csv"));
  naive.mode = cli::Mode::Naive;
  std::ostringstream o2, e2;
  EXPECT_EQ(cli::cmd_transform(naive, o2, e2), cli::kExitOk);
  EXPECT_LE(fdht::max_abs_diff(parse_rows(o2.str(), cli::FileFormat::Csv)[0],
                               oracle::dht({1, 2, 3, 4, 5, 6, 7})),
            1e-12);
}

TEST(Transform, BadInputs) {
  for (const char* file : {"mixed.csv", "garbage.csv"}) {
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_transform(transform_opts(data(file)), out, err), cli::kExitFailure);
    EXPECT_NE(err.str().find(file), std::string::npos);
  }
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_transform(transform_opts(data("missing.csv")), out, err), cli::kExitFailure);
}

TEST(Transform, CountsGoToErrorStream) {
  auto opt = transform_opts(data("signals.csv"));
  opt.counts = true;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_transform(opt, out, err), cli::kExitOk);
  EXPECT_NE(err.str().find("5 multiplications (1 rational), 17 additions; 3 transforms"),
            std::string::npos);
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

TEST(Verify, SingleLength) {
  cli::VerifyOptions opt;
  opt.n = 3;
  opt.json = true;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_verify(opt, out, err), cli::kExitOk);
  const auto doc = nlohmann::json::parse(out.str());
  ASSERT_EQ(doc["records"].size(), 1u);
  const auto& r = doc["records"][0];
  EXPECT_EQ(r["N"], 3);
  EXPECT_EQ(r["multiplications"], 1);
  EXPECT_EQ(r["additions"], 7);
  EXPECT_LE(r["dense_error"].get<double>(), 1e-15);
  EXPECT_TRUE(r["pass"].get<bool>());
}

TEST(Verify, TinyToleranceFails) {
  cli::VerifyOptions opt;
  opt.n = 12;
  opt.tol = 1e-300;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(opt, out, err), cli::kExitFailure);
  EXPECT_NE(out.str().find("FAIL"), std::string::npos);
}

TEST(Verify, PerLengthOutcomes) {
  for (std::size_t n : {3, 6, 12, 24}) {
    cli::VerifyOptions opt;
    opt.n = n;
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_verify(opt, out, err), cli::kExitOk) << out.str();
  }
  // The 5-point kernel is numerically exact but over the multiplication budget.
  cli::VerifyOptions opt;
  opt.n = 5;
  opt.json = true;
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(opt, out, err), cli::kExitFailure);
  const auto r = nlohmann::json::parse(out.str())["records"][0];
  EXPECT_LE(r["dense_error"].get<double>(), 1e-12);
  EXPECT_LE(r["oracle_error"].get<double>(), 1e-12);
  EXPECT_EQ(r["multiplications"], 5);
  EXPECT_EQ(r["mul_budget"], 4);
  EXPECT_TRUE(r["excess_mul"].get<bool>());
  EXPECT_FALSE(r["excess_add"].get<bool>());
}

TEST(Verify, ExternalFactorization) {
  cli::VerifyOptions opt;
  opt.n = 3;
  opt.factorization = data("factorization3.json");
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify(opt, out, err), cli::kExitOk) << err.str();

  opt.n = 6;
  std::ostringstream o2, e2;
  EXPECT_EQ(cli::cmd_verify(opt, o2, e2), cli::kExitFailure);
}

TEST(Verify, UsageErrors) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_verify({}, out, err), cli::kExitUsage);
  cli::VerifyOptions both;
  both.n = 3;
  both.all = true;
  EXPECT_EQ(cli::cmd_verify(both, out, err), cli::kExitUsage);
  cli::VerifyOptions seven;
  seven.n = 7;
  EXPECT_EQ(cli::cmd_verify(seven, out, err), cli::kExitUsage);
  cli::VerifyOptions all_with_file;
  all_with_file.all = true;
  all_with_file.factorization = data("factorization3.json");
  EXPECT_EQ(cli::cmd_verify(all_with_file, out, err), cli::kExitUsage);
}

// ---------------------------------------------------------------------------
// counts
// ---------------------------------------------------------------------------

TEST(Counts, TableColumns) {
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_counts({}, out), cli::kExitOk);
  std::istringstream lines(out.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_NE(header.find("claimed"), std::string::npos);

  const std::size_t lengths[] = {3, 5, 6, 12, 24};
  const std::size_t mu[] = {1, 3, 2, 4, 12};
  const std::size_t alpha[] = {7, 17, 20, 52, 138};
  for (std::size_t i = 0; i < 5; ++i) {
    std::string line;
    ASSERT_TRUE(std::getline(lines, line));
    std::istringstream f(line);
    std::size_t n, mul, mul_claim, rational, add, add_claim;
    f >> n >> mul >> mul_claim >> rational >> add >> add_claim;
    EXPECT_EQ(n, lengths[i]);
    EXPECT_EQ(mul_claim, mu[i]);
    EXPECT_EQ(add_claim, alpha[i]);
    EXPECT_EQ(mul, fdht::KernelRegistry::instance().at(n).ops.multiplications);
    EXPECT_EQ(add, fdht::KernelRegistry::instance().at(n).ops.additions);
  }
  EXPECT_NE(out.str().find("excess mu +2"), std::string::npos);
}

TEST(Counts, Json) {
  std::ostringstream out;
  ASSERT_EQ(cli::cmd_counts({.json = true}, out), cli::kExitOk);
  const auto doc = nlohmann::json::parse(out.str());
  ASSERT_EQ(doc["records"].size(), 5u);
  EXPECT_EQ(doc["records"][4]["claimed_add"], 138);
  EXPECT_EQ(doc["records"][4]["add_budget"], 152);
  EXPECT_EQ(doc["records"][1]["rational_multiplications"], 1);
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

TEST(Bench, TheoreticalCounts) {
  cli::BenchOptions opt;
  opt.n = 24;
  opt.iters = 1;
  opt.batch = 8;
  opt.json = true;
  std::ostringstream out, err;
  ASSERT_EQ(cli::cmd_bench(opt, out, err), cli::kExitOk);
  const auto r = nlohmann::json::parse(out.str())["records"][0];
  EXPECT_EQ(r["naive_multiplications"], 576);
  EXPECT_EQ(r["fast_multiplications"], 12);
  EXPECT_GT(r["fast_ns"].get<double>(), 0.0);
}

TEST(Bench, FixedSeedIsDeterministic) {
  auto checksums = [](std::uint64_t seed) {
    cli::BenchOptions opt;
    opt.all = true;
    opt.iters = 2;
    opt.batch = 4;
    opt.seed = seed;
    opt.json = true;
    std::ostringstream out, err;
    EXPECT_EQ(cli::cmd_bench(opt, out, err), cli::kExitOk);
    std::vector<double> sums;
    const auto doc = nlohmann::json::parse(out.str());
    for (const auto& r : doc["records"])
      sums.push_back(r["checksum"].get<double>());
    return sums;
  };
  EXPECT_EQ(checksums(11), checksums(11));
  EXPECT_NE(checksums(11), checksums(12));
}

TEST(Bench, UsageErrors) {
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_bench({}, out, err), cli::kExitUsage);
  cli::BenchOptions zero;
  zero.n = 3;
  zero.iters = 0;
  EXPECT_EQ(cli::cmd_bench(zero, out, err), cli::kExitUsage);
  cli::BenchOptions seven;
  seven.n = 7;
  EXPECT_EQ(cli::cmd_bench(seven, out, err), cli::kExitUsage);
}

// ---------------------------------------------------------------------------
// The binary
// ---------------------------------------------------------------------------

TEST(Binary, TransformToStdout) {
  const auto r = run("transform --input \"" + data("three.csv") + "\"");
  EXPECT_EQ(r.status, 0) << r.err;
  const auto rows = parse_rows(r.out, cli::FileFormat::Csv);
  EXPECT_LE(fdht::max_abs_diff(rows.at(0), oracle::dht({1, 2, 3})), 1e-14);
}

TEST(Binary, RoundTripThroughFiles) {
  for (const char* file : {"signals.csv", "signals.json"}) {
    const std::string ext = fs::path(file).extension().string();
    const auto mid = scratch("bin_mid" + ext).string();
    const auto back = scratch("bin_back" + ext).string();
    EXPECT_EQ(run("transform --input \"" + data(file) + "\" --output \"" + mid + "\"").status, 0);
    EXPECT_EQ(run("transform --direction inverse --input \"" + mid + "\" --output \"" + back +
                  "\"")
                  .status,
              0);
    EXPECT_LE(max_diff(read_rows(back), read_rows(data(file))), 1e-12) << file;
  }
}

TEST(Binary, ExitCodes) {
  EXPECT_EQ(run("verify 3").status, 0);
  EXPECT_EQ(run("verify 3 --tol 1e-300").status, 1);
  EXPECT_EQ(run("transform --input \"" + data("length7.csv") + "\"").status, 1);
  EXPECT_EQ(run("transform --input \"" + data("mixed.csv") + "\"").status, 1);
  EXPECT_EQ(run("").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("transform").status, 2);
  EXPECT_EQ(run("transform --input \"" + data("three.csv") + "\" --mode slow").status, 2);
  EXPECT_EQ(run("transform --input \"" + data("nope.csv") + "\"").status, 2);
  EXPECT_EQ(run("verify").status, 2);
  EXPECT_EQ(run("verify 7").status, 2);
  EXPECT_EQ(run("verify 3 --tol -1").status, 2);
  EXPECT_EQ(run("bench 24 --iters 0").status, 2);
  EXPECT_EQ(run("bench").status, 2);
  EXPECT_EQ(run("counts").status, 0);
  EXPECT_EQ(run("--help").status, 0);
}

TEST(Binary, LengthSevenMessage) {
  const auto r = run("transform --input \"" + data("length7.csv") + "\"");
  EXPECT_NE(r.err.find("supported lengths: {3, 5, 6, 12, 24}"), std::string::npos) << r.err;
}

TEST(Binary, BenchSingleIteration) {
  const auto r = run("bench 24 --iters 1 --seed 5");
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_NE(r.out.find("576"), std::string::npos);
  const auto again = run("bench 24 --iters 1 --seed 5");
  // Same checksum column, timings aside.
  auto last_field = [](const std::string& s) {
    const auto line = s.substr(s.rfind('\n', s.size() - 2) + 1);
    return line.substr(line.rfind(' ') + 1);
  };
  EXPECT_EQ(last_field(r.out), last_field(again.out));
}

}  // namespace
