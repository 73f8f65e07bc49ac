#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"

#include "commands.hpp"

namespace cli = fdht::cli;

int main(int argc, char** argv) {
  CLI::App app{"Fast discrete Hartley transforms of lengths 3, 5, 6, 12 and 24"};
  app.require_subcommand(1);

  const std::map<std::string, fdht::Direction> directions{{"forward", fdht::Direction::Forward},
                                                          {"inverse", fdht::Direction::Inverse}};
  const std::map<std::string, cli::Mode> modes{{"fast", cli::Mode::Fast},
                                               {"naive", cli::Mode::Naive}};
  const std::map<std::string, cli::FileFormat> formats{{"csv", cli::FileFormat::Csv},
                                                       {"json", cli::FileFormat::Json}};

  cli::TransformOptions topt;
  cli::FileFormat tformat = cli::FileFormat::Csv;
  std::string toutput;
  auto* transform = app.add_subcommand("transform", "Transform the signals in a CSV or JSON file");
  transform->add_option("--input", topt.input, "Signal file")->required()->check(CLI::ExistingFile);
  auto* out_opt = transform->add_option("--output", toutput, "Result file (default: stdout)");
  transform->add_option("--direction", topt.direction, "forward or inverse")
      ->transform(CLI::CheckedTransformer(directions, CLI::ignore_case));
  transform->add_option("--mode", topt.mode, "fast or naive")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  auto* fmt_opt = transform->add_option("--format", tformat, "csv or json (default: by extension)")
                      ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
  transform->add_flag("--counts", topt.counts, "Report operation counts of the fast kernel");

  cli::VerifyOptions vopt;
  std::size_t vn = 0;
  std::string vfact;
  auto* verify = app.add_subcommand("verify", "Check built-in factorizations against the DHT");
  auto* vn_opt = verify->add_option("N", vn, "Transform length");
  verify->add_flag("--all", vopt.all, "Check every built-in length");
  verify->add_option("--tol", vopt.tol, "Error tolerance")->check(CLI::NonNegativeNumber);
  verify->add_flag("--json", vopt.json, "JSON report");
  auto* vfact_opt =
      verify->add_option("--factorization", vfact, "Check a factorization stored as JSON")
          ->check(CLI::ExistingFile);

  cli::CountsOptions copt;
  auto* counts = app.add_subcommand("counts", "Compare achieved operation counts with the claimed ones");
  counts->add_flag("--json", copt.json, "JSON report");

  cli::BenchOptions bopt;
  std::size_t bn = 0;
  auto* bench = app.add_subcommand("bench", "Time fast against naive transforms");
  auto* bn_opt = bench->add_option("N", bn, "Transform length");
  bench->add_flag("--all", bopt.all, "Benchmark every built-in length");
  bench->add_option("--iters", bopt.iters, "Timed iterations")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bopt.seed, "Seed for the random inputs");
  bench->add_flag("--json", bopt.json, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (transform->parsed()) {
    if (*out_opt) topt.output = toutput;
    if (*fmt_opt) topt.format = tformat;
    return cli::cmd_transform(topt, std::cout, std::cerr);
  }
  if (verify->parsed()) {
    if (*vn_opt) vopt.n = vn;
    if (*vfact_opt) vopt.factorization = vfact;
    return cli::cmd_verify(vopt, std::cout, std::cerr);
  }
  if (counts->parsed()) return cli::cmd_counts(copt, std::cout);
  if (*bn_opt) bopt.n = bn;
  return cli::cmd_bench(bopt, std::cout, std::cerr);
}
