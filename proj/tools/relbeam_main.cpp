#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <relbeam/beam.hpp>
#include <relbeam/config.hpp>
#include <relbeam/errors.hpp>
#include <relbeam/experiments.hpp>
#include <relbeam/report.hpp>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

/// Options shared by every subcommand; seed is absent on `exact`, which
/// consumes no randomness.
struct SubArgs {
  std::string config_path;
  std::string out_path;
  std::string format = "json";
  std::uint64_t seed_value = 0;
  CLI::Option* seed_option = nullptr;

  std::optional<std::string> out() const {
    return out_path.empty() ? std::nullopt
                            : std::optional<std::string>(out_path);
  }
  std::optional<std::uint64_t> seed() const {
    return seed_option != nullptr && seed_option->count() > 0
               ? std::optional<std::uint64_t>(seed_value)
               : std::nullopt;
  }
};

void attach_common(CLI::App* sub, SubArgs& args, bool with_seed,
                   bool with_csv) {
  sub->add_option("--config", args.config_path, "JSON configuration file")
      ->required();
  sub->add_option("--out", args.out_path,
                  "output file (written atomically); omit for stdout");
  sub->add_option("--format", args.format,
                  with_csv ? "report format" : "report format (json only)")
      ->check(CLI::IsMember(with_csv
                                ? std::vector<std::string>{"json", "csv"}
                                : std::vector<std::string>{"json"}));
  if (with_seed) {
    args.seed_option = sub->add_option(
        "--seed", args.seed_value,
        "master seed; overrides the config file's \"seed\"");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw relbeam::ConfigError("cannot read config file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void run_exact(const SubArgs& args) {
  const relbeam::ExactConfig config =
      relbeam::parse_exact_config(read_file(args.config_path));
  const relbeam::ExactReport report = relbeam::exact_report(config.instance);
  relbeam::write_output(
      args.out(),
      relbeam::render_json(relbeam::exact_json(config.instance, report)));
}

void run_simulate(const SubArgs& args) {
  const relbeam::SimulateConfig config =
      relbeam::parse_simulate_config(read_file(args.config_path), args.seed());
  const relbeam::Pipeline pipeline =
      relbeam::instance_pipeline(config.kind, config.instance);
  const relbeam::FrequencyTable table = relbeam::run(
      pipeline, config.n, config.seed,
      relbeam::RunOptions{config.emission_cap});
  const relbeam::Estimates estimates = relbeam::estimate(table);
  relbeam::write_output(
      args.out(),
      relbeam::render_json(relbeam::simulate_json(config, table, estimates)));
}

void run_scan(const SubArgs& args) {
  const relbeam::ScanConfig config =
      relbeam::parse_scan_config(read_file(args.config_path), args.seed());
  const relbeam::ScanReport report = relbeam::scan_equivalence(config);
  if (args.format == "csv") {
    relbeam::write_output(args.out(), relbeam::scan_csv(report));
  } else {
    relbeam::write_output(args.out(),
                          relbeam::render_json(relbeam::scan_json(report)));
  }
}

void run_violate(const SubArgs& args) {
  const relbeam::ViolateConfig config =
      relbeam::parse_violate_config(read_file(args.config_path), args.seed());
  const relbeam::ViolationReport report = relbeam::find_ltp_violation(
      config.dim, config.budget, config.seed, config.options);
  relbeam::write_output(args.out(),
                        relbeam::render_json(relbeam::violate_json(report)));
}

void run_convergence(const SubArgs& args) {
  const relbeam::ConvergenceConfig config = relbeam::parse_convergence_config(
      read_file(args.config_path), args.seed());
  const relbeam::ConvergenceTable table = relbeam::convergence_study(
      config.kind, config.instance, config.n_list, config.seed);
  if (args.format == "csv") {
    relbeam::write_output(args.out(), relbeam::convergence_csv(table));
  } else {
    relbeam::write_output(
        args.out(), relbeam::render_json(relbeam::convergence_json(table)));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Relevance-boost probabilities for classical and quantum particle "
      "beams: exact evaluation, beam simulation, equivalence scans, and "
      "total-probability checks"};
  app.require_subcommand(1);

  CLI::App* exact = app.add_subcommand(
      "exact", "evaluate r, p, q, x, the boost verdicts, and the "
               "total-probability residual for one instance");
  CLI::App* simulate = app.add_subcommand(
      "simulate", "run a standard experiment and compare the frequency "
                  "estimates against the exact values");
  CLI::App* scan = app.add_subcommand(
      "scan", "classify sign(x - r) versus sign(p - q) over random instances");
  CLI::App* violate = app.add_subcommand(
      "violate", "search for instances with a large total-probability "
                 "residual");
  CLI::App* convergence = app.add_subcommand(
      "convergence", "track one experiment's estimate against its exact "
                     "value as the run length grows");

  SubArgs exact_args, simulate_args, scan_args, violate_args,
      convergence_args;
  attach_common(exact, exact_args, false, false);
  attach_common(simulate, simulate_args, true, false);
  attach_common(scan, scan_args, true, true);
  attach_common(violate, violate_args, true, false);
  attach_common(convergence, convergence_args, true, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (exact->parsed()) run_exact(exact_args);
    if (simulate->parsed()) run_simulate(simulate_args);
    if (scan->parsed()) run_scan(scan_args);
    if (violate->parsed()) run_violate(violate_args);
    if (convergence->parsed()) run_convergence(convergence_args);
    return kExitOk;
  } catch (const relbeam::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
}
