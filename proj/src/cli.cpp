#include "riskvest/cli.hpp"

#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "riskvest/io.hpp"
#include "riskvest/parallel.hpp"

namespace riskvest::cli {

namespace {

struct Config {
  std::string casePath;
  std::string sweepPath;
  double budget = 0.0;
  std::vector<double> budgets{5, 10, 15, 20, 25};
  double uncertainty = 0.0;
  std::vector<double> uncertainties{0, 0.05, 0.10, 0.15, 0.20, 0.25};
  int trials = 100;
  std::uint64_t seed = 0;
  int bins = kDefaultBins;
  double kappa = 1.0;
  int threads = 0;
  std::string outPath;
  std::string plotPath;
  std::string solveFormat = "json";
  std::string sweepFormat = "csv";
};

void emit(const Config& config, const std::string& text, std::ostream& out) {
  if (config.outPath.empty()) {
    out << text;
  } else {
    io::write_file(config.outPath, text);
  }
}

int threads_of(const Config& config) { return config.threads > 0 ? config.threads : default_threads(); }

int cmd_validate(const Config& config, std::ostream& out) {
  const auto validated = io::load_case(config.casePath);
  std::string text = "ok: " + std::to_string(validated.control_count()) + " controls, " +
                     std::to_string(validated.target_count()) + " targets, sigma " +
                     io::format_number(validated.study().sigma) + "\n";
  for (const auto& w : validated.warnings()) text += "warning: " + w + "\n";
  emit(config, text, out);
  return kExitOk;
}

int cmd_solve(const Config& config, std::ostream& out) {
  const auto validated = io::load_case(config.casePath);
  io::SolveRequest request{config.budget, config.uncertainty, config.seed, config.bins, config.kappa};
  const auto payload = io::solve_payload(validated, request, threads_of(config));
  if (config.solveFormat == "md") {
    std::map<double, std::vector<int>> row{{config.uncertainty, payload.at("levels").get<std::vector<int>>()}};
    std::string text = "# Solution for budget " + io::format_number(config.budget) + " (seed " +
                       std::to_string(config.seed) + ")\n\n```\n" +
                       io::solution_table(row, validated.control_count()) + "```\n\nExpected damage: " +
                       io::format_number(payload.at("objective").get<double>()) +
                       "\nTotal cost: " + io::format_number(payload.at("totalCost").get<double>()) + "\n";
    emit(config, text, out);
  } else {
    emit(config, payload.dump(2) + "\n", out);
  }
  return kExitOk;
}

int cmd_sweep(const Config& config, std::ostream& out) {
  const auto validated = io::load_case(config.casePath);
  SweepOptions options;
  options.engine.solver.bins = config.bins;
  options.engine.solver.kappa = config.kappa;
  options.threads = threads_of(config);
  options.engine.threads = options.threads;
  const auto result = sweep(validated, config.budgets, config.uncertainties, config.trials, config.seed, options);
  if (config.sweepFormat == "json") {
    emit(config, io::sweep_to_json(result).dump(2) + "\n", out);
  } else {
    emit(config, io::sweep_to_csv(result), out);
  }
  if (!config.plotPath.empty()) {
    auto plot = io::plot_data(result.cells);
    plot["metadata"] = {{"seed", result.seed}, {"trials", result.trials}};
    io::write_file(config.plotPath, plot.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_report(const Config& config, std::ostream& out, std::ostream& err) {
  io::SweepTable table;
  try {
    table = io::sweep_from_csv(io::read_file(config.sweepPath));
    if (table.cells.empty()) throw Error(ErrorCode::InvalidValue, config.sweepPath + " has no sweep cells");
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  emit(config, io::render_report(table), out);
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Config config;
  CLI::App app{"Security investment portfolios under uncertainty", "riskvest"};
  app.require_subcommand(1);

  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--bins", config.bins, "Loss and efficacy grid bins")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--kappa", config.kappa, "Weight of indirect cost on the loss axis")->capture_default_str();
    sub->add_option("--threads", config.threads, "Worker threads (0: RISKVEST_THREADS or machine parallelism)")
        ->capture_default_str();
    sub->add_option("--out", config.outPath, "Output path (default: standard output)");
  };

  auto* validate = app.add_subcommand("validate", "Check a case file");
  validate->add_option("--case", config.casePath, "Case file (JSON)")->required();
  validate->add_option("--out", config.outPath, "Output path (default: standard output)");

  auto* solve = app.add_subcommand("solve", "Solve one budget / uncertainty / seed");
  solve->add_option("--case", config.casePath, "Case file (JSON)")->required();
  solve->add_option("--budget", config.budget, "Budget B")->capture_default_str()->check(CLI::NonNegativeNumber);
  solve->add_option("--uncertainty", config.uncertainty, "Relative uncertainty u (0.05 = 5%)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--seed", config.seed, "Perturbation seed")->capture_default_str();
  solve->add_option("--format", config.solveFormat, "json | md")->capture_default_str()->check(CLI::IsMember({"json", "md"}));
  addCommon(solve);

  auto* sweepCmd = app.add_subcommand("sweep", "Monte Carlo sweep over budgets and uncertainty levels");
  sweepCmd->add_option("--case", config.casePath, "Case file (JSON)")->required();
  sweepCmd->add_option("--budgets", config.budgets, "Budgets")->delimiter(',')->capture_default_str();
  sweepCmd->add_option("--uncertainties", config.uncertainties, "Uncertainty levels")
      ->delimiter(',')
      ->capture_default_str();
  sweepCmd->add_option("--trials", config.trials, "Trials per cell (uncertainty 0 uses one)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  sweepCmd->add_option("--seed", config.seed, "Sweep seed")->capture_default_str();
  sweepCmd->add_option("--plot", config.plotPath, "Also write plot data (JSON) here");
  sweepCmd->add_option("--format", config.sweepFormat, "csv | json")
      ->capture_default_str()
      ->check(CLI::IsMember({"csv", "json"}));
  addCommon(sweepCmd);

  auto* report = app.add_subcommand("report", "Render a markdown report from a sweep CSV");
  report->add_option("--sweep", config.sweepPath, "Sweep CSV written by `sweep`")->required();
  report->add_option("--out", config.outPath, "Output path (default: standard output)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(std::move(reversed));
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*validate) return cmd_validate(config, out);
    if (*solve) return cmd_solve(config, out);
    if (*sweepCmd) return cmd_sweep(config, out);
    if (*report) return cmd_report(config, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::IoError ? kExitIo : kExitValidation;
  }
  return kExitValidation;
}

}  // namespace riskvest::cli
