// Command-line front end: `simulate` runs one configuration, `sweep` a grid.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "idnc/errors.hpp"
#include "idnc/sim_config.hpp"
#include "idnc/simulation.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kBudgetError = 3;

struct CommonArgs {
  std::string config_path;
  std::optional<std::string> scheduler;
  std::optional<std::string> selector;
  std::optional<std::size_t> runs;
  std::optional<std::uint64_t> seed;
  std::optional<double> spread;
  std::string out;
  std::string json_out;
  bool per_run = false;
  std::size_t threads = 0;
};

void add_common(CLI::App& cmd, CommonArgs& a) {
  cmd.add_option("--config", a.config_path, "JSON config file");
  cmd.add_option("--scheduler", a.scheduler, "ew-idnc | now-idnc | max-clique | ew-rlnc");
  cmd.add_option("--selector", a.selector, "clique selector for IDNC schedulers: heuristic | exact");
  cmd.add_option("--runs", a.runs, "Monte Carlo runs per configuration");
  cmd.add_option("--seed", a.seed, "master seed");
  cmd.add_option("--spread", a.spread, "half-width of the per-receiver erasure interval");
  cmd.add_option("--out", a.out, "CSV output path (default: stdout)");
  cmd.add_option("--json", a.json_out, "also write a JSON report here");
  cmd.add_flag("--per-run", a.per_run, "include per-run detail in the JSON report");
  cmd.add_option("--threads", a.threads, "worker threads (0: all cores)");
}

idnc::SimConfig base_config(const CommonArgs& a) {
  idnc::SimConfig c;
  if (!a.config_path.empty()) c = idnc::load_config(a.config_path);
  if (a.scheduler) c.scheduler.kind = idnc::parse_scheduler(*a.scheduler);
  if (a.selector)
    c = idnc::config_from_json({{"scheduler", {{"selector", *a.selector}}}}, c);
  if (a.runs) c.runs = *a.runs;
  if (a.seed) c.seed = *a.seed;
  if (a.spread) c.erasure_spread = *a.spread;
  return c;
}

void emit(const CommonArgs& a, const std::vector<idnc::MonteCarloReport>& reports) {
  if (a.out.empty()) {
    idnc::write_csv(std::cout, reports);
  } else {
    std::ofstream f(a.out);
    if (!f) throw idnc::ConfigError("cannot write " + a.out);
    idnc::write_csv(f, reports);
  }
  if (!a.json_out.empty()) {
    nlohmann::json doc = nlohmann::json::array();
    for (const auto& r : reports) doc.push_back(idnc::report_to_json(r));
    std::ofstream f(a.json_out);
    if (!f) throw idnc::ConfigError("cannot write " + a.json_out);
    f << doc.dump(2) << '\n';
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deadline-constrained layered broadcast simulator"};
  app.require_subcommand(1);

  CommonArgs sim_args;
  std::optional<double> lambda, bitrate, erasure;
  std::optional<std::size_t> theta, receivers;
  auto* simulate = app.add_subcommand("simulate", "run one configuration");
  add_common(*simulate, sim_args);
  simulate->add_option("--lambda", lambda, "EW threshold");
  auto* theta_opt = simulate->add_option("--theta", theta, "deadline in slots");
  simulate->add_option("--bitrate", bitrate, "bits per second; sets theta")->excludes(theta_opt);
  simulate->add_option("--receivers", receivers, "number of receivers");
  simulate->add_option("--erasure", erasure, "mean erasure probability");

  CommonArgs sweep_args;
  idnc::SweepGrid grid;
  auto* sweep = app.add_subcommand("sweep", "run the Cartesian product of parameter lists");
  add_common(*sweep, sweep_args);
  sweep->add_option("--lambda", grid.lambdas, "EW thresholds")->delimiter(',');
  sweep->add_option("--theta", grid.thetas, "deadlines in slots")->delimiter(',');
  sweep->add_option("--receivers", grid.receivers, "receiver counts")->delimiter(',');
  sweep->add_option("--erasure", grid.erasure_means, "mean erasure probabilities")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    std::vector<idnc::MonteCarloReport> reports;
    if (*simulate) {
      auto c = base_config(sim_args);
      if (lambda) c.scheduler.lambda = *lambda;
      if (theta) {
        c.theta = *theta;
        c.bitrate.reset();
      }
      if (bitrate) c.bitrate = *bitrate;
      if (receivers) c.receivers = *receivers;
      if (erasure) c.erasure_mean = *erasure;
      reports.push_back(idnc::monte_carlo(c, {sim_args.threads, sim_args.per_run}));
      emit(sim_args, reports);
    } else {
      const auto c = base_config(sweep_args);
      reports = idnc::sweep(c, grid, {sweep_args.threads, sweep_args.per_run});
      emit(sweep_args, reports);
    }
  } catch (const idnc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const idnc::OracleUnavailable& e) {
    std::cerr << "oracle unavailable: " << e.what() << '\n';
    return kBudgetError;
  } catch (const idnc::BudgetExceeded& e) {
    std::cerr << "budget exceeded: " << e.what() << '\n';
    return kBudgetError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
