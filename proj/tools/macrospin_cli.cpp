// macrospin: command-line driver for disorder sweeps, ETH reports, the l-bit
// demo and the invariant suite.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "macrospin/experiment.hpp"
#include "macrospin/validate.hpp"

namespace {

using namespace macrospin;

constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCapacity = 3;
constexpr int kExitRun = 4;

struct Overrides {
  std::string config;
  std::vector<int> sizes;
  std::vector<double> h_values;
  int realizations = -1;
  int states = -1;
  long long seed = -1;
  int restarts = -1;
  std::string preset;
  std::string scale;
  std::string state_kind;
  std::vector<double> thetas;
  int max_sites = -1;
  std::string out;
  bool dry_run = false;
};

void add_plan_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON plan file");
  cmd->add_option("--n", o.sizes, "system sizes")->delimiter(',');
  cmd->add_option("--h", o.h_values, "disorder strengths")->delimiter(',');
  cmd->add_option("--realizations", o.realizations, "disorder realizations per (N, h)");
  cmd->add_option("--states", o.states, "initial states per realization");
  cmd->add_option("--seed", o.seed, "master seed");
  cmd->add_option("--restarts", o.restarts, "optimizer restarts");
  cmd->add_option("--preset", o.preset, "heisenberg | xx_anderson | custom");
  cmd->add_option("--scale", o.scale, "desk | paper-scale");
  cmd->add_option("--state-kind", o.state_kind, "random_ghz | rotated_neel | ghz");
  cmd->add_option("--theta", o.thetas, "rotated Neel angles")->delimiter(',');
  cmd->add_option("--max-sites", o.max_sites, "capacity limit on N");
  cmd->add_option("--out", o.out, "output path prefix (stdout when omitted)");
  cmd->add_flag("--dry-run", o.dry_run, "print the seed table and exit");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw PlanError("config: cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

ExperimentPlan build_plan(const Overrides& o, StateKind default_kind) {
  ExperimentPlan plan;
  plan.state_kind = default_kind;
  if (!o.config.empty()) plan = parse_plan(read_file(o.config), false);
  if (!o.sizes.empty()) plan.sizes = o.sizes;
  if (!o.h_values.empty()) plan.h_values = o.h_values;
  if (o.realizations >= 0) plan.realizations = o.realizations;
  if (o.states >= 0) plan.states = o.states;
  if (o.seed >= 0) plan.master_seed = static_cast<std::uint64_t>(o.seed);
  if (o.restarts >= 0) plan.restarts = o.restarts;
  if (!o.preset.empty()) plan.preset = o.preset;
  if (!o.scale.empty()) plan.scale = o.scale;
  if (!o.state_kind.empty()) plan.state_kind = parse_state_kind(o.state_kind);
  if (!o.thetas.empty()) plan.thetas = o.thetas;
  if (o.max_sites >= 0) plan.max_sites = o.max_sites;
  if (!o.out.empty()) plan.output_path = o.out;
  plan.validate();
  return plan;
}

void emit_run(const ExperimentPlan& plan, const RunResult& result, std::string_view kind) {
  if (plan.output_path.empty()) {
    write_records_csv(std::cout, result.records);
  } else {
    write_outputs(plan, result, kind);
    std::cerr << "wrote " << plan.output_path << ".{records,series,saturated}.csv and .meta.json\n";
  }
}

template <typename Writer>
void emit_table(const std::string& path, Writer&& writer) {
  if (path.empty()) {
    writer(std::cout);
    return;
  }
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  writer(f);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Macroscopic superpositions in disordered spin chains"};
  // --h is the disorder strength, so help is long-form only
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1);

  Overrides ts, sc, st, eth;
  auto* cmd_ts = app.add_subcommand("time-series", "M(t)/N along the full time grid");
  add_plan_options(cmd_ts, ts);
  auto* cmd_sc = app.add_subcommand("scaling", "saturated M/N per (N, h)");
  add_plan_options(cmd_sc, sc);
  auto* cmd_st = app.add_subcommand("staggered", "saturated M/N and V_S for rotated Neel states");
  add_plan_options(cmd_st, st);
  auto* cmd_eth = app.add_subcommand("eth-report", "time-averaged vs thermal variance");
  add_plan_options(cmd_eth, eth);

  LbitDemoConfig lbit;
  std::string lbit_out;
  auto* cmd_lbit = app.add_subcommand("lbit-demo", "l-bit model with and without interactions");
  cmd_lbit->add_option("--n", lbit.n_sites, "sites");
  cmd_lbit->add_option("--xi2", lbit.xi2, "interaction decay length");
  cmd_lbit->add_option("--energy-scale", lbit.energy_scale, "onsite energy range");
  cmd_lbit->add_option("--coupling-scale", lbit.coupling_scale, "interaction strength V0");
  cmd_lbit->add_option("--seed", lbit.seed, "seed");
  cmd_lbit->add_option("--restarts", lbit.restarts, "optimizer restarts");
  cmd_lbit->add_option("--out", lbit_out, "CSV path (stdout when omitted)");

  std::uint64_t validate_seed = 2024;
  auto* cmd_val = app.add_subcommand("validate", "run the invariant suite");
  cmd_val->add_option("--seed", validate_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    configure_threads();
    if (cmd_val->parsed()) {
      const ValidationReport report = run_validation_suite(validate_seed);
      for (const CheckResult& c : report.checks)
        std::printf("%s %-28s measured=%.3e tol=%.1e %s\n", c.passed ? "PASS" : "FAIL",
                    c.name.c_str(), c.measured, c.tolerance, c.detail.c_str());
      std::printf("%zu checks in %.1f s\n", report.checks.size(), report.seconds);
      return report.passed() ? 0 : kExitFailure;
    }
    if (cmd_lbit->parsed()) {
      const auto rows = run_lbit_demo(lbit);
      emit_table(lbit_out, [&](std::ostream& out) { write_lbit_csv(out, rows); });
      return 0;
    }

    struct Mode {
      CLI::App* cmd;
      Overrides* o;
      StateKind kind;
    };
    for (const Mode& m : {Mode{cmd_ts, &ts, StateKind::random_ghz},
                          Mode{cmd_sc, &sc, StateKind::random_ghz},
                          Mode{cmd_st, &st, StateKind::rotated_neel},
                          Mode{cmd_eth, &eth, StateKind::random_ghz}}) {
      if (!m.cmd->parsed()) continue;
      const ExperimentPlan plan = build_plan(*m.o, m.kind);
      if (m.o->dry_run) {
        write_seed_table(std::cout, seed_table(plan));
        return 0;
      }
      const std::string name = m.cmd->get_name();
      if (m.cmd == cmd_eth) {
        const auto rows = run_eth(plan);
        emit_table(plan.output_path.empty() ? "" : plan.output_path + ".eth.csv",
                   [&](std::ostream& out) { write_eth_csv(out, rows); });
      } else if (m.cmd == cmd_ts) {
        emit_run(plan, run_time_series(plan), name);
      } else if (m.cmd == cmd_sc) {
        emit_run(plan, run_scaling(plan), name);
      } else {
        emit_run(plan, run_staggered(plan), name);
      }
      return 0;
    }
  } catch (const PlanError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const CapacityError& e) {
    std::cerr << "capacity error: " << e.what() << '\n';
    return kExitCapacity;
  } catch (const RunFailure& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return kExitRun;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}
