#pragma once

// Batch experiments: disorder sweeps over (N, h), per-realization
// diagonalization shared by all initial states of that realization, exact
// evolution on a time grid, and the macroscopicity of every evolved state.
//
// Every random quantity is derived from (master_seed, N, h, realization,
// state), so record streams are a pure function of the plan regardless of the
// number of worker threads.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "macrospin/dynamics.hpp"
#include "macrospin/errors.hpp"
#include "macrospin/macroscopicity.hpp"
#include "macrospin/models.hpp"
#include "macrospin/thermal.hpp"

namespace macrospin {

enum class StateKind { random_ghz, rotated_neel, ghz };

StateKind parse_state_kind(std::string_view name);
std::string_view to_string(StateKind kind);

// Realization-count presets: "desk" (50 for N <= 8, 20 for N = 10, 10 for
// N >= 12) or "paper-scale" (10000 / 1000 / 1000 / 200 / 200 for N = 6..14).
int default_realizations(std::string_view scale, int n_sites);

struct ExperimentPlan {
  std::string preset = "heisenberg";  // heisenberg | xx_anderson | custom
  double j_perp = 1.0;
  double j_z = 1.0;
  double gamma = 0.1;
  std::string boundary = "periodic";
  std::vector<double> h_values;
  std::vector<int> sizes;
  int realizations = 0;  // 0 selects the count from `scale`
  std::string scale = "desk";
  int states = 10;
  StateKind state_kind = StateKind::random_ghz;
  std::vector<double> thetas;  // rotated_neel only; one state per theta
  TimeGrid time_grid;
  std::vector<double> times;  // explicit times override the grid
  SaturationWindow saturation;
  std::uint64_t master_seed = 42;
  bool reuse_disorder_across_h = false;
  bool compute_staggered = false;
  int restarts = 16;
  double tol = 1e-8;
  int max_sites = kDefaultMaxSites;
  double max_failure_fraction = 0.01;
  std::string output_path;
  std::string output_format = "csv";

  // Throws PlanError on inconsistent values.
  void validate() const;
  ModelParams model(int n_sites, double h) const;
  int realizations_for(int n_sites) const;
  int states_per_realization() const;
  std::vector<double> evaluation_times() const;
};

// Malformed configuration; the message names the offending field or line.
struct PlanError : ValidationError {
  using ValidationError::ValidationError;
};

// Config files are JSON objects whose keys mirror the ExperimentPlan fields
// (time_grid and saturation are nested objects, outputs is {path, format}).
// With validate = false only syntax, field names and types are checked, so
// callers can fill in the rest before calling ExperimentPlan::validate.
ExperimentPlan parse_plan(std::string_view json_text, bool validate = true);
std::string plan_to_json(const ExperimentPlan& plan);

struct RunRecord {
  int n = 0;
  double h = 0.0;
  std::uint64_t realization = 0;
  std::uint64_t state = 0;
  double t = 0.0;
  double m = 0.0;
  double m_over_n = 0.0;
  std::optional<double> v_stag;
  std::optional<double> theta;
  std::uint64_t seed = 0;  // disorder seed of the realization
  int restarts = 0;
  bool converged = false;
};

// Cross-realization statistics of M/N at one time.
struct SeriesPoint {
  int n = 0;
  double h = 0.0;
  std::optional<double> theta;
  double t = 0.0;
  double mean_m_over_n = 0.0;
  double stderr_m_over_n = 0.0;
  std::optional<double> mean_v_stag_over_n;
  int realizations = 0;
};

// Saturation-window means per realization, then mean and standard error
// across realizations.
struct SaturatedPoint {
  int n = 0;
  double h = 0.0;
  std::optional<double> theta;
  double mean_m_over_n = 0.0;
  double stderr_m_over_n = 0.0;
  std::optional<double> mean_v_stag_over_n;
  std::optional<double> stderr_v_stag_over_n;
  int realizations = 0;
};

struct RealizationLog {
  int n = 0;
  double h = 0.0;
  std::uint64_t index = 0;
  std::uint64_t seed = 0;
  std::vector<double> fields;
  bool failed = false;
  std::string error;
};

struct RunResult {
  std::vector<RunRecord> records;
  std::vector<SeriesPoint> series;
  std::vector<SaturatedPoint> saturated;
  std::vector<RealizationLog> realizations;
  std::vector<double> times;
  int failed_realizations = 0;
  int total_realizations = 0;
};

// Raised when more than plan.max_failure_fraction of realizations fail.
struct RunFailure : NumericalError {
  using NumericalError::NumericalError;
};

// Full time grid for every (N, h, realization, state).
RunResult run_time_series(const ExperimentPlan& plan);
// Only grid times inside the saturation window; reports saturated M/N.
RunResult run_scaling(const ExperimentPlan& plan);
// As run_scaling with V_S(theta) recorded next to M. Requires rotated_neel.
RunResult run_staggered(const ExperimentPlan& plan);

struct EthRow {
  int n = 0;
  double h = 0.0;
  std::uint64_t realization = 0;
  std::uint64_t state = 0;
  std::uint64_t seed = 0;
  EthReport report;
};

// One ETH report per (realization, state). A is the direction field that
// maximizes the variance of the initial state (rotated z axes for random GHZ
// states, staggered axes for rotated Neel states).
std::vector<EthRow> run_eth(const ExperimentPlan& plan);

struct SeedRow {
  int n = 0;
  double h = 0.0;
  std::uint64_t realization = 0;
  std::uint64_t disorder_seed = 0;
  std::uint64_t state = 0;
  std::uint64_t state_seed = 0;
};
std::vector<SeedRow> seed_table(const ExperimentPlan& plan);

// Initial state plus the direction field along which it is maximally
// macroscopic at t = 0.
struct PreparedState {
  StateVector state;
  DirectionField natural_dirs;
  std::optional<double> theta;
  std::uint64_t seed = 0;
};
PreparedState prepare_state(const ExperimentPlan& plan, int n_sites, double h,
                            std::uint64_t realization, std::uint64_t state_index);

std::uint64_t cell_seed(const ExperimentPlan& plan, int n_sites, double h);

struct LbitDemoConfig {
  int n_sites = 8;
  double xi2 = 1.0;
  double energy_scale = 5.0;
  double coupling_scale = 1.0;
  std::uint64_t seed = 42;
  TimeGrid time_grid;
  int restarts = 16;
};

struct LbitDemoRow {
  double t = 0.0;
  double m_over_n_interacting = 0.0;
  double m_over_n_free = 0.0;
  double sx_interacting = 0.0;
  double sx_free = 0.0;
  double bound_over_n = 0.0;
};

// Random GHZ input evolved by an interacting l-bit model and by the same
// model with V = 0.
std::vector<LbitDemoRow> run_lbit_demo(const LbitDemoConfig& config);

inline constexpr std::string_view kRecordsHeader =
    "n,h,realization,state,t,M,M_over_N,V_stag,theta,seed,restarts,converged";

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records);
void write_series_csv(std::ostream& out, const std::vector<SeriesPoint>& series);
void write_saturated_csv(std::ostream& out, const std::vector<SaturatedPoint>& saturated);
void write_eth_csv(std::ostream& out, const std::vector<EthRow>& rows);
void write_seed_table(std::ostream& out, const std::vector<SeedRow>& rows);
void write_lbit_csv(std::ostream& out, const std::vector<LbitDemoRow>& rows);

// Sidecar metadata: plan, saturation window, counts, seed table and disorder
// fields. The timestamp is the only non-deterministic entry.
std::string metadata_json(const ExperimentPlan& plan, const RunResult& result,
                          std::string_view kind, bool include_timestamp = true);

// Writes <output_path>.records.csv, .series.csv, .saturated.csv and .meta.json.
void write_outputs(const ExperimentPlan& plan, const RunResult& result, std::string_view kind);

// Applies MACROSPIN_THREADS (if set) to the OpenMP runtime and returns the
// resulting worker count.
int configure_threads();

}  // namespace macrospin
