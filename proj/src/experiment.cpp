#include "macrospin/experiment.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <map>
#include <memory>
#include <numbers>
#include <ostream>
#include <set>

#include "json.hpp"
#include "macrospin/lbits.hpp"

namespace macrospin {

using nlohmann::json;

StateKind parse_state_kind(std::string_view name) {
  if (name == "random_ghz") return StateKind::random_ghz;
  if (name == "rotated_neel") return StateKind::rotated_neel;
  if (name == "ghz") return StateKind::ghz;
  throw PlanError("state_kind: unknown value '" + std::string(name) + "'");
}

std::string_view to_string(StateKind kind) {
  switch (kind) {
    case StateKind::random_ghz: return "random_ghz";
    case StateKind::rotated_neel: return "rotated_neel";
    case StateKind::ghz: return "ghz";
  }
  return "random_ghz";
}

int default_realizations(std::string_view scale, int n_sites) {
  if (scale == "paper-scale") {
    if (n_sites <= 6) return 10000;
    if (n_sites <= 10) return 1000;
    return 200;
  }
  if (scale == "desk") {
    if (n_sites <= 8) return 50;
    if (n_sites <= 10) return 20;
    return 10;
  }
  throw PlanError("scale: expected 'desk' or 'paper-scale', got '" + std::string(scale) + "'");
}

void ExperimentPlan::validate() const {
  if (preset != "heisenberg" && preset != "xx_anderson" && preset != "custom")
    throw PlanError("preset: expected heisenberg, xx_anderson or custom");
  if (boundary != "periodic" && boundary != "open")
    throw PlanError("boundary: expected periodic or open");
  if (h_values.empty()) throw PlanError("h_values: at least one disorder strength is required");
  for (double h : h_values)
    if (!(h >= 0.0)) throw PlanError("h_values: disorder strengths must be non-negative");
  if (sizes.empty()) throw PlanError("sizes: at least one system size is required");
  for (int n : sizes) {
    if (n < 2) throw PlanError("sizes: every N must be at least 2");
    if (n > max_sites)
      throw CapacityError("sizes: N = " + std::to_string(n) + " exceeds max_sites = " +
                          std::to_string(max_sites));
    if (state_kind == StateKind::rotated_neel && n % 2 != 0)
      throw PlanError("sizes: rotated_neel states need even N");
  }
  if (realizations < 0) throw PlanError("realizations: must be >= 1 (or 0 for the scale default)");
  default_realizations(scale, 2);
  if (states < 1) throw PlanError("states: must be >= 1");
  if (state_kind == StateKind::rotated_neel) {
    if (thetas.empty()) throw PlanError("thetas: rotated_neel plans need at least one angle");
    for (double t : thetas)
      if (!(t >= 0.0 && t <= std::numbers::pi)) throw PlanError("thetas: angles must lie in [0, pi]");
  }
  if (restarts < 1) throw PlanError("restarts: must be >= 1");
  if (!(tol > 0.0)) throw PlanError("tol: must be positive");
  if (times.empty()) {
    if (!(time_grid.t_min > 0.0) || !(time_grid.t_max >= time_grid.t_min) ||
        time_grid.points_per_decade < 1)
      throw PlanError("time_grid: need 0 < t_min <= t_max and points_per_decade >= 1");
  }
  if (!(saturation.t_end >= saturation.t_begin))
    throw PlanError("saturation: t_end must not precede t_begin");
  if (output_format != "csv") throw PlanError("outputs.format: only 'csv' is supported");
}

ModelParams ExperimentPlan::model(int n_sites, double h) const {
  if (preset == "custom") {
    ModelParams p;
    p.n_sites = n_sites;
    p.j_perp = j_perp;
    p.j_z = j_z;
    p.gamma = gamma;
    p.h_strength = h;
    p.boundary = parse_boundary(boundary);
    return p;
  }
  ModelParams p = preset_params(parse_preset(preset), n_sites, h);
  p.boundary = parse_boundary(boundary);
  return p;
}

int ExperimentPlan::realizations_for(int n_sites) const {
  return realizations > 0 ? realizations : default_realizations(scale, n_sites);
}

int ExperimentPlan::states_per_realization() const {
  return state_kind == StateKind::rotated_neel ? static_cast<int>(thetas.size()) : states;
}

std::vector<double> ExperimentPlan::evaluation_times() const {
  return times.empty() ? time_grid.times() : times;
}

// ---------------------------------------------------------------------------
// Config parsing

namespace {

const std::set<std::string> kPlanKeys = {
    "preset", "j_perp", "j_z", "gamma", "boundary", "h_values", "sizes", "realizations",
    "scale", "states", "state_kind", "thetas", "time_grid", "times", "saturation",
    "master_seed", "reuse_disorder_across_h", "compute_staggered", "restarts", "tol",
    "max_sites", "max_failure_fraction", "outputs"};

template <typename T>
void read_field(const json& j, const char* key, T& target, const std::string& prefix = "") {
  if (!j.contains(key)) return;
  try {
    target = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw PlanError(prefix + key + ": " + e.what());
  }
}

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& prefix) {
  for (const auto& [key, value] : j.items())
    if (!allowed.contains(key)) throw PlanError(prefix + key + ": unknown field");
}

}  // namespace

ExperimentPlan parse_plan(std::string_view json_text, bool validate) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw PlanError(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw PlanError("config: top level must be an object");
  check_keys(j, kPlanKeys, "");

  ExperimentPlan p;
  read_field(j, "preset", p.preset);
  read_field(j, "j_perp", p.j_perp);
  read_field(j, "j_z", p.j_z);
  read_field(j, "gamma", p.gamma);
  read_field(j, "boundary", p.boundary);
  read_field(j, "h_values", p.h_values);
  read_field(j, "sizes", p.sizes);
  read_field(j, "realizations", p.realizations);
  read_field(j, "scale", p.scale);
  read_field(j, "states", p.states);
  if (j.contains("state_kind")) {
    std::string kind;
    read_field(j, "state_kind", kind);
    p.state_kind = parse_state_kind(kind);
  }
  read_field(j, "thetas", p.thetas);
  if (j.contains("time_grid")) {
    const json& g = j.at("time_grid");
    if (!g.is_object()) throw PlanError("time_grid: expected an object");
    check_keys(g, {"t_min", "t_max", "points_per_decade"}, "time_grid.");
    read_field(g, "t_min", p.time_grid.t_min, "time_grid.");
    read_field(g, "t_max", p.time_grid.t_max, "time_grid.");
    read_field(g, "points_per_decade", p.time_grid.points_per_decade, "time_grid.");
  }
  read_field(j, "times", p.times);
  if (j.contains("saturation")) {
    const json& s = j.at("saturation");
    if (!s.is_object()) throw PlanError("saturation: expected an object");
    check_keys(s, {"t_begin", "t_end"}, "saturation.");
    read_field(s, "t_begin", p.saturation.t_begin, "saturation.");
    read_field(s, "t_end", p.saturation.t_end, "saturation.");
  }
  read_field(j, "master_seed", p.master_seed);
  read_field(j, "reuse_disorder_across_h", p.reuse_disorder_across_h);
  read_field(j, "compute_staggered", p.compute_staggered);
  read_field(j, "restarts", p.restarts);
  read_field(j, "tol", p.tol);
  read_field(j, "max_sites", p.max_sites);
  read_field(j, "max_failure_fraction", p.max_failure_fraction);
  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    if (!o.is_object()) throw PlanError("outputs: expected an object");
    check_keys(o, {"path", "format"}, "outputs.");
    read_field(o, "path", p.output_path, "outputs.");
    read_field(o, "format", p.output_format, "outputs.");
  }
  if (validate) p.validate();
  return p;
}

namespace {

json plan_json(const ExperimentPlan& p) {
  json j;
  j["preset"] = p.preset;
  j["j_perp"] = p.j_perp;
  j["j_z"] = p.j_z;
  j["gamma"] = p.gamma;
  j["boundary"] = p.boundary;
  j["h_values"] = p.h_values;
  j["sizes"] = p.sizes;
  j["realizations"] = p.realizations;
  j["scale"] = p.scale;
  j["states"] = p.states;
  j["state_kind"] = std::string(to_string(p.state_kind));
  j["thetas"] = p.thetas;
  j["time_grid"] = {{"t_min", p.time_grid.t_min},
                    {"t_max", p.time_grid.t_max},
                    {"points_per_decade", p.time_grid.points_per_decade}};
  j["times"] = p.times;
  j["saturation"] = {{"t_begin", p.saturation.t_begin}, {"t_end", p.saturation.t_end}};
  j["master_seed"] = p.master_seed;
  j["reuse_disorder_across_h"] = p.reuse_disorder_across_h;
  j["compute_staggered"] = p.compute_staggered;
  j["restarts"] = p.restarts;
  j["tol"] = p.tol;
  j["max_sites"] = p.max_sites;
  j["max_failure_fraction"] = p.max_failure_fraction;
  j["outputs"] = {{"path", p.output_path}, {"format", p.output_format}};
  return j;
}

}  // namespace

std::string plan_to_json(const ExperimentPlan& plan) { return plan_json(plan).dump(2); }

// ---------------------------------------------------------------------------
// Seeds and initial states

std::uint64_t cell_seed(const ExperimentPlan& plan, int n_sites, double h) {
  const std::uint64_t h_key = plan.reuse_disorder_across_h ? 0 : std::bit_cast<std::uint64_t>(h);
  return derive_seed(plan.master_seed, Stream::cell, {static_cast<std::uint64_t>(n_sites), h_key});
}

namespace {

std::uint64_t state_seed(std::uint64_t cell, std::uint64_t realization, std::uint64_t state) {
  return derive_seed(cell, Stream::state, {realization, state});
}

}  // namespace

PreparedState prepare_state(const ExperimentPlan& plan, int n_sites, double h,
                            std::uint64_t realization, std::uint64_t state_index) {
  const std::uint64_t seed = state_seed(cell_seed(plan, n_sites, h), realization, state_index);
  switch (plan.state_kind) {
    case StateKind::random_ghz: {
      Rng rng(seed);
      std::vector<Mat2c> us;
      std::vector<Vec3> axes;
      for (int i = 0; i < n_sites; ++i) {
        us.push_back(random_su2(rng));
        axes.push_back(rotated_z_axis(us.back()));
      }
      return {local_rotated_ghz(us, plan.max_sites), DirectionField::normalized(std::move(axes)),
              std::nullopt, seed};
    }
    case StateKind::ghz:
      return {ghz(n_sites, plan.max_sites), DirectionField::uniform(n_sites, Vec3::UnitZ()),
              std::nullopt, seed};
    case StateKind::rotated_neel: {
      const double theta = plan.thetas.at(static_cast<std::size_t>(state_index));
      return {rotated_neel_ghz(n_sites, theta, plan.max_sites), staggered_directions(n_sites, theta),
              theta, seed};
    }
  }
  throw PlanError("state_kind: unsupported");
}

std::vector<SeedRow> seed_table(const ExperimentPlan& plan) {
  plan.validate();
  std::vector<SeedRow> rows;
  for (int n : plan.sizes) {
    for (double h : plan.h_values) {
      const std::uint64_t cell = cell_seed(plan, n, h);
      const ModelParams params = plan.model(n, h);
      for (int r = 0; r < plan.realizations_for(n); ++r) {
        const auto ru = static_cast<std::uint64_t>(r);
        const std::uint64_t dseed = sample_disorder(params, cell, ru).seed;
        for (int s = 0; s < plan.states_per_realization(); ++s) {
          const auto su = static_cast<std::uint64_t>(s);
          rows.push_back({n, h, ru, dseed, su, state_seed(cell, ru, su)});
        }
      }
    }
  }
  return rows;
}

int configure_threads() {
  if (const char* env = std::getenv("MACROSPIN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v > 0) omp_set_num_threads(static_cast<int>(v));
  }
  return omp_get_max_threads();
}

// ---------------------------------------------------------------------------
// Runs

namespace {

struct RunOptions {
  bool saturation_only = false;
  bool staggered = false;
};

struct StateSeries {
  std::vector<RunRecord> records;
};

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double stderr_of(const std::vector<double>& v) {
  if (v.size() < 2) return std::numeric_limits<double>::quiet_NaN();
  const double m = mean_of(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
}

std::vector<RunRecord> evaluate_state(const ExperimentPlan& plan, const RunOptions& opt,
                                      const std::shared_ptr<const EigenDecomposition>& eig,
                                      int n, double h, std::uint64_t r, std::uint64_t s,
                                      std::uint64_t disorder_seed,
                                      const std::vector<double>& times) {
  const PreparedState prepared = prepare_state(plan, n, h, r, s);
  const SpectralState spectral(eig, prepared.state);
  const std::vector<StateVector> evolved = evolve_grid(spectral, times);
  OptimizerOptions oo;
  oo.restarts = plan.restarts;
  oo.tol = plan.tol;
  std::vector<RunRecord> out;
  out.reserve(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const CorrelationMatrix c = correlation_matrix(evolved[k]);
    const MacroResult m = maximize(c, oo);
    RunRecord rec;
    rec.n = n;
    rec.h = h;
    rec.realization = r;
    rec.state = s;
    rec.t = times[k];
    rec.m = m.value;
    rec.m_over_n = m.value / n;
    rec.theta = prepared.theta;
    if (opt.staggered && prepared.theta) rec.v_stag = variance(c, prepared.natural_dirs);
    rec.seed = disorder_seed;
    rec.restarts = m.restarts_used;
    rec.converged = m.converged;
    out.push_back(rec);
  }
  return out;
}

// Key for aggregation: (n, h, theta or none).
struct CellKey {
  int n;
  double h;
  std::optional<double> theta;
  bool operator<(const CellKey& o) const {
    if (n != o.n) return n < o.n;
    if (h != o.h) return h < o.h;
    return theta.value_or(-1.0) < o.theta.value_or(-1.0);
  }
};

void aggregate(const ExperimentPlan& plan, RunResult& result) {
  // realization-level means over states, per key and time index
  struct Acc {
    std::map<std::uint64_t, std::vector<std::vector<double>>> per_realization_m;  // r -> state -> t
    std::map<std::uint64_t, std::vector<std::vector<double>>> per_realization_v;
  };
  std::map<CellKey, Acc> cells;
  std::map<std::tuple<CellKey, std::uint64_t, std::uint64_t>, std::size_t> slot;
  for (const RunRecord& rec : result.records) {
    CellKey key{rec.n, rec.h, rec.theta};
    Acc& acc = cells[key];
    auto& states_m = acc.per_realization_m[rec.realization];
    auto& states_v = acc.per_realization_v[rec.realization];
    auto [it, inserted] = slot.try_emplace({key, rec.realization, rec.state}, states_m.size());
    if (inserted) {
      states_m.emplace_back();
      states_v.emplace_back();
    }
    states_m[it->second].push_back(rec.m_over_n);
    if (rec.v_stag) states_v[it->second].push_back(*rec.v_stag / rec.n);
  }

  const std::vector<double>& times = result.times;
  for (const auto& [key, acc] : cells) {
    const bool has_v = !acc.per_realization_v.begin()->second.front().empty();
    // realization -> per-time mean over states, and saturated mean
    std::vector<std::vector<double>> real_series;
    std::vector<std::vector<double>> real_series_v;
    std::vector<double> sat_m;
    std::vector<double> sat_v;
    for (const auto& [r, states] : acc.per_realization_m) {
      std::vector<double> series(times.size(), 0.0);
      double sat = 0.0;
      for (const auto& ts : states) {
        for (std::size_t k = 0; k < times.size(); ++k) series[k] += ts[k] / static_cast<double>(states.size());
        sat += saturated_mean(times, ts, plan.saturation) / static_cast<double>(states.size());
      }
      real_series.push_back(std::move(series));
      sat_m.push_back(sat);
      if (has_v) {
        const auto& vstates = acc.per_realization_v.at(r);
        std::vector<double> vseries(times.size(), 0.0);
        double vsat = 0.0;
        for (const auto& ts : vstates) {
          for (std::size_t k = 0; k < times.size(); ++k) vseries[k] += ts[k] / static_cast<double>(vstates.size());
          vsat += saturated_mean(times, ts, plan.saturation) / static_cast<double>(vstates.size());
        }
        real_series_v.push_back(std::move(vseries));
        sat_v.push_back(vsat);
      }
    }
    for (std::size_t k = 0; k < times.size(); ++k) {
      std::vector<double> col;
      std::vector<double> vcol;
      for (std::size_t r = 0; r < real_series.size(); ++r) {
        col.push_back(real_series[r][k]);
        if (has_v) vcol.push_back(real_series_v[r][k]);
      }
      SeriesPoint p;
      p.n = key.n;
      p.h = key.h;
      p.theta = key.theta;
      p.t = times[k];
      p.mean_m_over_n = mean_of(col);
      p.stderr_m_over_n = stderr_of(col);
      if (has_v) p.mean_v_stag_over_n = mean_of(vcol);
      p.realizations = static_cast<int>(col.size());
      result.series.push_back(p);
    }
    SaturatedPoint sp;
    sp.n = key.n;
    sp.h = key.h;
    sp.theta = key.theta;
    sp.mean_m_over_n = mean_of(sat_m);
    sp.stderr_m_over_n = stderr_of(sat_m);
    if (has_v) {
      sp.mean_v_stag_over_n = mean_of(sat_v);
      sp.stderr_v_stag_over_n = stderr_of(sat_v);
    }
    sp.realizations = static_cast<int>(sat_m.size());
    result.saturated.push_back(sp);
  }
}

RunResult run_plan(const ExperimentPlan& plan, const RunOptions& opt) {
  plan.validate();
  configure_threads();
  RunResult result;
  std::vector<double> times = plan.evaluation_times();
  if (opt.saturation_only) {
    std::erase_if(times, [&](double t) { return !plan.saturation.contains(t); });
    if (times.empty()) throw PlanError("saturation: no evaluation time falls inside the window");
  }
  result.times = times;
  const int batch = std::max(1, omp_get_max_threads());

  for (int n : plan.sizes) {
    for (double h : plan.h_values) {
      const std::uint64_t cell = cell_seed(plan, n, h);
      const ModelParams params = plan.model(n, h);
      const int n_real = plan.realizations_for(n);
      const int n_states = plan.states_per_realization();
      for (int r0 = 0; r0 < n_real; r0 += batch) {
        const int r1 = std::min(n_real, r0 + batch);
        const int width = r1 - r0;
        std::vector<std::shared_ptr<const EigenDecomposition>> eigs(static_cast<std::size_t>(width));
        std::vector<RealizationLog> logs(static_cast<std::size_t>(width));
#pragma omp parallel for schedule(dynamic)
        for (int w = 0; w < width; ++w) {
          const auto r = static_cast<std::uint64_t>(r0 + w);
          RealizationLog& log = logs[static_cast<std::size_t>(w)];
          log.n = n;
          log.h = h;
          log.index = r;
          try {
            const DisorderRealization dis = sample_disorder(params, cell, r);
            log.seed = dis.seed;
            log.fields = dis.fields;
            const Hamiltonian ham = build_xxz(params, dis, plan.max_sites);
            eigs[static_cast<std::size_t>(w)] =
                std::make_shared<const EigenDecomposition>(diagonalize(ham));
          } catch (const std::exception& e) {
            log.failed = true;
            log.error = e.what();
          }
        }
        std::vector<std::vector<RunRecord>> slots(static_cast<std::size_t>(width * n_states));
        std::vector<std::string> errors(static_cast<std::size_t>(width * n_states));
        const int tasks = width * n_states;
#pragma omp parallel for schedule(dynamic)
        for (int task = 0; task < tasks; ++task) {
          const int w = task / n_states;
          const int s = task % n_states;
          if (!eigs[static_cast<std::size_t>(w)]) continue;
          try {
            slots[static_cast<std::size_t>(task)] = evaluate_state(
                plan, opt, eigs[static_cast<std::size_t>(w)], n, h,
                static_cast<std::uint64_t>(r0 + w), static_cast<std::uint64_t>(s),
                logs[static_cast<std::size_t>(w)].seed, times);
          } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(task)] = e.what();
          }
        }
        for (int w = 0; w < width; ++w) {
          RealizationLog& log = logs[static_cast<std::size_t>(w)];
          for (int s = 0; s < n_states && !log.failed; ++s) {
            const std::string& err = errors[static_cast<std::size_t>(w * n_states + s)];
            if (!err.empty()) {
              log.failed = true;
              log.error = err;
            }
          }
          ++result.total_realizations;
          if (log.failed) {
            ++result.failed_realizations;
          } else {
            for (int s = 0; s < n_states; ++s) {
              auto& recs = slots[static_cast<std::size_t>(w * n_states + s)];
              result.records.insert(result.records.end(), recs.begin(), recs.end());
            }
          }
          result.realizations.push_back(std::move(log));
        }
      }
    }
  }

  if (result.total_realizations > 0 &&
      static_cast<double>(result.failed_realizations) >
          plan.max_failure_fraction * static_cast<double>(result.total_realizations)) {
    std::string msg = std::to_string(result.failed_realizations) + " of " +
                      std::to_string(result.total_realizations) + " realizations failed";
    for (const auto& log : result.realizations)
      if (log.failed) {
        msg += "; first failure: seed " + std::to_string(log.seed) + ": " + log.error;
        break;
      }
    throw RunFailure(msg);
  }
  if (!result.records.empty()) aggregate(plan, result);
  return result;
}

}  // namespace

RunResult run_time_series(const ExperimentPlan& plan) {
  return run_plan(plan, {false, plan.compute_staggered});
}

RunResult run_scaling(const ExperimentPlan& plan) {
  return run_plan(plan, {true, plan.compute_staggered});
}

RunResult run_staggered(const ExperimentPlan& plan) {
  if (plan.state_kind != StateKind::rotated_neel)
    throw PlanError("state_kind: staggered runs need rotated_neel states");
  return run_plan(plan, {true, true});
}

std::vector<EthRow> run_eth(const ExperimentPlan& plan) {
  plan.validate();
  configure_threads();
  std::vector<EthRow> rows;
  for (int n : plan.sizes) {
    for (double h : plan.h_values) {
      const std::uint64_t cell = cell_seed(plan, n, h);
      const ModelParams params = plan.model(n, h);
      const int n_real = plan.realizations_for(n);
      const int n_states = plan.states_per_realization();
      std::vector<std::vector<EthRow>> per_real(static_cast<std::size_t>(n_real));
#pragma omp parallel for schedule(dynamic)
      for (int r = 0; r < n_real; ++r) {
        const auto ru = static_cast<std::uint64_t>(r);
        const DisorderRealization dis = sample_disorder(params, cell, ru);
        const auto eig = std::make_shared<const EigenDecomposition>(
            diagonalize(build_xxz(params, dis, plan.max_sites)));
        for (int s = 0; s < n_states; ++s) {
          const PreparedState prepared = prepare_state(plan, n, h, ru, static_cast<std::uint64_t>(s));
          const SpectralState spectral(eig, prepared.state);
          per_real[static_cast<std::size_t>(r)].push_back(
              {n, h, ru, static_cast<std::uint64_t>(s), dis.seed,
               eth_fluctuation_report(spectral, prepared.natural_dirs)});
        }
      }
      for (auto& v : per_real) rows.insert(rows.end(), v.begin(), v.end());
    }
  }
  return rows;
}

std::vector<LbitDemoRow> run_lbit_demo(const LbitDemoConfig& config) {
  const LbitModel interacting = generate_lbit_model(config.n_sites, config.xi2,
                                                    config.energy_scale, config.coupling_scale,
                                                    config.seed);
  LbitModel free = interacting;
  free.pair_couplings.setZero();
  Rng rng(derive_seed(config.seed, Stream::state));
  const StateVector psi0 = random_ghz(config.n_sites, rng);
  const double bound = macroscopicity_lower_bound(LbitAxes::z_aligned(config.n_sites), psi0);
  const std::vector<double> times = config.time_grid.times();
  const auto a = lbit_evolve_grid(interacting, psi0, times);
  const auto b = lbit_evolve_grid(free, psi0, times);
  OptimizerOptions oo;
  oo.restarts = config.restarts;
  const double n = config.n_sites;
  std::vector<LbitDemoRow> rows(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const CorrelationMatrix ca = correlation_matrix(a[k]);
    const CorrelationMatrix cb = correlation_matrix(b[k]);
    rows[k] = {times[k], maximize(ca, oo).value / n, maximize(cb, oo).value / n,
               ca.mean_spins[0].x(), cb.mean_spins[0].x(), bound / n};
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<RunRecord>& records) {
  out << kRecordsHeader << '\n';
  for (const RunRecord& r : records) {
    out << r.n << ',' << num(r.h) << ',' << r.realization << ',' << r.state << ',' << num(r.t)
        << ',' << num(r.m) << ',' << num(r.m_over_n) << ',' << opt_num(r.v_stag) << ','
        << opt_num(r.theta) << ',' << r.seed << ',' << r.restarts << ',' << (r.converged ? 1 : 0)
        << '\n';
  }
}

void write_series_csv(std::ostream& out, const std::vector<SeriesPoint>& series) {
  out << "n,h,theta,t,mean_M_over_N,stderr_M_over_N,mean_V_stag_over_N,realizations\n";
  for (const SeriesPoint& p : series)
    out << p.n << ',' << num(p.h) << ',' << opt_num(p.theta) << ',' << num(p.t) << ','
        << num(p.mean_m_over_n) << ',' << num(p.stderr_m_over_n) << ','
        << opt_num(p.mean_v_stag_over_n) << ',' << p.realizations << '\n';
}

void write_saturated_csv(std::ostream& out, const std::vector<SaturatedPoint>& saturated) {
  out << "n,h,theta,saturated_M_over_N,stderr_M_over_N,saturated_V_stag_over_N,"
         "stderr_V_stag_over_N,realizations\n";
  for (const SaturatedPoint& p : saturated)
    out << p.n << ',' << num(p.h) << ',' << opt_num(p.theta) << ',' << num(p.mean_m_over_n)
        << ',' << num(p.stderr_m_over_n) << ',' << opt_num(p.mean_v_stag_over_n) << ','
        << opt_num(p.stderr_v_stag_over_n) << ',' << p.realizations << '\n';
}

void write_eth_csv(std::ostream& out, const std::vector<EthRow>& rows) {
  out << "n,h,realization,state,seed,time_averaged_variance,thermal_variance,difference,"
         "difference_over_N,difference_over_N2,beta,mean_energy\n";
  for (const EthRow& r : rows)
    out << r.n << ',' << num(r.h) << ',' << r.realization << ',' << r.state << ',' << r.seed
        << ',' << num(r.report.time_averaged_variance) << ',' << num(r.report.thermal_variance)
        << ',' << num(r.report.difference) << ',' << num(r.report.difference_over_n) << ','
        << num(r.report.difference_over_n2) << ',' << num(r.report.beta) << ','
        << num(r.report.mean_energy) << '\n';
}

void write_seed_table(std::ostream& out, const std::vector<SeedRow>& rows) {
  out << "n,h,realization,disorder_seed,state,state_seed\n";
  for (const SeedRow& r : rows)
    out << r.n << ',' << num(r.h) << ',' << r.realization << ',' << r.disorder_seed << ','
        << r.state << ',' << r.state_seed << '\n';
}

void write_lbit_csv(std::ostream& out, const std::vector<LbitDemoRow>& rows) {
  out << "t,M_over_N_interacting,M_over_N_free,sx0_interacting,sx0_free,bound_over_N\n";
  for (const LbitDemoRow& r : rows)
    out << num(r.t) << ',' << num(r.m_over_n_interacting) << ',' << num(r.m_over_n_free) << ','
        << num(r.sx_interacting) << ',' << num(r.sx_free) << ',' << num(r.bound_over_n) << '\n';
}

std::string metadata_json(const ExperimentPlan& plan, const RunResult& result,
                          std::string_view kind, bool include_timestamp) {
  json j;
  j["kind"] = std::string(kind);
  j["version"] = "0.1.0";
  j["plan"] = plan_json(plan);
  j["basis_convention"] = "z basis, site 0 = most significant bit, up = 0";
  j["saturation_window"] = {
      {"t_begin", plan.saturation.t_begin},
      {"t_end", plan.saturation.t_end},
      {"definition", "mean of M/N over evaluation times with t_begin <= t <= t_end"}};
  j["evaluation_times"] = result.times.size();
  j["seed_derivation"] =
      "splitmix64 chain over (master_seed, stream, N, bits(h)) -> cell; "
      "disorder = (cell, disorder, realization); state = (cell, state, realization, state)";
  json counts = json::object();
  for (int n : plan.sizes) counts[std::to_string(n)] = plan.realizations_for(n);
  j["realizations_per_size"] = counts;
  j["states_per_realization"] = plan.states_per_realization();
  j["failed_realizations"] = result.failed_realizations;
  j["total_realizations"] = result.total_realizations;
  json reals = json::array();
  for (const RealizationLog& log : result.realizations) {
    json r = {{"n", log.n}, {"h", log.h}, {"index", log.index}, {"seed", log.seed},
              {"fields", log.fields}};
    if (log.failed) r["error"] = log.error;
    reals.push_back(std::move(r));
  }
  j["realizations"] = std::move(reals);
  if (include_timestamp) {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    j["created"] = buf;
  }
  return j.dump(2);
}

void write_outputs(const ExperimentPlan& plan, const RunResult& result, std::string_view kind) {
  if (plan.output_path.empty()) throw PlanError("outputs.path: no output path configured");
  const std::string base = plan.output_path;
  auto open = [](const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    return f;
  };
  {
    auto f = open(base + ".records.csv");
    write_records_csv(f, result.records);
  }
  {
    auto f = open(base + ".series.csv");
    write_series_csv(f, result.series);
  }
  {
    auto f = open(base + ".saturated.csv");
    write_saturated_csv(f, result.saturated);
  }
  {
    auto f = open(base + ".meta.json");
    f << metadata_json(plan, result, kind) << '\n';
  }
}

}  // namespace macrospin
