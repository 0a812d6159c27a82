#include <gtest/gtest.h>

#include <omp.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "macrospin/experiment.hpp"

using namespace macrospin;

namespace {

ExperimentPlan small_plan() {
  ExperimentPlan p;
  p.sizes = {4};
  p.h_values = {1.0, 5.0};
  p.realizations = 3;
  p.states = 2;
  p.restarts = 4;
  p.times = {0.5, 10.0, 1e3, 5e3, 1e4};
  p.master_seed = 42;
  return p;
}

std::string records_csv(const RunResult& r) {
  std::ostringstream out;
  write_records_csv(out, r.records);
  return out.str();
}

std::string read(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Plan, ParsesAllFields) {
  const ExperimentPlan p = parse_plan(R"({
    "preset": "xx_anderson", "h_values": [0.5, 5], "sizes": [6, 8],
    "realizations": 3, "states": 4, "master_seed": 9,
    "time_grid": {"t_min": 1, "t_max": 100, "points_per_decade": 10},
    "saturation": {"t_begin": 10, "t_end": 100},
    "outputs": {"path": "/tmp/x", "format": "csv"}
  })");
  EXPECT_EQ(p.preset, "xx_anderson");
  EXPECT_EQ(p.sizes, (std::vector<int>{6, 8}));
  EXPECT_EQ(p.master_seed, 9u);
  EXPECT_EQ(p.evaluation_times().size(), 21u);
  EXPECT_EQ(p.model(6, 5.0).j_z, 0.0);
  const ExperimentPlan back = parse_plan(plan_to_json(p));
  EXPECT_EQ(plan_to_json(back), plan_to_json(p));
}

TEST(Plan, SyntaxErrorReportsLine) {
  try {
    parse_plan("{\n  \"sizes\": [4],\n  \"h_values\": [1,,]\n}");
    FAIL();
  } catch (const PlanError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(Plan, FieldErrorsNameTheField) {
  auto message = [](const std::string& text) {
    try {
      parse_plan(text);
    } catch (const PlanError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message(R"({"sizes": [4], "h_values": [1], "bogus": 1})").find("bogus"), std::string::npos);
  EXPECT_NE(message(R"({"sizes": "four", "h_values": [1]})").find("sizes"), std::string::npos);
  EXPECT_NE(message(R"({"sizes": [4], "h_values": [1], "time_grid": {"t_mn": 1}})").find("time_grid.t_mn"),
            std::string::npos);
  EXPECT_NE(message(R"({"sizes": [4], "h_values": [-1]})").find("h_values"), std::string::npos);
  EXPECT_NE(message(R"({"sizes": [5], "h_values": [1], "state_kind": "rotated_neel", "thetas": [0]})")
                .find("even"),
            std::string::npos);
}

TEST(Plan, CapacityViolation) {
  EXPECT_THROW(parse_plan(R"({"sizes": [16], "h_values": [1]})"), CapacityError);
}

TEST(Plan, RealizationPresets) {
  EXPECT_EQ(default_realizations("desk", 6), 50);
  EXPECT_EQ(default_realizations("desk", 8), 50);
  EXPECT_EQ(default_realizations("desk", 10), 20);
  EXPECT_EQ(default_realizations("desk", 12), 10);
  EXPECT_EQ(default_realizations("paper-scale", 6), 10000);
  EXPECT_EQ(default_realizations("paper-scale", 8), 1000);
  EXPECT_EQ(default_realizations("paper-scale", 10), 1000);
  EXPECT_EQ(default_realizations("paper-scale", 12), 200);
  EXPECT_EQ(default_realizations("paper-scale", 14), 200);
}

TEST(Run, DeterministicAcrossReruns) {
  const ExperimentPlan p = small_plan();
  EXPECT_EQ(records_csv(run_time_series(p)), records_csv(run_time_series(p)));
}

TEST(Run, IndependentOfWorkerCount) {
  const ExperimentPlan p = small_plan();
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const std::string one = records_csv(run_time_series(p));
  omp_set_num_threads(3);
  const std::string three = records_csv(run_time_series(p));
  omp_set_num_threads(saved);
  EXPECT_EQ(one, three);
}

TEST(Run, RecordsLayoutAndAggregates) {
  const ExperimentPlan p = small_plan();
  const RunResult r = run_time_series(p);
  EXPECT_EQ(r.records.size(), 2u * 3u * 2u * 5u);
  const std::string csv = records_csv(r);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), std::string(kRecordsHeader));
  ASSERT_EQ(r.saturated.size(), 2u);
  for (const SaturatedPoint& s : r.saturated) {
    EXPECT_EQ(s.realizations, 3);
    EXPECT_GE(s.mean_m_over_n, 1.0 - 1e-9);
    EXPECT_LE(s.mean_m_over_n, 4.0 + 1e-9);
  }
  // t = 0.5 is early enough that random GHZ states are still nearly maximal
  EXPECT_GT(r.series.front().mean_m_over_n, 3.0);
}

TEST(Run, ScalingUsesOnlySaturationWindow) {
  const RunResult r = run_scaling(small_plan());
  EXPECT_EQ(r.times, (std::vector<double>{1e3, 5e3, 1e4}));
}

TEST(Run, StaggeredRecordsVariance) {
  ExperimentPlan p = small_plan();
  p.state_kind = StateKind::rotated_neel;
  p.thetas = {0.0, 1.0};
  p.h_values = {5.0};
  const RunResult r = run_staggered(p);
  ASSERT_FALSE(r.records.empty());
  for (const RunRecord& rec : r.records) {
    ASSERT_TRUE(rec.v_stag.has_value());
    ASSERT_TRUE(rec.theta.has_value());
    EXPECT_LE(*rec.v_stag, rec.m + 1e-6);
  }
  p.state_kind = StateKind::random_ghz;
  EXPECT_THROW(run_staggered(p), PlanError);
}

TEST(Run, SeedTableMatchesRecords) {
  const ExperimentPlan p = small_plan();
  const auto seeds = seed_table(p);
  EXPECT_EQ(seeds.size(), 2u * 3u * 2u);
  const RunResult r = run_time_series(p);
  EXPECT_EQ(r.records.front().seed, seeds.front().disorder_seed);
}

TEST(Run, DisorderKeyedByH) {
  ExperimentPlan p = small_plan();
  EXPECT_NE(cell_seed(p, 4, 1.0), cell_seed(p, 4, 5.0));
  p.reuse_disorder_across_h = true;
  EXPECT_EQ(cell_seed(p, 4, 1.0), cell_seed(p, 4, 5.0));
}

TEST(Outputs, FilesAreByteIdenticalExceptTimestamp) {
  const auto dir = std::filesystem::temp_directory_path() / "macrospin_test_outputs";
  std::filesystem::create_directories(dir);
  ExperimentPlan p = small_plan();
  p.output_path = (dir / "a").string();
  const RunResult r1 = run_time_series(p);
  write_outputs(p, r1, "time-series");
  const std::string first = read(p.output_path + ".records.csv");
  const std::string first_series = read(p.output_path + ".series.csv");
  write_outputs(p, run_time_series(p), "time-series");
  EXPECT_EQ(read(p.output_path + ".records.csv"), first);
  EXPECT_EQ(read(p.output_path + ".series.csv"), first_series);
  EXPECT_EQ(metadata_json(p, r1, "time-series", false), metadata_json(p, r1, "time-series", false));
  EXPECT_NE(read(p.output_path + ".meta.json").find("\"created\""), std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST(Threads, EnvironmentCapsWorkers) {
  const int saved = omp_get_max_threads();
  setenv("MACROSPIN_THREADS", "1", 1);
  EXPECT_EQ(configure_threads(), 1);
  unsetenv("MACROSPIN_THREADS");
  omp_set_num_threads(saved);
}

TEST(LbitDemo, InteractingDecaysFreeStays) {
  LbitDemoConfig c;
  c.n_sites = 6;
  c.restarts = 4;
  c.time_grid = {0.1, 1e3, 10};
  const auto rows = run_lbit_demo(c);
  EXPECT_NEAR(rows.back().m_over_n_free, 6.0, 1e-6);
  EXPECT_LT(rows.back().m_over_n_interacting, 6.0);
  EXPECT_GE(rows.back().m_over_n_interacting, rows.back().bound_over_n - 1e-9);
}
