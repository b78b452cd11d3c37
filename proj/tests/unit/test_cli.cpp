#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "edabm/csv.hpp"
#include "edabm/ed_sim.hpp"
#include "edabm/eventlog.hpp"
#include "edabm/metrics.hpp"
#include "fixtures.hpp"

namespace edabm {
namespace {

namespace fs = std::filesystem;
using testing::scratch_dir;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result edsim_run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = edsim::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  out << text;
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

// Data rows of a report CSV as header-keyed maps.
std::vector<std::map<std::string, std::string>> rows_of(const fs::path& p) {
  std::ifstream in(p);
  CsvReader csv(in);
  std::vector<std::map<std::string, std::string>> out;
  while (csv.next()) {
    std::map<std::string, std::string> row;
    for (std::size_t i = 0; i < csv.header().size(); ++i) row[csv.header()[i]] = std::string(csv.field(i));
    out.push_back(std::move(row));
  }
  return out;
}

// A small corpus that has been generated and cleaned, shared by the tests.
class Pipeline : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = new fs::path(scratch_dir("cli_pipeline"));
    spit(*dir_ / "corpus.json", R"({"n_stays": 400, "seed": 77})");
    spit(*dir_ / "params.json",
         R"({"hourly_arrival_rate": 6, "bed_capacity": 40, "clinician_capacity": 8, "imaging_capacity": 4})");
    ASSERT_EQ(edsim_run({"gen", (*dir_ / "corpus.json").string(), "--out", (*dir_ / "gen").string()}).code, 0);
    ASSERT_EQ(edsim_run({"clean", (*dir_ / "gen/events.csv").string(), "--out", (*dir_ / "clean").string()}).code,
              0);
  }
  static void TearDownTestSuite() {
    fs::remove_all(*dir_);
    delete dir_;
  }

  static std::vector<std::string> sim_inputs() {
    return {"--features", (*dir_ / "gen/features.csv").string(), "--trajectories",
            (*dir_ / "clean/trajectories.csv").string(), "--params", (*dir_ / "params.json").string()};
  }

  static std::vector<std::string> with(std::vector<std::string> head, const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    return head;
  }

  static fs::path* dir_;
};

fs::path* Pipeline::dir_ = nullptr;

TEST_F(Pipeline, GenWritesThreeFilesWithManifestRow) {
  for (const char* f : {"events.csv", "features.csv", "ground_truth.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(*dir_ / "gen" / f)) << f;
  }
  const auto line = first_line(*dir_ / "gen/events.csv");
  EXPECT_EQ(line.rfind("# manifest ", 0), 0u) << line;
  EXPECT_NE(line.find(" seed=77"), std::string::npos);
  EXPECT_EQ(first_line(*dir_ / "clean/trajectories.csv").rfind("# manifest ", 0), 0u);
  std::ifstream in(*dir_ / "gen/features.csv");
  EXPECT_EQ(read_patient_features(in).size(), 400u);
}

TEST_F(Pipeline, GenIsReproducible) {
  const auto other = *dir_ / "gen_again";
  ASSERT_EQ(edsim_run({"gen", (*dir_ / "corpus.json").string(), "--out", other.string()}).code, 0);
  for (const char* f : {"events.csv", "features.csv", "ground_truth.csv"}) {
    EXPECT_EQ(edsim::file_digest((other / f).string()), edsim::file_digest((*dir_ / "gen" / f).string())) << f;
  }
  const auto seeded = *dir_ / "gen_seeded";
  ASSERT_EQ(edsim_run({"gen", (*dir_ / "corpus.json").string(), "--seed", "78", "--out", seeded.string()}).code, 0);
  EXPECT_NE(slurp(seeded / "events.csv"), slurp(*dir_ / "gen/events.csv"));
}

TEST_F(Pipeline, CleanWithInfiniteThresholdKeepsRawDurations) {
  const auto out = *dir_ / "clean_inf";
  const auto r = edsim_run({"clean", (*dir_ / "gen/events.csv").string(), "--k", "inf", "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find(" 0 of "), std::string::npos) << r.out;
  std::ifstream ev(*dir_ / "gen/events.csv");
  const auto raw = extract_trajectories(parse_event_log(ev));
  std::ifstream tin(out / "trajectories.csv");
  const auto cleaned = read_clean_trajectories(tin);
  ASSERT_EQ(cleaned.size(), raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) EXPECT_EQ(cleaned[i].steps, raw[i].steps);
}

TEST(Cli, CleanLeavesConformingLogUnchanged) {
  const auto dir = scratch_dir("cli_conforming");
  // Every stay has identical durations, so nothing deviates.
  std::ostringstream log;
  log << "stay_id,activity,timestamp\n";
  for (int s = 0; s < 5; ++s) {
    log << s << ",arrival,2150-01-01T0" << s << ":00\n"
        << s << ",triage,2150-01-01T0" << s << ":10\n"
        << s << ",discharge,2150-01-01T0" << s << ":40\n";
  }
  spit(dir / "events.csv", log.str());
  const auto r = edsim_run({"clean", (dir / "events.csv").string(), "--out", dir.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  std::ifstream tin(dir / "trajectories.csv");
  const auto cleaned = read_clean_trajectories(tin);
  ASSERT_EQ(cleaned.size(), 5u);
  for (const auto& t : cleaned) {
    EXPECT_EQ(t.steps, (std::vector<Step>{{Activity::Triage, 10}, {Activity::Discharge, 30}}));
  }
  fs::remove_all(dir);
}

TEST_F(Pipeline, SimulateIsReproducibleAcrossJobCounts) {
  const auto a = *dir_ / "sim_a", b = *dir_ / "sim_b";
  auto ra = edsim_run(with({"simulate", "--runs", "2", "--seed", "5", "--jobs", "1", "--out", a.string()},
                           sim_inputs()));
  auto rb = edsim_run(with({"simulate", "--runs", "2", "--seed", "5", "--jobs", "2", "--out", b.string()},
                           sim_inputs()));
  ASSERT_EQ(ra.code, 0) << ra.err;
  ASSERT_EQ(rb.code, 0) << rb.err;
  EXPECT_EQ(slurp(a / "baseline/dataset.csv"), slurp(b / "baseline/dataset.csv"));
  EXPECT_EQ(slurp(a / "baseline/features.csv"), slurp(b / "baseline/features.csv"));
  EXPECT_EQ(slurp(a / "los_summary.csv"), slurp(b / "los_summary.csv"));
  EXPECT_EQ(first_line(a / "baseline/dataset.csv").rfind("# manifest ", 0), 0u);
  EXPECT_NE(first_line(a / "baseline/dataset.csv").find("seed=5"), std::string::npos);

  std::ifstream in(a / "baseline/dataset.csv");
  const auto stays = read_dataset(in);
  ASSERT_FALSE(stays.empty());
  std::set<std::uint32_t> runs;
  for (const auto& s : stays) runs.insert(s.id.run);
  EXPECT_EQ(runs, (std::set<std::uint32_t>{0, 1}));
}

TEST_F(Pipeline, SimulateScenarioFileAndPreset) {
  spit(*dir_ / "surge.json", R"({"name": "surge", "kind": "arrival_surge", "magnitude": 30, "runs": 1})");
  const auto out = *dir_ / "sim_scen";
  const auto r = edsim_run(with({"simulate", "--preset", "lab+10min", "--scenario", (*dir_ / "surge.json").string(),
                                 "--runs", "1", "--out", out.string()},
                                sim_inputs()));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "lab+10min/dataset.csv"));
  EXPECT_TRUE(fs::exists(out / "surge/dataset.csv"));
  EXPECT_EQ(rows_of(out / "los_summary.csv").size(), 2u);
}

TEST_F(Pipeline, EvaluateScoresPerfectAndAllNegativeModels) {
  const auto sim = *dir_ / "sim_eval";
  ASSERT_EQ(edsim_run(with({"simulate", "--runs", "3", "--seed", "9", "--out", sim.string()}, sim_inputs())).code, 0);

  std::ifstream in(sim / "baseline/dataset.csv");
  const auto stays = read_dataset(in);
  PredictionSet perfect, negative;
  std::size_t positives = 0;
  for (const auto& s : stays) {
    perfect[s.id.str()] = {s.simulated_label, std::nullopt};
    negative[s.id.str()] = {0, 0.0};
    positives += s.simulated_label;
  }
  {
    std::ofstream f(sim / "baseline/predictions_oracle.csv");
    write_predictions(f, perfect);
  }
  {
    std::ofstream f(*dir_ / "negative.csv");
    write_predictions(f, negative);
  }
  const auto out = *dir_ / "eval";
  const auto r = edsim_run({"evaluate", "--datasets", sim.string(), "--features",
                            (*dir_ / "gen/features.csv").string(), "--predictions",
                            "never=" + (*dir_ / "negative.csv").string(), "--out", out.string()});
  ASSERT_EQ(r.code, 0) << r.err;

  const auto rows = rows_of(out / "robustness.csv");
  ASSERT_EQ(rows.size(), 2u);
  for (const auto& row : rows) {
    EXPECT_EQ(row.at("scenario"), "baseline");
    EXPECT_EQ(row.at("runs"), "3");
    EXPECT_EQ(row.at("missing_predictions"), "0");
    if (row.at("model") == "oracle") {
      EXPECT_EQ(std::stod(row.at("recall_mean")), 1.0);
      EXPECT_EQ(std::stod(row.at("missed_per_100_mean")), 0.0);
    } else {
      EXPECT_EQ(row.at("model"), "never");
      EXPECT_NEAR(std::stod(row.at("missed_per_100_mean")), 100.0 * std::stod(row.at("prevalence_mean")), 1e-9);
      EXPECT_EQ(std::stod(row.at("recall_mean")), 0.0);
    }
  }
  EXPECT_GT(positives, 0u);
  for (const char* f : {"los_summary.csv", "fidelity.csv", "coverage.csv", "manifest.json"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const auto cov = rows_of(out / "coverage.csv");
  ASSERT_EQ(cov.size(), 1u);
  EXPECT_GE(std::stod(cov[0].at("coverage")), 0.0);

  const auto rep = edsim_run({"report", out.string()});
  ASSERT_EQ(rep.code, 0) << rep.err;
  EXPECT_NE(rep.out.find("== robustness.csv =="), std::string::npos);
  EXPECT_TRUE(fs::exists(out / "report.txt"));
}

TEST_F(Pipeline, SweepWritesPValuesAgainstBaseline) {
  const auto out = *dir_ / "sweep";
  const auto r = edsim_run(with({"sweep", "--presets", "arrivals+20pct,lab+20min", "--runs", "6", "--seed", "3",
                                 "--jobs", "2", "--out", out.string()},
                                sim_inputs()));
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = rows_of(out / "sweep.csv");
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].at("scenario"), "baseline");
  EXPECT_TRUE(rows[0].at("p_median_vs_baseline").empty());
  EXPECT_FALSE(rows[1].at("p_median_vs_baseline").empty());
  EXPECT_EQ(rows[2].at("kind"), "lab_delay");
}

TEST(Cli, ExitCodes) {
  const auto dir = scratch_dir("cli_exit");
  EXPECT_EQ(edsim_run({}).code, edsim::kExitValidation);
  EXPECT_EQ(edsim_run({"frobnicate"}).code, edsim::kExitValidation);
  EXPECT_EQ(edsim_run({"--help"}).code, edsim::kExitOk);
  EXPECT_EQ(edsim_run({"clean", (dir / "missing.csv").string()}).code, edsim::kExitValidation);

  spit(dir / "bad.csv", "stay_id,activity,timestamp\n1,arrival,2150-01-01T00:00\n1,teleport,2150-01-01T00:10\n");
  const auto bad = edsim_run({"clean", (dir / "bad.csv").string(), "--out", dir.string()});
  EXPECT_EQ(bad.code, edsim::kExitValidation);
  EXPECT_NE(bad.err.find("teleport"), std::string::npos) << bad.err;

  spit(dir / "events.csv", "stay_id,activity,timestamp\n1,arrival,2150-01-01T00:00\n1,discharge,2150-01-01T00:10\n");
  EXPECT_EQ(edsim_run({"clean", (dir / "events.csv").string(), "--k", "-1"}).code, edsim::kExitValidation);

  // An output path under a regular file cannot be created: a runtime failure.
  spit(dir / "blocker", "x");
  EXPECT_EQ(edsim_run({"clean", (dir / "events.csv").string(), "--out", (dir / "blocker/sub").string()}).code,
            edsim::kExitRuntime);
  fs::remove_all(dir);
}

TEST(Cli, ManifestCommentFormat) {
  EXPECT_EQ(edsim::manifest_comment(0xabcULL, 42), "# manifest 0000000000000abc seed=42");
}

}  // namespace
}  // namespace edabm
