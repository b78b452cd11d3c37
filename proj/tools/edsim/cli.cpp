#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "edabm/config.hpp"
#include "edabm/corpusgen.hpp"
#include "edabm/csv.hpp"
#include "edabm/ed_sim.hpp"
#include "edabm/error.hpp"
#include "edabm/eventlog.hpp"
#include "edabm/metrics.hpp"
#include "edabm/patient_pool.hpp"
#include "edabm/rng.hpp"
#include "edabm/scenarios.hpp"
#include "edabm/stats.hpp"

namespace edsim {

namespace fs = std::filesystem;
using nlohmann::json;
using edabm::SimulationError;
using edabm::ValidationError;

namespace {

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  return in;
}

std::string read_file(const std::string& path) {
  auto in = open_input(path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Records everything that determines a command's outputs. The digest covers
// the command, input contents, settings and seed, but not paths or --jobs.
class Manifest {
 public:
  Manifest(std::string command, std::uint64_t seed)
      : command_(std::move(command)), seed_(seed) {}

  void input(const std::string& name, const std::string& path) {
    inputs_[name] = {{"path", path}, {"digest", file_digest(path)}};
  }
  void setting(const std::string& key, json value) { settings_[key] = std::move(value); }
  void set_seed(std::uint64_t seed) { seed_ = seed; }
  std::uint64_t seed() const { return seed_; }

  std::uint64_t digest() const {
    json digests = json::object();
    for (const auto& [name, entry] : inputs_.items()) digests[name] = entry["digest"];
    const json canonical = {{"command", command_},
                            {"inputs", digests},
                            {"settings", settings_},
                            {"seed", seed_}};
    return edabm::fnv1a(canonical.dump());
  }

  std::string comment() const { return manifest_comment(digest(), seed_); }

  void write(const fs::path& dir, unsigned jobs) const {
    const json full = {{"command", command_},
                       {"digest", hex(digest())},
                       {"seed", seed_},
                       {"jobs", jobs},
                       {"out", dir.string()},
                       {"inputs", inputs_},
                       {"settings", settings_}};
    auto out = open_output(dir / "manifest.json");
    out << full.dump(2) << '\n';
  }

  static std::ofstream open_output(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
  }

 private:
  std::string command_;
  std::uint64_t seed_;
  json inputs_ = json::object();
  json settings_ = json::object();
};

template <typename Fn>
void write_output(const fs::path& path, const Manifest& manifest, Fn&& body) {
  auto out = Manifest::open_output(path);
  out << manifest.comment() << '\n';
  body(out);
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path.string() + "'");
}

double parse_threshold(const std::string& text) {
  if (text == "inf" || text == "infinity") return std::numeric_limits<double>::infinity();
  double k = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), k);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || !(k > 0.0)) {
    throw ValidationError("--k must be a positive number or 'inf', got '" + text + "'");
  }
  return k;
}

void check_scenario_name(const std::string& name) {
  const bool ok = !name.empty() && name != "." && name != ".." &&
                  std::all_of(name.begin(), name.end(), [](char c) {
                    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' ||
                           c == '-' || c == '+' || c == '.';
                  });
  if (!ok) {
    throw ValidationError("scenario name '" + name +
                          "' must use only letters, digits and _ - + .");
  }
}

edabm::PatientPool load_pool(const std::string& features, const std::string& trajectories) {
  auto fin = open_input(features);
  auto records = edabm::read_patient_features(fin);
  auto tin = open_input(trajectories);
  edabm::attach_trajectories(records, edabm::read_clean_trajectories(tin));
  return edabm::build_pool(std::move(records));
}

edabm::EDEnvironmentParams load_params(const std::string& path) {
  auto in = open_input(path);
  return edabm::read_params(in);
}

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

// ---- shared by simulate and sweep ------------------------------------------

struct SimulationInputs {
  std::string features;
  std::string trajectories;
  std::string params;
  std::vector<std::string> scenario_files;
  std::vector<std::string> presets;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> runs;
  unsigned jobs = default_jobs();
  double los_threshold = edabm::kDefaultLosThreshold;
};

void add_simulation_options(CLI::App& cmd, SimulationInputs& in) {
  cmd.add_option("--features", in.features, "Patient features CSV")->required();
  cmd.add_option("--trajectories", in.trajectories, "Cleaned trajectories CSV")
      ->required();
  cmd.add_option("--params", in.params, "Baseline environment parameters JSON")
      ->required();
  cmd.add_option("--scenario", in.scenario_files, "Scenario JSON file (repeatable)");
  cmd.add_option("--out", in.out, "Output directory");
  cmd.add_option("--seed", in.seed, "Master seed; overrides scenario files");
  cmd.add_option("--runs", in.runs, "Runs per scenario; overrides scenario files");
  cmd.add_option("--jobs", in.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd.add_option("--los-threshold", in.los_threshold, "Prolonged-stay threshold, hours")
      ->check(CLI::PositiveNumber);
}

std::vector<edabm::ScenarioSpec> collect_scenarios(const SimulationInputs& in,
                                                   Manifest& manifest) {
  std::vector<edabm::ScenarioSpec> specs;
  for (const auto& name : in.presets) {
    auto p = edabm::preset(name);
    if (!p) throw ValidationError("unknown preset '" + name + "'");
    specs.push_back(*p);
  }
  for (std::size_t i = 0; i < in.scenario_files.size(); ++i) {
    manifest.input("scenario[" + std::to_string(i) + "]", in.scenario_files[i]);
    auto f = open_input(in.scenario_files[i]);
    specs.push_back(edabm::read_scenario(f));
  }
  if (specs.empty()) specs.emplace_back();
  std::set<std::string> names;
  for (auto& s : specs) {
    check_scenario_name(s.name);
    if (!names.insert(s.name).second) {
      throw ValidationError("duplicate scenario name '" + s.name + "'");
    }
    if (in.seed) s.master_seed = *in.seed;
    if (in.runs) s.runs = *in.runs;
    s.validate();
  }
  json list = json::array();
  for (const auto& s : specs) list.push_back(json::parse(edabm::to_json_string(s)));
  manifest.setting("scenarios", list);
  manifest.set_seed(specs.front().master_seed);
  return specs;
}

// Synthetic stays with their source patient's features, keyed by sim id, so
// a model can score them directly.
std::vector<edabm::PatientRecord> synthetic_features(const edabm::PatientPool& pool,
                                                     const edabm::ExperimentResult& r) {
  std::vector<edabm::PatientRecord> out;
  for (const auto& run : r.runs) {
    for (const auto& s : run) {
      const auto& src = pool.record(s.source_index);
      edabm::PatientRecord rec;
      rec.patient_id = s.id.str();
      rec.features = src.features;
      rec.disposition = s.disposition;
      rec.true_los_hours = s.simulated_los_hours;
      out.push_back(std::move(rec));
    }
  }
  return out;
}

void write_datasets(const fs::path& dir, const Manifest& manifest,
                    const edabm::PatientPool& pool, const edabm::ExperimentResult& r) {
  write_output(dir / "dataset.csv", manifest, [&](std::ostream& o) {
    edabm::write_dataset_header(o);
    for (const auto& run : r.runs) edabm::write_dataset_rows(o, run);
  });
  const auto features = synthetic_features(pool, r);
  write_output(dir / "features.csv", manifest, [&](std::ostream& o) {
    edabm::write_patient_features(o, features);
  });
}

std::vector<double> per_run_median(const edabm::ExperimentResult& r) {
  std::vector<double> out;
  for (const auto& run : r.runs) {
    out.push_back(run.empty() ? std::nan("") : edabm::median(edabm::los_hours(run)));
  }
  return out;
}

std::vector<double> per_run_fraction(const edabm::ExperimentResult& r, double threshold) {
  std::vector<double> out;
  for (const auto& run : r.runs) {
    if (run.empty()) {
      out.push_back(std::nan(""));
      continue;
    }
    const auto n = std::count_if(run.begin(), run.end(), [&](const auto& s) {
      return s.simulated_los_hours > threshold;
    });
    out.push_back(static_cast<double>(n) / static_cast<double>(run.size()));
  }
  return out;
}

// One-sided paired test that `x` exceeds `y`, over runs present in both.
std::optional<double> paired_greater_p(const std::vector<double>& x,
                                       const std::vector<double>& y) {
  std::vector<double> a, b;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!std::isnan(x[i]) && !std::isnan(y[i])) {
      a.push_back(x[i]);
      b.push_back(y[i]);
    }
  }
  if (a.empty()) return std::nullopt;
  return edabm::wilcoxon_signed_rank(a, b, edabm::Alternative::Greater).p_value;
}

void print_summary(std::ostream& out, const std::string& name,
                   const edabm::ExperimentResult& r) {
  out << "  " << name << ": " << r.runs.size() << " runs";
  if (r.summary) {
    out << ", median LOS " << std::fixed << std::setprecision(2)
        << r.summary->median_los.median << " h, prolonged fraction "
        << r.summary->fraction_prolonged.median;
    out.unsetf(std::ios::floatfield);
  } else {
    out << ", no stays in window";
  }
  out << '\n';
}

// ---- commands ---------------------------------------------------------------

struct GenOptions {
  std::string spec;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
};

int cmd_gen(const GenOptions& o, std::ostream& out) {
  auto in = open_input(o.spec);
  auto spec = edabm::read_corpus_spec(in);
  if (o.seed) spec.seed = *o.seed;
  Manifest manifest("gen", spec.seed);
  manifest.input("spec", o.spec);
  manifest.setting("corpus", json::parse(edabm::to_json_string(spec)));

  const auto corpus = edabm::generate_corpus(spec);
  const fs::path dir = o.out;
  write_output(dir / "events.csv", manifest,
               [&](std::ostream& f) { edabm::write_event_log(f, corpus.events); });
  write_output(dir / "features.csv", manifest, [&](std::ostream& f) {
    edabm::write_patient_features(f, corpus.records);
  });
  write_output(dir / "ground_truth.csv", manifest, [&](std::ostream& f) {
    edabm::write_ground_truth(f, corpus.ground_truth);
  });
  manifest.write(dir, 1);
  out << "manifest " << hex(manifest.digest()) << " seed=" << manifest.seed() << '\n'
      << "wrote " << corpus.records.size() << " stays to " << dir.string() << '\n';
  return kExitOk;
}

struct CleanOptions {
  std::string events;
  std::string k = "3";
  std::string out = ".";
};

int cmd_clean(const CleanOptions& o, std::ostream& out) {
  const double k = parse_threshold(o.k);
  Manifest manifest("clean", 0);
  manifest.input("events", o.events);
  manifest.setting("k", o.k);

  auto in = open_input(o.events);
  const auto events = edabm::parse_event_log(in);
  const auto raw = edabm::extract_trajectories(events);
  const auto stats = edabm::compute_transition_stats(raw);
  const auto cleaned = edabm::remove_waiting_times(raw, stats, k);

  std::size_t clamped = 0;
  std::size_t steps = 0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    for (std::size_t j = 0; j < raw[i].steps.size(); ++j) {
      ++steps;
      if (cleaned[i].steps[j].minutes != raw[i].steps[j].minutes) ++clamped;
    }
  }

  const fs::path dir = o.out;
  write_output(dir / "trajectories.csv", manifest,
               [&](std::ostream& f) { edabm::write_clean_trajectories(f, cleaned); });
  write_output(dir / "transition_stats.csv", manifest,
               [&](std::ostream& f) { edabm::write_transition_stats(f, stats); });
  manifest.write(dir, 1);
  out << "manifest " << hex(manifest.digest()) << " seed=" << manifest.seed() << '\n'
      << "cleaned " << raw.size() << " stays; " << clamped << " of " << steps
      << " steps clamped\n";
  return kExitOk;
}

int cmd_simulate(SimulationInputs in, std::ostream& out) {
  Manifest manifest("simulate", 0);
  manifest.input("features", in.features);
  manifest.input("trajectories", in.trajectories);
  manifest.input("params", in.params);
  manifest.setting("los_threshold", in.los_threshold);
  const auto params = load_params(in.params);
  manifest.setting("params", json::parse(edabm::to_json_string(params)));
  const auto specs = collect_scenarios(in, manifest);
  const auto pool = load_pool(in.features, in.trajectories);

  const fs::path dir = in.out;
  std::vector<std::pair<std::string, edabm::LosSummary>> summaries;
  for (const auto& spec : specs) {
    const auto result =
        edabm::run_experiment(spec, params, pool, {in.jobs, in.los_threshold});
    write_datasets(dir / spec.name, manifest, pool, result);
    if (result.summary) summaries.emplace_back(spec.name, *result.summary);
    print_summary(out, spec.name, result);
  }
  write_output(dir / "los_summary.csv", manifest, [&](std::ostream& f) {
    edabm::write_los_summary_header(f);
    for (const auto& [name, s] : summaries) edabm::write_los_summary_row(f, name, s);
  });
  manifest.write(dir, in.jobs);
  out << "manifest " << hex(manifest.digest()) << " seed=" << manifest.seed() << '\n';
  return kExitOk;
}

struct SweepOptions {
  SimulationInputs sim;
  std::string presets;
  bool datasets = false;
};

int cmd_sweep(SweepOptions o, std::ostream& out) {
  auto& in = o.sim;
  if (!o.presets.empty()) {
    for (auto name : edabm::split(o.presets, ',')) in.presets.emplace_back(name);
  } else if (in.scenario_files.empty()) {
    for (const auto& s : edabm::preset_sweep()) in.presets.push_back(s.name);
  }
  // The baseline is the comparator for every other scenario.
  in.presets.erase(std::remove(in.presets.begin(), in.presets.end(), "baseline"),
                   in.presets.end());
  in.presets.insert(in.presets.begin(), "baseline");
  if (!in.runs) in.runs = 100;

  Manifest manifest("sweep", 0);
  manifest.input("features", in.features);
  manifest.input("trajectories", in.trajectories);
  manifest.input("params", in.params);
  manifest.setting("los_threshold", in.los_threshold);
  const auto params = load_params(in.params);
  manifest.setting("params", json::parse(edabm::to_json_string(params)));
  const auto specs = collect_scenarios(in, manifest);
  const auto pool = load_pool(in.features, in.trajectories);

  const fs::path dir = in.out;
  std::vector<double> base_median, base_fraction;
  std::ostringstream rows;
  std::vector<std::pair<std::string, edabm::LosSummary>> summaries;
  for (const auto& spec : specs) {
    const auto result =
        edabm::run_experiment(spec, params, pool, {in.jobs, in.los_threshold});
    const auto med = per_run_median(result);
    const auto frac = per_run_fraction(result, in.los_threshold);
    const bool is_baseline = &spec == &specs.front();
    if (is_baseline) {
      base_median = med;
      base_fraction = frac;
    }
    if (o.datasets) write_datasets(dir / spec.name, manifest, pool, result);
    print_summary(out, spec.name, result);

    rows << spec.name << ',' << edabm::to_string(spec.kind) << ','
         << edabm::format_number(spec.magnitude) << ',' << spec.runs;
    if (result.summary) {
      summaries.emplace_back(spec.name, *result.summary);
      const auto& s = *result.summary;
      for (double v : {s.median_los.median, s.median_los.q1, s.median_los.q3,
                       s.fraction_prolonged.median, s.fraction_prolonged.q1,
                       s.fraction_prolonged.q3}) {
        rows << ',' << edabm::format_number(v);
      }
    } else {
      rows << ",,,,,,";
    }
    const auto p_med = is_baseline ? std::nullopt : paired_greater_p(med, base_median);
    const auto p_frac =
        is_baseline ? std::nullopt : paired_greater_p(frac, base_fraction);
    rows << ',' << (p_med ? edabm::format_number(*p_med) : "") << ','
         << (p_frac ? edabm::format_number(*p_frac) : "") << '\n';
  }

  write_output(dir / "sweep.csv", manifest, [&](std::ostream& f) {
    f << "scenario,kind,magnitude,runs,median_los_h,median_los_q1,median_los_q3,"
         "prolonged_fraction,prolonged_q1,prolonged_q3,p_median_vs_baseline,"
         "p_prolonged_vs_baseline\n"
      << rows.str();
  });
  write_output(dir / "los_summary.csv", manifest, [&](std::ostream& f) {
    edabm::write_los_summary_header(f);
    for (const auto& [name, s] : summaries) edabm::write_los_summary_row(f, name, s);
  });
  manifest.write(dir, in.jobs);
  out << "manifest " << hex(manifest.digest()) << " seed=" << manifest.seed() << '\n';
  return kExitOk;
}

struct EvaluateOptions {
  std::string datasets;
  std::string features;
  std::vector<std::string> predictions;
  std::string fidelity_scenario = "baseline";
  std::string out = ".";
  double los_threshold = edabm::kDefaultLosThreshold;
};

// Dataset rows regrouped by run id; labels re-derived for `threshold`.
std::vector<edabm::SyntheticDataset> load_runs(const fs::path& path, double threshold) {
  auto in = open_input(path.string());
  auto stays = edabm::read_dataset(in);
  std::uint32_t max_run = 0;
  for (const auto& s : stays) max_run = std::max(max_run, s.id.run);
  std::vector<edabm::SyntheticDataset> runs(stays.empty() ? 0 : max_run + 1);
  for (auto& s : stays) {
    s.simulated_label = edabm::los_label(s.simulated_los_hours, threshold);
    runs[s.id.run].push_back(std::move(s));
  }
  return runs;
}

int cmd_evaluate(const EvaluateOptions& o, std::ostream& out) {
  Manifest manifest("evaluate", 0);
  manifest.setting("los_threshold", o.los_threshold);
  manifest.setting("fidelity_scenario", o.fidelity_scenario);

  std::vector<std::pair<std::string, std::string>> explicit_models;
  for (const auto& entry : o.predictions) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == entry.size()) {
      throw ValidationError("--predictions expects model=path, got '" + entry + "'");
    }
    explicit_models.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
    manifest.input("predictions:" + explicit_models.back().first,
                   explicit_models.back().second);
  }

  const fs::path root = o.datasets;
  if (!fs::is_directory(root)) {
    throw ValidationError("datasets directory '" + o.datasets + "' not found");
  }
  std::vector<fs::path> scenario_dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory() && fs::exists(entry.path() / "dataset.csv")) {
      scenario_dirs.push_back(entry.path());
    }
  }
  std::sort(scenario_dirs.begin(), scenario_dirs.end());
  if (scenario_dirs.empty()) {
    throw ValidationError("no <scenario>/dataset.csv under '" + o.datasets + "'");
  }

  struct Loaded {
    std::string name;
    std::vector<edabm::SyntheticDataset> runs;
    std::vector<std::pair<std::string, edabm::PredictionSet>> models;
  };
  std::map<std::string, edabm::PredictionSet> shared;
  for (const auto& [model, path] : explicit_models) {
    auto in = open_input(path);
    shared[model] = edabm::read_predictions(in);
  }
  std::vector<Loaded> scenarios;
  for (const auto& d : scenario_dirs) {
    Loaded l;
    l.name = d.filename().string();
    manifest.input("dataset:" + l.name, (d / "dataset.csv").string());
    l.runs = load_runs(d / "dataset.csv", o.los_threshold);
    for (const auto& [model, preds] : shared) l.models.emplace_back(model, preds);
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(d)) {
      const auto file = entry.path().filename().string();
      if (file.starts_with("predictions_") && file.ends_with(".csv")) {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      const auto stem = f.stem().string().substr(std::string("predictions_").size());
      manifest.input("predictions:" + l.name + ":" + stem, f.string());
      auto in = open_input(f.string());
      l.models.emplace_back(stem, edabm::read_predictions(in));
    }
    scenarios.push_back(std::move(l));
  }

  std::vector<edabm::PatientRecord> real;
  if (!o.features.empty()) {
    manifest.input("features", o.features);
    auto in = open_input(o.features);
    real = edabm::read_patient_features(in);
  }

  const fs::path dir = o.out;
  write_output(dir / "robustness.csv", manifest, [&](std::ostream& f) {
    edabm::write_robustness_header(f);
    for (const auto& s : scenarios) {
      for (const auto& [model, preds] : s.models) {
        edabm::write_robustness_row(f, edabm::robustness_report(s.name, model, s.runs, preds));
      }
    }
  });
  write_output(dir / "los_summary.csv", manifest, [&](std::ostream& f) {
    edabm::write_los_summary_header(f);
    for (const auto& s : scenarios) {
      const bool any = std::any_of(s.runs.begin(), s.runs.end(),
                                   [](const auto& r) { return !r.empty(); });
      if (any) {
        edabm::write_los_summary_row(f, s.name,
                                     edabm::los_summary(s.runs, o.los_threshold));
      }
    }
  });

  std::size_t models = 0;
  for (const auto& s : scenarios) models += s.models.size();
  out << "evaluated " << scenarios.size() << " scenarios, " << models
      << " scenario/model pairs\n";

  if (!real.empty()) {
    const auto it = std::find_if(scenarios.begin(), scenarios.end(), [&](const auto& s) {
      return s.name == o.fidelity_scenario;
    });
    if (it == scenarios.end()) {
      throw ValidationError("fidelity scenario '" + o.fidelity_scenario +
                            "' has no dataset under '" + o.datasets + "'");
    }
    const auto rows = edabm::fidelity_report(real, it->runs);
    write_output(dir / "fidelity.csv", manifest,
                 [&](std::ostream& f) { edabm::write_fidelity_csv(f, rows); });
    write_output(dir / "coverage.csv", manifest, [&](std::ostream& f) {
      f << "scenario,coverage,width_median_h,width_q1_h,width_q3_h,considered,"
           "never_sampled\n";
      const auto& c = rows.front().coverage;
      f << it->name << ',' << edabm::format_number(c.coverage) << ','
        << edabm::format_number(c.width.median) << ','
        << edabm::format_number(c.width.q1) << ',' << edabm::format_number(c.width.q3)
        << ',' << c.considered << ',' << c.never_sampled << '\n';
    });
    out << "fidelity against " << real.size() << " real stays written\n";
  }
  manifest.write(dir, 1);
  out << "manifest " << hex(manifest.digest()) << " seed=" << manifest.seed() << '\n';
  return kExitOk;
}

// Prints every known report in `dir` as an aligned text table.
int cmd_report(const std::string& dir_name, std::ostream& out) {
  const fs::path dir = dir_name;
  if (!fs::is_directory(dir)) {
    throw ValidationError("report directory '" + dir_name + "' not found");
  }
  std::ostringstream text;
  int found = 0;
  for (const char* name : {"los_summary.csv", "sweep.csv", "fidelity.csv",
                           "coverage.csv", "robustness.csv"}) {
    const fs::path path = dir / name;
    if (!fs::exists(path)) continue;
    ++found;
    auto in = open_input(path.string());
    std::vector<std::vector<std::string>> cells;
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line.front() == '#') continue;
      std::vector<std::string> row;
      for (auto f : edabm::split(line, ',')) row.emplace_back(f);
      cells.push_back(std::move(row));
    }
    std::vector<std::size_t> width;
    for (const auto& row : cells) {
      width.resize(std::max(width.size(), row.size()));
      for (std::size_t i = 0; i < row.size(); ++i) {
        width[i] = std::max(width[i], row[i].size());
      }
    }
    text << "== " << name << " ==\n";
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        text << (i ? "  " : "") << std::left << std::setw(static_cast<int>(width[i]))
             << row[i];
      }
      text << '\n';
    }
    text << '\n';
  }
  if (found == 0) throw ValidationError("no report CSVs in '" + dir_name + "'");
  out << text.str();
  auto f = Manifest::open_output(dir / "report.txt");
  f << text.str();
  return kExitOk;
}

}  // namespace

std::string file_digest(const std::string& path) { return hex(edabm::fnv1a(read_file(path))); }

std::string manifest_comment(std::uint64_t digest, std::uint64_t seed) {
  return "# manifest " + hex(digest) + " seed=" + std::to_string(seed);
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Emergency-department agent-based simulator and synthetic EHR pipeline",
               "edsim"};
  app.require_subcommand(1);

  GenOptions gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a synthetic event-log corpus");
  gen_cmd->add_option("spec", gen.spec, "Corpus spec JSON")->required();
  gen_cmd->add_option("--out", gen.out, "Output directory");
  gen_cmd->add_option("--seed", gen.seed, "Override the seed in the corpus file");

  CleanOptions clean;
  auto* clean_cmd =
      app.add_subcommand("clean", "Remove waiting times from an event log");
  clean_cmd->add_option("events", clean.events, "Event-log CSV")->required();
  clean_cmd->add_option("--k", clean.k, "Modified z-score threshold, or 'inf'");
  clean_cmd->add_option("--out", clean.out, "Output directory");

  SimulationInputs simulate;
  auto* sim_cmd = app.add_subcommand("simulate", "Run scenarios and write datasets");
  add_simulation_options(*sim_cmd, simulate);
  sim_cmd->add_option("--preset", simulate.presets, "Named preset scenario (repeatable)");

  SweepOptions sweep;
  auto* sweep_cmd =
      app.add_subcommand("sweep", "Compare preset scenarios against baseline");
  add_simulation_options(*sweep_cmd, sweep.sim);
  sweep_cmd->add_option("--presets", sweep.presets,
                        "Comma-separated preset names (default: all twelve)");
  sweep_cmd->add_flag("--datasets", sweep.datasets, "Also write per-scenario datasets");

  EvaluateOptions evaluate;
  auto* eval_cmd =
      app.add_subcommand("evaluate", "Score predictions and baseline fidelity");
  eval_cmd->add_option("--datasets", evaluate.datasets,
                       "Directory of <scenario>/dataset.csv")
      ->required();
  eval_cmd->add_option("--features", evaluate.features,
                       "Real patient features with true LOS, for fidelity");
  eval_cmd->add_option("--predictions", evaluate.predictions,
                       "model=path predictions applied to every scenario");
  eval_cmd->add_option("--fidelity-scenario", evaluate.fidelity_scenario,
                       "Scenario compared against the real stays");
  eval_cmd->add_option("--out", evaluate.out, "Output directory");
  eval_cmd->add_option("--los-threshold", evaluate.los_threshold,
                       "Prolonged-stay threshold, hours")
      ->check(CLI::PositiveNumber);

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "Print report CSVs as tables");
  report_cmd->add_option("dir", report_dir, "Directory with report CSVs")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "edsim: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen, out);
    if (*clean_cmd) return cmd_clean(clean, out);
    if (*sim_cmd) return cmd_simulate(simulate, out);
    if (*sweep_cmd) return cmd_sweep(sweep, out);
    if (*eval_cmd) return cmd_evaluate(evaluate, out);
    if (*report_cmd) return cmd_report(report_dir, out);
  } catch (const ValidationError& e) {
    err << "edsim: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "edsim: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitValidation;
}

}  // namespace edsim
