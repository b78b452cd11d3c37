#include "edabm/config.hpp"

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "edabm/error.hpp"

namespace edabm {

namespace {

using nlohmann::json;

json parse_json(std::istream& in, std::string_view what) {
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

// Reads keys from one JSON object and complains about anything left over.
class Fields {
 public:
  Fields(const json& obj, std::string context) : obj_(obj), context_(std::move(context)) {
    if (!obj_.is_object()) throw ValidationError(context_ + ": expected an object");
  }

  const json* get(const std::string& key) {
    used_.insert(key);
    const auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void number(const std::string& key, double& out) {
    if (const json* v = get(key)) out = as_number(*v, key);
  }

  void integer(const std::string& key, int& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_integer()) fail(key, "expected an integer");
      out = v->get<int>();
    }
  }

  void unsigned_integer(const std::string& key, std::uint64_t& out) {
    if (const json* v = get(key)) {
      if (!v->is_number_unsigned()) fail(key, "expected a non-negative integer");
      out = v->get<std::uint64_t>();
    }
  }

  void boolean(const std::string& key, bool& out) {
    if (const json* v = get(key)) {
      if (!v->is_boolean()) fail(key, "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const std::string& key, std::string& out) {
    if (const json* v = get(key)) {
      if (!v->is_string()) fail(key, "expected a string");
      out = v->get<std::string>();
    }
  }

  template <std::size_t N>
  void numbers(const std::string& key, std::array<double, N>& out) {
    if (const json* v = get(key)) {
      if (!v->is_array() || v->size() != N) {
        fail(key, "expected an array of " + std::to_string(N) + " numbers");
      }
      for (std::size_t i = 0; i < N; ++i) out[i] = as_number((*v)[i], key);
    }
  }

  double as_number(const json& v, const std::string& key) const {
    if (!v.is_number()) fail(key, "expected a number");
    return v.get<double>();
  }

  [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
    throw ValidationError(context_ + ": key '" + key + "': " + msg);
  }

  std::string sub(const std::string& key) const { return context_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : obj_.items()) {
      if (!used_.contains(key)) {
        throw ValidationError(context_ + ": unknown key '" + key + "'");
      }
    }
  }

 private:
  const json& obj_;
  std::string context_;
  std::set<std::string> used_;
};

Activity activity_key(const std::string& name, const std::string& context) {
  const auto a = parse_activity(name);
  if (!a) {
    throw ValidationError(context + ": unknown activity '" + name +
                          "' (expected one of " + std::string(activity_names()) + ")");
  }
  return *a;
}

json params_json(const EDEnvironmentParams& p) {
  json delays = json::object();
  for (const auto& [a, minutes] : p.workflow_delays) {
    delays[std::string(to_string(a))] = minutes;
  }
  return {
      {"hourly_arrival_rate", p.hourly_arrival_rate},
      {"bed_capacity", p.bed_capacity},
      {"clinician_capacity", p.clinician_capacity},
      {"imaging_capacity", p.imaging_capacity},
      {"workflow_delays", delays},
      {"tick_minutes", p.tick_minutes},
  };
}

json scenario_json(const ScenarioSpec& s) {
  json j = {
      {"name", s.name},
      {"kind", std::string(to_string(s.kind))},
      {"magnitude", s.magnitude},
      {"window_start", s.window_start_days},
      {"window_days", s.window_days},
      {"cooldown_days", s.cooldown_days},
      {"runs", s.runs},
      {"seed", s.master_seed},
      {"paired", s.paired_seeds},
      {"steady_state", s.steady_state},
  };
  if (s.kind == ScenarioKind::Composite) {
    j["arrival_pct"] = s.composite.arrival_increase_pct;
    j["clinician_pct"] = s.composite.clinician_cut_pct;
    j["lab_minutes"] = s.composite.lab_delay_minutes;
  }
  return j;
}

json lognormal_json(const LogNormalSpec& d) {
  return {{"median_min", d.median_min}, {"sigma", d.sigma}};
}

void read_lognormal(Fields& f, LogNormalSpec& d) {
  f.number("median_min", d.median_min);
  f.number("sigma", d.sigma);
}

json corpus_json(const CorpusSpec& s) {
  json durations = json::object();
  for (const auto& [a, d] : s.durations) {
    durations[std::string(to_string(a))] = lognormal_json(d);
  }
  json templates = json::array();
  for (const auto& t : s.templates) {
    templates.push_back({{"p_lab", t.p_lab},
                         {"p_imaging", t.p_imaging},
                         {"p_medication", t.p_medication},
                         {"extra_vitals_mean", t.extra_vitals_mean}});
  }
  return {
      {"n_stays", s.n_stays},
      {"seed", s.seed},
      {"acuity_mix", s.acuity_mix},
      {"disposition_mix", s.disposition_mix},
      {"durations", durations},
      {"templates", templates},
      {"discharge_scale", s.discharge_scale},
      {"waits",
       {{"probability", s.waits.probability},
        {"median_min", s.waits.magnitude.median_min},
        {"sigma", s.waits.magnitude.sigma},
        {"min_minutes", s.waits.min_minutes}}},
      {"mean_interarrival_min", s.mean_interarrival_min},
      {"start", s.start},
  };
}

}  // namespace

EDEnvironmentParams read_params(std::istream& in) {
  const json j = parse_json(in, "params");
  Fields f(j, "params");
  EDEnvironmentParams p;
  if (const json* rate = f.get("hourly_arrival_rate")) {
    if (rate->is_number()) {
      p.hourly_arrival_rate.fill(rate->get<double>());
    } else {
      f.numbers("hourly_arrival_rate", p.hourly_arrival_rate);
    }
  } else {
    f.fail("hourly_arrival_rate", "required");
  }
  f.integer("bed_capacity", p.bed_capacity);
  f.integer("clinician_capacity", p.clinician_capacity);
  f.integer("imaging_capacity", p.imaging_capacity);
  f.integer("tick_minutes", p.tick_minutes);
  if (const json* delays = f.get("workflow_delays")) {
    Fields d(*delays, f.sub("workflow_delays"));
    for (const auto& [name, value] : delays->items()) {
      const Activity a = activity_key(name, f.sub("workflow_delays"));
      int minutes = 0;
      d.integer(name, minutes);
      p.workflow_delays[a] = minutes;
    }
  }
  f.finish();
  p.validate();
  return p;
}

void write_params(std::ostream& out, const EDEnvironmentParams& params) {
  out << params_json(params).dump(2) << '\n';
}

ScenarioSpec read_scenario(std::istream& in) {
  const json j = parse_json(in, "scenario");
  Fields f(j, "scenario");
  ScenarioSpec s;
  f.string("name", s.name);
  std::string kind = std::string(to_string(s.kind));
  f.string("kind", kind);
  const auto parsed = parse_scenario_kind(kind);
  if (!parsed) {
    f.fail("kind", "unknown scenario kind '" + kind +
                       "' (expected baseline, arrival_surge, clinician_cut, "
                       "lab_delay or composite)");
  }
  s.kind = *parsed;
  f.number("magnitude", s.magnitude);
  f.number("window_start", s.window_start_days);
  f.number("window_days", s.window_days);
  f.number("cooldown_days", s.cooldown_days);
  f.integer("runs", s.runs);
  f.unsigned_integer("seed", s.master_seed);
  f.boolean("paired", s.paired_seeds);
  f.boolean("steady_state", s.steady_state);
  f.number("arrival_pct", s.composite.arrival_increase_pct);
  f.number("clinician_pct", s.composite.clinician_cut_pct);
  f.number("lab_minutes", s.composite.lab_delay_minutes);
  f.finish();
  s.validate();
  return s;
}

void write_scenario(std::ostream& out, const ScenarioSpec& spec) {
  out << scenario_json(spec).dump(2) << '\n';
}

CorpusSpec read_corpus_spec(std::istream& in) {
  const json j = parse_json(in, "corpus");
  Fields f(j, "corpus");
  CorpusSpec s = default_corpus_spec();
  f.integer("n_stays", s.n_stays);
  f.unsigned_integer("seed", s.seed);
  f.numbers("acuity_mix", s.acuity_mix);
  f.numbers("disposition_mix", s.disposition_mix);
  f.numbers("discharge_scale", s.discharge_scale);
  f.number("mean_interarrival_min", s.mean_interarrival_min);
  f.string("start", s.start);
  if (const json* durations = f.get("durations")) {
    Fields d(*durations, f.sub("durations"));
    for (const auto& [name, value] : durations->items()) {
      const Activity a = activity_key(name, f.sub("durations"));
      d.get(name);
      Fields one(value, f.sub("durations." + name));
      LogNormalSpec spec = s.durations[a];
      read_lognormal(one, spec);
      one.finish();
      s.durations[a] = spec;
    }
  }
  if (const json* templates = f.get("templates")) {
    if (!templates->is_array() || templates->size() != s.templates.size()) {
      f.fail("templates", "expected 5 objects, one per acuity level");
    }
    for (std::size_t i = 0; i < s.templates.size(); ++i) {
      Fields t((*templates)[i], f.sub("templates[" + std::to_string(i) + "]"));
      t.number("p_lab", s.templates[i].p_lab);
      t.number("p_imaging", s.templates[i].p_imaging);
      t.number("p_medication", s.templates[i].p_medication);
      t.number("extra_vitals_mean", s.templates[i].extra_vitals_mean);
      t.finish();
    }
  }
  if (const json* waits = f.get("waits")) {
    Fields w(*waits, f.sub("waits"));
    w.number("probability", s.waits.probability);
    read_lognormal(w, s.waits.magnitude);
    w.integer("min_minutes", s.waits.min_minutes);
    w.finish();
  }
  f.finish();
  s.validate();
  return s;
}

void write_corpus_spec(std::ostream& out, const CorpusSpec& spec) {
  out << corpus_json(spec).dump(2) << '\n';
}

std::string to_json_string(const EDEnvironmentParams& params) {
  return params_json(params).dump();
}

std::string to_json_string(const ScenarioSpec& spec) {
  return scenario_json(spec).dump();
}

std::string to_json_string(const CorpusSpec& spec) {
  return corpus_json(spec).dump();
}

}  // namespace edabm
