#pragma once

#include <istream>
#include <ostream>
#include <string>

#include "edabm/corpusgen.hpp"
#include "edabm/ed_sim.hpp"
#include "edabm/scenarios.hpp"

namespace edabm {

// JSON configuration files. Readers reject unknown keys and throw
// ValidationError with the offending key in the message.

/// Keys: hourly_arrival_rate (24 numbers, or one number for a flat rate),
/// bed_capacity, clinician_capacity, imaging_capacity, workflow_delays
/// (activity name -> minutes), tick_minutes.
EDEnvironmentParams read_params(std::istream& in);
void write_params(std::ostream& out, const EDEnvironmentParams& params);

/// Keys: name, kind, magnitude, window_start (days), window_days, runs, seed,
/// plus the optional cooldown_days, paired, steady_state and, for composite
/// scenarios, arrival_pct, clinician_pct, lab_minutes.
ScenarioSpec read_scenario(std::istream& in);
void write_scenario(std::ostream& out, const ScenarioSpec& spec);

/// Missing keys keep the values of default_corpus_spec().
CorpusSpec read_corpus_spec(std::istream& in);
void write_corpus_spec(std::ostream& out, const CorpusSpec& spec);

std::string to_json_string(const EDEnvironmentParams& params);
std::string to_json_string(const ScenarioSpec& spec);
std::string to_json_string(const CorpusSpec& spec);

}  // namespace edabm
