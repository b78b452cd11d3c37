#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "edabm/corpusgen.hpp"
#include "edabm/error.hpp"
#include "edabm/eventlog.hpp"

namespace edabm {
namespace {

std::string render(const Corpus& c) {
  std::ostringstream out;
  write_event_log(out, c.events);
  write_patient_features(out, c.records);
  write_ground_truth(out, c.ground_truth);
  return out.str();
}

TEST(GenerateCorpus, SingleStayWithoutWaitsIsCumulativeExecution) {
  auto spec = default_corpus_spec();
  spec.n_stays = 1;
  spec.waits.probability = 0.0;
  const auto c = generate_corpus(spec);
  ASSERT_EQ(c.records.size(), 1u);
  ASSERT_EQ(c.events.size(), c.ground_truth.size() + 1);
  EXPECT_EQ(c.events.front().activity, Activity::Arrival);
  EXPECT_EQ(c.events.back().activity, Activity::Discharge);
  auto t = c.events.front().timestamp;
  for (std::size_t k = 0; k < c.ground_truth.size(); ++k) {
    const auto& g = c.ground_truth[k];
    EXPECT_EQ(g.wait_min, 0);
    EXPECT_GE(g.exec_min, 1);
    EXPECT_EQ(g.step_index, k);
    t += std::chrono::minutes(g.exec_min);
    EXPECT_EQ(c.events[k + 1].timestamp, t);
    EXPECT_EQ(c.events[k + 1].activity, g.activity);
  }
  EXPECT_EQ(c.records[0].patient_id, "30000001");
  EXPECT_DOUBLE_EQ(c.records[0].true_los_hours,
                   static_cast<double>((t - c.events.front().timestamp).count()) / 60.0);
  EXPECT_TRUE(c.records[0].trajectory.steps.empty());
}

TEST(GenerateCorpus, FixedSeedIsByteIdentical) {
  auto spec = default_corpus_spec();
  spec.n_stays = 150;
  const auto a = render(generate_corpus(spec));
  EXPECT_EQ(a, render(generate_corpus(spec)));
  spec.seed += 1;
  EXPECT_NE(a, render(generate_corpus(spec)));
}

TEST(GenerateCorpus, TemplateStructure) {
  auto spec = default_corpus_spec();
  spec.n_stays = 400;
  const auto c = generate_corpus(spec);
  const auto raw = extract_trajectories(c.events);
  ASSERT_EQ(raw.size(), 400u);
  for (const auto& r : raw) {
    ASSERT_GE(r.steps.size(), 3u);
    EXPECT_EQ(r.steps[0].activity, Activity::Triage);
    EXPECT_EQ(r.steps[1].activity, Activity::VitalSign);
    EXPECT_EQ(r.steps.back().activity, Activity::Discharge);
    for (std::size_t i = 0; i + 1 < r.steps.size(); ++i) {
      if (r.steps[i].activity == Activity::MedDispense) {
        EXPECT_EQ(r.steps[i + 1].activity, Activity::MedAdmin);
      }
    }
  }
  for (const auto& rec : c.records) {
    EXPECT_GE(rec.acuity(), 1);
    EXPECT_LE(rec.acuity(), 5);
    EXPECT_GE(rec.features.age, 18);
    EXPECT_EQ(rec.features.vital_signs.size(), 6u);
    EXPECT_FALSE(rec.features.chief_complaints.empty());
  }
}

TEST(GenerateCorpus, InjectionRateWithinBinomialBand) {
  auto spec = default_corpus_spec();
  spec.n_stays = 1600;
  spec.waits.probability = 0.1;
  const auto c = generate_corpus(spec);
  ASSERT_GE(c.ground_truth.size(), 10000u);
  std::size_t injected = 0;
  for (const auto& g : c.ground_truth) injected += g.wait_min > 0;
  const double n = static_cast<double>(c.ground_truth.size());
  EXPECT_LE(std::abs(static_cast<double>(injected) - 0.1 * n), 3 * std::sqrt(n * 0.1 * 0.9));
}

TEST(GenerateCorpus, CleaningRecoversPlantedWaits) {
  // Planted waits are far outside any natural duration, so the cleaner must
  // clamp every one of them and leave almost every other step alone.
  auto spec = default_corpus_spec();
  spec.n_stays = 1500;
  spec.waits = {0.05, {3000.0, 0.2}, 2000};
  const auto c = generate_corpus(spec);
  const auto raw = extract_trajectories(c.events);
  const auto stats = compute_transition_stats(raw);
  const auto clean = remove_waiting_times(raw, stats);

  std::size_t g = 0, planted = 0, natural_clamps = 0, untouched = 0;
  for (std::size_t s = 0; s < raw.size(); ++s) {
    for (std::size_t k = 0; k < raw[s].steps.size(); ++k, ++g) {
      const auto& truth = c.ground_truth[g];
      ASSERT_EQ(truth.stay_id, raw[s].stay_id);
      const double before = raw[s].steps[k].minutes;
      const double after = clean[s].steps[k].minutes;
      const double bound = conformance_bound(stats.at(transition_at(raw[s].steps, k)), 3.0);
      EXPECT_LE(after, before * (1 + 2.1e-5));
      if (truth.wait_min > 0) {
        ++planted;
        EXPECT_LT(after, before);
        EXPECT_DOUBLE_EQ(after, bound);
      } else if (after == before) {
        ++untouched;
      } else {
        ++natural_clamps;
        EXPECT_GT(before, bound);
      }
    }
  }
  EXPECT_EQ(g, c.ground_truth.size());
  EXPECT_GT(planted, 100u);
  EXPECT_LT(static_cast<double>(natural_clamps), 0.03 * static_cast<double>(untouched + natural_clamps));
}

TEST(GroundTruthFile, RoundTrip) {
  auto spec = default_corpus_spec();
  spec.n_stays = 20;
  const auto c = generate_corpus(spec);
  std::stringstream io;
  write_ground_truth(io, c.ground_truth);
  EXPECT_EQ(read_ground_truth(io), c.ground_truth);
}

TEST(CorpusSpec, ValidationErrors) {
  auto spec = default_corpus_spec();
  EXPECT_NO_THROW(spec.validate());
  spec.acuity_mix = {0.5, 0.5, 0.5, 0, 0};
  EXPECT_THROW(generate_corpus(spec), ValidationError);
  spec = default_corpus_spec();
  spec.durations.erase(Activity::LabTest);
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = default_corpus_spec();
  spec.n_stays = 0;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = default_corpus_spec();
  spec.start = "yesterday";
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = default_corpus_spec();
  spec.templates[2].p_lab = 1.5;
  EXPECT_THROW(spec.validate(), ValidationError);
  spec = default_corpus_spec();
  spec.waits.min_minutes = 0;
  EXPECT_THROW(spec.validate(), ValidationError);
}

}  // namespace
}  // namespace edabm
