#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "edabm/ed_sim.hpp"
#include "edabm/error.hpp"
#include "fixtures.hpp"

namespace edabm {
namespace {

using testing::flat_params;
using testing::make_record;
using testing::random_records;

constexpr std::int64_t kDay = kMinutesPerDay;

TEST(GenerateArrivals, ZeroRateNeverArrives) {
  const auto p = flat_params(0.0, 1, 1, 1);
  Rng rng(1);
  for (int h = 0; h < 24; ++h) EXPECT_EQ(generate_arrivals(p, h, rng), 0);
}

TEST(GenerateArrivals, PoissonMeanAndVariance) {
  const auto p = flat_params(6.0, 1, 1, 1);
  Rng rng(42);
  const int n = 60000;
  double sum = 0, sum_sq = 0;
  for (int i = 0; i < n; ++i) {
    const double k = generate_arrivals(p, i % 24, rng);
    sum += k;
    sum_sq += k * k;
  }
  const double mean = sum / n;
  const double var = (sum_sq - n * mean * mean) / (n - 1);
  const double mu = 0.1;
  EXPECT_NEAR(mean, mu, 4 * std::sqrt(mu / n));
  EXPECT_NEAR(var, mu, 4 * std::sqrt((mu + 2 * mu * mu) / n));
}

TEST(GenerateArrivals, UsesRateOfClockHour) {
  EDEnvironmentParams p;
  p.hourly_arrival_rate[7] = 60.0;
  Rng rng(3);
  int at7 = 0;
  for (int i = 0; i < 100; ++i) {
    EXPECT_EQ(generate_arrivals(p, 6, rng), 0);
    at7 += generate_arrivals(p, 7, rng);
  }
  EXPECT_GT(at7, 50);
}

WaitingPatient wp(std::uint64_t seq, int acuity, std::int64_t arrival) {
  return {{0, seq}, acuity, arrival};
}

TEST(AssignBeds, PriorityOrder) {
  std::vector<WaitingPatient> q{wp(0, 3, 0), wp(1, 1, 5), wp(2, 3, 0), wp(3, 2, 1)};
  const auto got = assign_beds(q, 2);
  ASSERT_EQ(got.size(), 2u);
  EXPECT_EQ(got[0].id.seq, 1u);
  EXPECT_EQ(got[1].id.seq, 3u);
  ASSERT_EQ(q.size(), 2u);
  EXPECT_EQ(q[0].id.seq, 0u);
  EXPECT_EQ(q[1].id.seq, 2u);
}

TEST(AssignBeds, NoFreeBedsLeavesQueue) {
  std::vector<WaitingPatient> q{wp(0, 3, 0)};
  EXPECT_TRUE(assign_beds(q, 0).empty());
  EXPECT_TRUE(assign_beds(q, -2).empty());
  EXPECT_EQ(q.size(), 1u);
}

TEST(AssignBeds, MatchesBruteForceOracle) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> len(0, 8), beds(0, 3), acuity(1, 5), arrival(0, 4);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<WaitingPatient> q;
    const int n = len(rng);
    for (int i = 0; i < n; ++i) q.push_back(wp(static_cast<std::uint64_t>(i), acuity(rng), arrival(rng)));
    std::shuffle(q.begin(), q.end(), rng);
    const int free = beds(rng);

    // Oracle: repeatedly take the lexicographically smallest remaining key.
    std::vector<WaitingPatient> rest = q, expect;
    for (int b = 0; b < free && !rest.empty(); ++b) {
      auto best = rest.begin();
      for (auto it = rest.begin(); it != rest.end(); ++it) {
        if (std::tie(it->acuity, it->arrival_minute, it->id) <
            std::tie(best->acuity, best->arrival_minute, best->id)) {
          best = it;
        }
      }
      expect.push_back(*best);
      rest.erase(best);
    }

    auto queue = q;
    const auto got = assign_beds(queue, free);
    ASSERT_EQ(got.size(), expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) EXPECT_EQ(got[i].id, expect[i].id);
    ASSERT_EQ(queue.size(), rest.size());
    for (std::size_t i = 0; i < rest.size(); ++i) EXPECT_EQ(queue[i].id, rest[i].id);
  }
}

TEST(QuantizeDurations, CumulativeRounding) {
  const std::vector<Step> steps{{Activity::Triage, 0.4}, {Activity::VitalSign, 0.4},
                                {Activity::Discharge, 0.4}};
  const auto q = quantize_durations(steps);
  EXPECT_EQ(q, (std::vector<std::int32_t>{0, 1, 0}));
}

TEST(QuantizeDurations, TotalWithinHalfMinute) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> minutes(0.0, 120.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<Step> steps(1 + trial % 9);
    double exact = 0;
    for (auto& s : steps) {
      s = {Activity::LabTest, minutes(rng)};
      exact += s.minutes;
    }
    const auto q = quantize_durations(steps);
    std::int64_t total = 0;
    for (auto v : q) {
      EXPECT_GE(v, 0);
      total += v;
    }
    EXPECT_LE(std::abs(static_cast<double>(total) - exact), 0.5);
  }
}

struct ScriptedEd {
  PatientPool pool;
  ParamSchedule schedule;
  EmergencyDepartment ed;

  ScriptedEd(std::vector<PatientRecord> records, EDEnvironmentParams params)
      : pool(build_pool(std::move(records))), schedule(std::move(params)), ed(schedule, pool, 1) {}

  std::vector<SyntheticStay> drain() {
    std::vector<SyntheticStay> out;
    for (int guard = 0; guard < 100000 && (out.empty() || !ed.empty()); ++guard) {
      ed.step(false);
      for (auto& s : ed.take_discharged()) out.push_back(std::move(s));
      if (ed.empty()) break;
    }
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
  }
};

TEST(EmergencyDepartment, SinglePatientLosIsTrajectoryLength) {
  ScriptedEd s({make_record("p", 3, Disposition::Home,
                            {{Activity::Triage, 20}, {Activity::LabTest, 60}, {Activity::Discharge, 40}})},
               flat_params(0, 1, 1, 1));
  s.ed.admit(0);
  const auto out = s.drain();
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].simulated_los_hours, 2.0);
  EXPECT_EQ(out[0].total_wait_minutes, 0);
  EXPECT_EQ(out[0].source_patient_id, "p");
  EXPECT_EQ(out[0].simulated_label, 0);
}

TEST(EmergencyDepartment, SharedClinicianForcesWait) {
  ScriptedEd s({make_record("a", 3, Disposition::Home, {{Activity::Triage, 30}, {Activity::Discharge, 10}}),
                make_record("b", 3, Disposition::Home, {{Activity::Triage, 30}, {Activity::Discharge, 10}})},
               flat_params(0, 2, 1, 1));
  s.ed.admit(0);
  s.ed.admit(1);
  const auto out = s.drain();
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].total_wait_minutes, 0);
  EXPECT_GE(out[1].total_wait_minutes, 30);
  EXPECT_EQ(out[1].step_wait_minutes[0], 30);
  EXPECT_EQ(out[1].discharge_minute - out[1].arrival_minute, 70);
}

TEST(EmergencyDepartment, SingleBedBlocksSecondArrival) {
  ScriptedEd s({make_record("a", 3, Disposition::Home, {{Activity::LabTest, 45}, {Activity::Discharge, 5}}),
                make_record("b", 1, Disposition::Home, {{Activity::LabTest, 45}, {Activity::Discharge, 5}})},
               flat_params(0, 1, 5, 5));
  s.ed.admit(0);
  s.ed.step(false);
  s.ed.admit(1);  // more urgent, but the bed is taken
  const auto out = s.drain();
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[1].bed_wait_minutes, 50);  // the bed frees after the tick-50 bed phase
}

TEST(EmergencyDepartment, AcuityOrdersTreatmentQueue) {
  // Both bedded in the same tick; the acuity-1 patient gets the clinician.
  ScriptedEd s({make_record("mild", 5, Disposition::Home, {{Activity::Triage, 10}, {Activity::Discharge, 1}}),
                make_record("severe", 1, Disposition::ICU, {{Activity::Triage, 10}, {Activity::Discharge, 1}})},
               flat_params(0, 2, 1, 1));
  s.ed.admit(0);
  s.ed.admit(1);
  const auto out = s.drain();
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].source_patient_id, "mild");
  EXPECT_EQ(out[0].step_wait_minutes[0], 10);
  EXPECT_EQ(out[1].step_wait_minutes[0], 0);
}

TEST(EmergencyDepartment, LabDelayAddsToExecution) {
  auto params = flat_params(0, 1, 1, 1);
  params.workflow_delays[Activity::LabTest] = 20;
  ScriptedEd s({make_record("p", 3, Disposition::Home, {{Activity::LabTest, 60}, {Activity::Discharge, 30}})},
               params);
  s.ed.admit(0);
  const auto out = s.drain();
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].discharge_minute - out[0].arrival_minute, 110);
  EXPECT_EQ(out[0].execution_minutes, 110);
}

TEST(EmergencyDepartment, AdmitRejectsUnknownRecord) {
  ScriptedEd s({make_record("p", 3, Disposition::Home, {{Activity::Discharge, 1}})}, flat_params(0, 1, 1, 1));
  EXPECT_THROW(s.ed.admit(3), ValidationError);
}

class Simulation : public ::testing::Test {
 protected:
  PatientPool pool = build_pool(random_records(300, 5));
};

TEST_F(Simulation, EmptyInputsGiveEmptyDataset) {
  SimulationOptions o;
  o.seed = 1;
  EXPECT_TRUE(run_simulation(flat_params(10, 10, 5, 2), pool, o).empty());
  o.horizon_minutes = kDay;
  EXPECT_TRUE(run_simulation(flat_params(0, 10, 5, 2), pool, o).empty());
  o.warmup_minutes = kDay;
  EXPECT_TRUE(run_simulation(flat_params(10, 10, 5, 2), pool, o).empty());
  o.warmup_minutes = -1;
  EXPECT_THROW(run_simulation(flat_params(10, 10, 5, 2), pool, o), ValidationError);
}

TEST_F(Simulation, ContentionFreeRunReproducesTrajectories) {
  SimulationOptions o;
  o.horizon_minutes = 2 * kDay;
  o.seed = 8;
  const auto out = run_simulation(flat_params(10, 100000, 100000, 100000), pool, o);
  ASSERT_GT(out.size(), 300u);
  for (const auto& s : out) {
    const auto& traj = pool.record(s.source_index).trajectory;
    EXPECT_EQ(s.total_wait_minutes, 0);
    EXPECT_LE(std::abs(s.simulated_los_hours * 60 - traj.total_minutes()), 0.5);
    EXPECT_EQ(pool.record(s.source_index).patient_id, s.source_patient_id);
  }
}

TEST_F(Simulation, LosDecomposesIntoExecutionAndWaits) {
  SimulationOptions o;
  o.horizon_minutes = 3 * kDay;
  o.seed = 21;
  const auto out = run_simulation(flat_params(14, 12, 3, 1), pool, o);
  ASSERT_FALSE(out.empty());
  bool any_wait = false;
  for (const auto& s : out) {
    EXPECT_EQ(s.discharge_minute - s.arrival_minute, s.execution_minutes + s.total_wait_minutes);
    std::int64_t waits = s.bed_wait_minutes;
    for (auto w : s.step_wait_minutes) waits += w;
    EXPECT_EQ(waits, s.total_wait_minutes);
    EXPECT_DOUBLE_EQ(s.simulated_los_hours, (s.discharge_minute - s.arrival_minute) / 60.0);
    EXPECT_EQ(s.simulated_label, los_label(s.simulated_los_hours, kDefaultLosThreshold));
    any_wait |= s.total_wait_minutes > 0;
  }
  EXPECT_TRUE(any_wait);
}

TEST_F(Simulation, ObserverSeesConservationAndCapacity) {
  const auto params = flat_params(14, 12, 3, 1);
  SimulationOptions o;
  o.horizon_minutes = 2 * kDay;
  o.seed = 4;
  std::int64_t ticks = 0;
  std::int64_t last = -1;
  std::uint64_t final_arrivals = 0, final_discharges = 0;
  o.observer = [&](const TickSnapshot& t) {
    ++ticks;
    EXPECT_EQ(t.minute, last + 1);
    last = t.minute;
    EXPECT_EQ(t.arrivals, t.discharges + t.census());
    EXPECT_LE(t.bedded, static_cast<std::size_t>(params.bed_capacity));
    EXPECT_LE(t.clinicians_busy, params.clinician_capacity);
    EXPECT_LE(t.imaging_busy, params.imaging_capacity);
    EXPECT_GE(t.clinicians_busy, 0);
    final_arrivals = t.arrivals;
    final_discharges = t.discharges;
  };
  const auto out = run_simulation(params, pool, o);
  EXPECT_GE(ticks, o.horizon_minutes);
  EXPECT_EQ(final_arrivals, final_discharges);
  EXPECT_EQ(out.size(), final_arrivals);
}

TEST_F(Simulation, WarmupDropsEarlyArrivals) {
  SimulationOptions o;
  o.horizon_minutes = 2 * kDay;
  o.warmup_minutes = kDay;
  o.seed = 4;
  const auto out = run_simulation(flat_params(10, 20, 6, 2), pool, o);
  ASSERT_FALSE(out.empty());
  for (const auto& s : out) {
    EXPECT_GE(s.arrival_minute, kDay);
    EXPECT_LT(s.arrival_minute, 2 * kDay);
  }
  EXPECT_TRUE(std::is_sorted(out.begin(), out.end(), [](auto& a, auto& b) { return a.id < b.id; }));
}

bool same_stays(const SyntheticDataset& a, const SyntheticDataset& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].id != b[i].id || a[i].source_index != b[i].source_index ||
        a[i].arrival_minute != b[i].arrival_minute || a[i].discharge_minute != b[i].discharge_minute ||
        a[i].step_wait_minutes != b[i].step_wait_minutes) {
      return false;
    }
  }
  return true;
}

TEST_F(Simulation, FixedSeedIsDeterministic) {
  SimulationOptions o;
  o.horizon_minutes = 2 * kDay;
  o.seed = 99;
  o.run_id = 7;
  const auto params = flat_params(12, 15, 4, 2);
  const auto a = run_simulation(params, pool, o);
  const auto b = run_simulation(params, pool, o);
  EXPECT_TRUE(same_stays(a, b));
  ASSERT_FALSE(a.empty());
  EXPECT_EQ(a.front().id.run, 7u);
  o.seed = 100;
  EXPECT_FALSE(same_stays(a, run_simulation(params, pool, o)));
}

TEST_F(Simulation, SurplusCapacityChangesNothingWithoutContention) {
  SimulationOptions o;
  o.horizon_minutes = 2 * kDay;
  o.seed = 3;
  const auto a = run_simulation(flat_params(10, 5000, 5000, 5000), pool, o);
  const auto b = run_simulation(flat_params(10, 9000, 9000, 9000), pool, o);
  EXPECT_TRUE(same_stays(a, b));
}

TEST_F(Simulation, OverlayOnlyAffectsItsInterval) {
  const auto base = flat_params(2, 20, 12, 4);
  auto slow = base;
  slow.workflow_delays[Activity::LabTest] = 60;
  const std::int64_t start = 3 * kDay, end = 4 * kDay;
  const ParamSchedule overlay(base, slow, start, end);
  EXPECT_EQ(&overlay.at(start - 1), &overlay.baseline());
  EXPECT_NE(&overlay.at(start), &overlay.baseline());
  EXPECT_EQ(&overlay.at(end), &overlay.baseline());

  SimulationOptions o;
  o.horizon_minutes = 5 * kDay;
  o.seed = 12;
  const auto plain = run_simulation(base, pool, o);
  const auto perturbed = run_simulation(overlay, pool, o);
  std::size_t compared = 0;
  bool later_differs = false;
  for (std::size_t i = 0; i < std::min(plain.size(), perturbed.size()); ++i) {
    // Arrivals are unchanged, so the streams stay aligned stay by stay.
    EXPECT_EQ(plain[i].arrival_minute, perturbed[i].arrival_minute);
    if (plain[i].discharge_minute < start) {
      EXPECT_EQ(plain[i].discharge_minute, perturbed[i].discharge_minute);
      ++compared;
    } else if (plain[i].discharge_minute != perturbed[i].discharge_minute) {
      later_differs = true;
    }
  }
  EXPECT_GT(compared, 100u);
  EXPECT_TRUE(later_differs);
}

TEST(Params, ValidationRejectsBadValues) {
  auto p = flat_params(1, 1, 1, 1);
  EXPECT_NO_THROW(p.validate());
  p.hourly_arrival_rate[3] = -1;
  EXPECT_THROW(p.validate(), ValidationError);
  p = flat_params(1, 0, 1, 1);
  EXPECT_THROW(p.validate(), ValidationError);
  p = flat_params(1, 1, 1, 1);
  p.workflow_delays[Activity::LabTest] = -5;
  EXPECT_THROW(p.validate(), ValidationError);
  p = flat_params(1, 1, 1, 1);
  p.tick_minutes = 0;
  EXPECT_THROW(ParamSchedule{p}, ValidationError);
  auto q = flat_params(1, 1, 1, 1);
  q.tick_minutes = 2;
  EXPECT_THROW(ParamSchedule(flat_params(1, 1, 1, 1), q, 0, 10), ValidationError);
  EXPECT_THROW(ParamSchedule(flat_params(1, 1, 1, 1), flat_params(1, 1, 1, 1), 10, 0), ValidationError);
}

TEST_F(Simulation, DatasetFileRoundTrip) {
  SimulationOptions o;
  o.horizon_minutes = kDay;
  o.seed = 2;
  o.run_id = 4;
  const auto out = run_simulation(flat_params(10, 15, 4, 2), pool, o);
  std::stringstream io;
  write_dataset_header(io);
  write_dataset_rows(io, out);
  const auto back = read_dataset(io);
  ASSERT_EQ(back.size(), out.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    EXPECT_EQ(back[i].id, out[i].id);
    EXPECT_EQ(back[i].source_patient_id, out[i].source_patient_id);
    EXPECT_EQ(back[i].arrival_minute, out[i].arrival_minute);
    EXPECT_EQ(back[i].discharge_minute, out[i].discharge_minute);
    EXPECT_NEAR(back[i].simulated_los_hours, out[i].simulated_los_hours, 1e-9);
    EXPECT_EQ(back[i].simulated_label, out[i].simulated_label);
    EXPECT_EQ(back[i].acuity, out[i].acuity);
    EXPECT_EQ(back[i].disposition, out[i].disposition);
    EXPECT_EQ(back[i].total_wait_minutes, out[i].total_wait_minutes);
  }
}

TEST(DatasetFile, MalformedSimIdRejected) {
  std::istringstream in(
      "run_id,sim_id,source_patient_id,arrival_time,discharge_time,simulated_los_hours,"
      "simulated_label,acuity,disposition,total_wait_min\n"
      "1,2-5,p,2100-01-01T00:00,2100-01-01T01:00,1,0,3,Home,0\n");
  EXPECT_THROW(read_dataset(in), ParseError);
}

}  // namespace
}  // namespace edabm
