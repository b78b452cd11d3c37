#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string_view>

namespace edabm {

enum class Activity : std::uint8_t {
  Arrival,
  Triage,
  VitalSign,
  MedDispense,
  MedAdmin,
  LabTest,
  ImagingTest,
  Discharge,
};

inline constexpr std::size_t kActivityCount = 8;

inline constexpr std::array<Activity, kActivityCount> kAllActivities = {
    Activity::Arrival,   Activity::Triage,  Activity::VitalSign,
    Activity::MedDispense, Activity::MedAdmin, Activity::LabTest,
    Activity::ImagingTest, Activity::Discharge};

/// Which shared ED resource an activity occupies while it executes.
enum class ResourceClass : std::uint8_t { None, Clinician, Imaging };

/// Event-log spelling: arrival, triage, vitalsign, med_dispense, med_admin,
/// lab_test, imaging_test, discharge.
std::string_view to_string(Activity a) noexcept;
std::optional<Activity> parse_activity(std::string_view name) noexcept;

/// Comma-separated list of every valid activity name, for error messages.
std::string_view activity_names() noexcept;

/// triage/vitalsign/med_* hold a clinician, imaging_test holds an imaging
/// slot; lab tests, arrival and discharge hold nothing.
constexpr ResourceClass resource_for(Activity a) noexcept {
  switch (a) {
    case Activity::Triage:
    case Activity::VitalSign:
    case Activity::MedDispense:
    case Activity::MedAdmin:
      return ResourceClass::Clinician;
    case Activity::ImagingTest:
      return ResourceClass::Imaging;
    default:
      return ResourceClass::None;
  }
}

}  // namespace edabm
