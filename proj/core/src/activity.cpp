#include "edabm/activity.hpp"

namespace edabm {

namespace {
constexpr std::array<std::string_view, kActivityCount> kNames = {
    "arrival",  "triage",   "vitalsign",    "med_dispense",
    "med_admin", "lab_test", "imaging_test", "discharge"};
}  // namespace

std::string_view to_string(Activity a) noexcept {
  return kNames[static_cast<std::size_t>(a)];
}

std::optional<Activity> parse_activity(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return static_cast<Activity>(i);
  }
  return std::nullopt;
}

std::string_view activity_names() noexcept {
  return "arrival, triage, vitalsign, med_dispense, med_admin, lab_test, "
         "imaging_test, discharge";
}

}  // namespace edabm
