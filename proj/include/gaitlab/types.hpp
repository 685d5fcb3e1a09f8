#pragma once

#include <array>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace gaitlab {

enum class Joint { ankle, knee, hip };

inline constexpr std::array<Joint, 3> kJoints{Joint::ankle, Joint::knee, Joint::hip};

enum class MuscleGroup {
  gastrocnemius,
  tibialis_anterior,
  quadriceps,
  hamstrings,
  gluteus,
  iliopsoas,
};

inline constexpr std::array<MuscleGroup, 6> kMuscleGroups{
    MuscleGroup::gastrocnemius, MuscleGroup::tibialis_anterior, MuscleGroup::quadriceps,
    MuscleGroup::hamstrings,    MuscleGroup::gluteus,           MuscleGroup::iliopsoas};

/// Samples per normalized gait cycle (5% increments).
inline constexpr std::size_t kCycleLength = 20;

inline constexpr double kGravity = 9.8;

std::string_view to_string(Joint joint);
std::string_view to_string(MuscleGroup muscle);
std::optional<Joint> parse_joint(std::string_view name);
std::optional<MuscleGroup> parse_muscle(std::string_view name);

/// The flexor/extensor pair whose summed force describes a joint.
std::array<MuscleGroup, 2> muscles_for(Joint joint);

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

}  // namespace gaitlab
