#include "gaitlab/types.hpp"

namespace gaitlab {

std::string_view to_string(Joint joint) {
  switch (joint) {
    case Joint::ankle:
      return "ankle";
    case Joint::knee:
      return "knee";
    case Joint::hip:
      return "hip";
  }
  return "unknown";
}

std::string_view to_string(MuscleGroup muscle) {
  switch (muscle) {
    case MuscleGroup::gastrocnemius:
      return "gastrocnemius";
    case MuscleGroup::tibialis_anterior:
      return "tibialis_anterior";
    case MuscleGroup::quadriceps:
      return "quadriceps";
    case MuscleGroup::hamstrings:
      return "hamstrings";
    case MuscleGroup::gluteus:
      return "gluteus";
    case MuscleGroup::iliopsoas:
      return "iliopsoas";
  }
  return "unknown";
}

std::optional<Joint> parse_joint(std::string_view name) {
  for (Joint j : kJoints) {
    if (to_string(j) == name) return j;
  }
  return std::nullopt;
}

std::optional<MuscleGroup> parse_muscle(std::string_view name) {
  for (MuscleGroup m : kMuscleGroups) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::array<MuscleGroup, 2> muscles_for(Joint joint) {
  switch (joint) {
    case Joint::ankle:
      return {MuscleGroup::gastrocnemius, MuscleGroup::tibialis_anterior};
    case Joint::knee:
      return {MuscleGroup::quadriceps, MuscleGroup::hamstrings};
    case Joint::hip:
      return {MuscleGroup::gluteus, MuscleGroup::iliopsoas};
  }
  return {MuscleGroup::gastrocnemius, MuscleGroup::tibialis_anterior};
}

}  // namespace gaitlab
