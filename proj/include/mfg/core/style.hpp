#pragma once

#include <array>
#include <string>

#include "mfg/core/types.hpp"

namespace mfg {

enum class StyleClass {
  kEgo = 0,
  kSuperAggressive,
  kAggressive,
  kConservative,
  kNormal,
  kCompetitive,
};

inline constexpr int kStyleCount = 6;

// Seven behavioral parameters plus the class tag.
struct DrivingStyle {
  StyleClass cls = StyleClass::kNormal;
  double v_des = 24.0;          // m/s desired speed
  double a_max = 2.2;           // m/s^2 max acceleration
  double a_min = -4.2;          // m/s^2 max deceleration (negative)
  double kappa_safe = 1.3;      // safety margin factor
  double omega_interact = 1.0;  // interaction weight
  double alpha_aggr = 0.5;      // aggressiveness, (0,1)
  double tau_react = 1.0;       // s reaction time

  std::array<double, 7> as_vector() const {
    return {v_des, a_max, a_min, kappa_safe, omega_interact, alpha_aggr, tau_react};
  }
};

// Catalog row for the class; throws on an out-of-range class value.
DrivingStyle style_catalog(StyleClass cls);

const char* style_name(StyleClass cls);
StyleClass style_from_name(const std::string& name);

// Componentwise min/max of the catalog rows, used to normalize style
// vectors before weighting.
struct StyleEnvelope {
  std::array<double, 7> lo;
  std::array<double, 7> hi;
};
const StyleEnvelope& style_envelope();

// Largest Euclidean norm of a raw catalog vector.
double max_style_norm();

double style_distance(const DrivingStyle& a, const DrivingStyle& b);

// Relative box around the catalog row for the class (+-15% per component).
bool within_style_box(const DrivingStyle& s);

// Parameter validity independent of the catalog.
bool style_valid(const DrivingStyle& s);

// True for {super-aggressive, aggressive, competitive}; the conservative
// side is {conservative, normal}.
bool aggressive_group(StyleClass c);
bool conservative_group(StyleClass c);

ControlInput saturate_control(ControlInput u, const DrivingStyle& style,
                              const StateBounds& bounds);

}  // namespace mfg
