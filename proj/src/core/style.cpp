#include "mfg/core/style.hpp"

#include <cmath>
#include <stdexcept>

namespace mfg {
namespace {

constexpr int index_of(StyleClass c) { return static_cast<int>(c); }

const std::array<DrivingStyle, kStyleCount>& catalog_rows() {
  static const std::array<DrivingStyle, kStyleCount> rows = {{
      {StyleClass::kEgo, 25.0, 2.5, -4.0, 1.4, 1.2, 0.7, 0.8},
      {StyleClass::kSuperAggressive, 35.0, 4.0, -6.5, 0.4, 0.3, 0.95, 0.4},
      {StyleClass::kAggressive, 32.0, 3.5, -5.5, 0.6, 0.4, 0.85, 0.5},
      {StyleClass::kConservative, 16.0, 1.0, -2.5, 2.8, 2.5, 0.15, 1.5},
      {StyleClass::kNormal, 24.0, 2.2, -4.2, 1.3, 1.0, 0.5, 1.0},
      {StyleClass::kCompetitive, 29.0, 3.2, -5.0, 0.7, 0.6, 0.8, 0.6},
  }};
  return rows;
}

}  // namespace

DrivingStyle style_catalog(StyleClass cls) {
  const int i = index_of(cls);
  if (i < 0 || i >= kStyleCount) throw std::invalid_argument("unknown style class");
  return catalog_rows()[static_cast<std::size_t>(i)];
}

const char* style_name(StyleClass cls) {
  switch (cls) {
    case StyleClass::kEgo: return "ego";
    case StyleClass::kSuperAggressive: return "super_aggressive";
    case StyleClass::kAggressive: return "aggressive";
    case StyleClass::kConservative: return "conservative";
    case StyleClass::kNormal: return "normal";
    case StyleClass::kCompetitive: return "competitive";
  }
  throw std::invalid_argument("unknown style class");
}

StyleClass style_from_name(const std::string& name) {
  for (int i = 0; i < kStyleCount; ++i) {
    const auto c = static_cast<StyleClass>(i);
    if (name == style_name(c)) return c;
  }
  throw std::invalid_argument("unknown style class: " + name);
}

const StyleEnvelope& style_envelope() {
  static const StyleEnvelope env = [] {
    StyleEnvelope e;
    e.lo.fill(std::numeric_limits<double>::infinity());
    e.hi.fill(-std::numeric_limits<double>::infinity());
    for (const auto& row : catalog_rows()) {
      const auto v = row.as_vector();
      for (int i = 0; i < 7; ++i) {
        e.lo[static_cast<std::size_t>(i)] = std::min(e.lo[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
        e.hi[static_cast<std::size_t>(i)] = std::max(e.hi[static_cast<std::size_t>(i)], v[static_cast<std::size_t>(i)]);
      }
    }
    return e;
  }();
  return env;
}

double max_style_norm() {
  static const double norm = [] {
    double best = 0.0;
    for (const auto& row : catalog_rows()) {
      double s = 0.0;
      for (double v : row.as_vector()) s += v * v;
      best = std::max(best, std::sqrt(s));
    }
    return best;
  }();
  return norm;
}

double style_distance(const DrivingStyle& a, const DrivingStyle& b) {
  const auto va = a.as_vector();
  const auto vb = b.as_vector();
  double s = 0.0;
  for (int i = 0; i < 7; ++i) {
    const double d = va[static_cast<std::size_t>(i)] - vb[static_cast<std::size_t>(i)];
    s += d * d;
  }
  return std::sqrt(s);
}

bool within_style_box(const DrivingStyle& s) {
  const auto ref = style_catalog(s.cls).as_vector();
  const auto v = s.as_vector();
  for (int i = 0; i < 7; ++i) {
    const double r = ref[static_cast<std::size_t>(i)];
    const double lo = r - 0.15 * std::abs(r);
    const double hi = r + 0.15 * std::abs(r);
    if (v[static_cast<std::size_t>(i)] < lo || v[static_cast<std::size_t>(i)] > hi) return false;
  }
  return true;
}

bool style_valid(const DrivingStyle& s) {
  return s.a_min < 0.0 && s.a_max > 0.0 && s.v_des > 0.0 && s.kappa_safe > 0.0 &&
         s.omega_interact > 0.0 && s.alpha_aggr > 0.0 && s.alpha_aggr < 1.0 &&
         s.tau_react > 0.0;
}

bool aggressive_group(StyleClass c) {
  return c == StyleClass::kSuperAggressive || c == StyleClass::kAggressive ||
         c == StyleClass::kCompetitive;
}

bool conservative_group(StyleClass c) {
  return c == StyleClass::kConservative || c == StyleClass::kNormal;
}

ControlInput saturate_control(ControlInput u, const DrivingStyle& style,
                              const StateBounds& bounds) {
  u.u_a = std::clamp(u.u_a, style.a_min, style.a_max);
  u.u_d = std::clamp(u.u_d, -bounds.a_d_max, bounds.a_d_max);
  return u;
}

}  // namespace mfg
