#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "passivity/core.hpp"
#include "passivity/realization.hpp"

namespace passivity {

enum class FixtureName { f, g, F1, F2, F3 };

constexpr std::string_view to_string(FixtureName n) {
  switch (n) {
    case FixtureName::f: return "f";
    case FixtureName::g: return "g";
    case FixtureName::F1: return "F1";
    case FixtureName::F2: return "F2";
    case FixtureName::F3: return "F3";
  }
  return "?";
}

inline std::optional<FixtureName> parse_fixture_name(std::string_view s) {
  for (auto n : {FixtureName::f, FixtureName::g, FixtureName::F1, FixtureName::F2, FixtureName::F3})
    if (s == to_string(n)) return n;
  return std::nullopt;
}

/// f, g are the scalar inversion pair; F1, F2, F3 the 2 x 2 lossless family with
/// real parameters a != 0 and b.
struct FixtureId {
  FixtureName name;
  double a = 1.0;
  double b = 1.0;
};

inline Realization fixture(const FixtureId& id) {
  const double a = id.a;
  const double b = id.b;
  Matrix r;
  switch (id.name) {
    case FixtureName::f:
      r.resize(2, 2);
      r << -0.5, 0.5,  //
          0.5, 0.0;
      return Realization::from_array(r, 1);
    case FixtureName::g:
      r.resize(2, 2);
      r << 0.0, 2.0,  //
          2.0, 2.0;
      return Realization::from_array(r, 1);
    default:
      break;
  }
  require(a != 0.0 && std::isfinite(a) && std::isfinite(b), ErrorCode::bad_params, "fixture needs finite a != 0");
  r.resize(4, 4);
  switch (id.name) {
    case FixtureName::F1:
      // clang-format off
      r << 0.0,   0.0,         1.0 / a,         0.0,
           0.0,   0.0,         b / (a * a),    -1.0 / a,
           1.0 / a, b / (a * a), 0.0,           1.0 / (a * a),
           0.0,  -1.0 / a,    -1.0 / (a * a),   0.0;
      // clang-format on
      break;
    case FixtureName::F2:
      // clang-format off
      r << 0.0,  1.0, a,   b,
          -1.0,  0.0, 0.0, -a,
           a,    0.0, 0.0, 0.0,
           b,   -a,   0.0, 0.0;
      // clang-format on
      break;
    case FixtureName::F3:
      // clang-format off
      r << 0.0,   1.0, 1.0, b / a,
          -1.0,   0.0, 0.0, 1.0,
           1.0,   0.0, 0.0, -1.0,
           b / a, 1.0, 1.0, 0.0;
      // clang-format on
      break;
    default:
      break;
  }
  return Realization::from_array(r, 2);
}

}  // namespace passivity
