#pragma once

#include <string_view>

#include "json.hpp"

#include "hlab/grid.hpp"

namespace hlab {

/// Named analytic initial-data forms. No expression parsing:
///   constant    value
///   cos-mode    base + amplitude cos(k x)
///   sin-mode    base + amplitude sin(k x)
///   exp-affine  exp(-(base + amplitude mode(k x))), mode in {cos, sin}
struct Profile {
  enum class Form { Constant, CosMode, SinMode, ExpAffine };

  Form form = Form::Constant;
  double base = 0.0;  // the constant value for Form::Constant
  double amplitude = 0.0;
  int k = 1;
  bool sine = false;  // ExpAffine mode

  double operator()(double x) const;
  ScalarField sample(const GridPtr& grid) const;
  /// Smooth across both sphere poles (even in theta about 0 and pi).
  bool even_about_poles() const;
};

Profile parse_profile(const nlohmann::ordered_json& j);
nlohmann::ordered_json to_json(const Profile& p);

}  // namespace hlab
