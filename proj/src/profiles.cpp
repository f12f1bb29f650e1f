#include "hlab/profiles.hpp"

#include <cmath>
#include <string>

#include "hlab/errors.hpp"

namespace hlab {

double Profile::operator()(double x) const {
  const double kx = k * x;
  switch (form) {
    case Form::Constant: return base;
    case Form::CosMode: return base + amplitude * std::cos(kx);
    case Form::SinMode: return base + amplitude * std::sin(kx);
    case Form::ExpAffine:
      return std::exp(-(base + amplitude * (sine ? std::sin(kx) : std::cos(kx))));
  }
  return base;
}

ScalarField Profile::sample(const GridPtr& grid) const {
  return ScalarField::sample(grid, [this](double x) { return (*this)(x); });
}

bool Profile::even_about_poles() const {
  if (amplitude == 0.0 || k == 0) return true;
  return form == Form::Constant || form == Form::CosMode || (form == Form::ExpAffine && !sine);
}

namespace {

double number(const nlohmann::ordered_json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    fail(ErrorKind::Config, std::string("profile field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

}  // namespace

Profile parse_profile(const nlohmann::ordered_json& j) {
  if (!j.is_object() || !j.contains("profile"))
    fail(ErrorKind::Config, "profile must be an object with a 'profile' name");
  const auto name = j.at("profile").get<std::string>();
  Profile p;
  if (name == "constant") {
    p.form = Profile::Form::Constant;
    if (!j.contains("value")) fail(ErrorKind::Config, "constant profile needs 'value'");
    p.base = number(j, "value", 0.0);
    return p;
  }
  if (name == "cos-mode") {
    p.form = Profile::Form::CosMode;
  } else if (name == "sin-mode") {
    p.form = Profile::Form::SinMode;
  } else if (name == "exp-affine") {
    p.form = Profile::Form::ExpAffine;
    const auto mode = j.value("mode", std::string("cos"));
    if (mode != "cos" && mode != "sin")
      fail(ErrorKind::Config, "exp-affine mode must be 'cos' or 'sin'");
    p.sine = mode == "sin";
  } else {
    fail(ErrorKind::Config, "unknown profile '" + name + "'");
  }
  p.base = number(j, "base", 0.0);
  p.amplitude = number(j, "amplitude", 0.0);
  const double k = number(j, "k", 1.0);
  if (k < 0.0 || std::floor(k) != k)
    fail(ErrorKind::Config, "profile wavenumber k must be a nonnegative integer");
  p.k = static_cast<int>(k);
  return p;
}

nlohmann::ordered_json to_json(const Profile& p) {
  nlohmann::ordered_json j;
  switch (p.form) {
    case Profile::Form::Constant:
      j["profile"] = "constant";
      j["value"] = p.base;
      return j;
    case Profile::Form::CosMode: j["profile"] = "cos-mode"; break;
    case Profile::Form::SinMode: j["profile"] = "sin-mode"; break;
    case Profile::Form::ExpAffine:
      j["profile"] = "exp-affine";
      j["mode"] = p.sine ? "sin" : "cos";
      break;
  }
  j["base"] = p.base;
  j["amplitude"] = p.amplitude;
  j["k"] = p.k;
  return j;
}

}  // namespace hlab
