#include "hlab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "hlab/errors.hpp"
#include "hlab/geometry.hpp"
#include "hlab/registry.hpp"

namespace hlab {

using Json = nlohmann::ordered_json;

double PathPoint::resolve(const Grid& grid) const {
  if (x) return *x;
  const long size = static_cast<long>(grid.size());
  const long j = *node < 0 ? size + *node : *node;
  if (j < 0 || j >= size) fail(ErrorKind::Config, "path endpoint node index out of range");
  return grid.node(static_cast<std::size_t>(j));
}

const HeatSpec& ScenarioConfig::heat_by_id(const std::string& id) const {
  for (const auto& h : heat)
    if (h.id == id) return h;
  fail(ErrorKind::Config, "no heat problem with id '" + id + "'");
}

namespace {

const Json& need(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key))
    fail(ErrorKind::Config, where + ": missing field '" + key + "'");
  return j.at(key);
}

double need_number(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  if (!v.is_number()) fail(ErrorKind::Config, where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

std::optional<double> opt_number(const Json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return need_number(j, key, where);
}

std::string need_string(const Json& j, const char* key, const std::string& where) {
  const Json& v = need(j, key, where);
  if (!v.is_string()) fail(ErrorKind::Config, where + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::size_t positive_count(double v, const std::string& what) {
  if (v < 1.0 || std::floor(v) != v) fail(ErrorKind::Config, what + " must be a positive integer");
  return static_cast<std::size_t>(v);
}

PathPoint parse_point(const Json& j, const char* coord, const char* node, const std::string& where) {
  PathPoint p;
  if (j.contains(coord)) p.x = need_number(j, coord, where);
  if (j.contains(node)) {
    const double v = need_number(j, node, where);
    if (std::floor(v) != v) fail(ErrorKind::Config, where + ": node index must be an integer");
    p.node = static_cast<long>(v);
  }
  if (p.x.has_value() == p.node.has_value())
    fail(ErrorKind::Config, where + ": give exactly one of '" + coord + "' or '" + node + "'");
  return p;
}

HeatSpec parse_heat(const Json& j, std::size_t index) {
  const std::string where = "heat[" + std::to_string(index) + "]";
  HeatSpec h;
  h.id = need_string(j, "id", where);
  h.direction = direction_from_string(need_string(j, "direction", where));
  const Json& q = need(j, "q", where);
  if (q.is_string()) {
    if (q.get<std::string>() != "epsilon")
      fail(ErrorKind::Config, where + ": q must be a number or \"epsilon\"");
    h.follows_epsilon = true;
  } else if (q.is_number()) {
    h.q = q.get<double>();
  } else {
    fail(ErrorKind::Config, where + ": q must be a number or \"epsilon\"");
  }
  h.a = opt_number(j, "a", where).value_or(1.0);
  h.data = parse_profile(need(j, "data", where));
  return h;
}

MonitorSpec parse_monitor(const Json& j, std::size_t index) {
  const std::string where = "monitors[" + std::to_string(index) + "]";
  MonitorSpec m;
  m.quantity = quantity_from_string(need_string(j, "quantity", where));
  m.heat = need_string(j, "heat", where);
  if (j.contains("d")) {
    const Json& d = j.at("d");
    if (d.is_string() && d.get<std::string>() == "auto") {
      m.d.reset();
    } else if (d.is_number()) {
      m.d = d.get<double>();
    } else {
      fail(ErrorKind::Config, where + ": d must be a number or \"auto\"");
    }
  }
  m.t_min = opt_number(j, "t_min", where);
  m.t_max = opt_number(j, "t_max", where);
  m.bound_shift = opt_number(j, "bound_shift", where).value_or(0.0);
  return m;
}

IdentitySpec parse_identity(const Json& j, std::size_t index) {
  const std::string where = "identities[" + std::to_string(index) + "]";
  IdentitySpec s;
  s.id = identity_from_string(need_string(j, "id", where));
  s.heat = need_string(j, "heat", where);
  const Json& times = need(j, "times", where);
  if (!times.is_array() || times.empty())
    fail(ErrorKind::Config, where + ": times must be a non-empty list");
  for (const auto& t : times) {
    if (!t.is_number()) fail(ErrorKind::Config, where + ": times must be numbers");
    s.times.push_back(t.get<double>());
  }
  return s;
}

PathSpec parse_path(const Json& j, std::size_t index) {
  const std::string where = "path_checks[" + std::to_string(index) + "]";
  PathSpec p;
  p.theorem = path_theorem_from_string(need_string(j, "theorem", where));
  p.heat = need_string(j, "heat", where);
  p.x1 = parse_point(j, "x1", "x1_node", where);
  p.x2 = parse_point(j, "x2", "x2_node", where);
  p.t1 = need_number(j, "t1", where);
  p.t2 = need_number(j, "t2", where);
  return p;
}

template <class F>
auto list_of(const Json& doc, const char* key, F parse) {
  std::vector<decltype(parse(Json{}, 0))> out;
  if (!doc.contains(key)) return out;
  const Json& arr = doc.at(key);
  if (!arr.is_array()) fail(ErrorKind::Config, std::string(key) + " must be a list");
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(parse(arr.at(i), i));
  return out;
}

}  // namespace

ScenarioConfig parse_scenario(const Json& doc) {
  ScenarioConfig c;
  try {
    if (!doc.is_object()) fail(ErrorKind::Config, "scenario must be a JSON object");
    c.schema_version = static_cast<int>(need_number(doc, "schema_version", "scenario"));
    if (c.schema_version != kScenarioSchemaVersion)
      fail(ErrorKind::Config, "unsupported schema_version " + std::to_string(c.schema_version));
    c.name = need_string(doc, "name", "scenario");
    if (doc.contains("description")) c.description = need_string(doc, "description", "scenario");
    if (doc.contains("theorems")) {
      for (const auto& t : doc.at("theorems")) c.theorems.push_back(t.get<std::string>());
    }

    const Json& bg = need(doc, "background", "scenario");
    c.background.kind = background_from_string(need_string(bg, "kind", "background"));
    c.background.n = static_cast<int>(opt_number(bg, "n", "background").value_or(2.0));
    c.background.N = positive_count(need_number(bg, "N", "background"), "background.N");

    const Json& fl = need(doc, "flow", "scenario");
    c.flow.kind = flow_kind_from_string(need_string(fl, "kind", "flow"));
    if (fl.contains("epsilon")) {
      const Json& e = fl.at("epsilon");
      c.flow.epsilons.clear();
      if (e.is_array()) {
        for (const auto& v : e) {
          if (!v.is_number()) fail(ErrorKind::Config, "flow.epsilon entries must be numbers");
          c.flow.epsilons.push_back(v.get<double>());
        }
      } else if (e.is_number()) {
        c.flow.epsilons.push_back(e.get<double>());
      } else {
        fail(ErrorKind::Config, "flow.epsilon must be a number or a list");
      }
      if (c.flow.epsilons.empty()) fail(ErrorKind::Config, "flow.epsilon list is empty");
    }
    c.flow.t_end = opt_number(fl, "t_end", "flow");
    if (fl.contains("initial_phi")) c.flow.initial_phi = parse_profile(fl.at("initial_phi"));
    c.flow.sigma = opt_number(fl, "sigma", "flow").value_or(kDefaultSigma);
    c.flow.max_dt = opt_number(fl, "max_dt", "flow");
    if (auto ms = opt_number(fl, "max_steps", "flow")) c.max_steps = positive_count(*ms, "max_steps");

    c.heat = list_of(doc, "heat", parse_heat);
    c.monitors = list_of(doc, "monitors", parse_monitor);
    c.identities = list_of(doc, "identities", parse_identity);
    c.path_checks = list_of(doc, "path_checks", parse_path);
    if (doc.contains("positivity")) {
      for (const auto& p : doc.at("positivity")) c.positivity.push_back(p.get<std::string>());
    }
    c.trace_harnack = doc.value("trace_harnack", false);
    if (doc.contains("tolerance")) {
      const Json& t = doc.at("tolerance");
      c.tolerance.harnack.absolute =
          opt_number(t, "absolute", "tolerance").value_or(c.tolerance.harnack.absolute);
      c.tolerance.harnack.h2_coefficient =
          opt_number(t, "h2_coefficient", "tolerance").value_or(c.tolerance.harnack.h2_coefficient);
      c.tolerance.trace = opt_number(t, "trace", "tolerance").value_or(c.tolerance.trace);
    }
    if (doc.contains("output_dir")) c.output_dir = need_string(doc, "output_dir", "scenario");
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, std::string("malformed scenario: ") + e.what());
  }
  c.source = doc;
  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::string& path_or_name) {
  std::filesystem::path path(path_or_name);
  if (!std::filesystem::exists(path)) {
    if (auto bundled = bundled_scenario_path(path_or_name)) {
      path = *bundled;
    } else {
      fail(ErrorKind::Config, "cannot read config '" + path_or_name +
                                  "': no such file or bundled scenario");
    }
  }
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Config, "cannot read config '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Config, "cannot parse '" + path.string() + "': " + e.what());
  }
  return parse_scenario(doc);
}

GridPtr make_grid(const ScenarioConfig& config) {
  return Grid::make(config.background.kind, config.background.n, config.background.N);
}

FlowConfig make_flow_config(const ScenarioConfig& config, const GridPtr& grid, double epsilon) {
  FlowConfig fc;
  fc.kind = config.flow.kind;
  fc.grid = grid;
  fc.epsilon = epsilon;
  fc.t_end = config.flow.t_end;
  if (config.flow.initial_phi) fc.initial_phi = config.flow.initial_phi->sample(grid);
  fc.sigma = config.flow.sigma;
  fc.max_dt = config.flow.max_dt;
  fc.max_steps = config.max_steps;
  return fc;
}

HeatProblem make_heat_problem(const HeatSpec& spec, const GridPtr& grid, double epsilon,
                              double sigma) {
  return HeatProblem{spec.direction, spec.follows_epsilon ? epsilon : spec.q, spec.a,
                     spec.data.sample(grid), sigma};
}

namespace {

[[noreturn]] void hypothesis(const std::string& who, const std::string& what) {
  fail(ErrorKind::Config, who + " requires " + what);
}

bool ricci_flow_for_all(const ScenarioConfig& c) {
  if (c.flow.kind != FlowKind::EpsilonSurface) return true;
  return std::all_of(c.flow.epsilons.begin(), c.flow.epsilons.end(),
                     [](double e) { return e == 1.0; });
}

// Geometry of the configured initial metric.
MetricState initial_state(const ScenarioConfig& c, const GridPtr& grid) {
  switch (c.flow.kind) {
    case FlowKind::EpsilonSurface: {
      const ScalarField phi = c.flow.initial_phi ? c.flow.initial_phi->sample(grid)
                                                 : ScalarField::constant(grid, 0.0);
      return MetricState::conformal(0.0, phi);
    }
    case FlowKind::ShrinkingSphere: return MetricState::scaled(0.0, grid, 1.0);
    case FlowKind::StaticFlat: return MetricState::flat(0.0, grid);
  }
  fail(ErrorKind::Config, "unknown flow kind");
}

void require_heat_shape(const std::string& who, const HeatSpec& h, Direction dir, double q,
                        bool q_is_epsilon) {
  const bool q_ok = q_is_epsilon ? (h.follows_epsilon || h.q == q) : (!h.follows_epsilon && h.q == q);
  if (h.direction != dir || !q_ok || h.a != 1.0) {
    std::ostringstream msg;
    msg << "heat problem '" << h.id << "' to solve the " << to_string(dir)
        << " equation with potential coefficient " << (q_is_epsilon ? "epsilon" : std::to_string(q))
        << " and decay 1";
    hypothesis(who, msg.str());
  }
}

}  // namespace

void validate(const ScenarioConfig& c) {
  const auto& bg = c.background;
  switch (c.flow.kind) {
    case FlowKind::EpsilonSurface:
      if (bg.kind != BackgroundKind::RotSymSphere)
        hypothesis("flow EpsilonSurface", "background RotSymSphere");
      break;
    case FlowKind::ShrinkingSphere:
      if (bg.kind != BackgroundKind::RoundSphere)
        hypothesis("flow ShrinkingSphere", "background RoundSphere");
      break;
    case FlowKind::StaticFlat:
      if (bg.kind != BackgroundKind::FlatTorus) hypothesis("flow StaticFlat", "background FlatTorus");
      break;
  }
  if (c.flow.initial_phi && c.flow.kind != FlowKind::EpsilonSurface)
    fail(ErrorKind::Config, "flow.initial_phi only applies to EpsilonSurface");
  if (c.flow.sigma <= 0.0) fail(ErrorKind::Config, "flow.sigma must be positive");
  for (double e : c.flow.epsilons)
    if (e < 0.0) fail(ErrorKind::Config, "flow.epsilon must be nonnegative");

  const GridPtr grid = make_grid(c);
  const bool sphere = grid->is_sphere();
  auto check_profile = [&](const Profile& p, const std::string& who) {
    if (sphere && !p.even_about_poles())
      fail(ErrorKind::Config, who + ": profile is not smooth at the poles (use cos modes on spheres)");
  };
  if (c.flow.initial_phi) check_profile(*c.flow.initial_phi, "flow.initial_phi");

  std::set<std::string> ids;
  for (const auto& h : c.heat) {
    if (!ids.insert(h.id).second) fail(ErrorKind::Config, "duplicate heat id '" + h.id + "'");
    check_profile(h.data, "heat '" + h.id + "'");
    const ScalarField f = h.data.sample(grid);
    if (!(f.min() > 0.0)) fail(ErrorKind::Config, "heat '" + h.id + "' data must be positive");
  }

  const MetricState m0 = initial_state(c, grid);
  const double r_min = m0.scalar_curvature().min();
  const double ric_min = r_min / bg.n;
  const bool ricci = ricci_flow_for_all(c);

  for (const auto& mon : c.monitors) {
    const std::string who = "monitor " + std::string(to_string(mon.quantity));
    const HeatSpec& h = c.heat_by_id(mon.heat);
    switch (mon.quantity) {
      case QuantityKind::Heps:
        if (c.flow.kind != FlowKind::EpsilonSurface)
          hypothesis(who, "a closed surface evolving by the eps-flow (EpsilonSurface)");
        if (!(r_min > 0.0)) hypothesis(who, "a closed surface with positive scalar curvature R > 0");
        require_heat_shape(who, h, Direction::ForwardInT, 0.0, true);
        break;
      case QuantityKind::H2R:
      case QuantityKind::H2R_typeI:
      case QuantityKind::P_shifted:
        if (!ricci) hypothesis(who, "a Ricci flow background (eps = 1)");
        if (mon.quantity == QuantityKind::H2R_typeI && c.flow.kind == FlowKind::EpsilonSurface)
          hypothesis(who, "a type-I Ricci flow with known curvature bound");
        require_heat_shape(who, h, Direction::ForwardInTau,
                           mon.quantity == QuantityKind::P_shifted ? 1.0 : 2.0, false);
        if (mon.quantity == QuantityKind::P_shifted && r_min < 0.0)
          hypothesis(who, "a closed manifold with nonnegative scalar curvature");
        break;
      case QuantityKind::HR:
      case QuantityKind::HR_typeI:
        if (!ricci) hypothesis(who, "a Ricci flow background (eps = 1)");
        if (r_min < 0.0)
          hypothesis(who, "a closed manifold with nonnegative scalar curvature (initial min R = " +
                              std::to_string(r_min) + ")");
        if (mon.quantity == QuantityKind::HR_typeI && c.flow.kind == FlowKind::EpsilonSurface)
          hypothesis(who, "a type-I Ricci flow with known curvature bound");
        require_heat_shape(who, h, Direction::ForwardInTau, 1.0, false);
        break;
      case QuantityKind::GradForward:
      case QuantityKind::GradBackward: {
        if (!ricci) hypothesis(who, "a Ricci flow background (eps = 1)");
        const bool fwd = mon.quantity == QuantityKind::GradForward;
        require_heat_shape(who, h, fwd ? Direction::ForwardInT : Direction::ForwardInTau, 0.0, false);
        if (!(h.data.sample(grid).max() < 1.0)) hypothesis(who, "a positive solution with f < 1");
        if (!fwd && ric_min < -0.25)
          hypothesis(who, "R_ij >= -K with 0 <= K <= 1/4 (initial min Ric = " +
                              std::to_string(ric_min) + ")");
        break;
      }
    }
    if (mon.d && mon.quantity != QuantityKind::H2R_typeI && mon.quantity != QuantityKind::HR_typeI)
      fail(ErrorKind::Config, who + ": d only applies to type-I quantities");
    if (mon.d && *mon.d < 0.0) fail(ErrorKind::Config, who + ": d must be nonnegative");
  }

  for (const auto& id : c.identities) {
    c.heat_by_id(id.heat);
    if (id.id == IdentityId::Heps_evolution && c.flow.kind != FlowKind::EpsilonSurface)
      fail(ErrorKind::Config, "identity Heps_evolution requires the EpsilonSurface flow");
  }
  for (const auto& p : c.path_checks) {
    const HeatSpec& h = c.heat_by_id(p.heat);
    const std::string who = "path check " + std::string(to_string(p.theorem));
    if (!ricci) hypothesis(who, "a Ricci flow background (eps = 1)");
    require_heat_shape(who, h, Direction::ForwardInTau,
                       p.theorem == PathTheorem::Potential2R ? 2.0 : 1.0, false);
    if (p.theorem == PathTheorem::PotentialR && r_min < 0.0)
      hypothesis(who, "a closed manifold with nonnegative scalar curvature");
    if (!(p.t1 < p.t2)) fail(ErrorKind::Config, who + ": needs t1 < t2");
    p.x1.resolve(*grid);
    p.x2.resolve(*grid);
  }
  for (const auto& id : c.positivity) {
    const HeatSpec& h = c.heat_by_id(id);
    if (h.q != 0.0 || h.follows_epsilon || h.a != 1.0)
      hypothesis("positivity check on '" + id + "'", "the potential-free equation (q = 0, a = 1)");
    const ScalarField f = h.data.sample(grid);
    if (!(f.max() < 1.0)) hypothesis("positivity check on '" + id + "'", "data with 0 < f < 1");
  }
  if (c.trace_harnack) {
    if (c.flow.kind != FlowKind::EpsilonSurface)
      hypothesis("trace Harnack check", "the EpsilonSurface flow");
    if (!(r_min > 0.0)) hypothesis("trace Harnack check", "positive scalar curvature R > 0");
  }
}

}  // namespace hlab
