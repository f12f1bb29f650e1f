#include "hlab/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>

#include "hlab/errors.hpp"

namespace hlab {

using Json = nlohmann::ordered_json;

namespace {

ScenarioConfig with_overrides(const ScenarioConfig& config, const RunOptions& options) {
  ScenarioConfig c = config;
  if (options.resolution) c.background.N = *options.resolution;
  if (options.max_steps) c.max_steps = options.max_steps;
  if (options.tolerance) c.tolerance.harnack.absolute = *options.tolerance;
  return c;
}

std::string variant_label(const ScenarioConfig& c, double eps) {
  if (c.flow.kind != FlowKind::EpsilonSurface) return "base";
  std::ostringstream s;
  s << "eps" << eps;
  return s.str();
}

// Nearest schedule index to t, clamped to [lo, hi].
std::size_t snap(const FlowTrajectory& flow, double t, std::size_t lo, std::size_t hi) {
  const double k = std::round(t / flow.step_size());
  const auto clamped = static_cast<std::size_t>(std::clamp(k, static_cast<double>(lo),
                                                           static_cast<double>(hi)));
  return clamped;
}

std::pair<std::size_t, std::size_t> identity_window(IdentityId id, const FlowTrajectory& flow) {
  const std::size_t last = flow.size() - 1;
  std::size_t lo = 1;
  std::size_t hi = last - 1;
  if (id == IdentityId::Grad_forward_evolution) lo = 2;
  if (id == IdentityId::Grad_backward_evolution) hi = last - 2;
  if (lo > hi) fail(ErrorKind::Domain, "run too short for identity " + std::string(to_string(id)));
  return {lo, hi};
}

std::vector<double> snapped_times(const IdentitySpec& spec, const FlowTrajectory& flow) {
  const auto [lo, hi] = identity_window(spec.id, flow);
  std::vector<double> out;
  for (double t : spec.times) out.push_back(flow.time(snap(flow, t, lo, hi)));
  return out;
}

}  // namespace

Simulation simulate(const ScenarioConfig& config, double epsilon, const RunOptions& options) {
  const ScenarioConfig c = with_overrides(config, options);
  const GridPtr grid = make_grid(c);
  Simulation sim{epsilon, build_trajectory(make_flow_config(c, grid, epsilon)), {}};
  for (const auto& spec : c.heat) {
    sim.heat.emplace(spec.id, solve(sim.flow, make_heat_problem(spec, grid, epsilon, c.flow.sigma)));
  }
  return sim;
}

bool VariantResult::holds() const {
  for (const auto& m : monitors)
    if (!m.report.holds()) return false;
  for (const auto& p : path_checks)
    if (!p.holds()) return false;
  for (const auto& p : positivity)
    if (!p.report.holds()) return false;
  if (trace && !trace->holds()) return false;
  return true;
}

bool RunReport::holds() const {
  return std::all_of(variants.begin(), variants.end(), [](const auto& v) { return v.holds(); });
}

std::vector<std::string> RunReport::failures() const {
  std::vector<std::string> out;
  for (const auto& v : variants) {
    const std::string prefix = variants.size() > 1 ? v.label + "/" : "";
    for (const auto& m : v.monitors)
      if (!m.report.holds()) out.push_back(prefix + m.report.label + "[" + m.heat + "]");
    for (const auto& p : v.path_checks)
      if (!p.holds()) out.push_back(prefix + "path_" + std::string(to_string(p.theorem)) + "[" + p.heat + "]");
    for (const auto& p : v.positivity)
      if (!p.report.holds()) out.push_back(prefix + "positivity[" + p.heat + "]");
    if (v.trace && !v.trace->holds()) out.push_back(prefix + "TraceHarnack");
  }
  return out;
}

RunReport run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const ScenarioConfig c = with_overrides(config, options);
  validate(c);

  RunReport report{c, c.background.N, make_grid(c)->spacing(), {}, 0.0};
  const Tolerance tol = c.tolerance.harnack;
  const double h = report.spacing;

  for (double eps : c.flow.epsilons) {
    Simulation sim = simulate(c, eps);
    const FlowTrajectory& flow = sim.flow;
    VariantResult v{variant_label(c, eps), eps, flow.kind(), flow.steps(), flow.step_size(),
                    flow.end_time(), flow.singular_time(), std::nullopt, {}, {}, {}, {}, std::nullopt};
    if (flow.kind() == FlowKind::ShrinkingSphere) v.type_one = type_one_constant(flow);

    for (const auto& spec : c.monitors) {
      const HeatTrajectory& heat = sim.heat.at(spec.heat);
      HarnackQuantity q{spec.quantity, eps, spec.d.value_or(2.0)};
      std::optional<int> chosen;
      const bool type_one =
          spec.quantity == QuantityKind::H2R_typeI || spec.quantity == QuantityKind::HR_typeI;
      if (type_one && !spec.d) {
        chosen = choose_type_one_d(spec.quantity, flow, heat);
        q.d = *chosen;
      }
      require_matching_heat(q, heat);
      MonitorOptions mo{spec.t_min, spec.t_max, tol, spec.bound_shift};
      HarnackReport rep = monitor(q, flow, heat, mo);
      rep.chosen_d = chosen;
      if (type_one && v.type_one) rep.type_one_d0 = v.type_one->d0;
      v.monitors.push_back({spec.heat, std::move(rep)});
    }

    for (const auto& spec : c.identities) {
      const HeatTrajectory& heat = sim.heat.at(spec.heat);
      v.identities.push_back(
          {spec.heat, identity_residual_series(spec.id, flow, heat, snapped_times(spec, flow))});
    }

    for (const auto& spec : c.path_checks) {
      const HeatTrajectory& heat = sim.heat.at(spec.heat);
      const std::size_t last = flow.steps() - 1;
      const std::size_t k2 = snap(flow, spec.t2, 1, last);
      const std::size_t k1 = snap(flow, spec.t1, 0, k2 - 1);
      const auto check = path_harnack_check(spec.theorem, flow, heat, spec.x1.resolve(flow.grid()),
                                            flow.time(k1), spec.x2.resolve(flow.grid()),
                                            flow.time(k2));
      v.path_checks.push_back({spec.heat, spec.theorem, check, tol.value(h)});
    }

    for (const auto& id : c.positivity) {
      v.positivity.push_back(
          {id, positivity_report(sim.heat.at(id), tol.h2_coefficient)});
    }

    if (c.trace_harnack) v.trace = trace_harnack_monitor(flow, c.tolerance.trace);
    report.variants.push_back(std::move(v));
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (options.write_files) {
    write_report(report, options.out_dir ? *options.out_dir : default_output_dir(c));
  }
  return report;
}

int exit_code(const RunReport& report) { return report.holds() ? 0 : 2; }

std::filesystem::path default_output_dir(const ScenarioConfig& config) {
  if (config.output_dir) return *config.output_dir;
  return std::filesystem::path("out") / config.name;
}

// --- serialization ---------------------------------------------------------------

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

template <class T>
Json optional_json(const std::optional<T>& v) {
  return v ? Json(*v) : Json(nullptr);
}

// Monitor series file names, unique within a run.
std::vector<std::string> series_names(const RunReport& report) {
  std::vector<std::string> out;
  std::set<std::string> used;
  for (const auto& v : report.variants) {
    auto take = [&](std::string name) {
      std::string base = "series_" + name;
      std::string candidate = base;
      if (used.count(candidate) && report.variants.size() > 1) candidate = base + "_" + v.label;
      for (int i = 2; used.count(candidate); ++i) candidate = base + "_" + std::to_string(i);
      used.insert(candidate);
      out.push_back(candidate + ".csv");
    };
    for (const auto& m : v.monitors) take(m.report.label);
    if (v.trace) take(v.trace->label);
  }
  return out;
}

Json harnack_json(const HarnackReport& r, const std::string& series) {
  Json j;
  j["label"] = r.label;
  j["holds"] = r.holds();
  j["min_margin"] = number_or_null(r.min_margin());
  j["tolerance"] = r.tolerance;
  j["bound_shift"] = r.bound_shift;
  j["records"] = r.records.size();
  if (r.violation) {
    j["violation"] = {{"time", r.violation->time},
                      {"location", r.violation->location},
                      {"magnitude", r.violation->magnitude}};
  } else {
    j["violation"] = nullptr;
  }
  if (r.chosen_d) j["chosen_d"] = *r.chosen_d;
  if (r.type_one_d0) j["type_one_d0"] = *r.type_one_d0;
  j["series"] = series;
  return j;
}

std::string csv_series(const HarnackReport& r) {
  std::ostringstream out;
  out << std::setprecision(17);
  out << "time,sup_quantity,bound,margin\n";
  for (const auto& rec : r.records)
    out << rec.time << ',' << rec.sup << ',' << rec.bound << ',' << rec.margin << '\n';
  return out.str();
}

std::vector<std::string> report_notes(const ScenarioConfig& c) {
  std::vector<std::string> notes;
  bool p_used = false;
  for (const auto& m : c.monitors) p_used |= m.quantity == QuantityKind::P_shifted;
  for (const auto& i : c.identities) p_used |= i.id == IdentityId::P_evolution;
  if (p_used)
    notes.emplace_back(
        "P_evolution takes the coefficient of -2(Delta v - |grad v|^2) to be 1");
  if (!c.path_checks.empty())
    notes.emplace_back(
        "path checks judge lhs = e^{t2} ln f2 - e^{t1} ln f1; lhs_tau_weighted uses e^{T-t} "
        "weights and is reported alongside");
  for (const auto& m : c.monitors) {
    if ((m.quantity == QuantityKind::H2R_typeI || m.quantity == QuantityKind::HR_typeI) && !m.d) {
      notes.emplace_back("type-I d is the smallest integer making the quantity negative at the "
                         "fifth schedule point before the end; reported, not prescribed");
      break;
    }
  }
  return notes;
}

}  // namespace

Json to_json(const RunReport& report) {
  const ScenarioConfig& c = report.config;
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = c.name;
  j["theorems"] = c.theorems;
  j["notes"] = report_notes(c);
  j["resolution"] = report.resolution;
  j["spacing"] = report.spacing;
  j["verdict"] = {{"holds", report.holds()}, {"failures", report.failures()}};

  const auto names = series_names(report);
  std::size_t series_index = 0;
  Json variants = Json::array();
  for (const auto& v : report.variants) {
    Json vj;
    vj["label"] = v.label;
    vj["epsilon"] = v.epsilon;
    vj["holds"] = v.holds();
    vj["flow"] = {{"kind", std::string(to_string(v.flow_kind))},
                  {"steps", v.steps},
                  {"step_size", v.step_size},
                  {"end_time", v.end_time},
                  {"singular_time", optional_json(v.singular_time)}};
    if (v.type_one) vj["flow"]["type_one"] = {{"d0", v.type_one->d0}, {"blowup_time", v.type_one->blowup_time}};

    Json monitors = Json::array();
    for (const auto& m : v.monitors) {
      Json mj = harnack_json(m.report, names[series_index++]);
      mj["heat"] = m.heat;
      monitors.push_back(std::move(mj));
    }
    vj["monitors"] = std::move(monitors);

    Json identities = Json::array();
    for (const auto& i : v.identities) {
      identities.push_back({{"id", std::string(to_string(i.residual.id))},
                            {"heat", i.heat},
                            {"times", i.residual.times},
                            {"max_residual", i.residual.max_residual}});
    }
    vj["identities"] = std::move(identities);

    Json paths = Json::array();
    for (const auto& p : v.path_checks) {
      const auto& ch = p.check;
      paths.push_back({{"theorem", std::string(to_string(p.theorem))},
                       {"heat", p.heat},
                       {"x1", ch.x1},
                       {"t1", ch.t1},
                       {"x2", ch.x2},
                       {"t2", ch.t2},
                       {"lhs", ch.lhs},
                       {"rhs", ch.rhs},
                       {"slack", ch.slack},
                       {"lhs_tau_weighted", ch.lhs_tau_weighted},
                       {"slack_tau_weighted", ch.slack_tau_weighted},
                       {"path_energy", ch.path_energy},
                       {"tolerance", p.tolerance},
                       {"holds", p.holds()}});
    }
    vj["path_checks"] = std::move(paths);

    Json pos = Json::array();
    for (const auto& p : v.positivity) {
      const auto& r = p.report;
      pos.push_back({{"heat", p.heat},
                     {"inf_initial", r.inf_initial},
                     {"sup_initial", r.sup_initial},
                     {"min_f", r.min_f},
                     {"max_f", r.max_f},
                     {"tolerance", r.tolerance},
                     {"lower_bound_holds", r.lower_bound_holds},
                     {"upper_bound_holds", r.upper_bound_holds},
                     {"min_monotone", r.min_monotone},
                     {"holds", r.holds()}});
    }
    vj["positivity"] = std::move(pos);
    vj["trace_harnack"] = v.trace ? harnack_json(*v.trace, names[series_index++]) : Json(nullptr);
    variants.push_back(std::move(vj));
  }
  j["variants"] = std::move(variants);
  j["config"] = c.source;
  return j;
}

std::string summary_text(const RunReport& report) {
  const ScenarioConfig& c = report.config;
  std::ostringstream out;
  out << std::setprecision(6);
  out << "scenario " << c.name << " (N=" << report.resolution << ", h=" << report.spacing << ")\n";
  if (!c.theorems.empty()) {
    out << "theorems:";
    for (const auto& t : c.theorems) out << ' ' << t;
    out << '\n';
  }
  for (const auto& note : report_notes(c)) out << "note: " << note << '\n';
  for (const auto& v : report.variants) {
    out << "\n[" << v.label << "] " << to_string(v.flow_kind) << " eps=" << v.epsilon
        << " steps=" << v.steps << " dt=" << v.step_size << " T=" << v.end_time << '\n';
    for (const auto& m : v.monitors) {
      const auto& r = m.report;
      out << "  " << std::left << std::setw(20) << r.label << std::right << " heat=" << m.heat
          << " min_margin=" << r.min_margin() << " tol=" << r.tolerance;
      if (r.chosen_d) out << " d=" << *r.chosen_d;
      if (r.type_one_d0) out << " d0=" << *r.type_one_d0;
      out << (r.holds() ? "  holds" : "  VIOLATED");
      if (r.violation)
        out << " (first at t=" << r.violation->time << ", x=" << r.violation->location
            << ", by " << r.violation->magnitude << ")";
      out << '\n';
    }
    for (const auto& i : v.identities) {
      double worst = 0.0;
      for (double r : i.residual.max_residual) worst = std::max(worst, r);
      out << "  identity " << to_string(i.residual.id) << " heat=" << i.heat
          << " max residual " << worst << '\n';
    }
    for (const auto& p : v.path_checks) {
      out << "  path " << to_string(p.theorem) << " (" << p.check.x1 << "," << p.check.t1 << ")->("
          << p.check.x2 << "," << p.check.t2 << ") lhs=" << p.check.lhs << " rhs=" << p.check.rhs
          << " slack=" << p.check.slack << (p.holds() ? "  holds" : "  VIOLATED") << '\n';
    }
    for (const auto& p : v.positivity) {
      const auto& r = p.report;
      out << "  positivity heat=" << p.heat << " f in [" << r.min_f << ", " << r.max_f
          << "], initial [" << r.inf_initial << ", " << r.sup_initial << "]"
          << (r.holds() ? "  holds" : "  VIOLATED") << '\n';
    }
    if (v.trace) {
      out << "  trace Harnack min margin " << v.trace->min_margin()
          << (v.trace->holds() ? "  holds" : "  VIOLATED") << '\n';
    }
  }
  out << "\nverdict: " << (report.holds() ? "all hold" : "VIOLATION") << '\n';
  for (const auto& f : report.failures()) out << "  failed: " << f << '\n';
  return out.str();
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::Config, "cannot write " + path.string());
  out << text;
}

}  // namespace

void write_report(const RunReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "report.json", to_json(report).dump(2) + "\n");
  write_text(dir / "report.txt", summary_text(report));
  const auto names = series_names(report);
  std::size_t i = 0;
  for (const auto& v : report.variants) {
    for (const auto& m : v.monitors) write_text(dir / names[i++], csv_series(m.report));
    if (v.trace) write_text(dir / names[i++], csv_series(*v.trace));
  }
}

// --- refinement studies ----------------------------------------------------------

ScalarField restrict_to(const ScalarField& fine, const GridPtr& coarse) {
  const Grid& fg = fine.grid();
  if (fg.kind() != coarse->kind() || fg.size() != 2 * coarse->size())
    fail(ErrorKind::Dimension, "restriction needs the grid refined exactly once");
  std::vector<double> out(coarse->size());
  for (std::size_t j = 0; j < out.size(); ++j) {
    // Torus nodes nest; staggered sphere nodes sit midway between two fine nodes.
    out[j] = fg.periodic() ? fine[2 * j] : 0.5 * (fine[2 * j] + fine[2 * j + 1]);
  }
  return ScalarField(coarse, std::move(out));
}

double fitted_order(const std::vector<double>& values) {
  const std::size_t m = values.size();
  if (m < 2) fail(ErrorKind::Config, "an order fit needs at least two values");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = static_cast<double>(i);
    const double y = std::log2(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  return -slope;
}

bool StudyReport::passes() const {
  return std::all_of(rows.begin(), rows.end(),
                     [&](const StudyRow& r) { return r.exact || (r.order && *r.order >= min_order); });
}

namespace {

StudyRow make_row(std::string label, std::vector<double> values) {
  StudyRow row{std::move(label), std::move(values), std::nullopt, false};
  const double worst = *std::max_element(row.values.begin(), row.values.end());
  if (worst <= kExactThreshold) {
    row.exact = true;
  } else {
    row.order = fitted_order(row.values);
  }
  return row;
}

}  // namespace

StudyReport convergence_study(const ScenarioConfig& config, int levels, const RunOptions& options) {
  if (levels < 3) fail(ErrorKind::Config, "a study needs at least 3 levels");
  ScenarioConfig base = with_overrides(config, options);
  // Time step tied to h^2 on every level; the end time is pinned to the coarsest run.
  base.flow.max_dt.reset();

  StudyReport report;
  report.scenario = base.name;
  for (double eps : base.flow.epsilons) {
    ScenarioConfig c = base;
    c.flow.epsilons = {eps};
    const std::string suffix = base.flow.epsilons.size() > 1 ? "/" + variant_label(c, eps) : "";

    std::vector<Simulation> sims;
    std::vector<GridPtr> grids;
    for (int level = 0; level < levels; ++level) {
      ScenarioConfig lc = c;
      lc.background.N = base.background.N << level;
      if (level > 0) lc.flow.t_end = sims.front().flow.end_time();
      grids.push_back(make_grid(lc));
      sims.push_back(simulate(lc, eps));
      if (report.resolutions.size() < static_cast<std::size_t>(levels))
        report.resolutions.push_back(lc.background.N);
    }

    for (const auto& spec : c.identities) {
      std::vector<double> values;
      for (const auto& sim : sims) {
        const auto res = identity_residual_series(spec.id, sim.flow, sim.heat.at(spec.heat),
                                                  snapped_times(spec, sim.flow));
        values.push_back(*std::max_element(res.max_residual.begin(), res.max_residual.end()));
      }
      report.rows.push_back(make_row(
          "identity " + std::string(to_string(spec.id)) + " [" + spec.heat + "]" + suffix, values));
    }

    // Solution changes between consecutive levels at the end of each clock.
    auto solution_row = [&](const std::string& label, auto field_of) {
      std::vector<double> values;
      for (int level = 0; level + 1 < levels; ++level) {
        const ScalarField coarse = field_of(sims[level]);
        const ScalarField fine = restrict_to(field_of(sims[level + 1]), grids[level]);
        values.push_back((coarse - fine).max_abs());
      }
      report.rows.push_back(make_row(label + suffix, values));
    };
    if (c.flow.kind == FlowKind::EpsilonSurface) {
      solution_row("solution phi(T)", [](const Simulation& s) {
        return s.flow.state(s.flow.size() - 1).phi();
      });
    }
    for (const auto& spec : c.heat) {
      solution_row("solution u [" + spec.id + "]", [&](const Simulation& s) {
        const HeatTrajectory& ht = s.heat.at(spec.id);
        return ht.u(ht.index_in_clock_order(ht.size() - 1));
      });
    }
  }
  return report;
}

int exit_code(const StudyReport& report) { return report.passes() ? 0 : 2; }

Json to_json(const StudyReport& report) {
  Json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario"] = report.scenario;
  j["resolutions"] = report.resolutions;
  j["min_order"] = report.min_order;
  j["passes"] = report.passes();
  Json rows = Json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"label", r.label},
                    {"values", r.values},
                    {"order", r.exact ? Json("exact") : Json(*r.order)}});
  }
  j["rows"] = std::move(rows);
  return j;
}

std::string summary_text(const StudyReport& report) {
  std::ostringstream out;
  out << "study " << report.scenario << " N =";
  for (auto n : report.resolutions) out << ' ' << n;
  out << "\n";
  out << std::setprecision(4);
  for (const auto& r : report.rows) {
    out << "  " << std::left << std::setw(48) << r.label << std::right;
    for (double v : r.values) out << ' ' << std::setw(11) << v;
    if (r.exact) {
      out << "  order exact\n";
    } else {
      out << "  order " << *r.order << (*r.order >= report.min_order ? "" : "  BELOW") << '\n';
    }
  }
  out << "verdict: " << (report.passes() ? "orders ok" : "ORDER BELOW THRESHOLD") << '\n';
  return out.str();
}

void write_study(const StudyReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_text(dir / "study.json", to_json(report).dump(2) + "\n");
  write_text(dir / "study.txt", summary_text(report));
  std::ostringstream csv;
  csv << std::setprecision(17) << "label,level,value\n";
  for (const auto& r : report.rows) {
    for (std::size_t i = 0; i < r.values.size(); ++i)
      csv << '"' << r.label << "\"," << i << ',' << r.values[i] << '\n';
  }
  write_text(dir / "study.csv", csv.str());
}

}  // namespace hlab
