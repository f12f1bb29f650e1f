#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hlab/flow.hpp"
#include "hlab/heat.hpp"

namespace hlab {

/**
 * The monitored Harnack quantities, with u = -ln f and tau = T - t:
 *
 *   Heps          Delta u - eps R                      <= 1/t    (t > 0)
 *   H2R           2 Delta u - |grad u|^2 + 2R - 2n/tau <= n/2    (tau > 0)
 *   H2R_typeI     same with -d n/tau                   <= n/2    (tau > 0)
 *   HR            2 Delta u - |grad u|^2 + R - 2n/tau  <= n/4    (tau > 0)
 *   HR_typeI      same with -d n/tau                   <= n/4    (tau > 0)
 *   P_shifted     2 Delta v - |grad v|^2 + R - 3n/tau  <= n/4    (t in [T/2, T))
 *                 with v = u - (n/2) ln(4 pi tau)
 *   GradForward   |grad u|^2 - u/t                     <= 0      (t > 0)
 *   GradBackward  |grad u|^2 - u/tau                   <= 0      (tau > 0)
 */
enum class QuantityKind { Heps, H2R, H2R_typeI, HR, HR_typeI, P_shifted, GradForward, GradBackward };

std::string_view to_string(QuantityKind kind);
QuantityKind quantity_from_string(std::string_view name);

enum class Clock { T, Tau };

struct HarnackQuantity {
  QuantityKind kind = QuantityKind::H2R;
  double epsilon = 0.0;  // Heps only
  double d = 2.0;        // type-I variants only

  Clock clock() const;
  /// Upper bound at schedule index k.
  double bound(const FlowTrajectory& flow, std::size_t k) const;
  /// Validity window of the underlying estimate.
  bool valid_at(const FlowTrajectory& flow, std::size_t k) const;
  /// The heat equation this quantity is stated for.
  Direction direction() const;
  double potential_coefficient() const;
  std::string label() const;
};

/// Throws ErrorKind::Unsupported when heat does not solve the equation q is stated for.
void require_matching_heat(const HarnackQuantity& q, const HeatTrajectory& heat);

/// Throws ErrorKind::Dimension when the heat run was not made on this flow's schedule.
void require_shared_schedule(const FlowTrajectory& flow, const HeatTrajectory& heat);

/// Pointwise quantity at flow index k; ErrorKind::Domain outside the window.
ScalarField evaluate(const HarnackQuantity& q, const FlowTrajectory& flow,
                     const HeatTrajectory& heat, std::size_t k);
ScalarField evaluate_at_time(const HarnackQuantity& q, const FlowTrajectory& flow,
                             const HeatTrajectory& heat, double t);

/// Tolerance of the form absolute + h2_coefficient * h^2.
struct Tolerance {
  double absolute = 1e-6;
  double h2_coefficient = 1.0;
  double value(double h) const { return absolute + h2_coefficient * h * h; }
};

struct HarnackRecord {
  double time;
  double clock;  // t or tau, per the quantity
  double sup;
  double bound;
  double margin;  // bound - sup
  double argmax;  // grid coordinate of the supremum
};

struct Violation {
  double time;
  double location;
  double magnitude;  // -margin at the worst record
};

struct HarnackReport {
  std::string label;
  std::vector<HarnackRecord> records;
  double tolerance = 0.0;
  double bound_shift = 0.0;
  std::optional<Violation> violation;
  std::optional<int> chosen_d;
  std::optional<double> type_one_d0;

  bool holds() const { return !violation.has_value(); }
  double min_margin() const;
};

struct MonitorOptions {
  std::optional<double> t_min;
  std::optional<double> t_max;
  Tolerance tolerance;
  /// Subtracted from the bound; positive values tighten it (violation injection).
  double bound_shift = 0.0;
};

HarnackReport monitor(const HarnackQuantity& q, const FlowTrajectory& flow,
                      const HeatTrajectory& heat, const MonitorOptions& options = {});

/// Flow index used as "small tau" in the type-I search: the 5th schedule point after tau = 0.
std::size_t type_one_probe_index(const FlowTrajectory& flow);

/**
 * Smallest integer d (>= 2 for H2R_typeI, >= 1 for HR_typeI) with
 * sup H(tau_probe) < 0. Throws ErrorKind::SearchFailure when no d <= 64 works.
 */
int choose_type_one_d(QuantityKind variant, const FlowTrajectory& flow,
                      const HeatTrajectory& heat);

// --- exact evolution identities --------------------------------------------

enum class IdentityId {
  Heps_evolution,
  H2R_evolution,
  HR_evolution,
  P_evolution,
  Grad_forward_evolution,
  Grad_backward_evolution,
};

std::string_view to_string(IdentityId id);
IdentityId identity_from_string(std::string_view name);

/// Throws ErrorKind::Unsupported for (identity, background, heat) combinations
/// the closed-form geometry cannot assemble.
void require_identity_supported(IdentityId id, const FlowTrajectory& flow,
                                const HeatTrajectory& heat);

/// Centered time difference of the quantity minus the assembled right-hand
/// side, at interior flow index k (1 <= k < K).
ScalarField identity_residual(IdentityId id, const FlowTrajectory& flow,
                              const HeatTrajectory& heat, std::size_t k);

struct IdentityResidual {
  IdentityId id;
  std::vector<double> times;
  std::vector<double> max_residual;
};

IdentityResidual identity_residual_series(IdentityId id, const FlowTrajectory& flow,
                                          const HeatTrajectory& heat,
                                          const std::vector<double>& times);

// --- flow-side checks --------------------------------------------------------

/// eps (Delta ln R + R) + 1/t at flow index k > 0; nonnegative for surfaces with R > 0.
ScalarField trace_harnack(const FlowTrajectory& flow, std::size_t k);

/// Report of sup(-eps(Delta ln R + R)) against 1/t over all stored t > 0.
HarnackReport trace_harnack_monitor(const FlowTrajectory& flow, double tolerance);

/// dR/dt (centered) - eps (Delta R + R^2) at interior index k, surface flows only.
ScalarField curvature_evolution_residual(const FlowTrajectory& flow, std::size_t k);

/// |grad f|^2/f^2 - 2(f_tau/f + ln f + R) - (2n/tau + n/2), assembled from
/// f = e^{-u} with f_tau taken from the u-equation (potential 2R).
ScalarField li_yau_form(const FlowTrajectory& flow, const HeatTrajectory& heat, std::size_t k);

// --- integrated Harnack inequalities ----------------------------------------

enum class PathTheorem {
  Potential2R,  // weight 2R + n/2, from H2R <= n/2
  PotentialR,   // weight R + n/4, from HR <= n/4
};

std::string_view to_string(PathTheorem t);
PathTheorem path_theorem_from_string(std::string_view name);

struct PathHarnackCheck {
  double x1, t1, x2, t2;
  /// e^{t2} ln f(x2,t2) - e^{t1} ln f(x1,t1), the stated left-hand side.
  double lhs;
  /// 1/2 integral of e^{T-t}(|gamma'|^2 + c R + n k + 2n/(T-t)) dt.
  double rhs;
  double slack;
  /// e^{T-t2} ln f(x2,t2) - e^{T-t1} ln f(x1,t1): the weighting that integrating
  /// d/dtau (e^tau u) actually produces.
  double lhs_tau_weighted;
  double slack_tau_weighted;
  double path_energy;
};

PathHarnackCheck path_harnack_check(PathTheorem theorem, const FlowTrajectory& flow,
                                    const HeatTrajectory& heat, double x1, double t1, double x2,
                                    double t2);

}  // namespace hlab
