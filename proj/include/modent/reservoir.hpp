#pragma once

// Shared condensate reservoir, modeled two ways: an explicit truncated
// coherent-state mode coupled through H_int, and the effective large-nbar
// single-mode rotation on the {0, 1} occupation subspace.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "modent/fock.hpp"
#include "modent/ops.hpp"

namespace modent {

struct FixedPhase {
  double theta;
};
struct UniformPhase {};

using PhaseModel = std::variant<FixedPhase, UniformPhase>;

inline const std::string kReservoirMode = "res";

/// Phase of the explicit coherent amplitude relative to the phase theta in
/// the effective rotation. With H_int = -Omega/2 (a^dag b + b^dag a) and
/// exp(-iHt), a condensate amplitude sqrt(nbar) e^{i phi} rotates
/// |0> -> cos|0> + i sin e^{i phi}|1>; matching the -i e^{i theta} form
/// requires phi = theta + pi.
inline constexpr double kCondensatePhaseOffset = kPi;

/// Smallest cutoff allowed for `nbar`: ceil(nbar + 6 sqrt(nbar)).
int minimum_cutoff(double nbar);
/// Cutoff used when none is given: at least minimum_cutoff and large enough
/// that the Poisson tail beyond it is below 1e-10.
int default_cutoff(double nbar);
/// Poisson weight beyond `cutoff`, P(n > cutoff).
double poisson_tail(double nbar, int cutoff);

struct ReservoirSpec {
  double nbar;
  PhaseModel phase;
  int cutoff;

  static ReservoirSpec fixed(double nbar, double theta);
  static ReservoirSpec fixed(double nbar, double theta, int cutoff);
  static ReservoirSpec mixed(double nbar);

  bool is_fixed() const { return std::holds_alternative<FixedPhase>(phase); }
  double theta() const;  // throws for UniformPhase
  void validate() const;
};

/// Truncated, renormalized coherent state with alpha = sqrt(nbar) e^{i theta}.
PureState coherent_state(const ReservoirSpec& spec, double theta, const std::string& label = kReservoirMode);

/// Effective rotation on `mode`:
///   |0> -> cos(angle/2)|0> - i sin(angle/2) e^{i theta}|1>
///   |1> -> cos(angle/2)|1> - i sin(angle/2) e^{-i theta}|0>
/// acting as identity on occupations >= 2 (which must carry no weight).
OperatorMatrix effective_rotation_operator(const ModeLayout& layout, const std::string& mode, double angle,
                                           double theta);
PureState effective_rotation(const PureState& psi, const std::string& mode, double angle, double theta);
MixedState effective_rotation(const MixedState& rho, const std::string& mode, double angle, double theta);

/// Joint evolution of a system mode with an explicit reservoir mode under
/// H_int for a fixed time. The propagator is computed once and reused; each
/// application starts from a fresh reservoir (undepleted between couplings).
class ReservoirCoupler {
 public:
  ReservoirCoupler(ReservoirSpec spec, double t, double omega = kDefaults.rabi, int system_cutoff = 1);

  /// Coupling time for a target rotation angle Omega sqrt(nbar) t.
  static double time_for_angle(double angle, double nbar, double omega = kDefaults.rabi);

  MixedState apply(const MixedState& rho, const std::string& mode) const;
  MixedState apply(const PureState& psi, const std::string& mode) const;
  /// Same coupling with the reservoir at fixed phase `theta`, whatever the
  /// phase model of the spec.
  MixedState apply(const MixedState& rho, const std::string& mode, double theta) const;

  const ReservoirSpec& spec() const { return spec_; }

 private:
  struct Weighted {
    double weight;
    Eigen::VectorXcd vector;
  };
  std::vector<Weighted> reservoir_ensemble(std::optional<double> theta) const;
  std::vector<Weighted> system_ensemble(const MixedState& rho) const;
  Eigen::MatrixXcd reduce(const std::vector<Weighted>& system, const ModeLayout& layout, const std::string& mode,
                          std::optional<double> theta) const;

  ReservoirSpec spec_;
  double t_;
  double omega_;
  int system_cutoff_;
  Eigen::MatrixXcd local_propagator_;  // on (mode, res)
};

MixedState exact_coupling(const MixedState& rho, const std::string& mode, const ReservoirSpec& spec, double t,
                          double omega = kDefaults.rabi);
MixedState exact_coupling(const PureState& psi, const std::string& mode, const ReservoirSpec& spec, double t,
                          double omega = kDefaults.rabi);

struct ScanPoint {
  double nbar;
  double trace_distance;
};

/// Trace distance between exact coupling and the effective rotation for the
/// two-mode ground state with the rotation on mode A.
std::vector<ScanPoint> convergence_scan(const std::vector<double>& nbar_list, double angle,
                                        double theta = kDefaults.theta, double omega = kDefaults.rabi);

/// Least-squares slope of log(distance) against log(nbar).
double fitted_decay_exponent(const std::vector<ScanPoint>& points);

}  // namespace modent
