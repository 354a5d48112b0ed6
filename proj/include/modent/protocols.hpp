#pragma once

// End-to-end communication protocols on a single particle shared between two
// spatial modes A and B: three dense-coding variants, the four-step Bell
// analysis, teleportation and the hyper-entanglement reachability count.

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "modent/capacity.hpp"
#include "modent/fock.hpp"
#include "modent/ops.hpp"
#include "modent/reservoir.hpp"
#include "modent/ssr.hpp"

namespace modent {

/// How the hardcore exchange gate is realized.
enum class GateConvention {
  // exp(-i H_hop t) for the swap time, followed by a -pi/2 bias pulse on both
  // modes to remove the i acquired by the one-particle sector.
  kJordanWignerEvolution,
  // The fermionic exchange table: |01> <-> |10>, |11> -> -|11>, |00> fixed.
  kExchangeSignRule,
};

struct ProtocolParams {
  double J = kDefaults.tunneling;
  double V = kDefaults.bias;
  double omega = kDefaults.rabi;
  double nbar = kDefaults.nbar;
  double theta = kDefaults.theta;
  bool exact = false;  // explicit reservoir mode instead of effective rotations
  std::uint64_t seed = 0;
  int theta_grid = kDefaults.theta_grid;
  double tol = kDefaults.capacity_tol;
  GateConvention gate = GateConvention::kJordanWignerEvolution;
};

/// Two-mode layout {A, B} with single occupancy.
ModeLayout system_layout();

/// (|10> + |01>)/sqrt2 on modes A, B.
PureState prepare_ground_state();

/// Swap time for H = -J/2 (a^dag b + b^dag a); pi/(2J) in the fermionic
/// -J (c^dag c + h.c.) normalization.
double exchange_time(double J);

/// Z on `mode`: bias V on the mode for t = pi/V.
PureState apply_z(const PureState& psi, const std::string& mode, double V);
MixedState apply_z(const MixedState& rho, const std::string& mode, double V);

// --- dense coding, isolated and with one extra particle ---

/// 0 -> |psi+>, 1 -> |psi->.
PureState encode_isolated(int message, const ProtocolParams& params = {});

struct Branch {
  double probability;
  PureState state;
};

/// All branches of the extra-particle encoding with their probabilities;
/// message 2 measures mode A and flips its occupation with the extra particle.
std::vector<Branch> extra_particle_branches(int message, const ProtocolParams& params = {});
PureState encode_extra_particle(int message, std::mt19937_64& rng, const ProtocolParams& params = {});

/// Beamsplitter on (A, B) followed by number readout of (C, D).
OutcomeDistribution decode_beamsplitter(const PureState& ab);

// --- dense coding with a shared reservoir ---

/// Messages 0..3 apply I, Z, X, ZX to mode A of the ground state, X being the
/// effective reservoir rotation by pi at phase theta.
PureState encode_full(int message, double theta, const ProtocolParams& params = {});
/// Same with X realized by exact coupling to an explicit reservoir.
MixedState encode_full_exact(int message, double theta, const ProtocolParams& params = {});

/// Unitary of the hardcore exchange gate on a two-mode, single-occupancy layout.
OperatorMatrix cphase_operator(const ModeLayout& two_modes, GateConvention convention, double J = kDefaults.tunneling,
                               double V = kDefaults.bias);
PureState cphase_hardcore(const PureState& psi, GateConvention convention = GateConvention::kJordanWignerEvolution,
                          const std::string& first = "A", const std::string& second = "B",
                          double J = kDefaults.tunneling, double V = kDefaults.bias);
MixedState cphase_hardcore(const MixedState& rho, GateConvention convention = GateConvention::kJordanWignerEvolution,
                           const std::string& first = "A", const std::string& second = "B",
                           double J = kDefaults.tunneling, double V = kDefaults.bias);
/// Exchange hop alone, without the phase compensation.
PureState exchange_hop(const PureState& psi, double J = kDefaults.tunneling);

struct SweepPoint {
  double U;
  double trace_distance;
};

/// Bosonic two-mode evolution (tunneling + onsite U, cutoff 2) for the swap
/// time, with the same phase compensation, compared to the hardcore gate.
std::vector<SweepPoint> cphase_bosonic_sweep(const PureState& psi, const std::vector<double>& u_list,
                                             double J = kDefaults.tunneling, double V = kDefaults.bias);
/// Input used by the sweep when none is given: the X-encoded state after the
/// first Bell-analysis rotation, which populates all four occupations.
PureState cphase_probe_state(double theta = kDefaults.theta);

/// Steps (rotate second mode, exchange gate, rotate both) before readout.
PureState bell_circuit(const PureState& psi, double theta, const ProtocolParams& params = {},
                       const std::string& first = "A", const std::string& second = "B");
MixedState bell_circuit(const MixedState& rho, double theta, const ProtocolParams& params = {},
                        const std::string& first = "A", const std::string& second = "B");

/// Outcome distribution over (first, second) occupations. Uses the explicit
/// reservoir when params.exact is set.
OutcomeDistribution bell_analysis(const PureState& psi, double theta, const ProtocolParams& params = {});
OutcomeDistribution bell_analysis(const MixedState& rho, double theta, const ProtocolParams& params = {});

// --- reports ---

enum class DenseCodingVariant { kIsolated, kExtraParticle, kFullShared, kFullUnshared };

std::string variant_name(DenseCodingVariant variant);
DenseCodingVariant parse_variant(const std::string& name);

struct SsrCheck {
  std::string operation;
  SsrVerdict verdict;
};

struct TeleportInput {
  double alpha;
  double beta;
  double phase;  // relative to the reservoir phase
};

struct TeleportTrial {
  int trial;
  TeleportInput input;
  Occupations outcome;
  double fidelity;           // of the sampled branch
  double expected_fidelity;  // averaged over the exact outcome distribution
};

struct ProtocolReport {
  std::string variant;
  ProtocolParams params;
  std::string theta_model;
  std::vector<std::string> messages;
  std::vector<std::string> outcomes;
  Eigen::MatrixXd channel;  // messages x outcomes, empty for teleportation
  std::optional<CapacityResult> capacity;
  std::vector<SsrCheck> ssr_checks;
  std::vector<TeleportTrial> trials;
  std::vector<std::pair<std::string, double>> outcome_frequencies;  // teleportation
};

/// Builds the exact channel by enumeration and solves for its capacity.
ProtocolReport run_dense_coding(DenseCodingVariant variant, const ProtocolParams& params = {});

// --- teleportation ---

/// Throws Error unless alpha^2 + beta^2 = 1 within 1e-9.
void validate(const TeleportInput& input);
/// Haar-random input: alpha^2 uniform on [0, 1], phase uniform on [0, 2pi).
TeleportInput random_teleport_input(std::mt19937_64& rng);
/// alpha|0> + beta e^{i(theta + phase)}|1> on a single mode.
PureState teleport_target(const TeleportInput& input, double theta, const std::string& mode = "B");

struct TeleportOutcome {
  Occupations outcome;
  double probability;
  double fidelity;
  MixedState bob_state;
};

/// Every Bell-measurement outcome on (a, A) with Bob's corrected state.
/// Unshared: Bob corrects with a phase unknown relative to Alice's,
/// averaged over params.theta_grid offsets.
std::vector<TeleportOutcome> teleport_outcomes(const TeleportInput& input, bool shared,
                                               const ProtocolParams& params = {});

/// One trial per input; the Bell outcome of each trial is sampled from `rng`.
ProtocolReport run_teleportation(const std::vector<TeleportInput>& inputs, bool shared, std::mt19937_64& rng,
                                 const ProtocolParams& params = {});

// --- hyper-entanglement ---

struct HyperReport {
  std::vector<std::string> operations;  // Alice-local unitaries applied to Psi1
  Eigen::MatrixXd overlaps;              // |<i|j>| between reachable states
  int max_orthogonal_set;
  std::vector<int> orthogonal_set;
  std::vector<double> candidate_fidelity;  // best fidelity of Psi1..Psi4 with a reachable state
  bool all_number_conserving;
  bool all_alice_local;
  double spin_flip_fidelity;  // Z_spin-at-A Psi1 against (|10>|S->+|01>|S+>)/sqrt2
};

/// Modes A↑, A↓, B↑, B↓ with single occupancy.
ModeLayout hyper_layout();
HyperReport hyper_reachability(double V = kDefaults.bias);

}  // namespace modent
