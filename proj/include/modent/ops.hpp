#pragma once

// Operators on the truncated Fock space, exact time evolution and projective
// number measurement.

#include <Eigen/Dense>

#include <map>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "modent/fock.hpp"

namespace modent {

struct OperatorMatrix {
  ModeLayout layout;
  Eigen::MatrixXcd matrix;
  bool hermitian = false;

  OperatorMatrix(ModeLayout layout, Eigen::MatrixXcd matrix, bool hermitian);

  std::size_t dimension() const { return layout.dimension(); }
  double hermiticity_error() const;

  OperatorMatrix operator+(const OperatorMatrix& other) const;
  OperatorMatrix operator*(const OperatorMatrix& other) const;
  OperatorMatrix scaled(double factor) const;
};

enum class ModeOp { kCreation, kAnnihilation, kNumber };

/// Single-mode ladder/number operator. Creation beyond the cutoff is dropped.
OperatorMatrix mode_operator(ModeOp kind, const std::string& mode, const ModeLayout& layout);
OperatorMatrix identity_operator(const ModeLayout& layout);
OperatorMatrix total_number_operator(const ModeLayout& layout);

// Hamiltonian terms (hbar = 1).
struct Tunneling {  // -J/2 (a^dag b + b^dag a)
  double J;
  std::string first = "A";
  std::string second = "B";
};
struct Bias {  // V n_mode
  double V;
  std::string mode;
};
struct Onsite {  // U/2 sum_modes n (n - 1); all modes when `modes` is empty
  double U;
  std::vector<std::string> modes = {};
};
struct ReservoirCoupling {  // -Omega/2 (a^dag b_res + b_res^dag a)
  double omega;
  std::string system_mode;
  std::string reservoir_mode = "res";
};

using HamiltonianTerm = std::variant<Tunneling, Bias, Onsite, ReservoirCoupling>;

OperatorMatrix hamiltonian(const HamiltonianTerm& term, const ModeLayout& layout);

/// exp(-i H t) via Hermitian eigendecomposition.
Eigen::MatrixXcd propagator(const OperatorMatrix& h, double t);

PureState apply(const OperatorMatrix& op, const PureState& psi);
MixedState apply(const OperatorMatrix& unitary, const MixedState& rho);  // U rho U^dag

PureState evolve(const PureState& psi, const OperatorMatrix& h, double t);
MixedState evolve(const MixedState& rho, const OperatorMatrix& h, double t);

/// Applies an operator defined on a subset of modes to `psi` without
/// building the full matrix.
PureState apply_local(const OperatorMatrix& local, const PureState& psi);

/// Lift an operator on a subset of modes to `full`; labels of `local.layout`
/// must exist in `full` with identical cutoffs.
OperatorMatrix embed_operator(const OperatorMatrix& local, const ModeLayout& full);

/// Linear two-mode transformation of creation operators,
/// a_in^dag = M(0,0) c^dag + M(0,1) d^dag, b_in^dag = M(1,0) c^dag + M(1,1) d^dag.
/// The input must be a two-mode state; the output has labels `out_labels`
/// and cutoff `out_cutoff` on both modes (at least the largest particle
/// number present).
PureState two_mode_transform(const PureState& psi, const Eigen::Matrix2cd& modes,
                             std::pair<std::string, std::string> out_labels, int out_cutoff);

/// 50:50 beamsplitter with B carrying the minus sign:
/// psi_A^dag = (psi_C^dag + psi_D^dag)/sqrt2, psi_B^dag = (psi_C^dag - psi_D^dag)/sqrt2.
Eigen::Matrix2cd beamsplitter_matrix();
PureState beamsplitter(const PureState& ab, int out_cutoff = 2);

using OutcomeDistribution = std::map<Occupations, double>;

/// Exact Born-rule distribution of the occupations of `modes` (in the order given).
OutcomeDistribution outcome_distribution(const PureState& psi, const std::vector<std::string>& modes);
OutcomeDistribution outcome_distribution(const MixedState& rho, const std::vector<std::string>& modes);

struct MeasurementResult {
  Occupations outcome;
  PureState collapsed;
  double probability;
};

/// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& rng);

MeasurementResult measure_number(const PureState& psi, const std::vector<std::string>& modes,
                                 std::mt19937_64& rng);
/// Post-measurement state for a given outcome, renormalized. Throws on a
/// zero-probability branch.
MeasurementResult project_outcome(const PureState& psi, const std::vector<std::string>& modes,
                                  const Occupations& outcome);

}  // namespace modent
