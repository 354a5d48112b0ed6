#pragma once

// Particle-number superselection: operator diagnosis, number-sector
// projection and the phase twirl seen by a party without a shared phase
// reference.

#include <vector>

#include "modent/fock.hpp"
#include "modent/ops.hpp"

namespace modent {

struct SsrVerdict {
  bool conserving;
  double max_commutator_norm;  // max |([op, N])_ij|
};

SsrVerdict check_number_conserving(const OperatorMatrix& op);

/// Total particle numbers that occur in the layout's basis, ascending.
std::vector<int> number_sectors(const ModeLayout& layout);

struct SectorProjection {
  PureState state;  // normalized projection, or the zero vector when weight == 0
  double weight;
};

SectorProjection project_sector(const PureState& psi, int total_number);

struct MixedSectorProjection {
  MixedState state;  // P_N rho P_N / weight, or zero when weight == 0
  double weight;
};

MixedSectorProjection project_sector(const MixedState& rho, int total_number);

/// rho -> sum_N P_N rho P_N, the exact average over a uniformly unknown phase.
MixedState phase_twirl(const MixedState& rho);
MixedState phase_twirl(const PureState& psi);

}  // namespace modent
