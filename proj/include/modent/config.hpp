#pragma once

#include <complex>
#include <numbers>

namespace modent {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;

// Numerical tolerances shared by every module.
struct Tolerances {
  double norm = 1e-12;          // |<psi|psi> - 1| after normalize
  double hermitian = 1e-12;     // max |M - M^dagger|
  double trace = 1e-12;         // |tr(rho) - 1|
  double min_eigenvalue = -1e-10;
  double unitary = 1e-10;       // norm drift under evolve
  double conserving = 1e-10;    // max |[op, N]| for number conservation
  double amplitude = 1e-12;     // amplitudes treated as zero below this
  double channel_row = 1e-9;    // channel rows must sum to one
  double exact_trace = 1e-9;    // trace drift of reservoir couplings
};

inline constexpr Tolerances kTol{};

// Default protocol parameters (hbar = 1).
struct Defaults {
  double tunneling = 1.0;  // J
  double bias = 1.0;       // V
  double rabi = 1.0;       // Omega (effective)
  double nbar = 64.0;
  double theta = 0.0;
  double capacity_tol = 1e-9;
  int capacity_max_iter = 100000;
  int theta_grid = 64;
};

inline constexpr Defaults kDefaults{};

}  // namespace modent
