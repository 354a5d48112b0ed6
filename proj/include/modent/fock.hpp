#pragma once

// Truncated multi-mode bosonic Fock space.
//
// Basis states are ordered lexicographically over the mode-ordered
// occupations: the first mode is the most significant digit, so for two
// modes with cutoff 1 the order is |00>, |01>, |10>, |11>. Every matrix in
// the library uses this ordering.

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "modent/config.hpp"

namespace modent {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Occupations = std::vector<int>;

class ModeLayout {
 public:
  ModeLayout(std::vector<std::string> labels, std::vector<int> cutoffs);

  static ModeLayout uniform(std::vector<std::string> labels, int cutoff);

  std::size_t num_modes() const { return labels_.size(); }
  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<int>& cutoffs() const { return cutoffs_; }
  const std::string& label(std::size_t mode) const { return labels_.at(mode); }
  int cutoff(std::size_t mode) const { return cutoffs_.at(mode); }

  std::optional<std::size_t> find(const std::string& label) const;
  /// Index of `label`; throws Error for unknown labels.
  std::size_t index_of(const std::string& label) const;
  bool contains(const std::string& label) const { return find(label).has_value(); }

  std::size_t dimension() const { return dimension_; }
  std::size_t stride(std::size_t mode) const { return strides_.at(mode); }

  Occupations occupations(std::size_t basis_index) const;
  int occupation(std::size_t basis_index, std::size_t mode) const {
    return static_cast<int>((basis_index / strides_[mode]) %
                            static_cast<std::size_t>(cutoffs_[mode] + 1));
  }
  int total_number(std::size_t basis_index) const;
  std::size_t index(std::span<const int> occupations) const;

  /// Modes of `*this` followed by the modes of `other`; labels must be disjoint.
  ModeLayout concat(const ModeLayout& other) const;
  /// Layout restricted to `modes`, kept in their original order.
  ModeLayout restrict_to(std::span<const std::size_t> modes) const;

  bool operator==(const ModeLayout& other) const = default;

 private:
  std::vector<std::string> labels_;
  std::vector<int> cutoffs_;
  std::vector<std::size_t> strides_;
  std::size_t dimension_ = 1;
};

struct FockBasisState {
  Occupations occupations;
  int total() const;
  bool operator==(const FockBasisState&) const = default;
};

std::vector<FockBasisState> enumerate_basis(const ModeLayout& layout);

/// Ket label such as "|10>" for printing and report keys.
std::string ket_label(std::span<const int> occupations);
/// Compact key such as "10" (occupations concatenated, comma separated
/// when any occupation exceeds 9).
std::string outcome_key(std::span<const int> occupations);

class PureState {
 public:
  PureState(ModeLayout layout, Eigen::VectorXcd amplitudes);

  /// Fock basis state with the given occupations.
  static PureState basis(const ModeLayout& layout, std::span<const int> occupations);
  static PureState vacuum(const ModeLayout& layout);

  const ModeLayout& layout() const { return layout_; }
  const Eigen::VectorXcd& amplitudes() const { return amps_; }
  cplx amplitude(std::span<const int> occupations) const {
    return amps_[static_cast<Eigen::Index>(layout_.index(occupations))];
  }
  std::size_t dimension() const { return layout_.dimension(); }

  double norm() const { return amps_.norm(); }
  /// Returns a unit-norm copy; throws on a zero vector.
  PureState normalized() const;
  cplx inner(const PureState& other) const;

 private:
  ModeLayout layout_;
  Eigen::VectorXcd amps_;
};

class MixedState {
 public:
  MixedState(ModeLayout layout, Eigen::MatrixXcd matrix);
  explicit MixedState(const PureState& pure);

  const ModeLayout& layout() const { return layout_; }
  const Eigen::MatrixXcd& matrix() const { return rho_; }
  std::size_t dimension() const { return layout_.dimension(); }

  double trace() const { return rho_.trace().real(); }
  double hermiticity_error() const;
  double min_eigenvalue() const;
  double purity() const;
  /// Throws Error if the Hermiticity, trace or positivity invariants fail.
  void validate(double trace_tol = kTol.trace) const;

 private:
  ModeLayout layout_;
  Eigen::MatrixXcd rho_;
};

PureState tensor(const PureState& first, const PureState& second);
MixedState tensor(const MixedState& first, const MixedState& second);

/// Reduced state on `keep` (labels); the result keeps the original mode order.
MixedState partial_trace(const MixedState& rho, const std::vector<std::string>& keep);
MixedState partial_trace(const PureState& psi, const std::vector<std::string>& keep);

struct StateMetrics {
  double fidelity;        // squared Uhlmann fidelity, |<x|y>|^2 for pure states
  double trace_distance;  // (1/2) || x - y ||_1
};

double fidelity(const PureState& x, const PureState& y);
double fidelity(const MixedState& x, const MixedState& y);
double fidelity(const PureState& x, const MixedState& y);
double fidelity(const MixedState& x, const PureState& y);
double trace_distance(const MixedState& x, const MixedState& y);
double trace_distance(const PureState& x, const PureState& y);
double trace_distance(const PureState& x, const MixedState& y);
double trace_distance(const MixedState& x, const PureState& y);

template <typename X, typename Y>
StateMetrics state_metrics(const X& x, const Y& y) {
  return {fidelity(x, y), trace_distance(x, y)};
}

/// Copy of `psi` on a layout with the same labels but larger cutoffs.
PureState embed(const PureState& psi, const ModeLayout& larger);

}  // namespace modent
