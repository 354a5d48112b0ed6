#pragma once

// Classical capacity of discrete memoryless channels (Blahut-Arimoto).

#include <Eigen/Dense>

#include <limits>
#include <vector>

#include "modent/config.hpp"

namespace modent {

/// Row-stochastic matrix of P(outcome | message).
class ChannelMatrix {
 public:
  explicit ChannelMatrix(Eigen::MatrixXd probs);
  ChannelMatrix(std::initializer_list<std::initializer_list<double>> rows);

  Eigen::Index messages() const { return probs_.rows(); }
  Eigen::Index outcomes() const { return probs_.cols(); }
  const Eigen::MatrixXd& probs() const { return probs_; }
  double operator()(Eigen::Index message, Eigen::Index outcome) const { return probs_(message, outcome); }

  /// Copy without all-zero outcome columns.
  ChannelMatrix without_empty_outcomes() const;

 private:
  Eigen::MatrixXd probs_;
};

/// I(X;Y) in bits, with 0 log 0 = 0.
double mutual_information(const Eigen::VectorXd& prior, const ChannelMatrix& channel);

struct CapacityResult {
  double capacity;  // bits; the lower bound at termination
  double lower;
  double upper;
  Eigen::VectorXd prior;
  int iterations;
  bool converged;
};

CapacityResult blahut_arimoto(const ChannelMatrix& channel, double tol = kDefaults.capacity_tol,
                              int max_iter = kDefaults.capacity_max_iter);

double binary_entropy(double p);

}  // namespace modent
