#include "modent/capacity.hpp"

#include <cmath>

#include "modent/fock.hpp"

namespace modent {

ChannelMatrix::ChannelMatrix(Eigen::MatrixXd probs) : probs_(std::move(probs)) {
  if (probs_.rows() == 0 || probs_.cols() == 0) throw Error("channel matrix is empty");
  for (Eigen::Index i = 0; i < probs_.rows(); ++i) {
    for (Eigen::Index j = 0; j < probs_.cols(); ++j) {
      const double p = probs_(i, j);
      if (!(p >= -kTol.channel_row && p <= 1.0 + kTol.channel_row))
        throw Error("channel entry outside [0, 1] in row " + std::to_string(i));
    }
    if (std::abs(probs_.row(i).sum() - 1.0) > kTol.channel_row)
      throw Error("channel row " + std::to_string(i) + " does not sum to 1");
  }
  probs_ = probs_.cwiseMax(0.0);
}

ChannelMatrix::ChannelMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : ChannelMatrix([&] {
        Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                          rows.size() ? static_cast<Eigen::Index>(rows.begin()->size()) : 0);
        Eigen::Index i = 0;
        for (const auto& row : rows) {
          if (static_cast<Eigen::Index>(row.size()) != m.cols()) throw Error("ragged channel matrix");
          Eigen::Index j = 0;
          for (double v : row) m(i, j++) = v;
          ++i;
        }
        return m;
      }()) {}

ChannelMatrix ChannelMatrix::without_empty_outcomes() const {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < probs_.cols(); ++j)
    if (probs_.col(j).maxCoeff() > 0.0) keep.push_back(j);
  Eigen::MatrixXd m(probs_.rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = probs_.col(keep[k]);
  return ChannelMatrix(std::move(m));
}

double mutual_information(const Eigen::VectorXd& prior, const ChannelMatrix& channel) {
  if (prior.size() != channel.messages()) throw Error("prior length differs from message count");
  if (std::abs(prior.sum() - 1.0) > kTol.channel_row || prior.minCoeff() < 0.0)
    throw Error("prior is not a probability distribution");
  const Eigen::VectorXd q = channel.probs().transpose() * prior;
  double info = 0.0;
  for (Eigen::Index i = 0; i < channel.messages(); ++i) {
    if (prior[i] <= 0.0) continue;
    for (Eigen::Index j = 0; j < channel.outcomes(); ++j) {
      const double w = channel(i, j);
      if (w <= 0.0) continue;
      info += prior[i] * w * std::log2(w / q[j]);
    }
  }
  return std::max(info, 0.0);
}

CapacityResult blahut_arimoto(const ChannelMatrix& channel, double tol, int max_iter) {
  if (!(tol > 0.0)) throw Error("tolerance must be positive");
  const ChannelMatrix w = channel.without_empty_outcomes();
  const Eigen::Index m = w.messages();
  Eigen::VectorXd r = Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m));
  Eigen::VectorXd c(m);
  CapacityResult result{0.0, 0.0, std::numeric_limits<double>::infinity(), r, 0, false};
  for (int it = 1; it <= max_iter; ++it) {
    const Eigen::VectorXd q = w.probs().transpose() * r;
    // c_i = exp(D(W_i || q)) in natural units
    for (Eigen::Index i = 0; i < m; ++i) {
      double d = 0.0;
      for (Eigen::Index j = 0; j < w.outcomes(); ++j) {
        const double p = w(i, j);
        if (p > 0.0) d += p * std::log(p / q[j]);
      }
      c[i] = std::exp(d);
    }
    const double rc = r.dot(c);
    const double lower = std::log2(rc);
    const double upper = std::log2(c.maxCoeff());
    result.iterations = it;
    // The updated prior achieves at least the current lower bound.
    const Eigen::VectorXd next = r.cwiseProduct(c) / rc;
    if (lower > result.lower || it == 1) {
      result.lower = lower;
      result.prior = next;
    }
    result.upper = std::min(result.upper, upper);
    if (result.upper - result.lower <= tol) {
      result.converged = true;
      break;
    }
    r = next;
  }
  result.lower = std::max(result.lower, 0.0);
  result.capacity = result.lower;
  return result;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace modent
