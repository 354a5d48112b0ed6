#include "modent/ssr.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace modent {

SsrVerdict check_number_conserving(const OperatorMatrix& op) {
  const auto& layout = op.layout;
  double worst = 0.0;
  // ([op, N])_ij = op_ij (N_j - N_i)
  for (std::size_t i = 0; i < layout.dimension(); ++i) {
    const int ni = layout.total_number(i);
    for (std::size_t j = 0; j < layout.dimension(); ++j) {
      const int nj = layout.total_number(j);
      if (ni == nj) continue;
      worst = std::max(worst, std::abs(op.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))) *
                                  std::abs(nj - ni));
    }
  }
  return {worst <= kTol.conserving, worst};
}

std::vector<int> number_sectors(const ModeLayout& layout) {
  std::set<int> sectors;
  for (std::size_t i = 0; i < layout.dimension(); ++i) sectors.insert(layout.total_number(i));
  return {sectors.begin(), sectors.end()};
}

SectorProjection project_sector(const PureState& psi, int total_number) {
  const auto& layout = psi.layout();
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(psi.amplitudes().size());
  for (std::size_t i = 0; i < layout.dimension(); ++i)
    if (layout.total_number(i) == total_number)
      v[static_cast<Eigen::Index>(i)] = psi.amplitudes()[static_cast<Eigen::Index>(i)];
  const double weight = v.squaredNorm() / std::max(psi.amplitudes().squaredNorm(), 1e-300);
  if (v.norm() > kTol.amplitude) v /= v.norm();
  else v.setZero();
  return {PureState(layout, std::move(v)), weight};
}

MixedSectorProjection project_sector(const MixedState& rho, int total_number) {
  const auto& layout = rho.layout();
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    if (layout.total_number(static_cast<std::size_t>(i)) != total_number) continue;
    for (Eigen::Index j = 0; j < d; ++j)
      if (layout.total_number(static_cast<std::size_t>(j)) == total_number) m(i, j) = rho.matrix()(i, j);
  }
  const double weight = m.trace().real() / rho.trace();
  if (weight > 0.0) m /= m.trace().real();
  else m.setZero();
  return {MixedState(layout, std::move(m)), weight};
}

MixedState phase_twirl(const MixedState& rho) {
  const auto& layout = rho.layout();
  Eigen::MatrixXcd m = rho.matrix();
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      if (layout.total_number(static_cast<std::size_t>(i)) != layout.total_number(static_cast<std::size_t>(j)))
        m(i, j) = 0.0;
  return MixedState(layout, std::move(m));
}

MixedState phase_twirl(const PureState& psi) { return phase_twirl(MixedState(psi)); }

}  // namespace modent
