#include <cmath>

#include "doctest.h"
#include "modent/ssr.hpp"
#include "oracles.hpp"

using namespace modent;

namespace {

Eigen::VectorXd totals(const ModeLayout& l) {
  Eigen::VectorXd n(static_cast<Eigen::Index>(l.dimension()));
  for (std::size_t i = 0; i < l.dimension(); ++i) n[static_cast<Eigen::Index>(i)] = l.total_number(i);
  return n;
}

MixedState random_density(const ModeLayout& l, std::mt19937_64& rng) {
  const auto d = static_cast<Eigen::Index>(l.dimension());
  Eigen::MatrixXcd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = cplx(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
  Eigen::MatrixXcd rho = g * g.adjoint();
  return MixedState(l, rho / rho.trace());
}

}  // namespace

TEST_CASE("number-conserving generators pass, ladder operators fail") {
  const ModeLayout l({"A", "B"}, {2, 2});
  CHECK(check_number_conserving(hamiltonian(Tunneling{1.0}, l)).conserving);
  CHECK(check_number_conserving(hamiltonian(Bias{1.0, "A"}, l)).conserving);
  CHECK(check_number_conserving(hamiltonian(Onsite{5.0}, l)).conserving);
  const auto a = mode_operator(ModeOp::kAnnihilation, "A", l);
  const auto v = check_number_conserving(a);
  CHECK_FALSE(v.conserving);
  CHECK(v.max_commutator_norm == doctest::Approx(std::sqrt(2.0)));
  const auto x = a + mode_operator(ModeOp::kCreation, "A", l);
  CHECK_FALSE(check_number_conserving(x).conserving);
}

TEST_CASE("reservoir coupling conserves the joint number") {
  const ModeLayout l({"A", "res"}, {1, 6});
  CHECK(check_number_conserving(hamiltonian(ReservoirCoupling{1.0, "A"}, l)).conserving);
}

TEST_CASE("sectors are listed in ascending order") {
  CHECK(number_sectors(ModeLayout({"A", "B"}, {1, 2})) == std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("sector projection splits weight by total number") {
  const auto l = ModeLayout::uniform({"A", "B"}, 1);
  Eigen::VectorXcd v(4);
  v << 0.6, 0.0, 0.8, 0.0;  // 0.36 |00> + 0.64 |10>
  const PureState psi(l, v);
  const auto p0 = project_sector(psi, 0);
  const auto p1 = project_sector(psi, 1);
  const auto p2 = project_sector(psi, 2);
  CHECK(p0.weight == doctest::Approx(0.36));
  CHECK(p1.weight == doctest::Approx(0.64));
  CHECK(p2.weight == 0.0);
  CHECK(p1.state.norm() == doctest::Approx(1.0));
  CHECK(p2.state.norm() == 0.0);
  const auto m1 = project_sector(MixedState(psi), 1);
  CHECK(m1.weight == doctest::Approx(0.64));
  CHECK(m1.state.trace() == doctest::Approx(1.0));
}

TEST_CASE("phase twirl equals an explicit phase average") {
  std::mt19937_64 rng(17);
  const ModeLayout l({"A", "B"}, {2, 1});
  for (int k = 0; k < 4; ++k) {
    const auto rho = random_density(l, rng);
    const auto twirled = phase_twirl(rho);
    // Number differences here are at most 3, so 8 sample phases average exactly.
    const auto sampled = oracle::sampled_twirl(rho.matrix(), totals(l), 8);
    CHECK((twirled.matrix() - sampled).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((phase_twirl(twirled).matrix() - twirled.matrix()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(twirled.trace() == doctest::Approx(1.0));
  }
}

TEST_CASE("sector-diagonal states are unchanged by the twirl") {
  const auto l = ModeLayout::uniform({"A", "B"}, 1);
  Eigen::VectorXcd v(4);
  v << 0.0, 1.0, -1.0, 0.0;
  const PureState psi(l, v / std::sqrt(2.0));
  CHECK((phase_twirl(psi).matrix() - MixedState(psi).matrix()).cwiseAbs().maxCoeff() < 1e-15);
}
