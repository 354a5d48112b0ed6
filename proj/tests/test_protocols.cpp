#include <cmath>

#include "doctest.h"
#include "modent/protocols.hpp"
#include "oracles.hpp"

using namespace modent;

namespace {

/// Most likely (A, B) outcome of each message and its probability.
std::pair<std::string, double> top_outcome(const OutcomeDistribution& d) {
  std::pair<std::string, double> best{"", -1.0};
  for (const auto& [occ, p] : d)
    if (p > best.second) best = {outcome_key(occ), p};
  return best;
}

}  // namespace

TEST_CASE("ground state is the symmetric single-particle state") {
  const auto g = prepare_ground_state();
  CHECK(g.norm() == doctest::Approx(1.0));
  CHECK(std::abs(g.amplitude(Occupations{1, 0}) - 1.0 / std::sqrt(2.0)) < 1e-15);
  CHECK(exchange_time(2.0) == doctest::Approx(kPi / 2));
  CHECK_THROWS_AS(exchange_time(0.0), Error);
}

TEST_CASE("isolated encodings stay in the one-particle sector") {
  for (int m = 0; m < 2; ++m) {
    const auto s = encode_isolated(m);
    CHECK(project_sector(s, 1).weight == doctest::Approx(1.0).epsilon(1e-15));
  }
  const auto minus = encode_isolated(1);
  CHECK(minus.inner(prepare_ground_state()).real() == doctest::Approx(0.0).epsilon(1e-14));
  CHECK_THROWS_AS(encode_isolated(2), Error);
}

TEST_CASE("beamsplitter decoding separates the two isolated messages") {
  const auto d0 = decode_beamsplitter(encode_isolated(0));
  const auto d1 = decode_beamsplitter(encode_isolated(1));
  CHECK(d0.at({1, 0}) == doctest::Approx(1.0));
  CHECK(d1.at({0, 1}) == doctest::Approx(1.0));
}

TEST_CASE("extra-particle encoding of the third message") {
  const auto branches = extra_particle_branches(2);
  REQUIRE(branches.size() == 2);
  OutcomeDistribution total;
  for (const auto& b : branches) {
    CHECK(b.probability == doctest::Approx(0.5));
    for (const auto& [o, p] : decode_beamsplitter(b.state)) total[o] += b.probability * p;
  }
  CHECK(total.at({0, 0}) == doctest::Approx(0.5));
  CHECK(total.at({2, 0}) == doctest::Approx(0.25));
  CHECK(total.at({0, 2}) == doctest::Approx(0.25));

  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const auto s = encode_extra_particle(2, rng);
    const double w0 = project_sector(s, 0).weight;
    const double w2 = project_sector(s, 2).weight;
    CHECK(w0 + w2 == doctest::Approx(1.0));
    CHECK(w0 * w2 == 0.0);
  }
}

TEST_CASE("dense coding reports for the simple variants") {
  const auto iso = run_dense_coding(DenseCodingVariant::kIsolated);
  CHECK(iso.capacity->capacity == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(iso.channel.rows() == 2);

  const auto extra = run_dense_coding(DenseCodingVariant::kExtraParticle);
  CHECK(extra.channel.rows() == 3);
  CHECK(extra.channel.cols() == 5);
  CHECK(extra.capacity->capacity == doctest::Approx(std::log2(3.0)).epsilon(1e-9));
  bool flagged = false;
  for (const auto& c : extra.ssr_checks)
    if (!c.verdict.conserving) flagged = true;
  CHECK(flagged);
  for (const auto& c : iso.ssr_checks) CHECK(c.verdict.conserving);
}

TEST_CASE("both gate conventions implement the same unitary") {
  const auto l = system_layout();
  for (double J : {0.5, 1.0, 2.0}) {
    const auto jw = cphase_operator(l, GateConvention::kJordanWignerEvolution, J, 1.3).matrix;
    const auto rule = cphase_operator(l, GateConvention::kExchangeSignRule, J, 1.3).matrix;
    CHECK((jw - rule).cwiseAbs().maxCoeff() < 1e-12);
  }
  CHECK_THROWS_AS(cphase_operator(ModeLayout::uniform({"A", "B"}, 2), GateConvention::kExchangeSignRule), Error);
}

TEST_CASE("bell analysis decodes each message to a distinct outcome") {
  const std::vector<std::string> expected = {"00", "01", "11", "10"};  // I, Z, X, ZX
  for (auto gate : {GateConvention::kJordanWignerEvolution, GateConvention::kExchangeSignRule}) {
    for (double theta : {0.0, kPi / 4, kPi / 2, kPi, 2.5}) {
      ProtocolParams p;
      p.gate = gate;
      for (int m = 0; m < 4; ++m) {
        const auto [key, prob] = top_outcome(bell_analysis(encode_full(m, theta, p), theta, p));
        CHECK(key == expected[static_cast<std::size_t>(m)]);
        CHECK(prob == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("exchange hop without phase compensation scrambles the outcomes") {
  // Replace the gate in the circuit by the bare hop and check that every
  // message gives a uniform outcome distribution.
  for (int m = 0; m < 4; ++m) {
    PureState s = effective_rotation(encode_full(m, 0.0), "B", kPi / 2, 0.0);
    s = exchange_hop(s);
    s = effective_rotation(s, "A", kPi / 2, 0.0);
    s = effective_rotation(s, "B", kPi / 2, 0.0);
    for (const auto& [o, p] : outcome_distribution(s, {"A", "B"})) CHECK(p == doctest::Approx(0.25).epsilon(1e-12));
  }
}

TEST_CASE("full protocol with a shared phase is a permutation channel") {
  for (double theta : {0.0, kPi / 4, kPi / 2, kPi}) {
    ProtocolParams p;
    p.theta = theta;
    const auto r = run_dense_coding(DenseCodingVariant::kFullShared, p);
    CHECK(r.channel.rows() == 4);
    CHECK(r.channel.cols() == 4);
    CHECK((r.channel * r.channel.transpose() - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(std::abs(r.capacity->capacity - 2.0) < 1e-9);
  }
}

TEST_CASE("unknown relative phase merges the X and ZX messages") {
  const auto r = run_dense_coding(DenseCodingVariant::kFullUnshared);
  CHECK((r.channel.row(2) - r.channel.row(3)).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.capacity->capacity == doctest::Approx(std::log2(3.0)).epsilon(1e-9));
  CHECK(r.capacity->capacity < 1.9);
}

TEST_CASE("unshared phase average has converged on the default grid") {
  ProtocolParams coarse, fine;
  coarse.theta_grid = 32;
  fine.theta_grid = 128;
  const auto a = run_dense_coding(DenseCodingVariant::kFullUnshared, coarse);
  const auto b = run_dense_coding(DenseCodingVariant::kFullUnshared);
  const auto c = run_dense_coding(DenseCodingVariant::kFullUnshared, fine);
  CHECK((a.channel - b.channel).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.channel - c.channel).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("exact reservoir couplings approach the ideal channel") {
  ProtocolParams p;
  p.exact = true;
  p.nbar = 16;
  const auto low = run_dense_coding(DenseCodingVariant::kFullShared, p);
  p.nbar = 64;
  const auto high = run_dense_coding(DenseCodingVariant::kFullShared, p);
  for (const auto* r : {&low, &high})
    for (Eigen::Index i = 0; i < r->channel.rows(); ++i) CHECK(r->channel.row(i).sum() == doctest::Approx(1.0));
  CHECK(high.capacity->capacity > low.capacity->capacity);
  CHECK(high.capacity->capacity < 2.0);
  for (int i = 0; i < 4; ++i) CHECK(high.channel.row(i).maxCoeff() > 0.95);
  bool reservoir_conserving = false;
  for (const auto& c : high.ssr_checks)
    if (c.operation.find("H_int") != std::string::npos) reservoir_conserving = c.verdict.conserving;
  CHECK(reservoir_conserving);
}

TEST_CASE("bosonic exchange converges to the hardcore gate") {
  const auto probe = cphase_probe_state();
  const auto pts = cphase_bosonic_sweep(probe, {1, 10, 30, 100, 300, 1000, 3000});
  // Reference values from an independent dense simulation.
  const std::vector<double> ref = {0.665, 0.135, 0.0453, 0.0136, 0.00453, 0.00136, 0.00045};
  REQUIRE(pts.size() == ref.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    CHECK(pts[i].trace_distance == doctest::Approx(ref[i]).epsilon(0.01));
    if (i > 0) CHECK(pts[i].trace_distance <= pts[i - 1].trace_distance);
  }
  // The probe populates every two-mode occupation.
  for (const auto& [o, p] : outcome_distribution(probe, {"A", "B"})) CHECK(p > 0.1);
}

TEST_CASE("variant names round-trip") {
  for (auto v : {DenseCodingVariant::kIsolated, DenseCodingVariant::kExtraParticle, DenseCodingVariant::kFullShared,
                 DenseCodingVariant::kFullUnshared})
    CHECK(parse_variant(variant_name(v)) == v);
  CHECK_THROWS_AS(parse_variant("bogus"), Error);
}

TEST_CASE("hyper-entangled state reaches only two orthogonal states") {
  const auto r = hyper_reachability();
  CHECK(r.max_orthogonal_set == 2);
  CHECK(r.all_number_conserving);
  CHECK(r.all_alice_local);
  CHECK(r.overlaps(0, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.overlaps(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(r.overlaps(2, 3) == doctest::Approx(0.0).epsilon(1e-12));
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(r.overlaps(i, i) == doctest::Approx(1.0));
  CHECK(r.candidate_fidelity[0] == doctest::Approx(1.0));
  CHECK(r.candidate_fidelity[1] == doctest::Approx(1.0));
  CHECK(r.candidate_fidelity[2] < 1.0 - 1e-6);
  CHECK(r.candidate_fidelity[3] < 1.0 - 1e-6);
  CHECK(r.spin_flip_fidelity == doctest::Approx(1.0).epsilon(1e-12));
}
