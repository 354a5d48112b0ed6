#include <algorithm>
#include <cmath>
#include <map>

#include "modent/protocols.hpp"

namespace modent {

namespace {

const std::vector<std::string> kAliceModes = {"a", "A"};

ModeLayout teleport_layout() { return ModeLayout::uniform({"a", "A", "B"}, 1); }

double wrap_phase(double phi) {
  const double w = std::fmod(phi, 2.0 * kPi);
  return w < 0.0 ? w + 2.0 * kPi : w;
}

/// Input on mode a: rotate away from vacuum, then fix the relative phase with a bias pulse.
MixedState prepare_input(const TeleportInput& in, const ProtocolParams& p) {
  const ModeLayout a({"a"}, {1});
  PureState psi = PureState::vacuum(a);
  const double angle = 2.0 * std::acos(std::clamp(std::abs(in.alpha), 0.0, 1.0));
  psi = effective_rotation(psi, "a", angle, p.theta);
  // The rotation leaves -i on |1>; the bias supplies the rest of the phase.
  const double sign_phase = (in.beta < 0.0 ? kPi : 0.0) - (in.alpha < 0.0 ? kPi : 0.0);
  const double needed = in.phase + sign_phase + kPi / 2;
  psi = evolve(psi, hamiltonian(Bias{p.V, "a"}, a), wrap_phase(-needed) / p.V);
  return MixedState(tensor(psi, prepare_ground_state()));
}

/// Normalized state of B conditioned on the (a, A) outcome.
MixedState conditional_bob(const MixedState& rho, const Occupations& outcome, double& probability) {
  const auto& l = rho.layout();
  const std::size_t ma = l.index_of("a"), mA = l.index_of("A"), mB = l.index_of("B");
  const ModeLayout b({"B"}, {l.cutoff(mB)});
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(b.dimension()),
                                                static_cast<Eigen::Index>(b.dimension()));
  std::vector<std::pair<Eigen::Index, int>> rows;
  for (std::size_t i = 0; i < l.dimension(); ++i)
    if (l.occupation(i, ma) == outcome[0] && l.occupation(i, mA) == outcome[1])
      rows.emplace_back(static_cast<Eigen::Index>(i), l.occupation(i, mB));
  for (const auto& [i, bi] : rows)
    for (const auto& [j, bj] : rows) out(bi, bj) += rho.matrix()(i, j);
  probability = out.trace().real();
  if (probability <= 0.0) throw Error("measurement branch has zero norm");
  return MixedState(b, out / probability);
}

MixedState correct(const MixedState& bob, const Occupations& outcome, double theta, const ProtocolParams& p) {
  MixedState s = bob;
  if (outcome[0] == 1) s = effective_rotation(s, "B", kPi, theta);
  if (outcome[1] == 1 && outcome[0] == 0) s = apply_z(s, "B", p.V);
  if (outcome[0] == 1 && outcome[1] == 0) s = apply_z(s, "B", p.V);
  return s;
}

}  // namespace

void validate(const TeleportInput& input) {
  const double norm = input.alpha * input.alpha + input.beta * input.beta;
  if (!std::isfinite(norm) || std::abs(norm - 1.0) > 1e-9)
    throw Error("teleport input must satisfy alpha^2 + beta^2 = 1");
  if (!std::isfinite(input.phase)) throw Error("teleport phase must be finite");
}

TeleportInput random_teleport_input(std::mt19937_64& rng) {
  const double p0 = uniform01(rng);
  const double phase = 2.0 * kPi * uniform01(rng);
  return {std::sqrt(p0), std::sqrt(1.0 - p0), phase};
}

PureState teleport_target(const TeleportInput& input, double theta, const std::string& mode) {
  validate(input);
  Eigen::VectorXcd v(2);
  v << input.alpha, input.beta * std::polar(1.0, theta + input.phase);
  return PureState(ModeLayout({mode}, {1}), v);
}

std::vector<TeleportOutcome> teleport_outcomes(const TeleportInput& input, bool shared,
                                               const ProtocolParams& params) {
  validate(input);
  const MixedState start = prepare_input(input, params);
  if (!(start.layout() == teleport_layout())) throw Error("unexpected teleport layout");
  const MixedState after = bell_circuit(start, params.theta, params, "a", "A");
  const PureState target = teleport_target(input, params.theta);
  const int grid = shared ? 1 : params.theta_grid;
  if (grid < 1) throw Error("theta grid needs at least one point");

  std::vector<TeleportOutcome> outcomes;
  for (const auto& [occ, p] : outcome_distribution(after, kAliceModes)) {
    if (p < 1e-14) continue;
    double prob = 0.0;
    const MixedState bob = conditional_bob(after, occ, prob);
    Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(2, 2);
    for (int k = 0; k < grid; ++k) {
      // Unshared: Bob's correction phase is offset from Alice's by an unknown amount.
      const double bob_theta = params.theta + 2.0 * kPi * k / grid;
      avg += correct(bob, occ, bob_theta, params).matrix() / static_cast<double>(grid);
    }
    MixedState corrected(bob.layout(), avg);
    outcomes.push_back({occ, prob, fidelity(target, corrected), corrected});
  }
  return outcomes;
}

ProtocolReport run_teleportation(const std::vector<TeleportInput>& inputs, bool shared, std::mt19937_64& rng,
                                 const ProtocolParams& params) {
  ProtocolReport report;
  report.variant = shared ? "teleport-shared" : "teleport-unshared";
  report.params = params;
  report.theta_model = shared ? "fixed" : "uniform-grid";
  std::map<std::string, double> freq;
  for (std::size_t t = 0; t < inputs.size(); ++t) {
    const auto outs = teleport_outcomes(inputs[t], shared, params);
    double expected = 0.0;
    for (const auto& o : outs) {
      expected += o.probability * o.fidelity;
      freq[outcome_key(o.outcome)] += o.probability / static_cast<double>(inputs.size());
    }
    const double u = uniform01(rng);
    double acc = 0.0;
    const TeleportOutcome* pick = &outs.back();
    for (const auto& o : outs) {
      acc += o.probability;
      if (u < acc) {
        pick = &o;
        break;
      }
    }
    report.trials.push_back({static_cast<int>(t), inputs[t], pick->outcome, pick->fidelity, expected});
  }
  report.outcome_frequencies.assign(freq.begin(), freq.end());
  const auto sys = teleport_layout();
  report.ssr_checks.push_back({"exchange gate on (a, A)", check_number_conserving(embed_operator(
                                                               cphase_operator(ModeLayout::uniform({"a", "A"}, 1),
                                                                               params.gate, params.J, params.V),
                                                               sys))});
  report.ssr_checks.push_back({"bias V n_B (Z correction)", check_number_conserving(hamiltonian(Bias{params.V, "B"}, sys))});
  return report;
}

}  // namespace modent
