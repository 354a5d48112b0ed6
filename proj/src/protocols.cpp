#include "modent/protocols.hpp"

#include <array>
#include <cmath>
#include <set>

namespace modent {

namespace {

constexpr double kChannelFloor = 1e-14;  // outcome probabilities below this are numerical noise

void require_message(int message, int count) {
  if (message < 0 || message >= count)
    throw Error("message must be in [0, " + std::to_string(count - 1) + "], got " + std::to_string(message));
}

void require_hardcore(const ModeLayout& layout, const std::string& first, const std::string& second) {
  for (const auto& m : {first, second})
    if (layout.cutoff(layout.index_of(m)) != 1) throw Error("exchange gate needs single-occupancy mode " + m);
}

/// X = |0><1| + |1><0| on one single-occupancy mode.
OperatorMatrix occupation_flip(const ModeLayout& layout, const std::string& mode) {
  ModeLayout local({mode}, {1});
  Eigen::MatrixXcd x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  return embed_operator(OperatorMatrix(local, x, true), layout);
}

struct ExactCouplers {
  ReservoirCoupler half;  // angle pi/2
  ReservoirCoupler full;  // angle pi
};

ExactCouplers make_couplers(const ProtocolParams& p) {
  const auto spec = ReservoirSpec::fixed(p.nbar, p.theta);
  return {ReservoirCoupler(spec, ReservoirCoupler::time_for_angle(kPi / 2, p.nbar, p.omega), p.omega, 1),
          ReservoirCoupler(spec, ReservoirCoupler::time_for_angle(kPi, p.nbar, p.omega), p.omega, 1)};
}

MixedState rotate(const MixedState& rho, const std::string& mode, double angle, double theta,
                  const ExactCouplers* exact) {
  if (exact == nullptr) return effective_rotation(rho, mode, angle, theta);
  const auto& coupler = angle == kPi ? exact->full : exact->half;
  return coupler.apply(rho, mode, theta);
}

MixedState bell_circuit_impl(const MixedState& rho, double theta, const ProtocolParams& p, const std::string& first,
                             const std::string& second, const ExactCouplers* exact) {
  MixedState s = rotate(rho, second, kPi / 2, theta, exact);
  s = cphase_hardcore(s, p.gate, first, second, p.J, p.V);
  s = rotate(s, first, kPi / 2, theta, exact);
  return rotate(s, second, kPi / 2, theta, exact);
}

MixedState encode_full_impl(int message, double theta, const ProtocolParams& p, const ExactCouplers& exact) {
  require_message(message, 4);
  MixedState s(prepare_ground_state());
  if (message >= 2) s = exact.full.apply(s, "A", theta);
  if (message == 1 || message == 3) s = apply_z(s, "A", p.V);
  return s;
}

void add_row(std::vector<OutcomeDistribution>& rows, const OutcomeDistribution& row) { rows.push_back(row); }

OutcomeDistribution weighted_sum(const std::vector<std::pair<double, OutcomeDistribution>>& parts) {
  OutcomeDistribution out;
  for (const auto& [w, dist] : parts)
    for (const auto& [occ, pr] : dist) out[occ] += w * pr;
  return out;
}

}  // namespace

ModeLayout system_layout() { return ModeLayout::uniform({"A", "B"}, 1); }

PureState prepare_ground_state() {
  Eigen::VectorXcd v(4);
  const double s = 1.0 / std::sqrt(2.0);
  v << 0.0, s, s, 0.0;
  return PureState(system_layout(), v);
}

double exchange_time(double J) {
  if (!(J > 0.0)) throw Error("tunneling J must be positive");
  return kPi / J;
}

PureState apply_z(const PureState& psi, const std::string& mode, double V) {
  auto h = hamiltonian(Bias{V, mode}, psi.layout());
  return evolve(psi, h, kPi / V);
}

MixedState apply_z(const MixedState& rho, const std::string& mode, double V) {
  auto h = hamiltonian(Bias{V, mode}, rho.layout());
  return evolve(rho, h, kPi / V);
}

PureState encode_isolated(int message, const ProtocolParams& params) {
  require_message(message, 2);
  const PureState ground = prepare_ground_state();
  if (message == 0) return ground;
  auto bias = hamiltonian(Bias{params.V, "A"}, ground.layout());
  if (!check_number_conserving(bias).conserving) throw Error("isolated encoding must conserve particle number");
  return evolve(ground, bias, kPi / params.V);
}

std::vector<Branch> extra_particle_branches(int message, const ProtocolParams& params) {
  require_message(message, 3);
  if (message < 2) return {{1.0, encode_isolated(message, params)}};
  const PureState ground = prepare_ground_state();
  const auto flip = occupation_flip(ground.layout(), "A");
  std::vector<Branch> branches;
  for (const auto& [occ, p] : outcome_distribution(ground, {"A"})) {
    auto m = project_outcome(ground, {"A"}, occ);
    branches.push_back({p, apply(flip, m.collapsed)});
  }
  return branches;
}

PureState encode_extra_particle(int message, std::mt19937_64& rng, const ProtocolParams& params) {
  require_message(message, 3);
  if (message < 2) return encode_isolated(message, params);
  const PureState ground = prepare_ground_state();
  auto m = measure_number(ground, {"A"}, rng);
  return apply(occupation_flip(ground.layout(), "A"), m.collapsed);
}

OutcomeDistribution decode_beamsplitter(const PureState& ab) {
  return outcome_distribution(beamsplitter(ab, 2), {"C", "D"});
}

PureState encode_full(int message, double theta, const ProtocolParams& params) {
  require_message(message, 4);
  PureState s = prepare_ground_state();
  if (message >= 2) s = effective_rotation(s, "A", kPi, theta);
  if (message == 1 || message == 3) s = apply_z(s, "A", params.V);
  return s;
}

MixedState encode_full_exact(int message, double theta, const ProtocolParams& params) {
  return encode_full_impl(message, theta, params, make_couplers(params));
}

OperatorMatrix cphase_operator(const ModeLayout& two_modes, GateConvention convention, double J, double V) {
  if (two_modes.num_modes() != 2) throw Error("exchange gate acts on exactly two modes");
  require_hardcore(two_modes, two_modes.label(0), two_modes.label(1));
  const auto& first = two_modes.label(0);
  const auto& second = two_modes.label(1);
  if (convention == GateConvention::kExchangeSignRule) {
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(4, 4);
    u(0, 0) = 1.0;   // |00> -> |00>
    u(2, 1) = 1.0;   // |01> -> |10>
    u(1, 2) = 1.0;   // |10> -> |01>
    u(3, 3) = -1.0;  // |11> -> -|11>
    return OperatorMatrix(two_modes, std::move(u), false);
  }
  auto hop = hamiltonian(Tunneling{J, first, second}, two_modes);
  auto bias = hamiltonian(Bias{V, first}, two_modes) + hamiltonian(Bias{V, second}, two_modes);
  Eigen::MatrixXcd u = propagator(bias, kPi / (2 * V)) * propagator(hop, exchange_time(J));
  return OperatorMatrix(two_modes, std::move(u), false);
}

PureState cphase_hardcore(const PureState& psi, GateConvention convention, const std::string& first,
                          const std::string& second, double J, double V) {
  require_hardcore(psi.layout(), first, second);
  ModeLayout local({first, second}, {1, 1});
  return apply_local(cphase_operator(local, convention, J, V), psi);
}

MixedState cphase_hardcore(const MixedState& rho, GateConvention convention, const std::string& first,
                           const std::string& second, double J, double V) {
  require_hardcore(rho.layout(), first, second);
  ModeLayout local({first, second}, {1, 1});
  return apply(embed_operator(cphase_operator(local, convention, J, V), rho.layout()), rho);
}

PureState exchange_hop(const PureState& psi, double J) {
  const auto& l = psi.layout();
  if (l.num_modes() != 2) throw Error("exchange hop acts on a two-mode state");
  return evolve(psi, hamiltonian(Tunneling{J, l.label(0), l.label(1)}, l), exchange_time(J));
}

std::vector<SweepPoint> cphase_bosonic_sweep(const PureState& psi, const std::vector<double>& u_list, double J,
                                             double V) {
  const auto& l = psi.layout();
  if (l.num_modes() != 2) throw Error("bosonic sweep acts on a two-mode state");
  const PureState hardcore = cphase_hardcore(psi, GateConvention::kJordanWignerEvolution, l.label(0), l.label(1), J, V);
  const ModeLayout soft = ModeLayout::uniform(l.labels(), 2);
  const PureState start = embed(psi, soft);
  const PureState target = embed(hardcore, soft);
  const auto hop = hamiltonian(Tunneling{J, l.label(0), l.label(1)}, soft);
  const auto bias = hamiltonian(Bias{V, l.label(0)}, soft) + hamiltonian(Bias{V, l.label(1)}, soft);
  std::vector<SweepPoint> points;
  for (double u : u_list) {
    const auto h = hop + hamiltonian(Onsite{u}, soft);
    PureState out = evolve(start, h, exchange_time(J));
    out = evolve(out, bias, kPi / (2 * V));
    points.push_back({u, trace_distance(out, target)});
  }
  return points;
}

PureState cphase_probe_state(double theta) {
  return effective_rotation(encode_full(2, theta), "B", kPi / 2, theta);
}

PureState bell_circuit(const PureState& psi, double theta, const ProtocolParams& params, const std::string& first,
                       const std::string& second) {
  if (params.exact) throw Error("exact reservoir couplings produce mixed states; use the mixed-state overload");
  PureState s = effective_rotation(psi, second, kPi / 2, theta);
  s = cphase_hardcore(s, params.gate, first, second, params.J, params.V);
  s = effective_rotation(s, first, kPi / 2, theta);
  return effective_rotation(s, second, kPi / 2, theta);
}

MixedState bell_circuit(const MixedState& rho, double theta, const ProtocolParams& params, const std::string& first,
                        const std::string& second) {
  if (!params.exact) return bell_circuit_impl(rho, theta, params, first, second, nullptr);
  const auto couplers = make_couplers(params);
  return bell_circuit_impl(rho, theta, params, first, second, &couplers);
}

OutcomeDistribution bell_analysis(const PureState& psi, double theta, const ProtocolParams& params) {
  if (params.exact) return bell_analysis(MixedState(psi), theta, params);
  return outcome_distribution(bell_circuit(psi, theta, params), {"A", "B"});
}

OutcomeDistribution bell_analysis(const MixedState& rho, double theta, const ProtocolParams& params) {
  return outcome_distribution(bell_circuit(rho, theta, params), {"A", "B"});
}

std::string variant_name(DenseCodingVariant variant) {
  switch (variant) {
    case DenseCodingVariant::kIsolated: return "isolated";
    case DenseCodingVariant::kExtraParticle: return "extra";
    case DenseCodingVariant::kFullShared: return "full-shared";
    case DenseCodingVariant::kFullUnshared: return "full-unshared";
  }
  throw Error("unknown variant");
}

DenseCodingVariant parse_variant(const std::string& name) {
  for (auto v : {DenseCodingVariant::kIsolated, DenseCodingVariant::kExtraParticle, DenseCodingVariant::kFullShared,
                 DenseCodingVariant::kFullUnshared})
    if (variant_name(v) == name) return v;
  throw Error("unknown dense coding variant " + name);
}

namespace {

std::vector<SsrCheck> ssr_checks_for(DenseCodingVariant variant, const ProtocolParams& p) {
  const auto sys = system_layout();
  std::vector<SsrCheck> checks;
  checks.push_back({"tunneling -J/2 (A^dag B + B^dag A)", check_number_conserving(hamiltonian(Tunneling{p.J}, sys))});
  checks.push_back({"bias V n_A (Z on A)", check_number_conserving(hamiltonian(Bias{p.V, "A"}, sys))});
  if (variant == DenseCodingVariant::kExtraParticle) {
    checks.push_back({"occupation flip on A (extra particle, system modes only)",
                      check_number_conserving(occupation_flip(sys, "A"))});
  }
  if (variant == DenseCodingVariant::kFullShared || variant == DenseCodingVariant::kFullUnshared) {
    checks.push_back({"effective X rotation on A (system modes only)",
                      check_number_conserving(effective_rotation_operator(sys, "A", kPi, p.theta))});
    const auto joint = sys.concat(ModeLayout({kReservoirMode}, {4}));
    checks.push_back({"H_int on (A, res)", check_number_conserving(hamiltonian(ReservoirCoupling{p.omega, "A"}, joint))});
    checks.push_back({"exchange gate on (A, B)",
                      check_number_conserving(cphase_operator(sys, p.gate, p.J, p.V))});
  }
  return checks;
}

}  // namespace

ProtocolReport run_dense_coding(DenseCodingVariant variant, const ProtocolParams& params) {
  ProtocolReport report;
  report.variant = variant_name(variant);
  report.params = params;
  std::vector<OutcomeDistribution> rows;
  switch (variant) {
    case DenseCodingVariant::kIsolated:
      report.theta_model = "none";
      report.messages = {"I", "Z"};
      for (int m = 0; m < 2; ++m) add_row(rows, decode_beamsplitter(encode_isolated(m, params)));
      break;
    case DenseCodingVariant::kExtraParticle:
      report.theta_model = "none";
      report.messages = {"I", "Z", "X"};
      for (int m = 0; m < 3; ++m) {
        std::vector<std::pair<double, OutcomeDistribution>> parts;
        for (const auto& b : extra_particle_branches(m, params)) parts.emplace_back(b.probability, decode_beamsplitter(b.state));
        add_row(rows, weighted_sum(parts));
      }
      break;
    case DenseCodingVariant::kFullShared:
    case DenseCodingVariant::kFullUnshared: {
      const bool shared = variant == DenseCodingVariant::kFullShared;
      report.theta_model = shared ? "fixed" : "uniform-grid";
      report.messages = {"I", "Z", "X", "ZX"};
      std::optional<ExactCouplers> couplers;
      if (params.exact) couplers = make_couplers(params);
      const int grid = shared ? 1 : params.theta_grid;
      if (grid < 1) throw Error("theta grid needs at least one point");
      for (int m = 0; m < 4; ++m) {
        std::vector<std::pair<double, OutcomeDistribution>> parts;
        for (int k = 0; k < grid; ++k) {
          // Unshared: Alice's phase is unknown relative to Bob's decoding phase.
          const double enc_theta = params.theta + 2.0 * kPi * k / grid;
          if (couplers) {
            const auto enc = encode_full_impl(m, enc_theta, params, *couplers);
            const auto out = bell_circuit_impl(enc, params.theta, params, "A", "B", &*couplers);
            parts.emplace_back(1.0 / grid, outcome_distribution(out, {"A", "B"}));
          } else {
            parts.emplace_back(1.0 / grid, bell_analysis(encode_full(m, enc_theta, params), params.theta, params));
          }
        }
        add_row(rows, weighted_sum(parts));
      }
      break;
    }
  }

  std::set<Occupations> columns;
  for (const auto& row : rows)
    for (const auto& [occ, p] : row)
      if (p > kChannelFloor) columns.insert(occ);
  report.channel = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(columns.size()));
  Eigen::Index j = 0;
  for (const auto& occ : columns) {
    report.outcomes.push_back(outcome_key(occ));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto it = rows[i].find(occ);
      if (it != rows[i].end() && it->second > kChannelFloor) report.channel(static_cast<Eigen::Index>(i), j) = it->second;
    }
    ++j;
  }
  for (Eigen::Index i = 0; i < report.channel.rows(); ++i) report.channel.row(i) /= report.channel.row(i).sum();
  report.capacity = blahut_arimoto(ChannelMatrix(report.channel), params.tol, kDefaults.capacity_max_iter);
  report.ssr_checks = ssr_checks_for(variant, params);
  return report;
}

// --- hyper-entanglement ---

ModeLayout hyper_layout() { return ModeLayout::uniform({"A↑", "A↓", "B↑", "B↓"}, 1); }

namespace {

/// Single particle with spatial amplitudes (A, B) and spin amplitudes (up, down).
PureState single_particle(const ModeLayout& layout, std::array<cplx, 2> spatial, std::array<cplx, 2> spin) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dimension()));
  for (int x = 0; x < 2; ++x)
    for (int s = 0; s < 2; ++s) {
      Occupations occ(4, 0);
      occ[static_cast<std::size_t>(2 * x + s)] = 1;
      v[static_cast<Eigen::Index>(layout.index(occ))] = spatial[static_cast<std::size_t>(x)] * spin[static_cast<std::size_t>(s)];
    }
  return PureState(layout, v);
}

bool commutes_with_bob(const OperatorMatrix& u) {
  for (const char* mode : {"B↑", "B↓"}) {
    const auto a = mode_operator(ModeOp::kAnnihilation, mode, u.layout);
    if ((u.matrix * a.matrix - a.matrix * u.matrix).cwiseAbs().maxCoeff() > kTol.conserving) return false;
  }
  return true;
}

}  // namespace

HyperReport hyper_reachability(double V) {
  const auto layout = hyper_layout();
  const double s = 1.0 / std::sqrt(2.0);
  const std::array<cplx, 2> plus{s, s};
  const std::array<cplx, 2> minus{s, -s};
  const PureState psi1 = single_particle(layout, plus, plus);

  const auto bias_a = hamiltonian(Bias{V, "A↑"}, layout) + hamiltonian(Bias{V, "A↓"}, layout);
  const auto bias_spin = hamiltonian(Bias{V, "A↓"}, layout);
  const OperatorMatrix z_spatial(layout, propagator(bias_a, kPi / V), false);
  const OperatorMatrix z_spin(layout, propagator(bias_spin, kPi / V), false);
  const std::vector<std::pair<std::string, OperatorMatrix>> ops = {
      {"I", identity_operator(layout)},
      {"Z_spatial", z_spatial},
      {"Z_spin_at_A", z_spin},
      {"Z_spatial*Z_spin_at_A", z_spatial * z_spin},
  };

  HyperReport report;
  report.all_number_conserving = true;
  report.all_alice_local = true;
  std::vector<PureState> reachable;
  for (const auto& [name, u] : ops) {
    report.operations.push_back(name);
    report.all_number_conserving = report.all_number_conserving && check_number_conserving(u).conserving;
    report.all_alice_local = report.all_alice_local && commutes_with_bob(u);
    reachable.push_back(apply(u, psi1));
  }
  const auto n = static_cast<Eigen::Index>(reachable.size());
  report.overlaps = Eigen::MatrixXd(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      report.overlaps(i, j) = std::abs(reachable[static_cast<std::size_t>(i)].inner(reachable[static_cast<std::size_t>(j)]));

  report.max_orthogonal_set = 0;
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    std::vector<int> members;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) members.push_back(i);
    bool orthogonal = true;
    for (std::size_t a = 0; a < members.size() && orthogonal; ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b)
        if (report.overlaps(members[a], members[b]) > 1e-9) {
          orthogonal = false;
          break;
        }
    if (orthogonal && static_cast<int>(members.size()) > report.max_orthogonal_set) {
      report.max_orthogonal_set = static_cast<int>(members.size());
      report.orthogonal_set = members;
    }
  }

  const std::vector<PureState> candidates = {single_particle(layout, plus, plus), single_particle(layout, minus, plus),
                                             single_particle(layout, plus, minus),
                                             single_particle(layout, minus, minus)};
  for (const auto& c : candidates) {
    double best = 0.0;
    for (const auto& r : reachable) best = std::max(best, fidelity(c, r));
    report.candidate_fidelity.push_back(best);
  }

  // (|10>_AB |S-> + |01>_AB |S+>)/sqrt2
  Eigen::VectorXcd entangled = single_particle(layout, {s, 0.0}, minus).amplitudes() +
                               single_particle(layout, {0.0, s}, plus).amplitudes();
  report.spin_flip_fidelity = fidelity(PureState(layout, entangled), reachable[2]);
  return report;
}

}  // namespace modent
