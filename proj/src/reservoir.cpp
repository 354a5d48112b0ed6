#include "modent/reservoir.hpp"

#include <cmath>

namespace modent {

int minimum_cutoff(double nbar) { return static_cast<int>(std::ceil(nbar + 6.0 * std::sqrt(nbar))); }

double poisson_tail(double nbar, int cutoff) {
  if (nbar <= 0.0) return 0.0;
  // Sum the tail directly; terms decay geometrically once n > nbar.
  double tail = 0.0;
  for (int n = cutoff + 1; n < cutoff + 2000; ++n) {
    const double term = std::exp(-nbar + n * std::log(nbar) - std::lgamma(n + 1.0));
    tail += term;
    if (n > nbar && term < 1e-18 * std::max(tail, 1e-300)) break;
    if (term == 0.0 && n > nbar) break;
  }
  return tail;
}

int default_cutoff(double nbar) {
  int cutoff = std::max(1, minimum_cutoff(nbar));
  while (poisson_tail(nbar, cutoff) > 1e-10) ++cutoff;
  return cutoff;
}

ReservoirSpec ReservoirSpec::fixed(double nbar, double theta) { return fixed(nbar, theta, default_cutoff(nbar)); }

ReservoirSpec ReservoirSpec::fixed(double nbar, double theta, int cutoff) {
  ReservoirSpec s{nbar, FixedPhase{theta}, cutoff};
  s.validate();
  return s;
}

ReservoirSpec ReservoirSpec::mixed(double nbar) {
  ReservoirSpec s{nbar, UniformPhase{}, default_cutoff(nbar)};
  s.validate();
  return s;
}

double ReservoirSpec::theta() const {
  if (const auto* f = std::get_if<FixedPhase>(&phase)) return f->theta;
  throw Error("reservoir phase is uniformly mixed");
}

void ReservoirSpec::validate() const {
  if (!(nbar > 0.0)) throw Error("reservoir mean number must be positive");
  if (cutoff < minimum_cutoff(nbar)) throw Error("reservoir cutoff below nbar + 6 sqrt(nbar)");
}

PureState coherent_state(const ReservoirSpec& spec, double theta, const std::string& label) {
  ModeLayout layout({label}, {spec.cutoff});
  Eigen::VectorXcd v(spec.cutoff + 1);
  const double log_r = 0.5 * std::log(spec.nbar);
  for (int n = 0; n <= spec.cutoff; ++n) {
    const double mag = std::exp(-0.5 * spec.nbar + n * log_r - 0.5 * std::lgamma(n + 1.0));
    v[n] = std::polar(mag, n * theta);
  }
  v /= v.norm();
  return PureState(std::move(layout), std::move(v));
}

OperatorMatrix effective_rotation_operator(const ModeLayout& layout, const std::string& mode, double angle,
                                           double theta) {
  ModeLayout local({mode}, {layout.cutoff(layout.index_of(mode))});
  const auto d = static_cast<Eigen::Index>(local.dimension());
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Identity(d, d);
  const double c = std::cos(0.5 * angle);
  const double s = std::sin(0.5 * angle);
  const cplx minus_i(0.0, -1.0);
  r(0, 0) = c;
  r(1, 1) = c;
  r(1, 0) = minus_i * s * std::polar(1.0, theta);
  r(0, 1) = minus_i * s * std::polar(1.0, -theta);
  return embed_operator(OperatorMatrix(local, std::move(r), false), layout);
}

namespace {

double weight_above_one(const ModeLayout& layout, const std::string& mode, const Eigen::VectorXd& probs) {
  const auto m = layout.index_of(mode);
  double w = 0.0;
  for (std::size_t i = 0; i < layout.dimension(); ++i)
    if (layout.occupation(i, m) > 1) w += probs[static_cast<Eigen::Index>(i)];
  return w;
}

}  // namespace

PureState effective_rotation(const PureState& psi, const std::string& mode, double angle, double theta) {
  if (weight_above_one(psi.layout(), mode, psi.amplitudes().cwiseAbs2()) > kTol.amplitude)
    throw Error("effective rotation needs occupation 0 or 1 on mode " + mode);
  return apply(effective_rotation_operator(psi.layout(), mode, angle, theta), psi);
}

MixedState effective_rotation(const MixedState& rho, const std::string& mode, double angle, double theta) {
  if (weight_above_one(rho.layout(), mode, rho.matrix().diagonal().real()) > kTol.amplitude)
    throw Error("effective rotation needs occupation 0 or 1 on mode " + mode);
  return apply(effective_rotation_operator(rho.layout(), mode, angle, theta), rho);
}

// --- exact coupling ---

ReservoirCoupler::ReservoirCoupler(ReservoirSpec spec, double t, double omega, int system_cutoff)
    : spec_(std::move(spec)), t_(t), omega_(omega), system_cutoff_(system_cutoff) {
  spec_.validate();
  ModeLayout local({"sys", kReservoirMode}, {system_cutoff_, spec_.cutoff});
  auto h = hamiltonian(ReservoirCoupling{omega_, "sys", kReservoirMode}, local);
  local_propagator_ = propagator(h, t_);
}

double ReservoirCoupler::time_for_angle(double angle, double nbar, double omega) {
  return angle / (omega * std::sqrt(nbar));
}

std::vector<ReservoirCoupler::Weighted> ReservoirCoupler::reservoir_ensemble(std::optional<double> theta) const {
  std::vector<Weighted> out;
  if (theta || spec_.is_fixed()) {
    const double phase = theta ? *theta : spec_.theta();
    out.push_back({1.0, coherent_state(spec_, phase + kCondensatePhaseOffset).amplitudes()});
    return out;
  }
  // Uniform phase average of a coherent state: Poisson mixture of number states.
  const auto coh = coherent_state(spec_, 0.0).amplitudes();
  for (int n = 0; n <= spec_.cutoff; ++n) {
    const double p = std::norm(coh[n]);
    if (p < 1e-18) continue;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(spec_.cutoff + 1);
    v[n] = 1.0;
    out.push_back({p, std::move(v)});
  }
  return out;
}

Eigen::MatrixXcd ReservoirCoupler::reduce(const std::vector<Weighted>& system, const ModeLayout& layout,
                                          const std::string& mode, std::optional<double> theta) const {
  const auto m = layout.index_of(mode);
  if (layout.cutoff(m) != system_cutoff_)
    throw Error("coupler built for system cutoff " + std::to_string(system_cutoff_));
  ModeLayout joint = layout.concat(ModeLayout({kReservoirMode}, {spec_.cutoff}));
  ModeLayout local({mode, kReservoirMode}, {system_cutoff_, spec_.cutoff});
  OperatorMatrix u(local, local_propagator_, false);

  const auto ds = static_cast<Eigen::Index>(layout.dimension());
  const auto dr = static_cast<Eigen::Index>(spec_.cutoff + 1);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(ds, ds);
  for (const auto& res : reservoir_ensemble(theta)) {
    for (const auto& sys : system) {
      Eigen::VectorXcd v(ds * dr);
      for (Eigen::Index i = 0; i < ds; ++i) v.segment(i * dr, dr) = sys.vector[i] * res.vector;
      PureState out = apply_local(u, PureState(joint, std::move(v)));
      // Reservoir is the last (least significant) mode.
      Eigen::Map<const Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> grid(
          out.amplitudes().data(), ds, dr);
      rho.noalias() += (sys.weight * res.weight) * (grid * grid.adjoint());
    }
  }
  return rho;
}

std::vector<ReservoirCoupler::Weighted> ReservoirCoupler::system_ensemble(const MixedState& rho) const {
  Eigen::MatrixXcd h = 0.5 * (rho.matrix() + rho.matrix().adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  std::vector<Weighted> system;
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const double w = es.eigenvalues()[k];
    if (w <= 1e-15) continue;
    system.push_back({w, es.eigenvectors().col(k)});
  }
  return system;
}

MixedState ReservoirCoupler::apply(const MixedState& rho, const std::string& mode) const {
  MixedState out(rho.layout(), reduce(system_ensemble(rho), rho.layout(), mode, std::nullopt));
  if (std::abs(out.trace() - rho.trace()) > kTol.exact_trace) throw Error("exact coupling lost trace");
  return out;
}

MixedState ReservoirCoupler::apply(const MixedState& rho, const std::string& mode, double theta) const {
  MixedState out(rho.layout(), reduce(system_ensemble(rho), rho.layout(), mode, theta));
  if (std::abs(out.trace() - rho.trace()) > kTol.exact_trace) throw Error("exact coupling lost trace");
  return out;
}

MixedState ReservoirCoupler::apply(const PureState& psi, const std::string& mode) const {
  std::vector<Weighted> system{{1.0, psi.amplitudes()}};
  return MixedState(psi.layout(), reduce(system, psi.layout(), mode, std::nullopt));
}

MixedState exact_coupling(const MixedState& rho, const std::string& mode, const ReservoirSpec& spec, double t,
                          double omega) {
  if (t == 0.0) return rho;
  const int cutoff = rho.layout().cutoff(rho.layout().index_of(mode));
  return ReservoirCoupler(spec, t, omega, cutoff).apply(rho, mode);
}

MixedState exact_coupling(const PureState& psi, const std::string& mode, const ReservoirSpec& spec, double t,
                          double omega) {
  if (t == 0.0) return MixedState(psi);
  const int cutoff = psi.layout().cutoff(psi.layout().index_of(mode));
  return ReservoirCoupler(spec, t, omega, cutoff).apply(psi, mode);
}

std::vector<ScanPoint> convergence_scan(const std::vector<double>& nbar_list, double angle, double theta,
                                        double omega) {
  const auto layout = ModeLayout::uniform({"A", "B"}, 1);
  Eigen::VectorXcd amps(4);
  amps << 0.0, 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0), 0.0;
  const PureState ground(layout, amps);
  const PureState target = effective_rotation(ground, "A", angle, theta);
  std::vector<ScanPoint> points;
  for (double nbar : nbar_list) {
    const auto spec = ReservoirSpec::fixed(nbar, theta);
    const double t = ReservoirCoupler::time_for_angle(angle, nbar, omega);
    const auto exact = exact_coupling(ground, "A", spec, t, omega);
    points.push_back({nbar, trace_distance(exact, target)});
  }
  return points;
}

double fitted_decay_exponent(const std::vector<ScanPoint>& points) {
  if (points.size() < 2) throw Error("need at least two scan points to fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& p : points) {
    const double x = std::log(p.nbar);
    const double y = std::log(p.trace_distance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = static_cast<double>(points.size());
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace modent
