#include "modent/ops.hpp"

#include <cmath>

namespace modent {

namespace {

void require_same_layout(const ModeLayout& a, const ModeLayout& b) {
  if (!(a == b)) throw Error("operator and state layouts differ");
}

double binomial(int n, int k) { return std::round(std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0))); }

double sqrt_factorial(int n) { return std::exp(0.5 * std::lgamma(n + 1.0)); }

std::vector<std::size_t> mode_indices(const ModeLayout& layout, const std::vector<std::string>& modes) {
  std::vector<std::size_t> idx;
  idx.reserve(modes.size());
  for (const auto& m : modes) idx.push_back(layout.index_of(m));
  return idx;
}

Occupations occupations_of(const ModeLayout& layout, std::size_t basis_index, const std::vector<std::size_t>& modes) {
  Occupations occ(modes.size());
  for (std::size_t k = 0; k < modes.size(); ++k) occ[k] = layout.occupation(basis_index, modes[k]);
  return occ;
}

}  // namespace

OperatorMatrix::OperatorMatrix(ModeLayout l, Eigen::MatrixXcd m, bool h)
    : layout(std::move(l)), matrix(std::move(m)), hermitian(h) {
  auto d = static_cast<Eigen::Index>(layout.dimension());
  if (matrix.rows() != d || matrix.cols() != d) throw Error("operator does not match basis dimension");
  if (hermitian && hermiticity_error() > kTol.hermitian) throw Error("operator flagged Hermitian is not");
}

double OperatorMatrix::hermiticity_error() const {
  if (matrix.size() == 0) return 0.0;
  return (matrix - matrix.adjoint()).cwiseAbs().maxCoeff();
}

OperatorMatrix OperatorMatrix::operator+(const OperatorMatrix& other) const {
  require_same_layout(layout, other.layout);
  return OperatorMatrix(layout, matrix + other.matrix, hermitian && other.hermitian);
}

OperatorMatrix OperatorMatrix::operator*(const OperatorMatrix& other) const {
  require_same_layout(layout, other.layout);
  Eigen::MatrixXcd m = matrix * other.matrix;
  return OperatorMatrix(layout, std::move(m), false);
}

OperatorMatrix OperatorMatrix::scaled(double factor) const {
  return OperatorMatrix(layout, matrix * factor, hermitian);
}

OperatorMatrix mode_operator(ModeOp kind, const std::string& mode, const ModeLayout& layout) {
  const std::size_t m = layout.index_of(mode);
  const auto d = static_cast<Eigen::Index>(layout.dimension());
  const int cutoff = layout.cutoff(m);
  const auto stride = static_cast<Eigen::Index>(layout.stride(m));
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    const int n = layout.occupation(static_cast<std::size_t>(i), m);
    switch (kind) {
      case ModeOp::kCreation:
        if (n < cutoff) op(i + stride, i) = std::sqrt(n + 1.0);
        break;
      case ModeOp::kAnnihilation:
        if (n > 0) op(i - stride, i) = std::sqrt(static_cast<double>(n));
        break;
      case ModeOp::kNumber:
        op(i, i) = n;
        break;
    }
  }
  return OperatorMatrix(layout, std::move(op), kind == ModeOp::kNumber);
}

OperatorMatrix identity_operator(const ModeLayout& layout) {
  auto d = static_cast<Eigen::Index>(layout.dimension());
  return OperatorMatrix(layout, Eigen::MatrixXcd::Identity(d, d), true);
}

OperatorMatrix total_number_operator(const ModeLayout& layout) {
  auto d = static_cast<Eigen::Index>(layout.dimension());
  Eigen::MatrixXcd op = Eigen::MatrixXcd::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) op(i, i) = layout.total_number(static_cast<std::size_t>(i));
  return OperatorMatrix(layout, std::move(op), true);
}

namespace {

// -g/2 (x^dag y + y^dag x)
OperatorMatrix hopping(double g, const std::string& x, const std::string& y, const ModeLayout& layout) {
  if (x == y) throw Error("hopping needs two distinct modes");
  auto xd = mode_operator(ModeOp::kCreation, x, layout);
  auto ya = mode_operator(ModeOp::kAnnihilation, y, layout);
  Eigen::MatrixXcd t = xd.matrix * ya.matrix;
  Eigen::MatrixXcd h = -0.5 * g * (t + t.adjoint());
  return OperatorMatrix(layout, std::move(h), true);
}

struct TermBuilder {
  const ModeLayout& layout;

  OperatorMatrix operator()(const Tunneling& t) const { return hopping(t.J, t.first, t.second, layout); }

  OperatorMatrix operator()(const Bias& b) const {
    return mode_operator(ModeOp::kNumber, b.mode, layout).scaled(b.V);
  }

  OperatorMatrix operator()(const Onsite& o) const {
    std::vector<std::size_t> modes;
    if (o.modes.empty()) {
      for (std::size_t m = 0; m < layout.num_modes(); ++m) modes.push_back(m);
    } else {
      for (const auto& label : o.modes) modes.push_back(layout.index_of(label));
    }
    auto d = static_cast<Eigen::Index>(layout.dimension());
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      double e = 0.0;
      for (auto m : modes) {
        int n = layout.occupation(static_cast<std::size_t>(i), m);
        e += 0.5 * o.U * n * (n - 1);
      }
      h(i, i) = e;
    }
    return OperatorMatrix(layout, std::move(h), true);
  }

  OperatorMatrix operator()(const ReservoirCoupling& r) const {
    return hopping(r.omega, r.system_mode, r.reservoir_mode, layout);
  }
};

}  // namespace

OperatorMatrix hamiltonian(const HamiltonianTerm& term, const ModeLayout& layout) {
  return std::visit(TermBuilder{layout}, term);
}

Eigen::MatrixXcd propagator(const OperatorMatrix& h, double t) {
  if (h.hermiticity_error() > kTol.hermitian) throw Error("evolve requires a Hermitian generator");
  Eigen::MatrixXcd sym = 0.5 * (h.matrix + h.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sym);
  const Eigen::VectorXd& e = es.eigenvalues();
  Eigen::VectorXcd phases(e.size());
  for (Eigen::Index k = 0; k < e.size(); ++k) phases[k] = std::exp(cplx(0.0, -e[k] * t));
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

PureState apply(const OperatorMatrix& op, const PureState& psi) {
  require_same_layout(op.layout, psi.layout());
  return PureState(psi.layout(), op.matrix * psi.amplitudes());
}

MixedState apply(const OperatorMatrix& unitary, const MixedState& rho) {
  require_same_layout(unitary.layout, rho.layout());
  Eigen::MatrixXcd m = unitary.matrix * rho.matrix() * unitary.matrix.adjoint();
  return MixedState(rho.layout(), std::move(m));
}

PureState evolve(const PureState& psi, const OperatorMatrix& h, double t) {
  require_same_layout(h.layout, psi.layout());
  if (t == 0.0) return psi;
  return PureState(psi.layout(), propagator(h, t) * psi.amplitudes());
}

MixedState evolve(const MixedState& rho, const OperatorMatrix& h, double t) {
  require_same_layout(h.layout, rho.layout());
  if (t == 0.0) return rho;
  Eigen::MatrixXcd u = propagator(h, t);
  Eigen::MatrixXcd m = u * rho.matrix() * u.adjoint();
  return MixedState(rho.layout(), std::move(m));
}

OperatorMatrix embed_operator(const OperatorMatrix& local, const ModeLayout& full) {
  const auto& ll = local.layout;
  std::vector<std::size_t> local_to_full(ll.num_modes());
  std::vector<bool> is_local(full.num_modes(), false);
  for (std::size_t k = 0; k < ll.num_modes(); ++k) {
    auto m = full.index_of(ll.label(k));
    if (full.cutoff(m) != ll.cutoff(k)) throw Error("cutoff mismatch embedding mode " + ll.label(k));
    local_to_full[k] = m;
    is_local[m] = true;
  }
  const auto d = static_cast<Eigen::Index>(full.dimension());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(d, d);
  // For each full basis index, split into the local index and the "rest"
  // offset (the index with local occupations zeroed).
  for (std::size_t i = 0; i < full.dimension(); ++i) {
    std::size_t rest = i;
    std::size_t li = 0;
    for (std::size_t k = 0; k < ll.num_modes(); ++k) {
      const auto m = local_to_full[k];
      const auto n = static_cast<std::size_t>(full.occupation(i, m));
      rest -= n * full.stride(m);
      li += n * ll.stride(k);
    }
    if (li != 0) continue;  // visit each block once, from its local-vacuum index
    for (std::size_t a = 0; a < ll.dimension(); ++a) {
      std::size_t fa = rest;
      for (std::size_t k = 0; k < ll.num_modes(); ++k)
        fa += static_cast<std::size_t>(ll.occupation(a, k)) * full.stride(local_to_full[k]);
      for (std::size_t b = 0; b < ll.dimension(); ++b) {
        cplx v = local.matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
        if (v == cplx(0.0)) continue;
        std::size_t fb = rest;
        for (std::size_t k = 0; k < ll.num_modes(); ++k)
          fb += static_cast<std::size_t>(ll.occupation(b, k)) * full.stride(local_to_full[k]);
        out(static_cast<Eigen::Index>(fa), static_cast<Eigen::Index>(fb)) = v;
      }
    }
  }
  return OperatorMatrix(full, std::move(out), local.hermitian);
}

PureState two_mode_transform(const PureState& psi, const Eigen::Matrix2cd& modes,
                             std::pair<std::string, std::string> out_labels, int out_cutoff) {
  const auto& in = psi.layout();
  if (in.num_modes() != 2) throw Error("two-mode transform needs a two-mode state");
  ModeLayout out = ModeLayout::uniform({out_labels.first, out_labels.second}, out_cutoff);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(out.dimension()));
  for (std::size_t i = 0; i < in.dimension(); ++i) {
    const cplx c = psi.amplitudes()[static_cast<Eigen::Index>(i)];
    if (std::abs(c) <= kTol.amplitude) continue;
    const int n = in.occupation(i, 0);
    const int m = in.occupation(i, 1);
    if (n + m > out_cutoff) throw Error("output cutoff below particle number " + std::to_string(n + m));
    const double norm_in = 1.0 / (sqrt_factorial(n) * sqrt_factorial(m));
    for (int k = 0; k <= n; ++k) {
      const cplx ak = binomial(n, k) * std::pow(modes(0, 0), k) * std::pow(modes(0, 1), n - k);
      for (int l = 0; l <= m; ++l) {
        const cplx bl = binomial(m, l) * std::pow(modes(1, 0), l) * std::pow(modes(1, 1), m - l);
        const int nc = k + l;
        const int nd = n + m - k - l;
        const int occ[2] = {nc, nd};
        v[static_cast<Eigen::Index>(out.index(occ))] +=
            c * norm_in * ak * bl * sqrt_factorial(nc) * sqrt_factorial(nd);
      }
    }
  }
  return PureState(std::move(out), std::move(v));
}

Eigen::Matrix2cd beamsplitter_matrix() {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix2cd m;
  m << s, s, s, -s;
  return m;
}

PureState beamsplitter(const PureState& ab, int out_cutoff) {
  return two_mode_transform(ab, beamsplitter_matrix(), {"C", "D"}, out_cutoff);
}

OutcomeDistribution outcome_distribution(const PureState& psi, const std::vector<std::string>& modes) {
  const auto idx = mode_indices(psi.layout(), modes);
  OutcomeDistribution dist;
  for (std::size_t i = 0; i < psi.dimension(); ++i) {
    const double p = std::norm(psi.amplitudes()[static_cast<Eigen::Index>(i)]);
    if (p <= 0.0) continue;
    dist[occupations_of(psi.layout(), i, idx)] += p;
  }
  return dist;
}

OutcomeDistribution outcome_distribution(const MixedState& rho, const std::vector<std::string>& modes) {
  const auto idx = mode_indices(rho.layout(), modes);
  OutcomeDistribution dist;
  for (std::size_t i = 0; i < rho.dimension(); ++i) {
    const double p = rho.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)).real();
    if (p <= 0.0) continue;
    dist[occupations_of(rho.layout(), i, idx)] += p;
  }
  return dist;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

MeasurementResult project_outcome(const PureState& psi, const std::vector<std::string>& modes,
                                  const Occupations& outcome) {
  const auto idx = mode_indices(psi.layout(), modes);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(psi.amplitudes().size());
  for (std::size_t i = 0; i < psi.dimension(); ++i)
    if (occupations_of(psi.layout(), i, idx) == outcome)
      v[static_cast<Eigen::Index>(i)] = psi.amplitudes()[static_cast<Eigen::Index>(i)];
  const double p = v.squaredNorm();
  if (p <= kTol.amplitude * kTol.amplitude) throw Error("measurement branch has zero norm");
  return {outcome, PureState(psi.layout(), v / std::sqrt(p)), p};
}

MeasurementResult measure_number(const PureState& psi, const std::vector<std::string>& modes,
                                 std::mt19937_64& rng) {
  const auto dist = outcome_distribution(psi, modes);
  double total = 0.0;
  for (const auto& [occ, p] : dist) total += p;
  const double r = uniform01(rng) * total;
  double acc = 0.0;
  const Occupations* chosen = nullptr;
  for (const auto& [occ, p] : dist) {
    acc += p;
    chosen = &occ;
    if (r < acc) break;
  }
  if (chosen == nullptr) throw Error("measurement of an empty state");
  return project_outcome(psi, modes, *chosen);
}

}  // namespace modent

namespace modent {

PureState apply_local(const OperatorMatrix& local, const PureState& psi) {
  const auto& ll = local.layout;
  const auto& full = psi.layout();
  std::vector<std::size_t> offsets(ll.dimension(), 0);
  std::vector<std::size_t> local_modes(ll.num_modes());
  for (std::size_t k = 0; k < ll.num_modes(); ++k) {
    local_modes[k] = full.index_of(ll.label(k));
    if (full.cutoff(local_modes[k]) != ll.cutoff(k)) throw Error("cutoff mismatch applying local operator on " + ll.label(k));
  }
  for (std::size_t a = 0; a < ll.dimension(); ++a)
    for (std::size_t k = 0; k < ll.num_modes(); ++k)
      offsets[a] += static_cast<std::size_t>(ll.occupation(a, k)) * full.stride(local_modes[k]);

  Eigen::VectorXcd out(psi.amplitudes().size());
  Eigen::VectorXcd block(static_cast<Eigen::Index>(ll.dimension()));
  const auto& in = psi.amplitudes();
  for (std::size_t i = 0; i < full.dimension(); ++i) {
    bool local_vacuum = true;
    for (auto m : local_modes)
      if (full.occupation(i, m) != 0) { local_vacuum = false; break; }
    if (!local_vacuum) continue;
    for (std::size_t a = 0; a < ll.dimension(); ++a) block[static_cast<Eigen::Index>(a)] = in[static_cast<Eigen::Index>(i + offsets[a])];
    Eigen::VectorXcd mapped = local.matrix * block;
    for (std::size_t a = 0; a < ll.dimension(); ++a) out[static_cast<Eigen::Index>(i + offsets[a])] = mapped[static_cast<Eigen::Index>(a)];
  }
  return PureState(full, std::move(out));
}

}  // namespace modent
