#include "modent/fock.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace modent {

namespace {

Eigen::MatrixXcd hermitian_sqrt(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

void require_same_layout(const ModeLayout& a, const ModeLayout& b) {
  if (!(a == b)) throw Error("state layouts differ");
}

}  // namespace

ModeLayout::ModeLayout(std::vector<std::string> labels, std::vector<int> cutoffs)
    : labels_(std::move(labels)), cutoffs_(std::move(cutoffs)) {
  if (labels_.empty()) throw Error("mode layout needs at least one mode");
  if (labels_.size() != cutoffs_.size()) throw Error("one cutoff per mode required");
  std::set<std::string> seen;
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (cutoffs_[i] < 1) throw Error("cutoff of mode " + labels_[i] + " must be >= 1");
    if (!seen.insert(labels_[i]).second) throw Error("duplicate mode label " + labels_[i]);
  }
  strides_.assign(labels_.size(), 1);
  for (std::size_t i = labels_.size(); i-- > 0;) {
    strides_[i] = dimension_;
    dimension_ *= static_cast<std::size_t>(cutoffs_[i] + 1);
  }
}

ModeLayout ModeLayout::uniform(std::vector<std::string> labels, int cutoff) {
  std::vector<int> cutoffs(labels.size(), cutoff);
  return ModeLayout(std::move(labels), std::move(cutoffs));
}

std::optional<std::size_t> ModeLayout::find(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t ModeLayout::index_of(const std::string& label) const {
  if (auto i = find(label)) return *i;
  throw Error("unknown mode " + label);
}

Occupations ModeLayout::occupations(std::size_t basis_index) const {
  Occupations occ(labels_.size());
  for (std::size_t m = 0; m < labels_.size(); ++m) occ[m] = occupation(basis_index, m);
  return occ;
}

int ModeLayout::total_number(std::size_t basis_index) const {
  int n = 0;
  for (std::size_t m = 0; m < labels_.size(); ++m) n += occupation(basis_index, m);
  return n;
}

std::size_t ModeLayout::index(std::span<const int> occupations) const {
  if (occupations.size() != labels_.size()) throw Error("occupation vector length mismatch");
  std::size_t idx = 0;
  for (std::size_t m = 0; m < labels_.size(); ++m) {
    if (occupations[m] < 0 || occupations[m] > cutoffs_[m])
      throw Error("occupation out of range for mode " + labels_[m]);
    idx += static_cast<std::size_t>(occupations[m]) * strides_[m];
  }
  return idx;
}

ModeLayout ModeLayout::concat(const ModeLayout& other) const {
  auto labels = labels_;
  auto cutoffs = cutoffs_;
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  cutoffs.insert(cutoffs.end(), other.cutoffs_.begin(), other.cutoffs_.end());
  return ModeLayout(std::move(labels), std::move(cutoffs));
}

ModeLayout ModeLayout::restrict_to(std::span<const std::size_t> modes) const {
  std::vector<std::size_t> sorted(modes.begin(), modes.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::string> labels;
  std::vector<int> cutoffs;
  for (auto m : sorted) {
    labels.push_back(labels_.at(m));
    cutoffs.push_back(cutoffs_.at(m));
  }
  return ModeLayout(std::move(labels), std::move(cutoffs));
}

int FockBasisState::total() const {
  int n = 0;
  for (int o : occupations) n += o;
  return n;
}

std::vector<FockBasisState> enumerate_basis(const ModeLayout& layout) {
  std::vector<FockBasisState> basis;
  basis.reserve(layout.dimension());
  for (std::size_t i = 0; i < layout.dimension(); ++i) basis.push_back({layout.occupations(i)});
  return basis;
}

std::string outcome_key(std::span<const int> occupations) {
  bool wide = std::any_of(occupations.begin(), occupations.end(), [](int o) { return o > 9; });
  std::ostringstream os;
  for (std::size_t i = 0; i < occupations.size(); ++i) {
    if (wide && i > 0) os << ',';
    os << occupations[i];
  }
  return os.str();
}

std::string ket_label(std::span<const int> occupations) {
  return "|" + outcome_key(occupations) + ">";
}

// --- PureState ---

PureState::PureState(ModeLayout layout, Eigen::VectorXcd amplitudes)
    : layout_(std::move(layout)), amps_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amps_.size()) != layout_.dimension())
    throw Error("amplitude vector does not match basis dimension");
}

PureState PureState::basis(const ModeLayout& layout, std::span<const int> occupations) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(layout.dimension()));
  v[static_cast<Eigen::Index>(layout.index(occupations))] = 1.0;
  return PureState(layout, std::move(v));
}

PureState PureState::vacuum(const ModeLayout& layout) {
  Occupations zeros(layout.num_modes(), 0);
  return basis(layout, zeros);
}

PureState PureState::normalized() const {
  double n = norm();
  if (n <= kTol.amplitude) throw Error("cannot normalize a zero vector");
  return PureState(layout_, amps_ / n);
}

cplx PureState::inner(const PureState& other) const {
  require_same_layout(layout_, other.layout_);
  return amps_.dot(other.amps_);
}

// --- MixedState ---

MixedState::MixedState(ModeLayout layout, Eigen::MatrixXcd matrix)
    : layout_(std::move(layout)), rho_(std::move(matrix)) {
  auto d = static_cast<Eigen::Index>(layout_.dimension());
  if (rho_.rows() != d || rho_.cols() != d) throw Error("density matrix does not match basis dimension");
}

MixedState::MixedState(const PureState& pure)
    : layout_(pure.layout()), rho_(pure.amplitudes() * pure.amplitudes().adjoint()) {}

double MixedState::hermiticity_error() const {
  return (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
}

double MixedState::min_eigenvalue() const {
  Eigen::MatrixXcd h = 0.5 * (rho_ + rho_.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double MixedState::purity() const { return (rho_ * rho_).trace().real(); }

void MixedState::validate(double trace_tol) const {
  if (hermiticity_error() > kTol.hermitian) throw Error("density matrix is not Hermitian");
  if (std::abs(trace() - 1.0) > trace_tol) throw Error("density matrix trace differs from 1");
  if (min_eigenvalue() < kTol.min_eigenvalue) throw Error("density matrix has a negative eigenvalue");
}

// --- composition and reduction ---

PureState tensor(const PureState& first, const PureState& second) {
  ModeLayout layout = first.layout().concat(second.layout());
  const auto& a = first.amplitudes();
  const auto& b = second.amplitudes();
  Eigen::VectorXcd v(a.size() * b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) v.segment(i * b.size(), b.size()) = a[i] * b;
  return PureState(std::move(layout), std::move(v));
}

MixedState tensor(const MixedState& first, const MixedState& second) {
  ModeLayout layout = first.layout().concat(second.layout());
  const auto& a = first.matrix();
  const auto& b = second.matrix();
  Eigen::MatrixXcd m(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      m.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return MixedState(std::move(layout), std::move(m));
}

namespace {

struct Split {
  ModeLayout kept;
  std::vector<std::size_t> kept_index;    // full basis index -> kept basis index
  std::vector<std::size_t> traced_index;  // full basis index -> traced basis index
  std::size_t traced_dim = 1;
};

Split split_layout(const ModeLayout& layout, const std::vector<std::string>& keep) {
  if (keep.empty()) throw Error("partial trace needs at least one kept mode");
  std::vector<std::size_t> keep_modes;
  std::vector<bool> is_kept(layout.num_modes(), false);
  for (const auto& label : keep) {
    auto m = layout.index_of(label);
    if (is_kept[m]) throw Error("mode listed twice: " + label);
    is_kept[m] = true;
    keep_modes.push_back(m);
  }
  Split s{layout.restrict_to(keep_modes), {}, {}, 1};
  std::vector<std::size_t> traced_modes;
  for (std::size_t m = 0; m < layout.num_modes(); ++m)
    if (!is_kept[m]) traced_modes.push_back(m);
  std::vector<std::size_t> traced_stride(traced_modes.size());
  for (std::size_t k = traced_modes.size(); k-- > 0;) {
    traced_stride[k] = s.traced_dim;
    s.traced_dim *= static_cast<std::size_t>(layout.cutoff(traced_modes[k]) + 1);
  }
  std::vector<std::size_t> sorted_keep(keep_modes);
  std::sort(sorted_keep.begin(), sorted_keep.end());
  s.kept_index.resize(layout.dimension());
  s.traced_index.resize(layout.dimension());
  for (std::size_t i = 0; i < layout.dimension(); ++i) {
    std::size_t ki = 0;
    for (std::size_t k = 0; k < sorted_keep.size(); ++k)
      ki += static_cast<std::size_t>(layout.occupation(i, sorted_keep[k])) * s.kept.stride(k);
    std::size_t ti = 0;
    for (std::size_t k = 0; k < traced_modes.size(); ++k)
      ti += static_cast<std::size_t>(layout.occupation(i, traced_modes[k])) * traced_stride[k];
    s.kept_index[i] = ki;
    s.traced_index[i] = ti;
  }
  return s;
}

}  // namespace

MixedState partial_trace(const MixedState& rho, const std::vector<std::string>& keep) {
  Split s = split_layout(rho.layout(), keep);
  auto dk = static_cast<Eigen::Index>(s.kept.dimension());
  auto dt = static_cast<Eigen::Index>(s.traced_dim);
  // Reorder into a (kept, traced) grid, then sum the traced diagonal.
  std::vector<std::vector<Eigen::Index>> grid(static_cast<std::size_t>(dt),
                                              std::vector<Eigen::Index>(static_cast<std::size_t>(dk)));
  for (std::size_t i = 0; i < rho.layout().dimension(); ++i)
    grid[s.traced_index[i]][s.kept_index[i]] = static_cast<Eigen::Index>(i);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dk, dk);
  const auto& m = rho.matrix();
  for (Eigen::Index t = 0; t < dt; ++t) {
    const auto& row = grid[static_cast<std::size_t>(t)];
    for (Eigen::Index a = 0; a < dk; ++a)
      for (Eigen::Index b = 0; b < dk; ++b)
        out(a, b) += m(row[static_cast<std::size_t>(a)], row[static_cast<std::size_t>(b)]);
  }
  return MixedState(std::move(s.kept), std::move(out));
}

MixedState partial_trace(const PureState& psi, const std::vector<std::string>& keep) {
  Split s = split_layout(psi.layout(), keep);
  auto dk = static_cast<Eigen::Index>(s.kept.dimension());
  auto dt = static_cast<Eigen::Index>(s.traced_dim);
  Eigen::MatrixXcd grid = Eigen::MatrixXcd::Zero(dk, dt);
  for (std::size_t i = 0; i < psi.layout().dimension(); ++i)
    grid(static_cast<Eigen::Index>(s.kept_index[i]), static_cast<Eigen::Index>(s.traced_index[i])) =
        psi.amplitudes()[static_cast<Eigen::Index>(i)];
  return MixedState(std::move(s.kept), grid * grid.adjoint());
}

// --- metrics ---

double fidelity(const PureState& x, const PureState& y) { return std::norm(x.inner(y)); }

double fidelity(const MixedState& x, const MixedState& y) {
  require_same_layout(x.layout(), y.layout());
  Eigen::MatrixXcd sx = hermitian_sqrt(x.matrix());
  Eigen::MatrixXcd inner = sx * y.matrix() * sx;
  inner = 0.5 * (inner + inner.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(inner, Eigen::EigenvaluesOnly);
  double root = es.eigenvalues().cwiseMax(0.0).cwiseSqrt().sum();
  return std::clamp(root * root, 0.0, 1.0);
}

double fidelity(const PureState& x, const MixedState& y) {
  require_same_layout(x.layout(), y.layout());
  double f = (x.amplitudes().adjoint() * y.matrix() * x.amplitudes())(0, 0).real();
  return std::clamp(f, 0.0, 1.0);
}

double fidelity(const MixedState& x, const PureState& y) { return fidelity(y, x); }

double trace_distance(const MixedState& x, const MixedState& y) {
  require_same_layout(x.layout(), y.layout());
  Eigen::MatrixXcd diff = x.matrix() - y.matrix();
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

double trace_distance(const PureState& x, const PureState& y) {
  return trace_distance(MixedState(x), MixedState(y));
}
double trace_distance(const PureState& x, const MixedState& y) { return trace_distance(MixedState(x), y); }
double trace_distance(const MixedState& x, const PureState& y) { return trace_distance(x, MixedState(y)); }

PureState embed(const PureState& psi, const ModeLayout& larger) {
  const auto& src = psi.layout();
  if (src.labels() != larger.labels()) throw Error("embed requires identical mode labels");
  for (std::size_t m = 0; m < src.num_modes(); ++m)
    if (larger.cutoff(m) < src.cutoff(m)) throw Error("embed target cutoff is smaller");
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(larger.dimension()));
  for (std::size_t i = 0; i < src.dimension(); ++i)
    v[static_cast<Eigen::Index>(larger.index(src.occupations(i)))] = psi.amplitudes()[static_cast<Eigen::Index>(i)];
  return PureState(larger, std::move(v));
}

}  // namespace modent
