#include "aimrom/spectral.hpp"

#include <cmath>
#include <numbers>

#include "aimrom/error.hpp"

namespace aimrom {

namespace {

bool same_domain(const Domain& a, const Domain& b) {
  return std::abs(a.lo - b.lo) < 1e-12 && std::abs(a.hi - b.hi) < 1e-12;
}

}  // namespace

BasisSpec::BasisSpec(BasisKind kind, int n_modes) : kind_(kind), n_modes_(n_modes) {
  if (n_modes < 1) throw InvalidInput("BasisSpec: n_modes must be >= 1");
}

Domain BasisSpec::domain() const {
  using std::numbers::pi;
  return kind_ == BasisKind::sine_dirichlet ? Domain{0.0, pi} : Domain{0.0, 2.0 * pi};
}

double BasisSpec::norm_sq() const {
  using std::numbers::pi;
  return kind_ == BasisKind::sine_dirichlet ? pi / 2.0 : pi;
}

BasisKind BasisSpec::kind_from_name(const std::string& name) {
  if (name == "sine-dirichlet") return BasisKind::sine_dirichlet;
  if (name == "sine-periodic-odd") return BasisKind::sine_periodic_odd;
  throw InvalidInput("unknown basis kind '" + name + "'");
}

std::string BasisSpec::kind_name(BasisKind kind) {
  return kind == BasisKind::sine_dirichlet ? "sine-dirichlet" : "sine-periodic-odd";
}

SpectralState::SpectralState(BasisSpec basis, Vec coeffs)
    : basis_(basis), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != basis_.n_modes())
    throw InvalidInput("SpectralState: " + std::to_string(coeffs_.size()) +
                       " coefficients for a " + std::to_string(basis_.n_modes()) + "-mode basis");
  if (!coeffs_.allFinite()) throw InvalidInput("SpectralState: non-finite coefficient");
}

Grid::Grid(Domain domain, Vec points) : domain_(domain), points_(std::move(points)) {
  if (!(domain_.hi > domain_.lo)) throw InvalidInput("Grid: empty domain");
  if (points_.size() < 2) throw InvalidInput("Grid: need at least 2 nodes");
  for (Eigen::Index i = 0; i < points_.size(); ++i) {
    if (points_[i] < domain_.lo - 1e-12 || points_[i] > domain_.hi + 1e-12)
      throw InvalidInput("Grid: node outside domain");
    if (i > 0 && !(points_[i] > points_[i - 1]))
      throw InvalidInput("Grid: nodes must be strictly increasing");
  }
}

Grid Grid::uniform(Domain domain, int n_nodes) {
  if (n_nodes < 2) throw InvalidInput("Grid: need at least 2 nodes");
  Vec x(n_nodes);
  const double h = (domain.hi - domain.lo) / (n_nodes - 1);
  for (int j = 0; j < n_nodes; ++j) x[j] = domain.lo + j * h;
  x[n_nodes - 1] = domain.hi;
  return Grid(domain, x);
}

Grid Grid::for_basis(const BasisSpec& basis, int n_nodes) {
  return uniform(basis.domain(), n_nodes);
}

bool Grid::is_uniform_closed() const {
  const Eigen::Index n = points_.size();
  const double h = (domain_.hi - domain_.lo) / static_cast<double>(n - 1);
  for (Eigen::Index j = 0; j < n; ++j)
    if (std::abs(points_[j] - (domain_.lo + j * h)) > 1e-12 * (domain_.hi - domain_.lo))
      return false;
  return true;
}

Vec Grid::trapezoid_weights() const {
  const Eigen::Index n = points_.size();
  Vec w = Vec::Zero(n);
  for (Eigen::Index j = 0; j + 1 < n; ++j) {
    const double h = points_[j + 1] - points_[j];
    w[j] += 0.5 * h;
    w[j + 1] += 0.5 * h;
  }
  return w;
}

Mat synthesis_matrix(const BasisSpec& basis, const Grid& grid) {
  if (!same_domain(grid.domain(), basis.domain()))
    throw InvalidInput("grid domain does not match the basis domain");
  Mat s(grid.size(), basis.n_modes());
  for (int j = 0; j < grid.size(); ++j)
    for (int k = 0; k < basis.n_modes(); ++k) s(j, k) = std::sin((k + 1) * grid.points()[j]);
  return s;
}

Vec reconstruct(const BasisSpec& basis, const Vec& coeffs, const Grid& grid) {
  if (coeffs.size() != basis.n_modes()) throw InvalidInput("reconstruct: coefficient count mismatch");
  return synthesis_matrix(basis, grid) * coeffs;
}

Vec reconstruct(const SpectralState& state, const Grid& grid) {
  return reconstruct(state.basis(), state.coeffs(), grid);
}

SpectralState project(const Vec& field, const Grid& grid, const BasisSpec& basis) {
  if (field.size() != grid.size()) throw InvalidInput("project: field length differs from grid size");
  if (grid.size() < 4 * basis.n_modes() + 1)
    throw InvalidInput("project: " + std::to_string(grid.size()) + " nodes cannot resolve " +
                       std::to_string(basis.n_modes()) + " modes (need " +
                       std::to_string(4 * basis.n_modes() + 1) + ")");
  if (!grid.is_uniform_closed()) throw InvalidInput("project: grid must be uniform and span the domain");
  const Mat s = synthesis_matrix(basis, grid);
  const Vec wf = grid.trapezoid_weights().cwiseProduct(field);
  Vec a = s.transpose() * wf / basis.norm_sq();
  return SpectralState(basis, a);
}

double l2_norm(const Vec& field, const Grid& grid) {
  if (field.size() != grid.size()) throw InvalidInput("l2_norm: field length differs from grid size");
  return std::sqrt(grid.trapezoid_weights().dot(field.cwiseAbs2()));
}

}  // namespace aimrom
