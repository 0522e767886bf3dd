#pragma once

#include <string>

#include "aimrom/linalg.hpp"

namespace aimrom {

enum class BasisKind { sine_dirichlet, sine_periodic_odd };

struct Domain {
  double lo;
  double hi;
};

// sin(kx), k = 1..n_modes, on [0,π] (Dirichlet) or [0,2π] (odd periodic).
class BasisSpec {
 public:
  BasisSpec(BasisKind kind, int n_modes);

  BasisKind kind() const { return kind_; }
  int n_modes() const { return n_modes_; }
  Domain domain() const;
  // ⟨sin kx, sin kx⟩ on the domain; same for every k
  double norm_sq() const;
  BasisSpec with_modes(int n) const { return BasisSpec(kind_, n); }

  static BasisKind kind_from_name(const std::string& name);
  static std::string kind_name(BasisKind kind);

 private:
  BasisKind kind_;
  int n_modes_;
};

class SpectralState {
 public:
  SpectralState(BasisSpec basis, Vec coeffs);

  const BasisSpec& basis() const { return basis_; }
  const Vec& coeffs() const { return coeffs_; }
  int n_modes() const { return basis_.n_modes(); }

 private:
  BasisSpec basis_;
  Vec coeffs_;
};

// Collocation nodes on a domain.
class Grid {
 public:
  Grid(Domain domain, Vec points);
  static Grid uniform(Domain domain, int n_nodes);
  static Grid for_basis(const BasisSpec& basis, int n_nodes = kDefaultNodes);

  static constexpr int kDefaultNodes = 65;

  const Domain& domain() const { return domain_; }
  const Vec& points() const { return points_; }
  int size() const { return static_cast<int>(points_.size()); }
  // Nodes equally spaced from domain.lo to domain.hi inclusive.
  bool is_uniform_closed() const;
  Vec trapezoid_weights() const;

 private:
  Domain domain_;
  Vec points_;
};

Vec reconstruct(const SpectralState& state, const Grid& grid);
// Same as reconstruct, coefficient vector given directly.
Vec reconstruct(const BasisSpec& basis, const Vec& coeffs, const Grid& grid);

// Trapezoid-rule inner products against sin(kx). Needs ≥ 4·n_modes+1 uniform nodes
// spanning the full domain.
SpectralState project(const Vec& field, const Grid& grid, const BasisSpec& basis);

// sqrt(∫ u² dx) by the trapezoid rule.
double l2_norm(const Vec& field, const Grid& grid);

// Rows of the synthesis matrix: field = S · coeffs, S(j,k) = sin((k+1) x_j).
Mat synthesis_matrix(const BasisSpec& basis, const Grid& grid);

}  // namespace aimrom
