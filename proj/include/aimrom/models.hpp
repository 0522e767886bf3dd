#pragma once

#include <functional>
#include <string>

#include "aimrom/linalg.hpp"
#include "aimrom/spectral.hpp"

namespace aimrom {

// Autonomous vector field on R^dim.
struct VectorField {
  int dim = 0;
  std::function<Vec(const Vec&)> eval;

  Vec operator()(const Vec& a) const;
};

struct ModelParams {
  double nu = 1.0;
  double epsilon = 1.0;  // toy system only

  void validate() const;
};

// Chafee–Infante u_t = νu_xx + u − u³ on [0,π], Dirichlet, three sine modes.
Vec chafee_rhs_3(const Vec& a, double nu);
Vec chafee_rhs_2(const Vec& a, double nu);
// sine coefficients of u³ for u = Σ_{k≤3} a_k sin kx, first three modes
Vec chafee_cubic_3(const Vec& a);

// Kuramoto–Sivashinsky u_t = −ν(u u_x + u_xx) − 4u_xxxx, odd 2π-periodic.
// Any number of modes; higher products are dropped (Galerkin truncation).
Vec ks_rhs(const Vec& a, double nu);
Vec ks_rhs_8(const Vec& a, double nu);
Vec ks_rhs_3(const Vec& a, double nu);
// sine coefficients of u·u_x, modes 1..n
Vec ks_convection(const Vec& a);

// ẋ = 2 − x − y, ẏ = (x − y)/ε
Vec toy_rhs(const Vec& z, double epsilon);

VectorField chafee_field(int modes, double nu);
VectorField ks_field(int modes, double nu);
VectorField toy_field(double epsilon);

// Model names used in configs: "chafee" (2|3 modes), "ks" (3|8 modes), "toy".
VectorField make_field(const std::string& model, int modes, const ModelParams& params);
BasisSpec model_basis(const std::string& model, int modes);

}  // namespace aimrom
