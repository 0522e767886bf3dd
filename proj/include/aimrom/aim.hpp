#pragma once

#include <functional>
#include <string>

#include "aimrom/linalg.hpp"
#include "aimrom/spectral.hpp"

namespace aimrom {

// du/dt + A u + F(u) = 0 with A diagonal in the basis.
struct EulerGalerkinConfig {
  Vec lambda;  // eigenvalues of A, modes 1..m
  int n_low = 1;
  double tau = 1.0;
  std::function<Vec(const Vec&)> nonlinearity;  // Galerkin coefficients of F, length m

  int m_total() const { return static_cast<int>(lambda.size()); }
  void validate() const;
};

// One implicit-Euler step from q = 0: −τ (1 + τλ_k)^{-1} (Q_m F(p, 0))_k for the high modes.
Vec euler_galerkin_phi(const Vec& p, const EulerGalerkinConfig& cfg);

// Chafee–Infante: A = −ν∂xx, F(u) = u³ − u, three modes.
EulerGalerkinConfig chafee_euler_galerkin(double nu, double tau = 1.0);
// Kuramoto–Sivashinsky: A = 4∂⁴, F(u) = ν(u u_x + u_xx).
EulerGalerkinConfig ks_euler_galerkin(double nu, int n_low, int m_total, double tau = 1.0);

// Closed form of the Chafee specialization (τ = 1, a3 = 0).
double chafee_aim_alpha3(double a1, double a2, double nu);

struct Closure {
  int n_low = 0;
  int n_high = 0;
  std::function<Vec(const Vec&)> map;
  std::string name;

  Vec operator()(const Vec& low) const;
};

Closure zero_closure(int n_low, int n_high);
Closure euler_galerkin_closure(const EulerGalerkinConfig& cfg);
Closure chafee_closed_form_closure(double nu);

// Low coefficients followed by closure.map(low); basis extended to n_low + n_high modes.
SpectralState postprocess(const SpectralState& low, const Closure& closure);
Vec postprocess(const Vec& low, const Closure& closure);

}  // namespace aimrom
