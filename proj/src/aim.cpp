#include "aimrom/aim.hpp"

#include "aimrom/error.hpp"
#include "aimrom/models.hpp"

namespace aimrom {

void EulerGalerkinConfig::validate() const {
  if (!(n_low >= 1 && n_low < m_total()))
    throw InvalidInput("euler-galerkin: need 1 <= n_low < m_total");
  if (!(tau > 0)) throw InvalidInput("euler-galerkin: tau must be positive");
  for (Eigen::Index k = 0; k < lambda.size(); ++k)
    if (!(lambda[k] > 0)) throw InvalidInput("euler-galerkin: eigenvalues of A must be positive");
  if (!nonlinearity) throw InvalidInput("euler-galerkin: nonlinearity missing");
}

Vec euler_galerkin_phi(const Vec& p, const EulerGalerkinConfig& cfg) {
  cfg.validate();
  if (p.size() != cfg.n_low) throw InvalidInput("euler-galerkin: p has wrong length");
  const int m = cfg.m_total();
  Vec full = Vec::Zero(m);
  full.head(cfg.n_low) = p;
  const Vec f = cfg.nonlinearity(full);
  if (f.size() != m) throw InvalidInput("euler-galerkin: nonlinearity returned wrong length");
  Vec q(m - cfg.n_low);
  for (int k = cfg.n_low; k < m; ++k)
    q[k - cfg.n_low] = -cfg.tau / (1.0 + cfg.tau * cfg.lambda[k]) * f[k];
  return q;
}

EulerGalerkinConfig chafee_euler_galerkin(double nu, double tau) {
  if (!(nu > 0)) throw InvalidInput("nu must be positive");
  EulerGalerkinConfig cfg;
  cfg.lambda = Vec(3);
  for (int k = 1; k <= 3; ++k) cfg.lambda[k - 1] = nu * k * k;
  cfg.n_low = 2;
  cfg.tau = tau;
  cfg.nonlinearity = [](const Vec& a) -> Vec { return chafee_cubic_3(a) - a; };
  return cfg;
}

EulerGalerkinConfig ks_euler_galerkin(double nu, int n_low, int m_total, double tau) {
  if (!(nu > 0)) throw InvalidInput("nu must be positive");
  EulerGalerkinConfig cfg;
  cfg.lambda = Vec(m_total);
  for (int k = 1; k <= m_total; ++k) cfg.lambda[k - 1] = 4.0 * k * k * k * k;
  cfg.n_low = n_low;
  cfg.tau = tau;
  cfg.nonlinearity = [nu](const Vec& a) -> Vec {
    Vec f = nu * ks_convection(a);
    for (int k = 1; k <= a.size(); ++k) f[k - 1] -= nu * k * k * a[k - 1];
    return f;
  };
  cfg.validate();
  return cfg;
}

double chafee_aim_alpha3(double a1, double a2, double nu) {
  return (a1 * a1 * a1 - 3.0 * a1 * a2 * a2) / (4.0 * (1.0 + 9.0 * nu));
}

Vec Closure::operator()(const Vec& low) const {
  if (low.size() != n_low)
    throw InvalidInput("closure '" + name + "' expects " + std::to_string(n_low) +
                       " low modes, got " + std::to_string(low.size()));
  Vec high = map(low);
  if (high.size() != n_high) throw InvalidInput("closure '" + name + "' returned wrong length");
  return high;
}

Closure zero_closure(int n_low, int n_high) {
  return {n_low, n_high, [n_high](const Vec&) -> Vec { return Vec::Zero(n_high); }, "none"};
}

Closure euler_galerkin_closure(const EulerGalerkinConfig& cfg) {
  cfg.validate();
  return {cfg.n_low, cfg.m_total() - cfg.n_low,
          [cfg](const Vec& p) { return euler_galerkin_phi(p, cfg); }, "euler-galerkin"};
}

Closure chafee_closed_form_closure(double nu) {
  return {2, 1,
          [nu](const Vec& p) -> Vec {
            Vec q(1);
            q[0] = chafee_aim_alpha3(p[0], p[1], nu);
            return q;
          },
          "euler-galerkin"};
}

Vec postprocess(const Vec& low, const Closure& closure) {
  Vec out(closure.n_low + closure.n_high);
  out << low, closure(low);
  return out;
}

SpectralState postprocess(const SpectralState& low, const Closure& closure) {
  if (low.n_modes() != closure.n_low)
    throw InvalidInput("postprocess: state has " + std::to_string(low.n_modes()) +
                       " modes, closure expects " + std::to_string(closure.n_low));
  return SpectralState(low.basis().with_modes(closure.n_low + closure.n_high),
                       postprocess(low.coeffs(), closure));
}

}  // namespace aimrom
