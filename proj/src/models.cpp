#include "aimrom/models.hpp"

#include "aimrom/error.hpp"

namespace aimrom {

namespace {

void require_size(const Vec& a, Eigen::Index n, const char* who) {
  if (a.size() != n)
    throw InvalidInput(std::string(who) + ": expected " + std::to_string(n) + " components, got " +
                       std::to_string(a.size()));
}

}  // namespace

Vec VectorField::operator()(const Vec& a) const {
  if (a.size() != dim)
    throw InvalidInput("vector field of dimension " + std::to_string(dim) + " evaluated on " +
                       std::to_string(a.size()) + " components");
  return eval(a);
}

void ModelParams::validate() const {
  if (!(nu > 0)) throw InvalidInput("nu must be positive");
  if (!(epsilon > 0)) throw InvalidInput("epsilon must be positive");
}

Vec chafee_cubic_3(const Vec& a) {
  require_size(a, 3, "chafee_cubic_3");
  const double a1 = a[0], a2 = a[1], a3 = a[2];
  Vec c(3);
  c[0] = 0.75 * a1 * a1 * a1 + 1.5 * a1 * a2 * a2 - 0.75 * a1 * a1 * a3 + 0.75 * a2 * a2 * a3 +
         1.5 * a1 * a3 * a3;
  c[1] = 1.5 * a1 * a1 * a2 + 0.75 * a2 * a2 * a2 + 1.5 * a1 * a2 * a3 + 1.5 * a2 * a3 * a3;
  c[2] = -0.25 * a1 * a1 * a1 + 0.75 * a3 * a3 * a3 + 1.5 * a2 * a2 * a3 + 1.5 * a1 * a1 * a3 +
         0.75 * a1 * a2 * a2;
  return c;
}

Vec chafee_rhs_3(const Vec& a, double nu) {
  require_size(a, 3, "chafee_rhs_3");
  Vec r = -chafee_cubic_3(a);
  for (int k = 1; k <= 3; ++k) r[k - 1] += (1.0 - nu * k * k) * a[k - 1];
  return r;
}

Vec chafee_rhs_2(const Vec& a, double nu) {
  require_size(a, 2, "chafee_rhs_2");
  Vec full(3);
  full << a[0], a[1], 0.0;
  return chafee_rhs_3(full, nu).head(2);
}

// u u_x = ½ ∂x(u²); u² = ½ Σ a_i a_j [cos((i−j)x) − cos((i+j)x)], so the sine-k
// coefficient of ½∂x(u²) collects the cos(kx) content of u² times k/2.
Vec ks_convection(const Vec& a) {
  const int n = static_cast<int>(a.size());
  Vec out = Vec::Zero(n);
  for (int k = 1; k <= n; ++k) {
    double sum_pairs = 0.0;
    for (int i = 1; i < k; ++i) sum_pairs += a[i - 1] * a[k - i - 1];
    double sum_diff = 0.0;
    for (int j = 1; j + k <= n; ++j) sum_diff += a[j + k - 1] * a[j - 1];
    out[k - 1] = 0.5 * k * (0.5 * sum_pairs - sum_diff);
  }
  return out;
}

Vec ks_rhs(const Vec& a, double nu) {
  Vec r = -nu * ks_convection(a);
  for (int k = 1; k <= a.size(); ++k) {
    const double k2 = static_cast<double>(k) * k;
    r[k - 1] += (nu * k2 - 4.0 * k2 * k2) * a[k - 1];
  }
  return r;
}

Vec ks_rhs_8(const Vec& a, double nu) {
  require_size(a, 8, "ks_rhs_8");
  return ks_rhs(a, nu);
}

Vec ks_rhs_3(const Vec& a, double nu) {
  require_size(a, 3, "ks_rhs_3");
  return ks_rhs(a, nu);
}

Vec toy_rhs(const Vec& z, double epsilon) {
  require_size(z, 2, "toy_rhs");
  if (!(epsilon > 0)) throw InvalidInput("toy_rhs: epsilon must be positive");
  Vec r(2);
  r << 2.0 - z[0] - z[1], (z[0] - z[1]) / epsilon;
  return r;
}

VectorField chafee_field(int modes, double nu) {
  if (modes == 3) return {3, [nu](const Vec& a) { return chafee_rhs_3(a, nu); }};
  if (modes == 2) return {2, [nu](const Vec& a) { return chafee_rhs_2(a, nu); }};
  throw InvalidInput("chafee model supports 2 or 3 modes, got " + std::to_string(modes));
}

VectorField ks_field(int modes, double nu) {
  if (modes == 8) return {8, [nu](const Vec& a) { return ks_rhs_8(a, nu); }};
  if (modes == 3) return {3, [nu](const Vec& a) { return ks_rhs_3(a, nu); }};
  throw InvalidInput("ks model supports 3 or 8 modes, got " + std::to_string(modes));
}

VectorField toy_field(double epsilon) {
  if (!(epsilon > 0)) throw InvalidInput("toy: epsilon must be positive");
  return {2, [epsilon](const Vec& z) { return toy_rhs(z, epsilon); }};
}

VectorField make_field(const std::string& model, int modes, const ModelParams& params) {
  params.validate();
  if (model == "chafee") return chafee_field(modes, params.nu);
  if (model == "ks") return ks_field(modes, params.nu);
  if (model == "toy") {
    if (modes != 2) throw InvalidInput("toy model has exactly 2 components");
    return toy_field(params.epsilon);
  }
  throw InvalidInput("unknown model '" + model + "' (expected chafee, ks or toy)");
}

BasisSpec model_basis(const std::string& model, int modes) {
  if (model == "chafee") return BasisSpec(BasisKind::sine_dirichlet, modes);
  if (model == "ks") return BasisSpec(BasisKind::sine_periodic_odd, modes);
  throw InvalidInput("model '" + model + "' has no spectral basis");
}

}  // namespace aimrom
