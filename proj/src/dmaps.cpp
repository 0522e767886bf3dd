#include "aimrom/dmaps.hpp"

#include <cmath>

#include "aimrom/error.hpp"

namespace aimrom {

namespace {

void fix_sign(Eigen::Ref<Vec> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-14) {
      if (v[i] < 0) v = -v;
      return;
    }
  }
}

Mat gaussian(const Mat& d2, double two_eps) { return (-d2.array() / two_eps).exp().matrix(); }

}  // namespace

std::vector<int> DiffusionMap::coordinates() const {
  if (!kept_indices.empty()) return kept_indices;
  std::vector<int> all;
  for (int i = 1; i <= n_eigs(); ++i) all.push_back(i);
  return all;
}

Mat DiffusionMap::embedding() const {
  const auto cols = coordinates();
  Mat e(eigenvectors.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) e.col(static_cast<Eigen::Index>(c)) = eigenvectors.col(cols[c]);
  return e;
}

double median_bandwidth(const Mat& x) { return median_offdiag(squared_distances(x, x)); }

namespace {

struct Kernel {
  Vec p;  // density
  Mat k;  // density-normalized kernel
  Vec d;  // row sums of k
};

Kernel build_kernel(const Mat& x, double epsilon) {
  if (!(epsilon > 0)) throw InvalidInput("dmaps: epsilon must be positive");
  const Mat a = gaussian(squared_distances(x, x), 2.0 * epsilon);
  const Eigen::Index n = a.rows();
  if (n >= 2) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a.row(i).sum() - a(i, i) < 1e-12)
        throw NumericalFailure("dmaps: kernel row " + std::to_string(i) +
                               " is disconnected at epsilon=" + std::to_string(epsilon) +
                               "; increase epsilon");
    }
  }
  Kernel ker;
  ker.p = a.rowwise().sum();
  const Vec pinv = ker.p.cwiseInverse();
  ker.k = pinv.asDiagonal() * a * pinv.asDiagonal();
  ker.d = ker.k.rowwise().sum();
  return ker;
}

}  // namespace

Mat markov_matrix(const Mat& x, double epsilon) {
  const Kernel ker = build_kernel(x, epsilon);
  return ker.d.cwiseInverse().asDiagonal() * ker.k;
}

DiffusionMap dmaps_fit(const Mat& x, double epsilon, int n_eigs) {
  if (n_eigs < 1) throw InvalidInput("dmaps: n_eigs must be >= 1");
  if (x.rows() < n_eigs + 1)
    throw InvalidInput("dmaps: need at least n_eigs+1 = " + std::to_string(n_eigs + 1) + " points");
  const Kernel ker = build_kernel(x, epsilon);
  const Vec dm12 = ker.d.cwiseSqrt().cwiseInverse();
  Mat s = dm12.asDiagonal() * ker.k * dm12.asDiagonal();
  const SymEig eig = sym_eig(s);

  DiffusionMap dm;
  dm.epsilon = epsilon;
  dm.train_points = x;
  dm.density = ker.p;
  dm.eigenvalues = eig.values.head(n_eigs + 1);
  const double total = std::sqrt(ker.d.sum());
  dm.eigenvectors = total * (dm12.asDiagonal() * eig.vectors.leftCols(n_eigs + 1));
  for (int i = 0; i <= n_eigs; ++i) fix_sign(dm.eigenvectors.col(i));
  return dm;
}

HarmonicSelection select_independent(const DiffusionMap& dm, double factor, double threshold) {
  if (!(factor > 0)) throw InvalidInput("select_independent: bandwidth factor must be positive");
  const int n_eigs = dm.n_eigs();
  const Eigen::Index n = dm.eigenvectors.rows();
  HarmonicSelection sel;
  sel.residuals = Vec::Ones(n_eigs);
  if (n_eigs >= 1) sel.kept.push_back(1);
  Mat d2 = Mat::Zero(n, n);
  for (int k = 2; k <= n_eigs; ++k) {
    const Vec prev = dm.eigenvectors.col(k - 1);
    d2 += (prev.replicate(1, n) - prev.transpose().replicate(n, 1)).cwiseAbs2();
    // kernel scale: factor × median pairwise distance
    double med = median_offdiag(d2);
    if (!(med > 0)) med = 1.0;
    Mat w = gaussian(d2, factor * factor * med);
    w.diagonal().setZero();

    Mat design(n, k);
    design.col(0).setOnes();
    design.rightCols(k - 1) = dm.eigenvectors.middleCols(1, k - 1);
    const Vec y = dm.eigenvectors.col(k);
    Vec fitted(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vec wi = w.col(i);
      const Mat m = design.transpose() * wi.asDiagonal() * design;
      const Vec rhs = design.transpose() * wi.cwiseProduct(y);
      const Vec beta = m.completeOrthogonalDecomposition().solve(rhs);
      fitted[i] = design.row(i).dot(beta);
    }
    const double rms = std::sqrt((y - fitted).squaredNorm() / static_cast<double>(n));
    const double sd = std::sqrt((y.array() - y.mean()).square().mean());
    sel.residuals[k - 1] = sd > 0 ? rms / sd : 0.0;
    if (sel.residuals[k - 1] > threshold) sel.kept.push_back(k);
  }
  return sel;
}

Restriction nystrom_restrict(const DiffusionMap& dm, const Vec& x_new) {
  Mat row(1, x_new.size());
  row.row(0) = x_new.transpose();
  const Mat coords = nystrom_restrict_batch(dm, row);
  Restriction r;
  r.coords = coords.row(0).transpose();
  for (int c : dm.coordinates()) r.unreliable.push_back(std::abs(dm.eigenvalues[c]) < 1e-12);
  return r;
}

Mat nystrom_restrict_batch(const DiffusionMap& dm, const Mat& x_new) {
  if (x_new.cols() != dm.train_points.cols()) throw InvalidInput("nystrom_restrict: dimension mismatch");
  const Mat a = gaussian(squared_distances(x_new, dm.train_points), 2.0 * dm.epsilon);
  const Vec pnew = a.rowwise().sum();
  if ((pnew.array() <= 0).any())
    throw NumericalFailure("nystrom_restrict: new point is disconnected from the training data");
  Mat k = pnew.cwiseInverse().asDiagonal() * a * dm.density.cwiseInverse().asDiagonal();
  const Vec row_sums = k.rowwise().sum();
  k = row_sums.cwiseInverse().asDiagonal() * k;
  const auto cols = dm.coordinates();
  Mat out(x_new.rows(), static_cast<Eigen::Index>(cols.size()));
  for (size_t c = 0; c < cols.size(); ++c) {
    const double lam = dm.eigenvalues[cols[c]];
    out.col(static_cast<Eigen::Index>(c)) = k * dm.eigenvectors.col(cols[c]) / lam;
  }
  return out;
}

void GeometricHarmonics::refresh_weights() {
  weights = psi * sigma.cwiseInverse().asDiagonal() * coefficients;
}

GeometricHarmonics gh_fit(const Mat& inputs, const Mat& f_values, double epsilon_star, double delta) {
  if (inputs.rows() != f_values.rows()) throw InvalidInput("gh_fit: inputs and values differ in row count");
  if (inputs.rows() < 1) throw InvalidInput("gh_fit: no data");
  if (!(epsilon_star > 0)) throw InvalidInput("gh_fit: epsilon_star must be positive");
  if (!(delta > 0)) throw InvalidInput("gh_fit: delta must be positive");
  const Mat a = gaussian(squared_distances(inputs, inputs), 2.0 * epsilon_star);
  const SymEig eig = sym_eig(a);
  GeometricHarmonics gh;
  gh.epsilon_star = epsilon_star;
  gh.delta = delta;
  gh.train_inputs = inputs;
  gh.sigma0 = eig.values[0];
  Eigen::Index keep = 0;
  while (keep < eig.values.size() && eig.values[keep] > delta * gh.sigma0) ++keep;
  if (keep == 0 || !(gh.sigma0 > 0))
    throw InvalidInput("gh_fit: no eigenvalue above delta*sigma0; use a smaller delta");
  gh.sigma = eig.values.head(keep);
  gh.psi = eig.vectors.leftCols(keep);
  for (Eigen::Index i = 0; i < keep; ++i) fix_sign(gh.psi.col(i));
  gh.coefficients = gh.psi.transpose() * f_values;
  gh.refresh_weights();
  return gh;
}

Mat gh_extend_batch(const GeometricHarmonics& gh, const Mat& phi_new) {
  if (phi_new.cols() != gh.train_inputs.cols()) throw InvalidInput("gh_extend: input dimension mismatch");
  return gaussian(squared_distances(phi_new, gh.train_inputs), 2.0 * gh.epsilon_star) * gh.weights;
}

Vec gh_extend(const GeometricHarmonics& gh, const Vec& phi_new) {
  Mat row(1, phi_new.size());
  row.row(0) = phi_new.transpose();
  return gh_extend_batch(gh, row).row(0).transpose();
}

Mat gh_in_sample(const GeometricHarmonics& gh) { return gh.psi * gh.coefficients; }

GeometricHarmonics double_dmaps_lift(const DiffusionMap& dm, const Mat& ambient_values, double epsilon_star,
                                     double delta) {
  if (ambient_values.rows() != dm.train_points.rows())
    throw InvalidInput("double_dmaps_lift: ambient values not aligned with training points");
  return gh_fit(dm.embedding(), ambient_values, epsilon_star, delta);
}

}  // namespace aimrom
