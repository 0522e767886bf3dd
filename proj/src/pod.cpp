#include "aimrom/pod.hpp"

#include <cmath>
#include <limits>

#include "aimrom/error.hpp"

namespace aimrom {

PodModel pod_fit(const Mat& snapshots, bool center) {
  if (snapshots.rows() < 2) throw InvalidInput("pod_fit: need at least 2 snapshots");
  if (!snapshots.allFinite()) throw InvalidInput("pod_fit: non-finite snapshot");
  PodModel m;
  m.centered = center;
  m.mean = center ? Vec(snapshots.colwise().mean().transpose()) : Vec::Zero(snapshots.cols());
  const Mat x = (snapshots.rowwise() - m.mean.transpose()).transpose();  // ambient × samples
  Eigen::BDCSVD<Mat> svd(x, Eigen::ComputeThinU);
  m.singular_values = svd.singularValues();
  m.modes = svd.matrixU();
  const double smax = m.singular_values.size() ? m.singular_values[0] : 0.0;
  const double tol = std::max(x.rows(), x.cols()) * std::numeric_limits<double>::epsilon() * smax;
  m.numerical_rank = 0;
  for (Eigen::Index i = 0; i < m.singular_values.size(); ++i)
    if (m.singular_values[i] > tol) ++m.numerical_rank;
  if (m.numerical_rank == 0 || !(smax > 0))
    throw InvalidInput(center ? "pod_fit: snapshots are identical, centered data has rank 0"
                              : "pod_fit: snapshots are all zero, rank 0");
  for (Eigen::Index j = 0; j < m.modes.cols(); ++j) {
    Eigen::Index imax = 0;
    m.modes.col(j).cwiseAbs().maxCoeff(&imax);
    if (m.modes(imax, j) < 0) m.modes.col(j) *= -1.0;
  }
  const Vec e = m.singular_values.cwiseAbs2();
  m.energy_fractions.resize(e.size());
  double run = 0.0;
  const double total = e.sum();
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    run += e[i];
    m.energy_fractions[i] = std::min(1.0, run / total);
  }
  m.energy_fractions[e.size() - 1] = 1.0;
  return m;
}

namespace {

void check_k(const PodModel& m, int k) {
  if (k < 1 || k > m.n_modes())
    throw InvalidInput("pod: k=" + std::to_string(k) + " outside 1.." + std::to_string(m.n_modes()));
}

}  // namespace

Vec pod_project(const PodModel& m, const Vec& x, int k) {
  check_k(m, k);
  if (x.size() != m.ambient_dim()) throw InvalidInput("pod_project: ambient dimension mismatch");
  return m.modes.leftCols(k).transpose() * (x - m.mean);
}

Vec pod_lift(const PodModel& m, const Vec& c, int k) {
  check_k(m, k);
  if (c.size() != k) throw InvalidInput("pod_lift: coefficient count differs from k");
  return m.mean + m.modes.leftCols(k) * c;
}

Mat pod_project_batch(const PodModel& m, const Mat& x, int k) {
  check_k(m, k);
  if (x.cols() != m.ambient_dim()) throw InvalidInput("pod_project: ambient dimension mismatch");
  return (x.rowwise() - m.mean.transpose()) * m.modes.leftCols(k);
}

Mat pod_lift_batch(const PodModel& m, const Mat& c, int k) {
  check_k(m, k);
  if (c.cols() != k) throw InvalidInput("pod_lift: coefficient count differs from k");
  return (c * m.modes.leftCols(k).transpose()).rowwise() + m.mean.transpose();
}

QuadraticFit quadratic_fit(const Vec& c1, const Vec& c2) {
  if (c1.size() != c2.size()) throw InvalidInput("quadratic_fit: length mismatch");
  if (c1.size() < 3) throw InvalidInput("quadratic_fit: need at least 3 points");
  Mat design(c1.size(), 3);
  design.col(0) = c1.cwiseAbs2();
  design.col(1) = c1;
  design.col(2).setOnes();
  Eigen::ColPivHouseholderQR<Mat> qr(design);
  if (qr.rank() < 3) throw InvalidInput("quadratic_fit: rank-deficient design (too few distinct c1 values)");
  const Vec beta = qr.solve(c2);
  QuadraticFit fit{beta[0], beta[1], beta[2], 0.0};
  const double ss_res = (c2 - design * beta).squaredNorm();
  const double ss_tot = (c2.array() - c2.mean()).square().sum();
  fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res == 0 ? 1.0 : 0.0);
  return fit;
}

}  // namespace aimrom
