#include "aimrom/eval.hpp"

#include <cmath>

#include "aimrom/error.hpp"

namespace aimrom {

double mape(const Vec& pred, const Vec& truth, double floor) {
  if (pred.size() != truth.size()) throw InvalidInput("mape: length mismatch");
  if (!(floor > 0)) throw InvalidInput("mape: floor must be positive");
  if (pred.size() == 0) return 0.0;
  const Eigen::ArrayXd denom = truth.array().abs().max(floor);
  return 100.0 * ((pred - truth).array().abs() / denom).mean();
}

double mse(const Vec& pred, const Vec& truth) {
  if (pred.size() != truth.size()) throw InvalidInput("mse: length mismatch");
  if (pred.size() == 0) return 0.0;
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

double mse(const Mat& pred, const Mat& truth) {
  if (pred.rows() != truth.rows() || pred.cols() != truth.cols()) throw InvalidInput("mse: shape mismatch");
  if (pred.size() == 0) return 0.0;
  return (pred - truth).squaredNorm() / static_cast<double>(pred.size());
}

ErrorDecomposition decompose_errors(const Trajectory& full_traj, const Trajectory& reduced_traj,
                                    const Closure& closure, const BasisSpec& full_basis, const Grid& grid) {
  if (full_traj.size() == 0 || reduced_traj.size() == 0) throw InvalidInput("decompose_errors: empty trajectory");
  const double tf = full_traj.final_time(), tr = reduced_traj.final_time();
  if (std::abs(tf - tr) > 1e-12 * std::max(1.0, std::abs(tf)))
    throw InvalidInput("decompose_errors: final times differ");
  const int n_full = full_basis.n_modes();
  if (full_traj.dim() != n_full) throw InvalidInput("decompose_errors: full trajectory does not match basis");
  if (reduced_traj.dim() != closure.n_low) throw InvalidInput("decompose_errors: reduced dimension differs from closure");
  if (closure.n_low + closure.n_high > n_full) throw InvalidInput("decompose_errors: closure exceeds the full basis");

  const Vec truth = full_traj.final_state();
  const Vec low = reduced_traj.final_state();
  Vec truncated = Vec::Zero(n_full);
  truncated.head(closure.n_low) = low;
  Vec corrected = truncated;
  corrected.segment(closure.n_low, closure.n_high) = closure(low);

  const Vec u_true = reconstruct(full_basis, truth, grid);
  const Vec u_trunc = reconstruct(full_basis, truncated, grid);
  const Vec u_post = reconstruct(full_basis, corrected, grid);
  ErrorDecomposition d;
  d.delta1 = (truth.head(closure.n_low) - low).norm();
  d.delta2 = l2_norm(u_post - u_trunc, grid);
  d.delta3 = l2_norm(u_true - u_trunc, grid);
  d.delta4 = l2_norm(u_true - u_post, grid);
  return d;
}

}  // namespace aimrom
