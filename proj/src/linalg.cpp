#include "aimrom/linalg.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>

#include "aimrom/error.hpp"

namespace aimrom {

SymEig sym_eig(const Mat& a) {
  if (a.rows() != a.cols()) throw InvalidInput("sym_eig: matrix is not square");
  const lapack_int n = static_cast<lapack_int>(a.rows());
  Mat v = a;
  Vec w(n);
  if (n == 0) return {w, v};
  lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', n, v.data(), n, w.data());
  if (info != 0) throw NumericalFailure("dsyevd failed with info=" + std::to_string(info));
  // LAPACK returns ascending order
  SymEig out{w.reverse(), v.rowwise().reverse()};
  return out;
}

Mat squared_distances(const Mat& x, const Mat& y) {
  if (x.cols() != y.cols()) throw InvalidInput("squared_distances: column count mismatch");
  Mat d(x.rows(), y.rows());
  const Mat xt = x.transpose();
  const Mat yt = y.transpose();
  for (Eigen::Index j = 0; j < yt.cols(); ++j)
    for (Eigen::Index i = 0; i < xt.cols(); ++i)
      d(i, j) = (xt.col(i) - yt.col(j)).squaredNorm();
  return d;
}

double median_offdiag(const Mat& d2) {
  const Eigen::Index n = d2.rows();
  if (n < 2) throw InvalidInput("median_offdiag: need at least two points");
  std::vector<double> v;
  v.reserve(static_cast<size_t>(n * (n - 1) / 2));
  for (Eigen::Index j = 1; j < n; ++j)
    for (Eigen::Index i = 0; i < j; ++i) v.push_back(d2(i, j));
  const size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double hi = v[mid];
  if (v.size() % 2 == 1) return hi;
  double lo = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lo + hi);
}

bool all_finite(const Vec& v) { return v.allFinite(); }
bool all_finite(const Mat& m) { return m.allFinite(); }

Mat rows_to_matrix(const std::vector<Vec>& rows) {
  if (rows.empty()) return Mat(0, 0);
  Mat m(rows.size(), rows.front().size());
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != m.cols()) throw InvalidInput("rows_to_matrix: ragged rows");
    m.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return m;
}

}  // namespace aimrom
