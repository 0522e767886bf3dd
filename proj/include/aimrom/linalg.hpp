#pragma once

#include <Eigen/Dense>
#include <vector>

namespace aimrom {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

// Eigenpairs of a symmetric matrix, eigenvalues descending.
struct SymEig {
  Vec values;
  Mat vectors;  // columns
};

// Full decomposition via LAPACK dsyevd. Only the lower triangle of a is read.
SymEig sym_eig(const Mat& a);

// Squared Euclidean distances between the rows of x and the rows of y.
Mat squared_distances(const Mat& x, const Mat& y);

// Median of the off-diagonal entries of a symmetric distance matrix.
double median_offdiag(const Mat& d2);

bool all_finite(const Vec& v);
bool all_finite(const Mat& m);

Mat rows_to_matrix(const std::vector<Vec>& rows);

}  // namespace aimrom
