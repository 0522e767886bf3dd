#pragma once

#include <vector>

#include "aimrom/aim.hpp"
#include "aimrom/integrate.hpp"
#include "aimrom/linalg.hpp"
#include "aimrom/spectral.hpp"

namespace aimrom {

constexpr double kMapeFloor = 1e-8;

// mean of 100·|pred − truth| / max(|truth|, floor)
double mape(const Vec& pred, const Vec& truth, double floor = kMapeFloor);
double mse(const Vec& pred, const Vec& truth);
double mse(const Mat& pred, const Mat& truth);

struct ErrorDecomposition {
  double delta1 = 0;  // leading coefficients, Euclidean
  double delta2 = 0;  // appended closure contribution, physical L2
  double delta3 = 0;  // truth vs truncated reconstruction
  double delta4 = 0;  // truth vs post-processed reconstruction
};

// Physical distances are trapezoid L2 norms on the grid. full_basis describes full_traj.
ErrorDecomposition decompose_errors(const Trajectory& full_traj, const Trajectory& reduced_traj,
                                    const Closure& closure, const BasisSpec& full_basis, const Grid& grid);

struct MetricsBundle {
  double mape = 0;      // post-processed u(x,T) vs truth, percent
  double mse = 0;
  double raw_mape = 0;  // zero-padded reduced state
  double raw_mse = 0;
  double mape_floor = kMapeFloor;
  std::vector<double> series_times;
  std::vector<double> percent_error_series;
};

}  // namespace aimrom
