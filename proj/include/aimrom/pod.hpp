#pragma once

#include "aimrom/linalg.hpp"

namespace aimrom {

struct PodModel {
  Vec mean;  // zero when not centered
  Mat modes;  // ambient × r, orthonormal columns
  Vec singular_values;
  Vec energy_fractions;  // cumulative
  bool centered = false;
  int numerical_rank = 0;

  int ambient_dim() const { return static_cast<int>(modes.rows()); }
  int n_modes() const { return static_cast<int>(modes.cols()); }
};

// Rows of snapshots are samples.
PodModel pod_fit(const Mat& snapshots, bool center);
Vec pod_project(const PodModel& model, const Vec& x, int k);
Vec pod_lift(const PodModel& model, const Vec& c, int k);
Mat pod_project_batch(const PodModel& model, const Mat& x, int k);
Mat pod_lift_batch(const PodModel& model, const Mat& c, int k);

struct QuadraticFit {
  double a = 0, b = 0, c = 0;
  double r_squared = 0;

  double operator()(double x) const { return a * x * x + b * x + c; }
};

// Least squares c2 ≈ a·c1² + b·c1 + c.
QuadraticFit quadratic_fit(const Vec& c1, const Vec& c2);

}  // namespace aimrom
