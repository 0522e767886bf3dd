#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "aimrom/linalg.hpp"
#include "aimrom/models.hpp"

namespace aimrom {

struct Trajectory {
  std::vector<double> times;
  Mat states;  // one row per time

  int size() const { return static_cast<int>(times.size()); }
  int dim() const { return static_cast<int>(states.cols()); }
  Vec state(int i) const { return states.row(i).transpose(); }
  Vec final_state() const { return states.row(states.rows() - 1).transpose(); }
  double final_time() const { return times.back(); }
  void validate() const;
};

// Fixed-step classical RK4; the last step is shortened so the final time is t_end.
Trajectory rk4(const VectorField& field, const Vec& a0, double t_end, double dt);

// Number of steps rk4 takes to reach t_end.
int rk4_step_count(double t_end, double dt);

// Same stepping as rk4 without storing the path; on_step(i, t, state) after each step
// (and once for the initial state with i = 0).
Vec rk4_walk(const VectorField& field, const Vec& a0, double t_end, double dt,
             const std::function<void(int, double, const Vec&)>& on_step);

struct SamplerConfig {
  int n_trajectories = 1;
  std::vector<std::pair<double, double>> ic_box;
  double transient_time = 0.0;
  double record_time = 1.0;  // recorded span after the transient
  int snapshot_stride = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct TrajectoryFailure {
  int trajectory_id;
  double time;
  std::string message;
};

struct Dataset {
  Mat snapshots;  // one row per snapshot
  std::vector<int> trajectory_id;
  std::vector<double> time;
  std::vector<TrajectoryFailure> failures;
  Mat initial_conditions;  // every drawn IC, including failed ones

  int size() const { return static_cast<int>(snapshots.rows()); }
};

// Uniform draws inside the box, one row per sample.
Mat uniform_box_samples(const std::vector<std::pair<double, double>>& box, int n, std::uint64_t seed);

Dataset sample_attractor(const VectorField& field, const SamplerConfig& cfg, double dt);

}  // namespace aimrom
