#include "aimrom/integrate.hpp"

#include <cmath>
#include <random>

#include "aimrom/error.hpp"

namespace aimrom {

void Trajectory::validate() const {
  if (static_cast<Eigen::Index>(times.size()) != states.rows())
    throw InvalidInput("trajectory: times and states differ in length");
  for (size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw InvalidInput("trajectory: times not strictly increasing");
  if (!states.allFinite()) throw InvalidInput("trajectory: non-finite state");
}

int rk4_step_count(double t_end, double dt) {
  if (!(dt > 0) || !std::isfinite(dt)) throw InvalidInput("rk4: dt must be positive");
  if (!(t_end > 0) || !std::isfinite(t_end)) throw InvalidInput("rk4: t_end must be positive");
  const double ratio = t_end / dt;
  const double n = std::ceil(ratio - 1e-9 * std::max(1.0, ratio));
  if (n > 2e9) throw InvalidInput("rk4: too many steps");
  return std::max(1, static_cast<int>(n));
}

Vec rk4_walk(const VectorField& field, const Vec& a0, double t_end, double dt,
             const std::function<void(int, double, const Vec&)>& on_step) {
  if (a0.size() != field.dim) throw InvalidInput("rk4: initial state has wrong dimension");
  if (!a0.allFinite()) throw InvalidInput("rk4: non-finite initial state");
  const int n = rk4_step_count(t_end, dt);
  Vec a = a0;
  if (on_step) on_step(0, 0.0, a);
  for (int i = 1; i <= n; ++i) {
    const double t0 = (i - 1) * dt;
    const double t1 = (i == n) ? t_end : i * dt;
    const double h = t1 - t0;
    const Vec k1 = field.eval(a);
    const Vec k2 = field.eval(a + 0.5 * h * k1);
    const Vec k3 = field.eval(a + 0.5 * h * k2);
    const Vec k4 = field.eval(a + h * k3);
    a += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!a.allFinite()) throw BlowUp(t1, "integration aborted");
    if (on_step) on_step(i, t1, a);
  }
  return a;
}

Trajectory rk4(const VectorField& field, const Vec& a0, double t_end, double dt) {
  const int n = rk4_step_count(t_end, dt);
  Trajectory tr;
  tr.times.resize(n + 1);
  tr.states.resize(n + 1, field.dim);
  rk4_walk(field, a0, t_end, dt, [&](int i, double t, const Vec& a) {
    tr.times[i] = t;
    tr.states.row(i) = a.transpose();
  });
  return tr;
}

void SamplerConfig::validate() const {
  if (n_trajectories < 1) throw InvalidInput("sampler: n_trajectories must be >= 1");
  if (ic_box.empty()) throw InvalidInput("sampler: ic_box is empty");
  for (const auto& [lo, hi] : ic_box)
    if (!(lo <= hi) || !std::isfinite(lo) || !std::isfinite(hi))
      throw InvalidInput("sampler: ic_box needs finite lo <= hi per dimension");
  if (!(transient_time >= 0)) throw InvalidInput("sampler: transient_time must be >= 0");
  if (!(record_time > 0)) throw InvalidInput("sampler: record_time must be > 0");
  if (snapshot_stride < 1) throw InvalidInput("sampler: snapshot_stride must be >= 1");
}

Mat uniform_box_samples(const std::vector<std::pair<double, double>>& box, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Mat out(n, static_cast<Eigen::Index>(box.size()));
  for (int i = 0; i < n; ++i)
    for (size_t d = 0; d < box.size(); ++d)
      out(i, d) = box[d].first + (box[d].second - box[d].first) * unit(rng);
  return out;
}

Dataset sample_attractor(const VectorField& field, const SamplerConfig& cfg, double dt) {
  cfg.validate();
  if (static_cast<int>(cfg.ic_box.size()) != field.dim)
    throw InvalidInput("sampler: ic_box has " + std::to_string(cfg.ic_box.size()) +
                       " dimensions, field has " + std::to_string(field.dim));
  Dataset ds;
  ds.initial_conditions = uniform_box_samples(cfg.ic_box, cfg.n_trajectories, cfg.seed);
  const double t_end = cfg.transient_time + cfg.record_time;
  const int first = static_cast<int>(std::llround(cfg.transient_time / dt));

  std::vector<Vec> rows;
  for (int id = 0; id < cfg.n_trajectories; ++id) {
    std::vector<Vec> mine;
    std::vector<double> mine_t;
    try {
      rk4_walk(field, ds.initial_conditions.row(id).transpose(), t_end, dt,
               [&](int i, double t, const Vec& a) {
                 if (i >= first && (i - first) % cfg.snapshot_stride == 0) {
                   mine.push_back(a);
                   mine_t.push_back(t);
                 }
               });
    } catch (const BlowUp& e) {
      ds.failures.push_back({id, e.time(), e.what()});
      continue;
    }
    for (size_t j = 0; j < mine.size(); ++j) {
      rows.push_back(std::move(mine[j]));
      ds.trajectory_id.push_back(id);
      ds.time.push_back(mine_t[j]);
    }
  }
  const int ok = cfg.n_trajectories - static_cast<int>(ds.failures.size());
  if (2 * ok < cfg.n_trajectories)
    throw NumericalFailure("sampler: only " + std::to_string(ok) + " of " +
                           std::to_string(cfg.n_trajectories) + " trajectories stayed finite");
  ds.snapshots = rows_to_matrix(rows);
  return ds;
}

}  // namespace aimrom
