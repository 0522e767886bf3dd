#include "aimrom/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aimrom/error.hpp"

namespace aimrom {

Vec histogram_edges(double lo, double hi, int n_bins) {
  if (n_bins < 1) throw InvalidInput("histogram: n_bins must be >= 1");
  if (!(hi > lo)) hi = lo + 1.0;
  return Vec::LinSpaced(n_bins + 1, lo, hi);
}

std::vector<int> histogram_counts(const std::vector<double>& values, const Vec& edges) {
  const int n_bins = static_cast<int>(edges.size()) - 1;
  std::vector<int> counts(std::max(n_bins, 0), 0);
  for (double v : values) {
    if (v < edges[0] || v > edges[n_bins]) continue;
    int b = static_cast<int>((v - edges[0]) / (edges[n_bins] - edges[0]) * n_bins);
    b = std::clamp(b, 0, n_bins - 1);
    while (b > 0 && v < edges[b]) --b;
    while (b < n_bins - 1 && v >= edges[b + 1]) ++b;
    ++counts[b];
  }
  return counts;
}

Mat ensemble_initial_conditions(const PipelineConfig& model_cfg, const EnsembleOptions& opt) {
  if (opt.n_ic < 1) throw InvalidInput("ensemble: n_ic must be >= 1");
  const int n = model_cfg.n_full();
  auto box = opt.ic_box;
  if (box.empty()) box.assign(n, {-1.0, 1.0});
  if (static_cast<int>(box.size()) != n)
    throw InvalidInput("ensemble: ic_box needs " + std::to_string(n) + " intervals");
  Mat ics = uniform_box_samples(box, opt.n_ic, opt.seed);
  if (opt.ic_transient > 0) {
    const VectorField full = full_model_field(model_cfg);
    for (int i = 0; i < opt.n_ic; ++i)
      ics.row(i) = rk4_walk(full, ics.row(i).transpose(), opt.ic_transient, model_cfg.dt, nullptr).transpose();
  }
  return ics;
}

EnsembleResult ensemble_histogram(const std::vector<PipelineConfig>& cfgs, const ModelStore& store,
                                  const EnsembleOptions& opt) {
  if (cfgs.empty()) throw InvalidInput("ensemble: no pipeline configs");
  for (const auto& c : cfgs)
    if (c.model != cfgs.front().model) throw InvalidInput("ensemble: all configs must share one model");
  EnsembleResult res;
  res.initial_conditions = ensemble_initial_conditions(cfgs.front(), opt);

  std::vector<PipelineArtifacts> arts;
  for (auto c : cfgs) {
    c.initial_condition = res.initial_conditions.row(0).transpose();
    c.final_time = opt.final_time;
    arts.push_back(load_artifacts(c, store));
  }

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (size_t k = 0; k < cfgs.size(); ++k) {
    EnsembleSeries s;
    s.label = cfgs[k].label();
    for (int i = 0; i < opt.n_ic; ++i) {
      PipelineConfig c = cfgs[k];
      c.initial_condition = res.initial_conditions.row(i).transpose();
      c.final_time = opt.final_time;
      c.series_points = 0;
      try {
        const PipelineResult r = run_pipeline(c, arts[k]);
        if (!std::isfinite(r.metrics.mape)) throw NumericalFailure("non-finite MAPE");
        s.samples.push_back({i, r.metrics.mape, r.metrics.raw_mape});
        lo = std::min(lo, r.metrics.mape);
        hi = std::max(hi, r.metrics.mape);
      } catch (const NumericalFailure& e) {
        s.failures.push_back({i, e.what()});
      }
    }
    res.series.push_back(std::move(s));
  }
  if (!std::isfinite(lo)) lo = hi = 0.0;
  res.bin_edges = histogram_edges(lo, hi, opt.n_bins);
  for (auto& s : res.series) {
    std::vector<double> v;
    for (const auto& x : s.samples) v.push_back(x.mape);
    s.counts = histogram_counts(v, res.bin_edges);
  }
  return res;
}

}  // namespace aimrom
