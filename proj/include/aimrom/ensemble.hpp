#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "aimrom/rom.hpp"
#include "aimrom/store.hpp"

namespace aimrom {

struct EnsembleOptions {
  int n_ic = 100;
  double final_time = 5.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<double, double>> ic_box;  // empty → [−1,1] per full-model coefficient
  double ic_transient = 0.0;  // evolve each drawn IC with the full model first
  int n_bins = 20;
};

struct EnsembleSample {
  int ic_index;
  double mape;
  double raw_mape;
};

struct EnsembleFailure {
  int ic_index;
  std::string message;
};

struct EnsembleSeries {
  std::string label;
  std::vector<EnsembleSample> samples;  // by IC index, failures excluded
  std::vector<EnsembleFailure> failures;
  std::vector<int> counts;  // per bin
};

struct EnsembleResult {
  Mat initial_conditions;  // full-model coefficients, one row per IC
  Vec bin_edges;           // shared by all series
  std::vector<EnsembleSeries> series;
};

// Seeded full-model ICs for an ensemble.
Mat ensemble_initial_conditions(const PipelineConfig& model_cfg, const EnsembleOptions& opt);

EnsembleResult ensemble_histogram(const std::vector<PipelineConfig>& cfgs, const ModelStore& store,
                                  const EnsembleOptions& opt);

// Fixed-width bins over [lo, hi]; the last bin is closed.
std::vector<int> histogram_counts(const std::vector<double>& values, const Vec& edges);
Vec histogram_edges(double lo, double hi, int n_bins);

}  // namespace aimrom
