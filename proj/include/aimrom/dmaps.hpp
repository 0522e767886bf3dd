#pragma once

#include <vector>

#include "aimrom/linalg.hpp"

namespace aimrom {

struct DiffusionMap {
  double epsilon = 0.0;
  double alpha_density = 1.0;
  Mat train_points;  // N × m
  Vec density;       // P_jj = Σ_k A_jk, needed to normalize new kernel rows
  Vec eigenvalues;   // λ_0 = 1 ≥ λ_1 ≥ ...
  Mat eigenvectors;  // N × (n_eigs + 1), φ_0 ≡ 1
  std::vector<int> kept_indices;

  int n_eigs() const { return static_cast<int>(eigenvalues.size()) - 1; }
  // Columns of the kept coordinates (all nontrivial ones if none were selected).
  std::vector<int> coordinates() const;
  Mat embedding() const;
};

// Median of squared pairwise distances.
double median_bandwidth(const Mat& x);

// Row-stochastic K̃ built from X with α = 1 density normalization.
Mat markov_matrix(const Mat& x, double epsilon);

DiffusionMap dmaps_fit(const Mat& x, double epsilon, int n_eigs);

struct HarmonicSelection {
  std::vector<int> kept;
  Vec residuals;  // entry k-1 for φ_k
};

// Leave-one-out local linear regression of φ_k on φ_1..φ_{k-1}.
// Regression kernel exp(−d²/ε_reg), ε_reg = factor · median squared distance.
HarmonicSelection select_independent(const DiffusionMap& dm, double regression_bandwidth_factor = 1.0 / 3.0,
                                     double residual_threshold = 0.2);

struct Restriction {
  Vec coords;                     // one entry per coordinate in dm.coordinates()
  std::vector<bool> unreliable;   // |λ_i| < 1e-12
};

Restriction nystrom_restrict(const DiffusionMap& dm, const Vec& x_new);
Mat nystrom_restrict_batch(const DiffusionMap& dm, const Mat& x_new);

struct GeometricHarmonics {
  double epsilon_star = 0.0;
  double delta = 1e-6;
  Mat train_inputs;  // N × d
  Vec sigma;         // kept eigenvalues, descending
  Mat psi;           // N × |S_δ|
  Mat coefficients;  // |S_δ| × outputs, ⟨f, ψ_i⟩
  double sigma0 = 0.0;
  Mat weights;       // ψ diag(1/σ) C, so that (Ef)(x) = a(x)ᵀ weights

  int n_kept() const { return static_cast<int>(sigma.size()); }
  int output_dim() const { return static_cast<int>(coefficients.cols()); }
  void refresh_weights();
};

GeometricHarmonics gh_fit(const Mat& inputs, const Mat& f_values, double epsilon_star, double delta = 1e-6);
Vec gh_extend(const GeometricHarmonics& gh, const Vec& phi_new);
Mat gh_extend_batch(const GeometricHarmonics& gh, const Mat& phi_new);
// P_δ f at the training inputs.
Mat gh_in_sample(const GeometricHarmonics& gh);

// GH from the kept φ columns to ambient coordinates.
GeometricHarmonics double_dmaps_lift(const DiffusionMap& dm, const Mat& ambient_values, double epsilon_star,
                                     double delta = 1e-6);

}  // namespace aimrom
