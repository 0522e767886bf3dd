#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aimrom/aim.hpp"
#include "aimrom/dmaps.hpp"
#include "aimrom/eval.hpp"
#include "aimrom/integrate.hpp"
#include "aimrom/models.hpp"
#include "aimrom/nn.hpp"
#include "aimrom/pod.hpp"

namespace aimrom {

class ModelStore;

enum class FieldKind { black_box, gray_box };

// Truncated Galerkin field used as the gray-box base, by name so it can be rebuilt.
struct BaseFieldSpec {
  std::string model;
  int modes = 0;
  ModelParams params;

  VectorField build() const { return make_field(model, modes, params); }
};

struct LearnedField {
  FieldKind kind = FieldKind::black_box;
  std::optional<VectorField> base;
  std::optional<BaseFieldSpec> base_spec;
  Mlp net;
  int dim = 0;

  Vec operator()(const Vec& a) const;
  VectorField as_vector_field() const;
  void validate() const;
};

struct DerivativeData {
  Mat states;       // leading coordinates, one row per sample
  Mat derivatives;  // their time derivatives
};

// Leading n_low components of full states and of the full RHS evaluated on them.
DerivativeData projected_derivatives(const Mat& full_states, const VectorField& full_field, int n_low);
// Second-order differences along a dense trajectory (one-sided at the ends).
DerivativeData finite_difference_derivatives(const Trajectory& traj, int n_low);

struct NetSpec {
  std::vector<int> hidden;
  TrainConfig train;
};

NetSpec gray_box_net_spec();     // 6 × 95
NetSpec latent_map_net_spec();   // 5 × 80
NetSpec pod_rhs_net_spec();      // 2 × 20
NetSpec default_net_spec();      // 4 × 64

struct LearnedFieldFit {
  LearnedField field;
  std::vector<EpochLoss> history;
};

LearnedFieldFit learn_black_box(const DerivativeData& data, const NetSpec& spec);
LearnedFieldFit learn_gray_box(const DerivativeData& data, const VectorField& base, const NetSpec& spec);
// α̃ → latent coordinates (autoencoder bottleneck or kept diffusion coordinates).
TrainResult learn_latent_map(const Mat& alpha_lead, const Mat& latents, const NetSpec& spec);
// Any regression x → y with the given hidden layers (closure nets).
TrainResult learn_regression(const Mat& x, const Mat& y, const NetSpec& spec);

enum class ModelKind { chafee, ks };
enum class LatentRoute { fourier, pod, autoencoder, dmaps };
enum class Dynamics { truncated, black_box, gray_box };
enum class ClosureKind { none, euler_galerkin, mlp, double_dmaps, decoder_inversion };

std::string to_string(ModelKind v);
std::string to_string(LatentRoute v);
std::string to_string(Dynamics v);
std::string to_string(ClosureKind v);
ModelKind parse_model_kind(const std::string& s);
LatentRoute parse_latent_route(const std::string& s);
Dynamics parse_dynamics(const std::string& s);
ClosureKind parse_closure_kind(const std::string& s);

struct PipelineConfig {
  ModelKind model = ModelKind::chafee;
  LatentRoute route = LatentRoute::fourier;
  Dynamics dynamics = Dynamics::truncated;
  ClosureKind closure = ClosureKind::none;
  double nu = 0.16;
  double final_time = 5.0;
  double dt = 1e-3;
  std::uint64_t seed = 0;
  Vec initial_condition;  // full-model coefficients
  int pod_low = 2;        // POD route: integrated POD coefficients
  int pod_modes = 3;      // POD route: integrated + appended
  int grid_nodes = Grid::kDefaultNodes;
  int series_points = 20;
  int inversion_candidates = 8;
  int inversion_iters = 500;
  double inversion_lr = 1e-2;
  std::map<std::string, std::string> aliases;  // role → store alias

  int n_full() const;
  int n_low() const;  // integrated coordinates
  int n_closure_total() const;
  BasisSpec full_basis() const;
  std::string alias(const std::string& role) const;
  std::vector<std::string> required_roles() const;
  std::string label() const;
  // Rejects incompatible combinations before any compute.
  void validate() const;
};

// Typed models a pipeline needs, loaded once.
struct PipelineArtifacts {
  std::optional<LearnedField> rhs;
  std::optional<Mlp> closure_net;
  std::optional<PodModel> pod;
  std::optional<Autoencoder> autoencoder;
  Mat candidate_latents;
  std::optional<Mlp> latent_map;
  std::optional<GeometricHarmonics> lift;
  std::map<std::string, std::string> hashes;  // alias → content hash
};

PipelineArtifacts load_artifacts(const PipelineConfig& cfg, const ModelStore& store);

// Closure in the route's coordinates (Fourier high modes, or trailing POD coefficients).
Closure build_closure(const PipelineConfig& cfg, const PipelineArtifacts& art);
VectorField build_reduced_field(const PipelineConfig& cfg, const PipelineArtifacts& art);
VectorField full_model_field(const PipelineConfig& cfg);

struct PipelineResult {
  SpectralState final_state;  // post-processed, full Fourier basis
  Trajectory reduced;
  Trajectory truth;
  Vec grid_points;
  Vec u_truth, u_raw, u_corrected;
  MetricsBundle metrics;
  std::optional<ErrorDecomposition> errors;
  std::map<std::string, std::string> model_hashes;
};

PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineArtifacts& art);
PipelineResult run_pipeline(const PipelineConfig& cfg, const ModelStore& store);

}  // namespace aimrom
