#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "aimrom/linalg.hpp"

namespace aimrom {

struct Layer {
  Mat w;  // out × in
  Vec b;
};

// Per-feature affine standardization z = (x − shift) / scale.
struct Scaling {
  Vec shift;
  Vec scale;

  static Scaling identity(int n);
  // mean / population std of each column; near-constant columns keep scale 1
  static Scaling fit(const Mat& rows);
  int size() const { return static_cast<int>(shift.size()); }
};

// tanh hidden layers, identity output. Scalings wrap the affine core:
// y = out.shift + out.scale ∘ core((x − in.shift) / in.scale).
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<Layer> layers);
  // Uniform ±sqrt(6/(fan_in+fan_out)) weights, zero biases.
  static Mlp glorot(const std::vector<int>& layer_sizes, std::uint64_t seed);

  std::vector<int> layer_sizes() const;
  int input_dim() const { return static_cast<int>(layers_.front().w.cols()); }
  int output_dim() const { return static_cast<int>(layers_.back().w.rows()); }
  int n_layers() const { return static_cast<int>(layers_.size()); }
  int parameter_count() const;

  const std::vector<Layer>& layers() const { return layers_; }
  std::vector<Layer>& layers() { return layers_; }
  const Scaling& input_scaling() const { return in_; }
  const Scaling& output_scaling() const { return out_; }
  void set_input_scaling(Scaling s);
  void set_output_scaling(Scaling s);

  // Layer-major, weights column-major then bias.
  Vec parameters() const;
  void set_parameters(const Vec& theta);

  // Same hidden layers, only the listed outputs.
  Mlp restrict_outputs(const std::vector<int>& outputs) const;

  std::uint64_t seed = 0;

 private:
  std::vector<Layer> layers_;
  Scaling in_, out_;
};

Vec forward(const Mlp& net, const Vec& x);
// Rows are samples.
Mat forward_batch(const Mlp& net, const Mat& x);

struct MlpGradient {
  std::vector<Mat> dw;
  std::vector<Vec> db;

  Vec flat() const;  // same ordering as Mlp::parameters
};

// Gradient of ‖forward(x) − y‖² with respect to every weight and bias.
MlpGradient gradient(const Mlp& net, const Vec& x, const Vec& y);

// ∂forward/∂x, one reverse sweep per output.
Mat jacobian(const Mlp& net, const Vec& x);

struct TrainConfig {
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps_hat = 1e-8;
  int epochs = 100;
  int batch_size = 64;
  std::uint64_t seed = 0;
  double validation_fraction = 0.1;
  int patience = 0;  // 0 disables early stopping
  bool standardize = true;

  void validate() const;
};

struct EpochLoss {
  int epoch;
  double train_mse;  // original units
  std::optional<double> validation_mse;
};

struct TrainResult {
  Mlp model;
  std::vector<EpochLoss> history;
};

// Mini-batch Adam on mean squared error. Rows of x and y are samples.
TrainResult train(const Mlp& net, const Mat& x, const Mat& y, const TrainConfig& cfg);

// Row indices used for validation by train() for a dataset of n rows.
std::vector<int> validation_rows(int n, const TrainConfig& cfg);

struct IftReport {
  Vec determinants;
  int positive = 0;
  int negative = 0;
  int zero = 0;
  int majority_sign = 0;
  double majority_fraction = 0.0;
};

IftReport ift_check(const Mlp& map, const Mat& points);

struct InversionResult {
  Vec latent;
  double objective = 0.0;
  int candidate = -1;               // row of init_candidates that won
  std::vector<double> objectives;   // final objective per candidate (NaN if diverged)
  std::vector<double> history;      // accepted objectives of the winner
};

// Gradient descent with backtracking on ‖alpha_lead − decoder(L)[0:n]‖², n = alpha_lead.size(),
// started from every row of init_candidates.
InversionResult decoder_invert(const Mlp& decoder, const Vec& alpha_lead, const Mat& init_candidates,
                               int iters, double lr);

struct Autoencoder {
  Mlp encoder;
  Mlp decoder;

  int bottleneck_dim() const { return encoder.output_dim(); }
  int input_dim() const { return encoder.input_dim(); }
  void validate() const;
};

// Decoder hidden layers mirror the encoder's.
Autoencoder make_autoencoder(int input_dim, const std::vector<int>& hidden, int bottleneck,
                             std::uint64_t seed);
Vec encode(const Autoencoder& ae, const Vec& x);
Vec decode(const Autoencoder& ae, const Vec& latent);
Mat encode_batch(const Autoencoder& ae, const Mat& x);
Mat decode_batch(const Autoencoder& ae, const Mat& latents);

struct AutoencoderTrainResult {
  Autoencoder model;
  std::vector<EpochLoss> history;
};

// Reconstruction loss ‖x − decoder(encoder(x))‖², backpropagated through both nets.
AutoencoderTrainResult train_autoencoder(const Autoencoder& ae, const Mat& x, const TrainConfig& cfg);

// Splits a seed into independent child seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt);

}  // namespace aimrom
