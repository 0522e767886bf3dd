#include "aimrom/nn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "aimrom/error.hpp"

namespace aimrom {

namespace {

// features × samples
Mat to_standard(const Scaling& s, const Mat& cols) {
  return ((cols.colwise() - s.shift).array().colwise() / s.scale.array()).matrix();
}

Mat from_standard(const Scaling& s, const Mat& cols) {
  return ((cols.array().colwise() * s.scale.array()).colwise() + s.shift.array()).matrix();
}

struct Cache {
  std::vector<Mat> h;  // h[0] standardized input, h[l] output of layer l-1
};

Mat core_forward(const std::vector<Layer>& layers, const Mat& z0, Cache* cache) {
  Mat h = z0;
  if (cache) {
    cache->h.clear();
    cache->h.push_back(h);
  }
  const size_t n = layers.size();
  for (size_t l = 0; l < n; ++l) {
    Mat a = layers[l].w * h;
    a.colwise() += layers[l].b;
    if (l + 1 < n) a = a.array().tanh().matrix();
    h = std::move(a);
    if (cache && l + 1 < n) cache->h.push_back(h);
  }
  return h;
}

MlpGradient zero_gradient(const std::vector<Layer>& layers) {
  MlpGradient g;
  for (const auto& l : layers) {
    g.dw.push_back(Mat::Zero(l.w.rows(), l.w.cols()));
    g.db.push_back(Vec::Zero(l.b.size()));
  }
  return g;
}

// delta = ∂loss/∂(core output); fills g and returns ∂loss/∂(core input).
Mat core_backward(const std::vector<Layer>& layers, const Cache& cache, Mat delta, MlpGradient& g) {
  for (size_t l = layers.size(); l-- > 0;) {
    const Mat& hin = cache.h[l];
    g.dw[l] = delta * hin.transpose();
    g.db[l] = delta.rowwise().sum();
    Mat din = layers[l].w.transpose() * delta;
    if (l > 0) din.array() *= (1.0 - hin.array().square());
    delta = std::move(din);
  }
  return delta;
}

class Adam {
 public:
  explicit Adam(const Mlp& net) : m_(zero_gradient(net.layers())), v_(zero_gradient(net.layers())) {}

  void step(Mlp& net, const MlpGradient& g, const TrainConfig& cfg) {
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg.beta1, t_);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t_);
    auto update = [&](auto& p, auto& m, auto& v, const auto& grad) {
      m = cfg.beta1 * m + (1.0 - cfg.beta1) * grad;
      v = cfg.beta2 * v + (1.0 - cfg.beta2) * grad.cwiseAbs2();
      p.array() -= cfg.learning_rate * (m.array() / bc1) / ((v.array() / bc2).sqrt() + cfg.eps_hat);
    };
    auto& layers = net.layers();
    for (size_t l = 0; l < layers.size(); ++l) {
      update(layers[l].w, m_.dw[l], v_.dw[l], g.dw[l]);
      update(layers[l].b, m_.db[l], v_.db[l], g.db[l]);
    }
  }

 private:
  MlpGradient m_, v_;
  int t_ = 0;
};

double mean_sq(const Mat& a, const Mat& b) {
  if (a.size() == 0) return 0.0;
  return (a - b).squaredNorm() / static_cast<double>(a.size());
}

Mat select_rows(const Mat& m, const std::vector<int>& rows) {
  Mat out(rows.size(), m.cols());
  for (size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
  return out;
}

Mat select_cols(const Mat& m, const std::vector<int>& cols, size_t begin, size_t end) {
  Mat out(m.rows(), static_cast<Eigen::Index>(end - begin));
  for (size_t i = begin; i < end; ++i) out.col(static_cast<Eigen::Index>(i - begin)) = m.col(cols[i]);
  return out;
}

struct Split {
  std::vector<int> train, val;
};

Split split_rows(int n, const TrainConfig& cfg) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::mt19937_64 rng(derive_seed(cfg.seed, 1));
  std::shuffle(idx.begin(), idx.end(), rng);
  const int n_val = static_cast<int>(std::floor(cfg.validation_fraction * n));
  Split s;
  s.val.assign(idx.begin(), idx.begin() + n_val);
  s.train.assign(idx.begin() + n_val, idx.end());
  std::sort(s.val.begin(), s.val.end());
  std::sort(s.train.begin(), s.train.end());
  if (s.train.empty()) throw InvalidInput("train: validation split leaves no training rows");
  return s;
}

// Tracks the best validation loss for early stopping.
template <class Model>
struct EarlyStop {
  int patience = 0;
  double best = std::numeric_limits<double>::infinity();
  int since = 0;
  std::optional<Model> best_model;

  // true when training should stop
  bool update(const Model& current, const std::optional<double>& val) {
    if (patience <= 0 || !val) return false;
    if (*val < best) {
      best = *val;
      since = 0;
      best_model = current;
      return false;
    }
    return ++since >= patience;
  }
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t salt) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

Scaling Scaling::identity(int n) { return {Vec::Zero(n), Vec::Ones(n)}; }

Scaling Scaling::fit(const Mat& rows) {
  if (rows.rows() == 0) throw InvalidInput("Scaling::fit: no rows");
  Scaling s;
  s.shift = rows.colwise().mean().transpose();
  s.scale.resize(rows.cols());
  for (Eigen::Index j = 0; j < rows.cols(); ++j) {
    const double var = (rows.col(j).array() - s.shift[j]).square().mean();
    const double sd = std::sqrt(var);
    s.scale[j] = sd > 1e-12 * std::max(1.0, std::abs(s.shift[j])) ? sd : 1.0;
  }
  return s;
}

Mlp::Mlp(std::vector<Layer> layers) : layers_(std::move(layers)) {
  if (layers_.empty()) throw InvalidInput("Mlp: no layers");
  for (size_t l = 0; l < layers_.size(); ++l) {
    if (layers_[l].w.rows() != layers_[l].b.size()) throw InvalidInput("Mlp: bias size mismatch");
    if (l > 0 && layers_[l].w.cols() != layers_[l - 1].w.rows())
      throw InvalidInput("Mlp: layer shapes do not chain");
    if (!layers_[l].w.allFinite() || !layers_[l].b.allFinite())
      throw InvalidInput("Mlp: non-finite parameter");
  }
  in_ = Scaling::identity(input_dim());
  out_ = Scaling::identity(output_dim());
}

Mlp Mlp::glorot(const std::vector<int>& sizes, std::uint64_t seed) {
  if (sizes.size() < 2) throw InvalidInput("Mlp: need at least input and output sizes");
  for (int s : sizes)
    if (s < 1) throw InvalidInput("Mlp: layer sizes must be positive");
  std::mt19937_64 rng(seed);
  std::vector<Layer> layers;
  for (size_t l = 0; l + 1 < sizes.size(); ++l) {
    const int fan_in = sizes[l], fan_out = sizes[l + 1];
    const double r = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> u(-r, r);
    Layer layer{Mat(fan_out, fan_in), Vec::Zero(fan_out)};
    for (int j = 0; j < fan_in; ++j)
      for (int i = 0; i < fan_out; ++i) layer.w(i, j) = u(rng);
    layers.push_back(std::move(layer));
  }
  Mlp net(std::move(layers));
  net.seed = seed;
  return net;
}

std::vector<int> Mlp::layer_sizes() const {
  std::vector<int> s{input_dim()};
  for (const auto& l : layers_) s.push_back(static_cast<int>(l.w.rows()));
  return s;
}

int Mlp::parameter_count() const {
  int n = 0;
  for (const auto& l : layers_) n += static_cast<int>(l.w.size() + l.b.size());
  return n;
}

void Mlp::set_input_scaling(Scaling s) {
  if (s.size() != input_dim() || s.scale.size() != input_dim())
    throw InvalidInput("Mlp: input scaling has wrong size");
  in_ = std::move(s);
}

void Mlp::set_output_scaling(Scaling s) {
  if (s.size() != output_dim() || s.scale.size() != output_dim())
    throw InvalidInput("Mlp: output scaling has wrong size");
  out_ = std::move(s);
}

Vec Mlp::parameters() const {
  Vec theta(parameter_count());
  Eigen::Index k = 0;
  for (const auto& l : layers_) {
    theta.segment(k, l.w.size()) = Eigen::Map<const Vec>(l.w.data(), l.w.size());
    k += l.w.size();
    theta.segment(k, l.b.size()) = l.b;
    k += l.b.size();
  }
  return theta;
}

void Mlp::set_parameters(const Vec& theta) {
  if (theta.size() != parameter_count()) throw InvalidInput("Mlp: parameter vector has wrong length");
  Eigen::Index k = 0;
  for (auto& l : layers_) {
    Eigen::Map<Vec>(l.w.data(), l.w.size()) = theta.segment(k, l.w.size());
    k += l.w.size();
    l.b = theta.segment(k, l.b.size());
    k += l.b.size();
  }
}

Mlp Mlp::restrict_outputs(const std::vector<int>& outputs) const {
  if (outputs.empty()) throw InvalidInput("restrict_outputs: empty selection");
  std::vector<Layer> layers = layers_;
  const Layer& last = layers_.back();
  Layer sel{Mat(outputs.size(), last.w.cols()), Vec(outputs.size())};
  Scaling out{Vec(outputs.size()), Vec(outputs.size())};
  for (size_t i = 0; i < outputs.size(); ++i) {
    if (outputs[i] < 0 || outputs[i] >= output_dim()) throw InvalidInput("restrict_outputs: index out of range");
    const auto r = static_cast<Eigen::Index>(i);
    sel.w.row(r) = last.w.row(outputs[i]);
    sel.b[r] = last.b[outputs[i]];
    out.shift[r] = out_.shift[outputs[i]];
    out.scale[r] = out_.scale[outputs[i]];
  }
  layers.back() = std::move(sel);
  Mlp r(std::move(layers));
  r.in_ = in_;
  r.out_ = std::move(out);
  r.seed = seed;
  return r;
}

Vec forward(const Mlp& net, const Vec& x) {
  if (x.size() != net.input_dim())
    throw InvalidInput("forward: input has " + std::to_string(x.size()) + " entries, net expects " +
                       std::to_string(net.input_dim()));
  const Mat z = to_standard(net.input_scaling(), x);
  return from_standard(net.output_scaling(), core_forward(net.layers(), z, nullptr)).col(0);
}

Mat forward_batch(const Mlp& net, const Mat& x) {
  if (x.cols() != net.input_dim()) throw InvalidInput("forward_batch: input width mismatch");
  const Mat z = to_standard(net.input_scaling(), x.transpose());
  return from_standard(net.output_scaling(), core_forward(net.layers(), z, nullptr)).transpose();
}

Vec MlpGradient::flat() const {
  Eigen::Index n = 0;
  for (size_t l = 0; l < dw.size(); ++l) n += dw[l].size() + db[l].size();
  Vec g(n);
  Eigen::Index k = 0;
  for (size_t l = 0; l < dw.size(); ++l) {
    g.segment(k, dw[l].size()) = Eigen::Map<const Vec>(dw[l].data(), dw[l].size());
    k += dw[l].size();
    g.segment(k, db[l].size()) = db[l];
    k += db[l].size();
  }
  return g;
}

MlpGradient gradient(const Mlp& net, const Vec& x, const Vec& y) {
  if (x.size() != net.input_dim() || y.size() != net.output_dim())
    throw InvalidInput("gradient: dimension mismatch");
  Cache cache;
  const Mat z = to_standard(net.input_scaling(), x);
  const Mat o = core_forward(net.layers(), z, &cache);
  const Vec yhat = from_standard(net.output_scaling(), o).col(0);
  Mat delta = (2.0 * (yhat - y).cwiseProduct(net.output_scaling().scale));
  MlpGradient g = zero_gradient(net.layers());
  core_backward(net.layers(), cache, delta, g);
  return g;
}

Mat jacobian(const Mlp& net, const Vec& x) {
  if (x.size() != net.input_dim()) throw InvalidInput("jacobian: input dimension mismatch");
  Cache cache;
  core_forward(net.layers(), to_standard(net.input_scaling(), x), &cache);
  const auto& layers = net.layers();
  Mat g = Mat::Identity(net.output_dim(), net.output_dim());
  for (size_t l = layers.size(); l-- > 0;) {
    g = g * layers[l].w;
    if (l > 0) g.array().rowwise() *= (1.0 - cache.h[l].col(0).array().square()).transpose();
  }
  return net.output_scaling().scale.asDiagonal() * g *
         net.input_scaling().scale.cwiseInverse().asDiagonal();
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0)) throw InvalidInput("train: learning_rate must be positive");
  if (!(beta1 > 0 && beta1 < 1) || !(beta2 > 0 && beta2 < 1))
    throw InvalidInput("train: Adam betas must lie in (0,1)");
  if (!(eps_hat > 0)) throw InvalidInput("train: eps_hat must be positive");
  if (epochs < 0) throw InvalidInput("train: epochs must be >= 0");
  if (batch_size < 1) throw InvalidInput("train: batch_size must be >= 1");
  if (!(validation_fraction >= 0 && validation_fraction < 1))
    throw InvalidInput("train: validation_fraction must lie in [0,1)");
  if (patience < 0) throw InvalidInput("train: patience must be >= 0");
}

std::vector<int> validation_rows(int n, const TrainConfig& cfg) { return split_rows(n, cfg).val; }

TrainResult train(const Mlp& net, const Mat& x, const Mat& y, const TrainConfig& cfg) {
  cfg.validate();
  if (x.rows() != y.rows()) throw InvalidInput("train: X and Y row counts differ");
  if (x.cols() != net.input_dim() || y.cols() != net.output_dim())
    throw InvalidInput("train: data widths do not match the network");
  TrainResult result{net, {}};
  if (cfg.epochs == 0) return result;

  const Split split = split_rows(static_cast<int>(x.rows()), cfg);
  const Mat xt = select_rows(x, split.train), yt = select_rows(y, split.train);
  const Mat xv = select_rows(x, split.val), yv = select_rows(y, split.val);
  Mlp& model = result.model;
  if (cfg.standardize) {
    model.set_input_scaling(Scaling::fit(xt));
    model.set_output_scaling(Scaling::fit(yt));
  }
  const Mat xs = to_standard(model.input_scaling(), xt.transpose());
  const Mat ys = to_standard(model.output_scaling(), yt.transpose());

  Adam adam(model);
  std::mt19937_64 rng(derive_seed(cfg.seed, 2));
  std::vector<int> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);
  EarlyStop<Mlp> stop;
  stop.patience = cfg.patience;
  MlpGradient g = zero_gradient(model.layers());
  const double n_out = static_cast<double>(model.output_dim());

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const size_t e = std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
      const Mat xb = select_cols(xs, order, b, e);
      const Mat yb = select_cols(ys, order, b, e);
      Cache cache;
      const Mat o = core_forward(model.layers(), xb, &cache);
      const Mat delta = (2.0 / (static_cast<double>(e - b) * n_out)) * (o - yb);
      core_backward(model.layers(), cache, delta, g);
      adam.step(model, g, cfg);
    }
    EpochLoss loss{epoch, mean_sq(forward_batch(model, xt), yt), std::nullopt};
    if (xv.rows() > 0) loss.validation_mse = mean_sq(forward_batch(model, xv), yv);
    if (!std::isfinite(loss.train_mse) || (loss.validation_mse && !std::isfinite(*loss.validation_mse)))
      throw TrainingDiverged(epoch);
    result.history.push_back(loss);
    if (stop.update(model, loss.validation_mse)) break;
  }
  if (stop.best_model) model = *stop.best_model;
  return result;
}

IftReport ift_check(const Mlp& map, const Mat& points) {
  if (map.input_dim() != map.output_dim()) throw InvalidInput("ift_check: Jacobian is not square");
  if (points.cols() != map.input_dim()) throw InvalidInput("ift_check: point width mismatch");
  IftReport r;
  r.determinants.resize(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const double d = jacobian(map, points.row(i).transpose()).partialPivLu().determinant();
    r.determinants[i] = d;
    if (d > 0) ++r.positive;
    else if (d < 0) ++r.negative;
    else ++r.zero;
  }
  const int n = static_cast<int>(points.rows());
  r.majority_sign = r.positive >= r.negative ? 1 : -1;
  if (n > 0) r.majority_fraction = static_cast<double>(std::max(r.positive, r.negative)) / n;
  return r;
}

InversionResult decoder_invert(const Mlp& decoder, const Vec& alpha_lead, const Mat& init_candidates,
                               int iters, double lr) {
  const int n = static_cast<int>(alpha_lead.size());
  if (n < 1 || n > decoder.output_dim()) throw InvalidInput("decoder_invert: bad target length");
  if (init_candidates.rows() < 1 || init_candidates.cols() != decoder.input_dim())
    throw InvalidInput("decoder_invert: candidates must be rows of latent width");
  if (iters < 0 || !(lr > 0)) throw InvalidInput("decoder_invert: need iters >= 0 and lr > 0");
  std::vector<int> lead(n);
  std::iota(lead.begin(), lead.end(), 0);
  const Mlp head = decoder.restrict_outputs(lead);
  auto objective = [&](const Vec& l) { return (forward(head, l) - alpha_lead).squaredNorm(); };

  InversionResult best;
  best.objective = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < init_candidates.rows(); ++c) {
    Vec l = init_candidates.row(c).transpose();
    double f = objective(l);
    std::vector<double> hist{f};
    double step = lr;
    for (int it = 0; it < iters && std::isfinite(f) && f > 0.0; ++it) {
      const Vec r = forward(head, l) - alpha_lead;
      const Vec g = 2.0 * jacobian(head, l).transpose() * r;
      if (g.squaredNorm() == 0.0) break;
      bool accepted = false;
      while (step > 1e-20) {
        const Vec trial = l - step * g;
        const double ft = objective(trial);
        if (std::isfinite(ft) && ft < f) {
          l = trial;
          f = ft;
          accepted = true;
          step *= 2.0;
          break;
        }
        step *= 0.5;
      }
      if (!accepted) break;
      hist.push_back(f);
    }
    best.objectives.push_back(std::isfinite(f) ? f : std::numeric_limits<double>::quiet_NaN());
    if (std::isfinite(f) && f < best.objective) {
      best.objective = f;
      best.latent = l;
      best.candidate = static_cast<int>(c);
      best.history = std::move(hist);
    }
  }
  if (best.candidate < 0)
    throw NumericalFailure("decoder_invert: all " + std::to_string(init_candidates.rows()) +
                           " descents produced non-finite objectives");
  return best;
}

void Autoencoder::validate() const {
  if (encoder.output_dim() != decoder.input_dim())
    throw InvalidInput("autoencoder: bottleneck widths differ");
  if (encoder.input_dim() != decoder.output_dim())
    throw InvalidInput("autoencoder: decoder does not return to the input width");
}

Autoencoder make_autoencoder(int input_dim, const std::vector<int>& hidden, int bottleneck,
                             std::uint64_t seed) {
  std::vector<int> enc{input_dim};
  enc.insert(enc.end(), hidden.begin(), hidden.end());
  enc.push_back(bottleneck);
  std::vector<int> dec(enc.rbegin(), enc.rend());
  Autoencoder ae{Mlp::glorot(enc, derive_seed(seed, 10)), Mlp::glorot(dec, derive_seed(seed, 11))};
  ae.encoder.seed = seed;
  ae.decoder.seed = seed;
  return ae;
}

Vec encode(const Autoencoder& ae, const Vec& x) { return forward(ae.encoder, x); }
Vec decode(const Autoencoder& ae, const Vec& latent) { return forward(ae.decoder, latent); }
Mat encode_batch(const Autoencoder& ae, const Mat& x) { return forward_batch(ae.encoder, x); }
Mat decode_batch(const Autoencoder& ae, const Mat& latents) { return forward_batch(ae.decoder, latents); }

AutoencoderTrainResult train_autoencoder(const Autoencoder& ae, const Mat& x, const TrainConfig& cfg) {
  cfg.validate();
  ae.validate();
  if (x.cols() != ae.input_dim()) throw InvalidInput("train_autoencoder: data width mismatch");
  AutoencoderTrainResult result{ae, {}};
  if (cfg.epochs == 0) return result;

  const Split split = split_rows(static_cast<int>(x.rows()), cfg);
  const Mat xt = select_rows(x, split.train), xv = select_rows(x, split.val);
  Autoencoder& model = result.model;
  if (cfg.standardize) {
    const Scaling s = Scaling::fit(xt);
    model.encoder.set_input_scaling(s);
    model.decoder.set_output_scaling(s);
  }
  // The latent is the raw encoder core output.
  model.encoder.set_output_scaling(Scaling::identity(model.bottleneck_dim()));
  model.decoder.set_input_scaling(Scaling::identity(model.bottleneck_dim()));
  const Mat xs = to_standard(model.encoder.input_scaling(), xt.transpose());
  const Mat targets = to_standard(model.decoder.output_scaling(), xt.transpose());

  Adam adam_enc(model.encoder), adam_dec(model.decoder);
  std::mt19937_64 rng(derive_seed(cfg.seed, 2));
  std::vector<int> order(split.train.size());
  std::iota(order.begin(), order.end(), 0);
  EarlyStop<Autoencoder> stop;
  stop.patience = cfg.patience;
  MlpGradient ge = zero_gradient(model.encoder.layers());
  MlpGradient gd = zero_gradient(model.decoder.layers());
  const double width = static_cast<double>(model.input_dim());
  auto recon_mse = [&](const Mat& data) {
    return mean_sq(decode_batch(model, encode_batch(model, data)), data);
  };

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (size_t b = 0; b < order.size(); b += cfg.batch_size) {
      const size_t e = std::min(order.size(), b + static_cast<size_t>(cfg.batch_size));
      const Mat xb = select_cols(xs, order, b, e);
      const Mat tb = select_cols(targets, order, b, e);
      Cache ce, cd;
      const Mat latent = core_forward(model.encoder.layers(), xb, &ce);
      const Mat o = core_forward(model.decoder.layers(), latent, &cd);
      const Mat delta = (2.0 / (static_cast<double>(e - b) * width)) * (o - tb);
      const Mat dlatent = core_backward(model.decoder.layers(), cd, delta, gd);
      core_backward(model.encoder.layers(), ce, dlatent, ge);
      adam_dec.step(model.decoder, gd, cfg);
      adam_enc.step(model.encoder, ge, cfg);
    }
    EpochLoss loss{epoch, recon_mse(xt), std::nullopt};
    if (xv.rows() > 0) loss.validation_mse = recon_mse(xv);
    if (!std::isfinite(loss.train_mse) || (loss.validation_mse && !std::isfinite(*loss.validation_mse)))
      throw TrainingDiverged(epoch);
    result.history.push_back(loss);
    if (stop.update(model, loss.validation_mse)) break;
  }
  if (stop.best_model) model = *stop.best_model;
  return result;
}

}  // namespace aimrom
