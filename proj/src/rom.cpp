#include "aimrom/rom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "aimrom/error.hpp"
#include "aimrom/serialize.hpp"
#include "aimrom/store.hpp"

namespace aimrom {

Vec LearnedField::operator()(const Vec& a) const {
  if (a.size() != dim) throw InvalidInput("learned field: state has wrong dimension");
  Vec out = forward(net, a);
  if (kind == FieldKind::gray_box) out += (*base)(a);
  return out;
}

VectorField LearnedField::as_vector_field() const {
  validate();
  LearnedField copy = *this;
  return {dim, [copy](const Vec& a) { return copy(a); }};
}

void LearnedField::validate() const {
  if (net.input_dim() != dim || net.output_dim() != dim)
    throw InvalidInput("learned field: net must map R^dim to R^dim");
  if (kind == FieldKind::gray_box && (!base || base->dim != dim))
    throw InvalidInput("gray-box field needs a base field of the same dimension");
}

DerivativeData projected_derivatives(const Mat& full_states, const VectorField& full_field, int n_low) {
  if (full_states.cols() != full_field.dim) throw InvalidInput("projected_derivatives: state width mismatch");
  if (n_low < 1 || n_low > full_field.dim) throw InvalidInput("projected_derivatives: bad n_low");
  DerivativeData d{full_states.leftCols(n_low), Mat(full_states.rows(), n_low)};
  for (Eigen::Index i = 0; i < full_states.rows(); ++i)
    d.derivatives.row(i) = full_field(full_states.row(i).transpose()).head(n_low).transpose();
  return d;
}

DerivativeData finite_difference_derivatives(const Trajectory& traj, int n_low) {
  const int n = traj.size();
  if (n < 3) throw InvalidInput("finite differences need at least 3 trajectory points");
  if (n_low < 1 || n_low > traj.dim()) throw InvalidInput("finite_difference_derivatives: bad n_low");
  const Mat x = traj.states.leftCols(n_low);
  Mat dx(n, n_low);
  const auto& t = traj.times;
  for (int i = 1; i + 1 < n; ++i) dx.row(i) = (x.row(i + 1) - x.row(i - 1)) / (t[i + 1] - t[i - 1]);
  dx.row(0) = (-3.0 * x.row(0) + 4.0 * x.row(1) - x.row(2)) / (t[2] - t[0]);
  dx.row(n - 1) = (3.0 * x.row(n - 1) - 4.0 * x.row(n - 2) + x.row(n - 3)) / (t[n - 1] - t[n - 3]);
  return {x, dx};
}

namespace {

NetSpec spec_of(int width, int depth) {
  NetSpec s;
  s.hidden.assign(depth, width);
  return s;
}

Mlp build_net(int in, const NetSpec& spec, int out) {
  std::vector<int> sizes{in};
  sizes.insert(sizes.end(), spec.hidden.begin(), spec.hidden.end());
  sizes.push_back(out);
  return Mlp::glorot(sizes, spec.train.seed);
}

}  // namespace

NetSpec gray_box_net_spec() { return spec_of(95, 6); }
NetSpec latent_map_net_spec() { return spec_of(80, 5); }
NetSpec pod_rhs_net_spec() { return spec_of(20, 2); }
NetSpec default_net_spec() { return spec_of(64, 4); }

TrainResult learn_regression(const Mat& x, const Mat& y, const NetSpec& spec) {
  if (x.rows() != y.rows()) throw InvalidInput("regression: inputs and targets are not aligned");
  return train(build_net(static_cast<int>(x.cols()), spec, static_cast<int>(y.cols())), x, y, spec.train);
}

LearnedFieldFit learn_black_box(const DerivativeData& data, const NetSpec& spec) {
  if (data.states.cols() != data.derivatives.cols()) throw InvalidInput("black-box: state/derivative widths differ");
  TrainResult tr = learn_regression(data.states, data.derivatives, spec);
  LearnedFieldFit fit;
  fit.field.kind = FieldKind::black_box;
  fit.field.dim = static_cast<int>(data.states.cols());
  fit.field.net = std::move(tr.model);
  fit.history = std::move(tr.history);
  return fit;
}

LearnedFieldFit learn_gray_box(const DerivativeData& data, const VectorField& base, const NetSpec& spec) {
  if (data.states.cols() != base.dim || data.derivatives.cols() != base.dim)
    throw InvalidInput("gray-box: base dimension differs from the data");
  Mat residual = data.derivatives;
  for (Eigen::Index i = 0; i < residual.rows(); ++i)
    residual.row(i) -= base(data.states.row(i).transpose()).transpose();
  TrainResult tr = learn_regression(data.states, residual, spec);
  LearnedFieldFit fit;
  fit.field.kind = FieldKind::gray_box;
  fit.field.base = base;
  fit.field.dim = base.dim;
  fit.field.net = std::move(tr.model);
  fit.history = std::move(tr.history);
  return fit;
}

TrainResult learn_latent_map(const Mat& alpha_lead, const Mat& latents, const NetSpec& spec) {
  return learn_regression(alpha_lead, latents, spec);
}

std::string to_string(ModelKind v) { return v == ModelKind::chafee ? "chafee" : "ks"; }

std::string to_string(LatentRoute v) {
  switch (v) {
    case LatentRoute::fourier: return "fourier";
    case LatentRoute::pod: return "pod";
    case LatentRoute::autoencoder: return "autoencoder";
    case LatentRoute::dmaps: return "dmaps";
  }
  return "?";
}

std::string to_string(Dynamics v) {
  switch (v) {
    case Dynamics::truncated: return "truncated";
    case Dynamics::black_box: return "black-box";
    case Dynamics::gray_box: return "gray-box";
  }
  return "?";
}

std::string to_string(ClosureKind v) {
  switch (v) {
    case ClosureKind::none: return "none";
    case ClosureKind::euler_galerkin: return "euler-galerkin";
    case ClosureKind::mlp: return "mlp";
    case ClosureKind::double_dmaps: return "double-dmaps";
    case ClosureKind::decoder_inversion: return "decoder-inversion";
  }
  return "?";
}

ModelKind parse_model_kind(const std::string& s) {
  if (s == "chafee") return ModelKind::chafee;
  if (s == "ks") return ModelKind::ks;
  throw InvalidInput("unknown pipeline model '" + s + "' (expected chafee or ks)");
}

LatentRoute parse_latent_route(const std::string& s) {
  for (auto v : {LatentRoute::fourier, LatentRoute::pod, LatentRoute::autoencoder, LatentRoute::dmaps})
    if (to_string(v) == s) return v;
  throw InvalidInput("unknown latent route '" + s + "' (expected fourier, pod, autoencoder or dmaps)");
}

Dynamics parse_dynamics(const std::string& s) {
  for (auto v : {Dynamics::truncated, Dynamics::black_box, Dynamics::gray_box})
    if (to_string(v) == s) return v;
  throw InvalidInput("unknown dynamics '" + s + "' (expected truncated, black-box or gray-box)");
}

ClosureKind parse_closure_kind(const std::string& s) {
  for (auto v : {ClosureKind::none, ClosureKind::euler_galerkin, ClosureKind::mlp, ClosureKind::double_dmaps,
                 ClosureKind::decoder_inversion})
    if (to_string(v) == s) return v;
  throw InvalidInput("unknown closure '" + s +
                     "' (expected none, euler-galerkin, mlp, double-dmaps or decoder-inversion)");
}

int PipelineConfig::n_full() const { return model == ModelKind::chafee ? 3 : 8; }

int PipelineConfig::n_low() const {
  if (route == LatentRoute::pod) return pod_low;
  return model == ModelKind::chafee ? 2 : 3;
}

int PipelineConfig::n_closure_total() const { return route == LatentRoute::pod ? pod_modes : n_full(); }

BasisSpec PipelineConfig::full_basis() const { return model_basis(to_string(model), n_full()); }

std::string PipelineConfig::alias(const std::string& role) const {
  auto it = aliases.find(role);
  return it == aliases.end() ? role : it->second;
}

std::vector<std::string> PipelineConfig::required_roles() const {
  std::vector<std::string> roles;
  if (dynamics != Dynamics::truncated) roles.push_back("rhs");
  if (route == LatentRoute::pod) roles.push_back("pod");
  if (closure == ClosureKind::mlp && (route == LatentRoute::fourier || route == LatentRoute::pod))
    roles.push_back("closure");
  if (route == LatentRoute::autoencoder && closure != ClosureKind::none) roles.push_back("autoencoder");
  if (closure == ClosureKind::mlp && route == LatentRoute::autoencoder) roles.push_back("latent_map");
  if (closure == ClosureKind::double_dmaps) {
    roles.push_back("latent_map");
    roles.push_back("lift");
  }
  return roles;
}

std::string PipelineConfig::label() const {
  return to_string(model) + "/" + to_string(route) + "/" + to_string(dynamics) + "/" + to_string(closure);
}

void PipelineConfig::validate() const {
  auto reject = [&](const std::string& why) { throw InvalidInput("pipeline " + label() + ": " + why); };
  if (!(nu > 0)) reject("nu must be positive");
  if (!(final_time > 0)) reject("final_time must be positive");
  if (!(dt > 0)) reject("dt must be positive");
  if (initial_condition.size() != n_full())
    reject("initial_condition needs " + std::to_string(n_full()) + " coefficients, got " +
           std::to_string(initial_condition.size()));
  if (!initial_condition.allFinite()) reject("initial_condition is not finite");
  if (grid_nodes < 4 * n_full() + 1) reject("grid_nodes too small for the full basis");
  if (series_points < 0) reject("series_points must be >= 0");
  if (closure == ClosureKind::euler_galerkin && !(model == ModelKind::chafee && route == LatentRoute::fourier))
    reject("euler-galerkin closure requires the chafee model on the fourier route");
  if ((closure == ClosureKind::double_dmaps) != (route == LatentRoute::dmaps && closure != ClosureKind::none))
    reject("double-dmaps closure and the dmaps route go together");
  if (closure == ClosureKind::decoder_inversion && route != LatentRoute::autoencoder)
    reject("decoder-inversion closure requires the autoencoder route");
  if (route == LatentRoute::pod) {
    if (dynamics != Dynamics::black_box) reject("the pod route integrates a learned black-box field only");
    if (closure != ClosureKind::mlp && closure != ClosureKind::none) reject("the pod route supports mlp or none closures");
    if (!(pod_low >= 1 && pod_low < pod_modes)) reject("need 1 <= pod_low < pod_modes");
  }
  if (closure == ClosureKind::decoder_inversion &&
      (inversion_candidates < 1 || inversion_iters < 0 || !(inversion_lr > 0)))
    reject("decoder-inversion needs candidates >= 1, iters >= 0, lr > 0");
}

PipelineArtifacts load_artifacts(const PipelineConfig& cfg, const ModelStore& store) {
  cfg.validate();
  PipelineArtifacts art;
  const auto roles = cfg.required_roles();
  // Fail on every missing alias before parsing anything.
  for (const auto& role : roles) store.entry(cfg.alias(role));
  auto take = [&](const std::string& role, const std::string& kind) -> const Json& {
    const std::string a = cfg.alias(role);
    art.hashes[a] = store.entry(a).hash;
    return store.model(a, kind);
  };
  auto need = [&](bool ok, const std::string& why) {
    if (!ok) throw InvalidInput("pipeline " + cfg.label() + ": " + why);
  };
  for (const auto& role : roles) {
    if (role == "rhs") {
      art.rhs = learned_field_from_json(take(role, "learned-field"));
      need(art.rhs->dim == cfg.n_low(), "stored field has dimension " + std::to_string(art.rhs->dim));
      need((art.rhs->kind == FieldKind::gray_box) == (cfg.dynamics == Dynamics::gray_box),
           "stored field kind does not match the requested dynamics");
      if (art.rhs->base_spec) {
        need(art.rhs->base_spec->model == to_string(cfg.model), "gray-box base belongs to another model");
        need(art.rhs->base_spec->params.nu == cfg.nu, "gray-box base was built for a different nu");
      }
    } else if (role == "pod") {
      art.pod = pod_from_json(take(role, "pod"));
      need(art.pod->ambient_dim() == cfg.grid_nodes, "POD ambient dimension differs from grid_nodes");
      need(art.pod->n_modes() >= cfg.pod_modes, "POD model has fewer than pod_modes modes");
    } else if (role == "closure") {
      art.closure_net = mlp_from_json(take(role, "mlp"));
      need(art.closure_net->input_dim() == cfg.n_low() &&
               art.closure_net->output_dim() == cfg.n_closure_total() - cfg.n_low(),
           "closure net has the wrong shape");
    } else if (role == "autoencoder") {
      art.autoencoder = autoencoder_from_json(take(role, "autoencoder"), &art.candidate_latents);
      need(art.autoencoder->input_dim() == cfg.n_full(), "autoencoder width differs from the full model");
    } else if (role == "latent_map") {
      art.latent_map = mlp_from_json(take(role, "mlp"));
      need(art.latent_map->input_dim() == cfg.n_low(), "latent map input width differs from n_low");
    } else if (role == "lift") {
      art.lift = gh_from_json(take(role, "geometric-harmonics"));
      need(art.lift->output_dim() == cfg.n_full(), "lift output width differs from the full model");
    }
  }
  if (art.latent_map && art.autoencoder)
    need(art.latent_map->output_dim() == art.autoencoder->bottleneck_dim(), "latent map and bottleneck widths differ");
  if (art.latent_map && art.lift)
    need(art.latent_map->output_dim() == art.lift->train_inputs.cols(), "latent map and lift widths differ");
  return art;
}

VectorField full_model_field(const PipelineConfig& cfg) {
  return make_field(to_string(cfg.model), cfg.n_full(), ModelParams{cfg.nu, 1.0});
}

VectorField build_reduced_field(const PipelineConfig& cfg, const PipelineArtifacts& art) {
  if (cfg.dynamics == Dynamics::truncated)
    return make_field(to_string(cfg.model), cfg.n_low(), ModelParams{cfg.nu, 1.0});
  if (!art.rhs) throw MissingArtifact("pipeline " + cfg.label() + ": learned field not loaded");
  return art.rhs->as_vector_field();
}

Closure build_closure(const PipelineConfig& cfg, const PipelineArtifacts& art) {
  const int n_low = cfg.n_low();
  const int n_high = cfg.n_closure_total() - n_low;
  auto missing = [&](const char* what) {
    return MissingArtifact("pipeline " + cfg.label() + ": " + what + " not loaded");
  };
  switch (cfg.closure) {
    case ClosureKind::none:
      return zero_closure(n_low, n_high);
    case ClosureKind::euler_galerkin:
      return euler_galerkin_closure(chafee_euler_galerkin(cfg.nu));
    case ClosureKind::mlp: {
      if (cfg.route == LatentRoute::autoencoder) {
        if (!art.latent_map || !art.autoencoder) throw missing("latent map / autoencoder");
        const Mlp map = *art.latent_map;
        const Autoencoder ae = *art.autoencoder;
        return {n_low, n_high, [map, ae, n_high](const Vec& p) -> Vec {
                  return decode(ae, forward(map, p)).tail(n_high);
                }, "mlp"};
      }
      if (!art.closure_net) throw missing("closure net");
      const Mlp net = *art.closure_net;
      return {n_low, n_high, [net](const Vec& p) { return forward(net, p); }, "mlp"};
    }
    case ClosureKind::double_dmaps: {
      if (!art.latent_map || !art.lift) throw missing("latent map / lift");
      const Mlp map = *art.latent_map;
      const GeometricHarmonics gh = *art.lift;
      return {n_low, n_high, [map, gh, n_high](const Vec& p) -> Vec {
                return gh_extend(gh, forward(map, p)).tail(n_high);
              }, "double-dmaps"};
    }
    case ClosureKind::decoder_inversion: {
      if (!art.autoencoder) throw missing("autoencoder");
      const Mat& pool = art.candidate_latents;
      if (pool.rows() < 1) throw InvalidInput("decoder-inversion: the autoencoder stores no candidate latents");
      std::vector<int> idx(pool.rows());
      std::iota(idx.begin(), idx.end(), 0);
      std::mt19937_64 rng(derive_seed(cfg.seed, 7));
      std::shuffle(idx.begin(), idx.end(), rng);
      const int n_cand = std::min<int>(cfg.inversion_candidates, static_cast<int>(idx.size()));
      Mat cand(n_cand, pool.cols());
      for (int i = 0; i < n_cand; ++i) cand.row(i) = pool.row(idx[i]);
      const Mlp decoder = art.autoencoder->decoder;
      const int iters = cfg.inversion_iters;
      const double lr = cfg.inversion_lr;
      return {n_low, n_high, [decoder, cand, iters, lr, n_high](const Vec& p) -> Vec {
                const InversionResult inv = decoder_invert(decoder, p, cand, iters, lr);
                return forward(decoder, inv.latent).tail(n_high);
              }, "decoder-inversion"};
    }
  }
  throw InvalidInput("unhandled closure kind");
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const ModelStore& store) {
  return run_pipeline(cfg, load_artifacts(cfg, store));
}

PipelineResult run_pipeline(const PipelineConfig& cfg, const PipelineArtifacts& art) {
  cfg.validate();
  const BasisSpec basis = cfg.full_basis();
  const Grid grid = Grid::for_basis(basis, cfg.grid_nodes);
  const VectorField reduced_field = build_reduced_field(cfg, art);
  const Closure closure = build_closure(cfg, art);
  const bool pod_route = cfg.route == LatentRoute::pod;
  if (pod_route && !art.pod) throw MissingArtifact("pipeline " + cfg.label() + ": POD model not loaded");
  const int n_low = cfg.n_low();
  const int n_total = cfg.n_closure_total();

  Trajectory truth = rk4(full_model_field(cfg), cfg.initial_condition, cfg.final_time, cfg.dt);
  Vec c0 = pod_route ? pod_project(*art.pod, reconstruct(basis, cfg.initial_condition, grid), n_low)
                     : Vec(cfg.initial_condition.head(n_low));
  Trajectory reduced = rk4(reduced_field, c0, cfg.final_time, cfg.dt);

  auto coefficients = [&](const Vec& low, bool corrected) {
    Vec c = Vec::Zero(n_total);
    c.head(n_low) = low;
    if (corrected) c.tail(n_total - n_low) = closure(low);
    return c;
  };
  auto field_of = [&](const Vec& c) -> Vec {
    if (pod_route) return pod_lift(*art.pod, c, n_total);
    Vec full = Vec::Zero(cfg.n_full());
    full.head(c.size()) = c;
    return reconstruct(basis, full, grid);
  };

  const Vec low_final = reduced.final_state();
  const Vec corrected = coefficients(low_final, true);
  PipelineResult r{pod_route ? project(field_of(corrected), grid, basis) : SpectralState(basis, corrected),
                   {}, {}, grid.points(), {}, {}, {}, {}, std::nullopt, art.hashes};
  r.u_truth = reconstruct(basis, truth.final_state(), grid);
  r.u_raw = field_of(coefficients(low_final, false));
  r.u_corrected = field_of(corrected);
  r.metrics.mape = mape(r.u_corrected, r.u_truth);
  r.metrics.mse = mse(r.u_corrected, r.u_truth);
  r.metrics.raw_mape = mape(r.u_raw, r.u_truth);
  r.metrics.raw_mse = mse(r.u_raw, r.u_truth);

  if (cfg.series_points > 0) {
    const int last = reduced.size() - 1;
    const int pts = std::min(cfg.series_points, last + 1);
    int prev = -1;
    for (int s = 0; s < pts; ++s) {
      const int i = pts == 1 ? last : static_cast<int>(std::llround(static_cast<double>(s) * last / (pts - 1)));
      if (i == prev) continue;
      prev = i;
      r.metrics.series_times.push_back(reduced.times[i]);
      r.metrics.percent_error_series.push_back(
          mape(field_of(coefficients(reduced.state(i), true)), reconstruct(basis, truth.state(i), grid)));
    }
  }
  if (!pod_route) r.errors = decompose_errors(truth, reduced, closure, basis, grid);
  r.truth = std::move(truth);
  r.reduced = std::move(reduced);
  return r;
}

}  // namespace aimrom
