#include "aimrom/cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <random>
#include <sstream>

#include "aimrom/config.hpp"
#include "aimrom/ensemble.hpp"
#include "aimrom/error.hpp"
#include "aimrom/io.hpp"
#include "aimrom/plot.hpp"
#include "aimrom/serialize.hpp"
#include "aimrom/store.hpp"

namespace aimrom::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kToolVersion = "aimrom 1.0";

struct ModelDefaults {
  int modes;
  double nu;
  double dt;
};

ModelDefaults defaults_for(const std::string& model) {
  if (model == "chafee") return {3, 0.16, 1e-3};
  if (model == "ks") return {8, 33.0, 1e-5};
  return {2, 0.0, 1e-3};  // toy
}

std::vector<std::string> coefficient_names(const std::string& model, int n) {
  if (model == "toy") return {"x", "y"};
  std::vector<std::string> h;
  for (int k = 1; k <= n; ++k) h.push_back("a" + std::to_string(k));
  return h;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) q += (c == '"') ? std::string("\"\"") : std::string(1, c);
  return q + "\"";
}

// A run: effective config, output directory, and everything the manifest records.
struct Run {
  std::string command;
  Json config;
  std::shared_ptr<ConfigSource> source;
  fs::path out;
  std::ostream& log;
  Json inputs = Json::object();
  Json models = Json::object();
  std::map<std::string, std::string> outputs;  // file → sha256

  void write(const std::string& name, const std::string& content) {
    write_file(out / name, content);
    outputs[name] = sha256_hex(content);
  }

  void input(const fs::path& path) { inputs[path.string()] = sha256_file(path); }

  void manifest(std::uint64_t seed) {
    Json j{{"schema", "aimrom.manifest.v1"}, {"tool", kToolVersion}, {"command", command},
           {"seed", seed},   {"config", config},      {"inputs", inputs},
           {"models", models}, {"outputs", outputs}};
    write_file(out / "manifest.json", j.dump(2) + "\n");
  }
};

Mat coefficient_block(const CsvTable& t, const std::vector<std::string>& names, const std::string& file) {
  Mat m(t.values.rows(), static_cast<Eigen::Index>(names.size()));
  for (size_t i = 0; i < names.size(); ++i) {
    const int c = t.column(names[i]);
    if (c < 0) throw ConfigError("dataset " + file + " has no column '" + names[i] + "'");
    m.col(static_cast<Eigen::Index>(i)) = t.values.col(c);
  }
  return m;
}

int count_coefficients(const CsvTable& t) {
  int n = 0;
  while (t.column("a" + std::to_string(n + 1)) >= 0) ++n;
  return n;
}

TrainConfig read_train_config(ConfigSection s, std::uint64_t seed, int default_epochs) {
  TrainConfig c;
  c.learning_rate = s.number("learning_rate", c.learning_rate);
  c.beta1 = s.number("beta1", c.beta1);
  c.beta2 = s.number("beta2", c.beta2);
  c.eps_hat = s.number("eps_hat", c.eps_hat);
  c.epochs = s.integer("epochs", default_epochs);
  c.batch_size = s.integer("batch_size", c.batch_size);
  c.seed = s.seed("seed", seed);
  c.validation_fraction = s.number("validation_fraction", c.validation_fraction);
  c.patience = s.integer("patience", c.patience);
  c.standardize = s.boolean("standardize", c.standardize);
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config 'net': ") + e.what());
  }
  return c;
}

NetSpec read_net(ConfigSection& parent, const NetSpec& defaults, std::uint64_t seed) {
  ConfigSection s = parent.section("net");
  NetSpec spec;
  spec.hidden = s.integers("hidden", defaults.hidden);
  for (int h : spec.hidden)
    if (h < 1) s.fail("hidden", "must contain positive widths");
  spec.train = read_train_config(s, seed, 200);
  return spec;
}

std::string loss_csv(const std::vector<EpochLoss>& history) {
  std::string s = "epoch,train_mse,validation_mse\n";
  for (const auto& e : history)
    s += std::to_string(e.epoch) + "," + format_double(e.train_mse) + "," +
         (e.validation_mse ? format_double(*e.validation_mse) : std::string()) + "\n";
  return s;
}

Json history_summary(const std::vector<EpochLoss>& h) {
  Json j{{"epochs_run", h.size()}};
  if (!h.empty()) {
    j["final_train_mse"] = h.back().train_mse;
    if (h.back().validation_mse) j["final_validation_mse"] = *h.back().validation_mse;
  }
  return j;
}

Mat sample_rows(const Mat& m, int n, std::uint64_t seed) {
  std::vector<int> idx(m.rows());
  std::iota(idx.begin(), idx.end(), 0);
  if (n < m.rows()) {
    std::mt19937_64 rng(seed);
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(n);
    std::sort(idx.begin(), idx.end());
  }
  Mat out(static_cast<Eigen::Index>(idx.size()), m.cols());
  for (size_t i = 0; i < idx.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(idx[i]);
  return out;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(Run& run, std::uint64_t seed) {
  ConfigSection c(run.config, "", run.source);
  const std::string model = c.choice("model", {"chafee", "ks", "toy"});
  const ModelDefaults d = defaults_for(model);
  const int modes = c.integer("modes", d.modes);
  ModelParams params;
  if (model == "toy") params.epsilon = c.number("epsilon", 0.01);
  else params.nu = c.number("nu", d.nu);
  const Vec ic = c.vector("initial_condition");
  const double t_end = c.number("final_time");
  const double dt = c.number("dt", d.dt);
  const int grid_nodes = c.integer("grid_nodes", Grid::kDefaultNodes);
  const int stride = c.integer("field_stride", 1);
  c.seed("seed", seed);
  c.finish();
  if (stride < 1) c.fail("field_stride", "must be >= 1");

  VectorField field;
  try {
    field = make_field(model, modes, params);
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (ic.size() != field.dim)
    c.fail("initial_condition", "needs " + std::to_string(field.dim) + " entries");

  const auto t0 = std::chrono::steady_clock::now();
  const Trajectory tr = rk4(field, ic, t_end, dt);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::vector<std::string> header{"t"};
  for (const auto& n : coefficient_names(model, modes)) header.push_back(n);
  Mat rows(tr.size(), modes + 1);
  rows.col(0) = Eigen::Map<const Vec>(tr.times.data(), tr.size());
  rows.rightCols(modes) = tr.states;
  run.write("trajectory.csv", csv_string(header, rows));

  if (model != "toy") {
    const BasisSpec basis = model_basis(model, modes);
    const Grid grid = Grid::for_basis(basis, grid_nodes);
    const Mat synth = synthesis_matrix(basis, grid);
    std::vector<int> keep;
    for (int i = 0; i < tr.size(); ++i)
      if (i % stride == 0 || i == tr.size() - 1) keep.push_back(i);
    Mat f(static_cast<Eigen::Index>(keep.size()), grid.size() + 1);
    for (size_t r = 0; r < keep.size(); ++r) {
      f(static_cast<Eigen::Index>(r), 0) = tr.times[keep[r]];
      f.row(static_cast<Eigen::Index>(r)).tail(grid.size()) = (synth * tr.state(keep[r])).transpose();
    }
    run.write("field.csv", csv_string(field_header(grid.points()), f));
  }

  run.log << "simulate " << model << " (" << modes << " modes): " << tr.size() << " states, t_end="
          << format_double(tr.final_time()) << "\nfinal state:";
  const Vec fin = tr.final_state();
  for (Eigen::Index k = 0; k < fin.size(); ++k) run.log << " " << format_double(fin[k]);
  run.log << "\nwall time: " << wall << " s\n";
  return kOk;
}

// ---------------------------------------------------------------- sample

int cmd_sample(Run& run, std::uint64_t seed) {
  ConfigSection c(run.config, "", run.source);
  const std::string model = c.choice("model", {"chafee", "ks", "toy"});
  const ModelDefaults d = defaults_for(model);
  const int modes = c.integer("modes", d.modes);
  ModelParams params;
  if (model == "toy") params.epsilon = c.number("epsilon", 0.01);
  else params.nu = c.number("nu", d.nu);
  const double dt = c.number("dt", d.dt);
  const std::uint64_t top_seed = c.seed("seed", seed);
  const bool fields = model != "toy" && c.boolean("fields", false);
  const int grid_nodes = c.integer("grid_nodes", Grid::kDefaultNodes);
  ConfigSection s = c.section("sampler");
  SamplerConfig sc;
  sc.n_trajectories = s.integer("n_trajectories");
  sc.ic_box = s.box("ic_box", modes, std::make_pair(-1.0, 1.0));
  sc.transient_time = s.number("transient_time", 0.0);
  sc.record_time = s.number("record_time");
  sc.snapshot_stride = s.integer("snapshot_stride", 1);
  sc.seed = s.seed("seed", top_seed);
  s.finish();
  c.finish();
  VectorField field;
  try {
    field = make_field(model, modes, params);
    sc.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  const Dataset ds = sample_attractor(field, sc, dt);
  std::vector<std::string> header{"trajectory_id", "t"};
  for (const auto& n : coefficient_names(model, modes)) header.push_back(n);
  Mat rows(ds.size(), modes + 2);
  for (int i = 0; i < ds.size(); ++i) {
    rows(i, 0) = ds.trajectory_id[i];
    rows(i, 1) = ds.time[i];
  }
  rows.rightCols(modes) = ds.snapshots;
  run.write("dataset.csv", csv_string(header, rows));

  std::vector<std::string> ic_header{"trajectory_id"};
  for (const auto& n : coefficient_names(model, modes)) ic_header.push_back(n);
  Mat ics(ds.initial_conditions.rows(), modes + 1);
  for (Eigen::Index i = 0; i < ics.rows(); ++i) ics(i, 0) = static_cast<double>(i);
  ics.rightCols(modes) = ds.initial_conditions;
  run.write("initial_conditions.csv", csv_string(ic_header, ics));

  if (!ds.failures.empty()) {
    std::string f = "trajectory_id,time,message\n";
    for (const auto& e : ds.failures)
      f += std::to_string(e.trajectory_id) + "," + format_double(e.time) + "," + csv_field(e.message) + "\n";
    run.write("failures.csv", f);
  }
  if (fields) {
    const BasisSpec basis = model_basis(model, modes);
    const Grid grid = Grid::for_basis(basis, grid_nodes);
    Mat f(ds.size(), grid.size() + 1);
    f.col(0) = rows.col(1);
    f.rightCols(grid.size()) = ds.snapshots * synthesis_matrix(basis, grid).transpose();
    run.write("fields.csv", csv_string(field_header(grid.points()), f));
  }
  run.log << "sample " << model << ": " << ds.size() << " snapshots from "
          << sc.n_trajectories - static_cast<int>(ds.failures.size()) << " of " << sc.n_trajectories
          << " trajectories";
  if (!ds.failures.empty()) run.log << " (" << ds.failures.size() << " blew up, see failures.csv)";
  run.log << "\n";
  return kOk;
}

// ---------------------------------------------------------------- train

struct TrainData {
  Mat states;
  std::vector<int> trajectory_id;
  std::vector<double> time;
};

TrainData load_dataset(Run& run, ConfigSection& c, int n_full, const std::string& model) {
  const fs::path path = c.text("data");
  if (!fs::exists(path)) throw MissingArtifact("dataset " + path.string() + " does not exist");
  run.input(path);
  const CsvTable t = read_csv(path);
  const int n = model == "toy" ? 2 : (n_full > 0 ? n_full : count_coefficients(t));
  if (n == 0) throw ConfigError("dataset " + path.string() + " has no coefficient columns");
  TrainData d;
  d.states = coefficient_block(t, coefficient_names(model, n), path.string());
  if (t.column("trajectory_id") >= 0)
    for (Eigen::Index i = 0; i < t.values.rows(); ++i)
      d.trajectory_id.push_back(static_cast<int>(t.values(i, t.column("trajectory_id"))));
  if (t.column("t") >= 0)
    for (Eigen::Index i = 0; i < t.values.rows(); ++i) d.time.push_back(t.values(i, t.column("t")));
  if (d.states.rows() < 2) throw ConfigError("dataset " + path.string() + " has fewer than 2 rows");
  return d;
}

Json data_provenance(const Run& run) { return run.inputs; }

// Finite differences along each contiguous trajectory of coordinate rows.
DerivativeData fd_by_trajectory(const TrainData& d, const Mat& coords) {
  if (d.trajectory_id.empty() || d.time.empty())
    throw ConfigError("finite-difference derivatives need trajectory_id and t columns");
  std::vector<Vec> xs, dxs;
  size_t start = 0;
  const size_t n = d.time.size();
  while (start < n) {
    size_t end = start + 1;
    while (end < n && d.trajectory_id[end] == d.trajectory_id[start]) ++end;
    if (end - start >= 3) {
      Trajectory tr;
      tr.times.assign(d.time.begin() + static_cast<long>(start), d.time.begin() + static_cast<long>(end));
      tr.states = coords.middleRows(static_cast<Eigen::Index>(start), static_cast<Eigen::Index>(end - start));
      const DerivativeData part = finite_difference_derivatives(tr, static_cast<int>(coords.cols()));
      for (Eigen::Index i = 0; i < part.states.rows(); ++i) {
        xs.push_back(part.states.row(i).transpose());
        dxs.push_back(part.derivatives.row(i).transpose());
      }
    }
    start = end;
  }
  if (xs.empty()) throw ConfigError("finite-difference derivatives: no trajectory has 3 or more rows");
  return {rows_to_matrix(xs), rows_to_matrix(dxs)};
}

int cmd_train(Run& run, std::uint64_t seed) {
  ConfigSection c(run.config, "", run.source);
  const std::string kind =
      c.choice("kind", {"closure", "black-box", "gray-box", "autoencoder", "latent-map", "dmaps", "double-dmaps", "pod"});
  static const std::map<std::string, std::string> default_alias{
      {"closure", "closure"},       {"black-box", "rhs"}, {"gray-box", "rhs"},       {"autoencoder", "autoencoder"},
      {"latent-map", "latent_map"}, {"dmaps", "dmaps"},   {"double-dmaps", "lift"}, {"pod", "pod"}};
  const std::string alias = c.text("alias", default_alias.at(kind));
  const fs::path store_dir = c.text("store");
  const std::uint64_t top_seed = c.seed("seed", seed);
  ModelStore store(store_dir);

  Json model_doc;
  std::string store_kind;
  Json extra = Json::object();
  std::vector<EpochLoss> history;
  auto out_of_range = [&](bool bad, const std::string& key, const std::string& why) {
    if (bad) c.fail(key, why);
  };

  if (kind == "closure" || kind == "black-box" || kind == "gray-box") {
    const std::string model = c.choice("model", {"chafee", "ks"});
    const ModelDefaults d = defaults_for(model);
    const double nu = c.number("nu", d.nu);
    const int n_full = d.modes;
    const std::string route = c.choice("route", {"fourier", "pod"}, "fourier");
    if (kind == "gray-box" && route == "pod") c.fail("route", "gray-box models need the fourier route");
    const int n_low = route == "pod" ? c.integer("pod_low", 2) : c.integer("n_low", model == "chafee" ? 2 : 3);
    out_of_range(n_low < 1 || n_low >= n_full + (route == "pod" ? 1000 : 0), route == "pod" ? "pod_low" : "n_low",
                 "out of range");
    int pod_modes = 0;
    std::optional<PodModel> pod;
    if (route == "pod") {
      const std::string pod_alias = c.text("pod_alias", "pod");
      pod_modes = c.integer("pod_modes", 3);
      pod = pod_from_json(store.model(pod_alias, "pod"));
      run.models[pod_alias] = store.entry(pod_alias).hash;
      out_of_range(pod_modes > pod->n_modes() || n_low >= pod_modes, "pod_modes", "incompatible with pod_low or the POD model");
    }
    const std::string deriv =
        kind == "closure" ? "" : c.choice("derivatives", {"analytic", "finite-difference"}, "analytic");
    NetSpec defaults = kind == "gray-box" ? gray_box_net_spec()
                       : (kind == "black-box" && route == "pod") ? pod_rhs_net_spec()
                                                                 : default_net_spec();
    const NetSpec spec = read_net(c, defaults, top_seed);
    const TrainData data = load_dataset(run, c, n_full, model);
    c.finish();

    const BasisSpec basis = model_basis(model, n_full);
    Mat synth;
    Mat coords;  // integrated coordinates + trailing ones
    if (route == "pod") {
      const Grid grid = Grid::for_basis(basis, pod->ambient_dim());
      synth = synthesis_matrix(basis, grid);
      coords = pod_project_batch(*pod, data.states * synth.transpose(), pod_modes);
    } else {
      coords = data.states;
    }

    if (kind == "closure") {
      const int total = route == "pod" ? pod_modes : n_full;
      TrainResult tr = learn_regression(coords.leftCols(n_low), coords.middleCols(n_low, total - n_low), spec);
      model_doc = to_json(tr.model);
      store_kind = "mlp";
      history = tr.history;
    } else {
      const VectorField full = make_field(model, n_full, ModelParams{nu, 1.0});
      DerivativeData dd;
      if (deriv == "finite-difference") {
        dd = fd_by_trajectory(data, coords.leftCols(n_low));
      } else if (route == "pod") {
        dd.states = coords.leftCols(n_low);
        dd.derivatives.resize(data.states.rows(), n_low);
        for (Eigen::Index i = 0; i < data.states.rows(); ++i) {
          const Vec udot = synth * full(data.states.row(i).transpose());
          dd.derivatives.row(i) = (pod->modes.leftCols(n_low).transpose() * udot).transpose();
        }
      } else {
        dd = projected_derivatives(data.states, full, n_low);
      }
      LearnedFieldFit fit;
      if (kind == "gray-box") {
        BaseFieldSpec base{model, n_low, ModelParams{nu, 1.0}};
        try {
          fit = learn_gray_box(dd, base.build(), spec);
        } catch (const InvalidInput& e) {
          throw ConfigError(std::string("gray-box: ") + e.what());
        }
        fit.field.base_spec = base;
      } else {
        fit = learn_black_box(dd, spec);
      }
      model_doc = to_json(fit.field);
      store_kind = "learned-field";
      history = fit.history;
      extra["derivatives"] = deriv;
    }
  } else if (kind == "autoencoder") {
    const std::string model = c.choice("model", {"chafee", "ks"});
    const int bottleneck = c.integer("bottleneck", 3);
    const int n_candidates = c.integer("candidates", 64);
    NetSpec defaults;
    defaults.hidden = {32, 32};
    const NetSpec spec = read_net(c, defaults, top_seed);
    const TrainData data = load_dataset(run, c, defaults_for(model).modes, model);
    c.finish();
    out_of_range(bottleneck < 1, "bottleneck", "must be >= 1");
    out_of_range(n_candidates < 1, "candidates", "must be >= 1");
    const Autoencoder ae = make_autoencoder(static_cast<int>(data.states.cols()), spec.hidden, bottleneck, spec.train.seed);
    AutoencoderTrainResult tr = train_autoencoder(ae, data.states, spec.train);
    const Mat pool = encode_batch(tr.model, sample_rows(data.states, n_candidates, derive_seed(spec.train.seed, 5)));
    model_doc = to_json(tr.model, pool);
    store_kind = "autoencoder";
    history = tr.history;
  } else if (kind == "latent-map") {
    const std::string model = c.choice("model", {"chafee", "ks"});
    const std::string source = c.choice("source", {"autoencoder", "dmaps"});
    const std::string source_alias = c.text("source_alias", source);
    const int n_low = c.integer("n_low", model == "chafee" ? 2 : 3);
    const NetSpec spec = read_net(c, latent_map_net_spec(), top_seed);
    Mat x, latents;
    run.models[source_alias] = store.entry(source_alias).hash;
    if (source == "autoencoder") {
      const TrainData data = load_dataset(run, c, defaults_for(model).modes, model);
      c.finish();
      const Autoencoder ae = autoencoder_from_json(store.model(source_alias, "autoencoder"));
      out_of_range(n_low < 1 || n_low > ae.input_dim(), "n_low", "out of range");
      x = data.states.leftCols(n_low);
      latents = encode_batch(ae, data.states);
    } else {
      c.finish();
      const DiffusionMap dm = dmaps_from_json(store.model(source_alias, "dmaps"));
      out_of_range(n_low < 1 || n_low > dm.train_points.cols(), "n_low", "out of range");
      x = dm.train_points.leftCols(n_low);
      latents = dm.embedding();
    }
    TrainResult tr = learn_latent_map(x, latents, spec);
    model_doc = to_json(tr.model);
    store_kind = "mlp";
    history = tr.history;
  } else if (kind == "dmaps") {
    const std::string model = c.choice("model", {"chafee", "ks", "toy"});
    const bool has_eps = c.has("epsilon");
    const double eps_cfg = has_eps ? c.number("epsilon") : 0.0;
    const int n_eigs = c.integer("n_eigs", 6);
    const double factor = c.number("bandwidth_factor", 1.0 / 3.0);
    const double threshold = c.number("residual_threshold", 0.2);
    const int max_points = c.integer("max_points", 2000);
    const TrainData data = load_dataset(run, c, model == "toy" ? 2 : defaults_for(model).modes, model);
    c.finish();
    out_of_range(max_points < 2, "max_points", "must be >= 2");
    const Mat x = sample_rows(data.states, max_points, derive_seed(top_seed, 3));
    const double eps = has_eps ? eps_cfg : median_bandwidth(x);
    DiffusionMap dm = dmaps_fit(x, eps, n_eigs);
    const HarmonicSelection sel = select_independent(dm, factor, threshold);
    dm.kept_indices = sel.kept;
    std::string csv = "index,eigenvalue,residual,kept\n";
    for (int i = 1; i <= n_eigs; ++i) {
      const bool kept = std::find(sel.kept.begin(), sel.kept.end(), i) != sel.kept.end();
      csv += std::to_string(i) + "," + format_double(dm.eigenvalues[i]) + "," + format_double(sel.residuals[i - 1]) +
             "," + (kept ? "1" : "0") + "\n";
    }
    run.write("eigen.csv", csv);
    model_doc = to_json(dm);
    store_kind = "dmaps";
    extra["epsilon"] = eps;
    extra["kept_indices"] = sel.kept;
    run.log << "diffusion map: epsilon=" << format_double(eps) << ", kept coordinates:";
    for (int k : sel.kept) run.log << " phi" << k;
    run.log << "\n";
  } else if (kind == "double-dmaps") {
    const std::string dmaps_alias = c.text("dmaps_alias", "dmaps");
    const bool has_eps = c.has("epsilon_star");
    const double eps_cfg = has_eps ? c.number("epsilon_star") : 0.0;
    const double delta = c.number("delta", 1e-6);
    c.finish();
    const DiffusionMap dm = dmaps_from_json(store.model(dmaps_alias, "dmaps"));
    run.models[dmaps_alias] = store.entry(dmaps_alias).hash;
    const double eps = has_eps ? eps_cfg : median_bandwidth(dm.embedding());
    const GeometricHarmonics gh = double_dmaps_lift(dm, dm.train_points, eps, delta);
    const double in_sample = mse(gh_in_sample(gh), dm.train_points);
    model_doc = to_json(gh);
    store_kind = "geometric-harmonics";
    extra["epsilon_star"] = eps;
    extra["kept_modes"] = gh.n_kept();
    extra["in_sample_mse"] = in_sample;
    run.log << "geometric harmonics: epsilon*=" << format_double(eps) << ", " << gh.n_kept()
            << " modes kept, in-sample MSE " << format_double(in_sample) << "\n";
  } else {  // pod
    const std::string model = c.choice("model", {"chafee", "ks"});
    const bool center = c.boolean("center", false);
    const int grid_nodes = c.integer("grid_nodes", Grid::kDefaultNodes);
    const TrainData data = load_dataset(run, c, defaults_for(model).modes, model);
    c.finish();
    const BasisSpec basis = model_basis(model, static_cast<int>(data.states.cols()));
    const Grid grid = Grid::for_basis(basis, grid_nodes);
    const PodModel pod = pod_fit(data.states * synthesis_matrix(basis, grid).transpose(), center);
    std::string csv = "k,singular_value,energy_fraction\n";
    for (Eigen::Index k = 0; k < pod.singular_values.size(); ++k)
      csv += std::to_string(k + 1) + "," + format_double(pod.singular_values[k]) + "," +
             format_double(pod.energy_fractions[k]) + "\n";
    run.write("energy.csv", csv);
    model_doc = to_json(pod);
    store_kind = "pod";
    run.log << "POD: energy captured by 1..3 modes:";
    for (Eigen::Index k = 0; k < std::min<Eigen::Index>(3, pod.energy_fractions.size()); ++k)
      run.log << " " << format_double(pod.energy_fractions[k]);
    run.log << "\n";
  }

  if (!history.empty()) run.write("loss.csv", loss_csv(history));
  Json prov{{"command", "train"}, {"kind", kind}, {"config", run.config}, {"data", data_provenance(run)},
            {"training", history_summary(history)}, {"details", extra}};
  const std::string hash = store.put(alias, store_kind, model_doc, prov);
  run.models[alias] = hash;
  run.write("model.json", Json{{"alias", alias}, {"kind", store_kind}, {"hash", hash}}.dump(2) + "\n");
  run.log << "stored " << store_kind << " '" << alias << "' " << hash << "\n";
  return kOk;
}

// ---------------------------------------------------------------- pipelines

PipelineConfig read_pipeline(ConfigSection& c, std::uint64_t seed) {
  PipelineConfig p;
  const std::string model = c.choice("model", {"chafee", "ks"});
  p.model = parse_model_kind(model);
  const ModelDefaults d = defaults_for(model);
  p.route = parse_latent_route(c.choice("route", {"fourier", "pod", "autoencoder", "dmaps"}, "fourier"));
  p.dynamics = parse_dynamics(c.choice("dynamics", {"truncated", "black-box", "gray-box"}, "truncated"));
  p.closure = parse_closure_kind(
      c.choice("closure", {"none", "euler-galerkin", "mlp", "double-dmaps", "decoder-inversion"}, "none"));
  p.nu = c.number("nu", d.nu);
  p.final_time = c.number("final_time", model == "chafee" ? 5.0 : 0.06);
  p.dt = c.number("dt", d.dt);
  p.seed = c.seed("seed", seed);
  p.initial_condition = c.vector("initial_condition", Vec());
  p.pod_low = c.integer("pod_low", p.pod_low);
  p.pod_modes = c.integer("pod_modes", p.pod_modes);
  p.grid_nodes = c.integer("grid_nodes", p.grid_nodes);
  p.series_points = c.integer("series_points", p.series_points);
  ConfigSection inv = c.section("inversion");
  p.inversion_candidates = inv.integer("candidates", p.inversion_candidates);
  p.inversion_iters = inv.integer("iters", p.inversion_iters);
  p.inversion_lr = inv.number("lr", p.inversion_lr);
  inv.finish();
  p.aliases = c.string_map("aliases");
  for (const auto& [role, a] : p.aliases)
    if (role != "rhs" && role != "closure" && role != "pod" && role != "autoencoder" && role != "latent_map" &&
        role != "lift")
      c.fail("aliases", "has unknown role '" + role + "'");
  return p;
}

void validate_or_config_error(const PipelineConfig& p, bool need_ic) {
  try {
    if (!need_ic && p.initial_condition.size() == 0) {
      PipelineConfig q = p;
      q.initial_condition = Vec::Zero(p.n_full());
      q.validate();
    } else {
      p.validate();
    }
  } catch (const InvalidInput& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

Json merged(const Json& common, const Json& item) {
  Json m = common;
  for (const auto& [k, v] : item.items()) m[k] = v;
  return m;
}

std::string metrics_line(const std::string& label, const MetricsBundle& m) {
  return label + ": MAPE corrected " + format_double(m.mape) + " %, raw " + format_double(m.raw_mape) +
         " %, MSE corrected " + format_double(m.mse) + ", raw " + format_double(m.raw_mse);
}

Json metrics_json(const PipelineConfig& p, const PipelineResult& r) {
  Json j{{"label", p.label()},
         {"mape", r.metrics.mape},
         {"mse", r.metrics.mse},
         {"raw_mape", r.metrics.raw_mape},
         {"raw_mse", r.metrics.raw_mse},
         {"mape_floor", r.metrics.mape_floor},
         {"final_time", p.final_time},
         {"final_state", vector_to_json(r.final_state.coeffs())},
         {"model_hashes", r.model_hashes}};
  if (r.errors)
    j["errors"] = {{"delta1", r.errors->delta1}, {"delta2", r.errors->delta2},
                   {"delta3", r.errors->delta3}, {"delta4", r.errors->delta4}};
  return j;
}

std::string provenance_text(const Run& run) {
  return "generated by " + std::string(kToolVersion) + " " + run.command + "; config sha256 " +
         sha256_hex(run.config.dump());
}

std::optional<ModelStore> open_store(ConfigSection& c) {
  if (!c.has("store")) {
    c.text("store", "");
    return std::nullopt;
  }
  return ModelStore(fs::path(c.text("store")));
}

const ModelStore& store_or_empty(const std::optional<ModelStore>& s) {
  static const ModelStore empty;
  return s ? *s : empty;
}

int cmd_postprocess(Run& run, std::uint64_t seed) {
  ConfigSection c(run.config, "", run.source);
  const auto store = open_store(c);
  PipelineConfig p = read_pipeline(c, c.seed("seed", seed));
  c.finish();
  validate_or_config_error(p, true);
  const PipelineResult r = run_pipeline(p, store_or_empty(store));
  for (const auto& [a, h] : r.model_hashes) run.models[a] = h;

  run.write("metrics.json", metrics_json(p, r).dump(2) + "\n");
  Mat ff(r.grid_points.size(), 4);
  ff << r.grid_points, r.u_truth, r.u_raw, r.u_corrected;
  run.write("final_field.csv", csv_string({"x", "truth", "raw", "corrected"}, ff));
  auto traj_csv = [](const Trajectory& t, const std::string& prefix) {
    std::vector<std::string> h{"t"};
    for (int k = 1; k <= t.dim(); ++k) h.push_back(prefix + std::to_string(k));
    Mat m(t.size(), t.dim() + 1);
    m.col(0) = Eigen::Map<const Vec>(t.times.data(), t.size());
    m.rightCols(t.dim()) = t.states;
    return csv_string(h, m);
  };
  run.write("reduced_trajectory.csv", traj_csv(r.reduced, p.route == LatentRoute::pod ? "c" : "a"));
  run.write("truth_trajectory.csv", traj_csv(r.truth, "a"));
  const Vec st = Eigen::Map<const Vec>(r.metrics.series_times.data(), static_cast<Eigen::Index>(r.metrics.series_times.size()));
  const Vec se = Eigen::Map<const Vec>(r.metrics.percent_error_series.data(),
                                       static_cast<Eigen::Index>(r.metrics.percent_error_series.size()));
  Mat series(st.size(), 2);
  series << st, se;
  run.write("error_series.csv", csv_string({"t", "percent_error"}, series));

  LinePlot overlay{"u(x,T) at T=" + format_double(p.final_time) + ", " + p.label(), "x", "u", {}, provenance_text(run)};
  overlay.series.push_back({"truth", r.grid_points, r.u_truth});
  overlay.series.push_back({"truncated", r.grid_points, r.u_raw});
  overlay.series.push_back({"corrected (" + to_string(p.closure) + ")", r.grid_points, r.u_corrected});
  run.write("overlay.svg", render_svg(overlay));
  LinePlot err{"percent error vs time, " + p.label(), "t", "MAPE %", {{"corrected", st, se}}, provenance_text(run)};
  run.write("error_series.svg", render_svg(err));

  run.log << metrics_line(p.label(), r.metrics) << "\n";
  if (r.errors)
    run.log << "delta1 " << format_double(r.errors->delta1) << ", delta2 " << format_double(r.errors->delta2)
            << ", delta3 " << format_double(r.errors->delta3) << ", delta4 " << format_double(r.errors->delta4) << "\n";
  return kOk;
}

std::vector<PipelineConfig> read_pipelines(ConfigSection& c, std::uint64_t seed, bool need_ic) {
  const Json common = c.has("common") ? c.raw().at("common") : Json::object();
  if (!common.is_object()) c.fail("common", "must be an object");
  c.section("common");
  std::vector<PipelineConfig> out;
  for (ConfigSection& item : c.sections("pipelines")) {
    ConfigSection m(merged(common, item.raw()), "pipelines", nullptr);
    PipelineConfig p = read_pipeline(m, seed);
    try {
      m.finish();
    } catch (const ConfigError& e) {
      item.fail("pipelines", std::string("entry: ") + e.what());
    }
    validate_or_config_error(p, need_ic);
    out.push_back(std::move(p));
  }
  return out;
}

int cmd_evaluate(Run& run, std::uint64_t seed) {
  ConfigSection c(run.config, "", run.source);
  const auto store = open_store(c);
  const std::uint64_t top_seed = c.seed("seed", seed);
  const auto pipelines = read_pipelines(c, top_seed, true);
  c.finish();

  std::string metrics = "config,mape,mse,raw_mape,raw_mse,delta1,delta2,delta3,delta4\n";
  std::string series = "config,t,value\n";
  Json all = Json::array();
  LinePlot overlay{"u(x,T) overlay", "x", "u", {}, provenance_text(run)};
  LinePlot errs{"percent error vs time", "t", "MAPE %", {}, provenance_text(run)};
  for (size_t k = 0; k < pipelines.size(); ++k) {
    const PipelineConfig& p = pipelines[k];
    const PipelineResult r = run_pipeline(p, store_or_empty(store));
    for (const auto& [a, h] : r.model_hashes) run.models[a] = h;
    auto opt = [](const std::optional<ErrorDecomposition>& e, double ErrorDecomposition::*f) {
      return e ? format_double((*e).*f) : std::string();
    };
    metrics += csv_field(p.label()) + "," + format_double(r.metrics.mape) + "," + format_double(r.metrics.mse) + "," +
               format_double(r.metrics.raw_mape) + "," + format_double(r.metrics.raw_mse) + "," +
               opt(r.errors, &ErrorDecomposition::delta1) + "," + opt(r.errors, &ErrorDecomposition::delta2) + "," +
               opt(r.errors, &ErrorDecomposition::delta3) + "," + opt(r.errors, &ErrorDecomposition::delta4) + "\n";
    for (size_t i = 0; i < r.metrics.series_times.size(); ++i)
      series += csv_field(p.label()) + "," + format_double(r.metrics.series_times[i]) + "," +
                format_double(r.metrics.percent_error_series[i]) + "\n";
    all.push_back(metrics_json(p, r));
    if (k == 0) overlay.series.push_back({"truth", r.grid_points, r.u_truth});
    overlay.series.push_back({p.label(), r.grid_points, r.u_corrected});
    errs.series.push_back({p.label(),
                           Eigen::Map<const Vec>(r.metrics.series_times.data(),
                                                 static_cast<Eigen::Index>(r.metrics.series_times.size())),
                           Eigen::Map<const Vec>(r.metrics.percent_error_series.data(),
                                                 static_cast<Eigen::Index>(r.metrics.percent_error_series.size()))});
    run.log << metrics_line(p.label(), r.metrics) << "\n";
  }
  run.write("metrics.csv", metrics);
  run.write("metrics.json", all.dump(2) + "\n");
  run.write("error_series.csv", series);
  run.write("overlay.svg", render_svg(overlay));
  run.write("error_series.svg", render_svg(errs));
  return kOk;
}

std::string sanitize(const std::string& s) {
  std::string o;
  for (char ch : s) o += std::isalnum(static_cast<unsigned char>(ch)) ? ch : '_';
  return o;
}

int cmd_ensemble(Run& run, std::uint64_t seed) {
  ConfigSection c(run.config, "", run.source);
  const auto store = open_store(c);
  const std::uint64_t top_seed = c.seed("seed", seed);
  const auto pipelines = read_pipelines(c, top_seed, false);
  EnsembleOptions opt;
  opt.seed = top_seed;
  opt.n_ic = c.integer("n_ic", 100);
  opt.final_time = c.number("final_time", pipelines.front().final_time);
  opt.ic_box = c.box("ic_box", pipelines.front().n_full(), std::make_pair(-1.0, 1.0));
  opt.ic_transient = c.number("ic_transient", 0.0);
  opt.n_bins = c.integer("n_bins", 20);
  c.finish();
  if (opt.n_ic < 1) c.fail("n_ic", "must be >= 1");
  if (opt.n_bins < 1) c.fail("n_bins", "must be >= 1");

  const EnsembleResult res = ensemble_histogram(pipelines, store_or_empty(store), opt);
  for (const auto& p : pipelines)
    for (const auto& role : p.required_roles()) run.models[p.alias(role)] = store_or_empty(store).entry(p.alias(role)).hash;

  std::string samples = "config,ic_index,value\n";
  std::string hist = "config,bin_lo,bin_hi,count\n";
  std::string failures = "config,ic_index,message\n";
  Json summary = Json::array();
  for (size_t k = 0; k < res.series.size(); ++k) {
    const auto& s = res.series[k];
    std::string own = "ic_index,mape,raw_mape\n";
    std::vector<double> v;
    for (const auto& e : s.samples) {
      samples += csv_field(s.label) + "," + std::to_string(e.ic_index) + "," + format_double(e.mape) + "\n";
      own += std::to_string(e.ic_index) + "," + format_double(e.mape) + "," + format_double(e.raw_mape) + "\n";
      v.push_back(e.mape);
    }
    run.write("samples_" + std::to_string(k) + "_" + sanitize(s.label) + ".csv", own);
    for (size_t b = 0; b < s.counts.size(); ++b)
      hist += csv_field(s.label) + "," + format_double(res.bin_edges[static_cast<Eigen::Index>(b)]) + "," +
              format_double(res.bin_edges[static_cast<Eigen::Index>(b + 1)]) + "," + std::to_string(s.counts[b]) + "\n";
    for (const auto& f : s.failures)
      failures += csv_field(s.label) + "," + std::to_string(f.ic_index) + "," + csv_field(f.message) + "\n";
    std::sort(v.begin(), v.end());
    const double median = v.empty() ? std::nan("")
                                    : (v.size() % 2 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]));
    summary.push_back({{"config", s.label}, {"successful", s.samples.size()}, {"failed", s.failures.size()},
                       {"median_mape", v.empty() ? Json() : Json(median)}});
    run.log << s.label << ": " << s.samples.size() << " runs, " << s.failures.size() << " failed, median MAPE "
            << (v.empty() ? std::string("n/a") : format_double(median)) << " %\n";
  }
  run.write("samples.csv", samples);
  run.write("histogram.csv", hist);
  run.write("failures.csv", failures);
  std::vector<std::string> ich{"ic_index"};
  for (int k = 1; k <= res.initial_conditions.cols(); ++k) ich.push_back("a" + std::to_string(k));
  Mat ics(res.initial_conditions.rows(), res.initial_conditions.cols() + 1);
  for (Eigen::Index i = 0; i < ics.rows(); ++i) ics(i, 0) = static_cast<double>(i);
  ics.rightCols(res.initial_conditions.cols()) = res.initial_conditions;
  run.write("initial_conditions.csv", csv_string(ich, ics));
  run.write("summary.json", summary.dump(2) + "\n");

  LinePlot plot{"MAPE histogram over " + std::to_string(opt.n_ic) + " initial conditions", "MAPE %", "count", {},
                provenance_text(run)};
  Vec centers(res.bin_edges.size() - 1);
  for (Eigen::Index b = 0; b < centers.size(); ++b) centers[b] = 0.5 * (res.bin_edges[b] + res.bin_edges[b + 1]);
  for (const auto& s : res.series) {
    Vec counts(centers.size());
    for (Eigen::Index b = 0; b < centers.size(); ++b) counts[b] = s.counts[static_cast<size_t>(b)];
    plot.series.push_back({s.label, centers, counts});
  }
  run.write("histogram.svg", render_svg(plot));
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reduced-order modeling with approximate inertial manifolds"};
  std::string config_path, out_dir = ".";
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON config file")->required();
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--seed", seed, "overrides every seed in the config");
  app.require_subcommand(1);
  std::map<std::string, int (*)(Run&, std::uint64_t)> commands{
      {"simulate", cmd_simulate}, {"sample", cmd_sample},     {"train", cmd_train},
      {"postprocess", cmd_postprocess}, {"evaluate", cmd_evaluate}, {"ensemble", cmd_ensemble}};
  for (const auto& [name, fn] : commands) app.add_subcommand(name)->fallthrough();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n" << app.help();
    return kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    std::shared_ptr<ConfigSource> src;
    Json cfg = load_config(config_path, &src);
    if (seed) {
      override_seeds(cfg, *seed);
      cfg["seed"] = *seed;
      // Line lookups still refer to the original text.
    }
    const std::uint64_t s = cfg.contains("seed") && cfg["seed"].is_number_unsigned() ? cfg["seed"].get<std::uint64_t>() : 0;
    Run r{command, cfg, src, fs::path(out_dir), out, Json::object(), Json::object(), {}};
    fs::create_directories(r.out);
    const int code = commands.at(command)(r, s);
    r.manifest(s);
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidInput& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const MissingArtifact& e) {
    err << "missing artifact: " << e.what() << "\n";
    return kMissingArtifact;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const fs::filesystem_error& e) {
    err << "i/o error: " << e.what() << "\n";
    return kMissingArtifact;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace aimrom::cli
