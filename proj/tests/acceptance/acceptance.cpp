// End-to-end acceptance checks. One line per criterion; exit status 1 if any fails.
//   acceptance                 run all
//   acceptance --criterion N   run one

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <numeric>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "aimrom/aim.hpp"
#include "aimrom/cli.hpp"
#include "aimrom/dmaps.hpp"
#include "aimrom/error.hpp"
#include "aimrom/eval.hpp"
#include "aimrom/integrate.hpp"
#include "aimrom/io.hpp"
#include "aimrom/models.hpp"
#include "aimrom/nn.hpp"
#include "aimrom/pod.hpp"
#include "aimrom/rom.hpp"
#include "aimrom/serialize.hpp"
#include "aimrom/spectral.hpp"
#include "aimrom/store.hpp"

using namespace aimrom;
using std::numbers::pi;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

// ---- pinned tolerances and budgets
constexpr double kChafeeMapeMax = 1.0;          // percent
constexpr double kChafeeBudget = 60.0;          // seconds, includes MLP training
constexpr double kEgTol = 1e-12;
constexpr double kEgBudget = 1.0;
constexpr double kPodEnergyMin = 0.999;
constexpr double kPodMapeMax = 0.1;             // percent
constexpr double kPodBudget = 10.0;
constexpr double kKsOracleTol = 1e-8;
constexpr double kTruncMapeMin = 20.0;          // percent, at T = 0.05
constexpr double kGrayMapeMax = 5.0;
constexpr double kRowSumTol = 1e-12;
constexpr double kCircleAngleMax = 0.1;         // rad
constexpr double kDmapsBudget = 30.0;
constexpr double kDoubleDmapsMseMax = 10 * 0.00492;
constexpr double kAutoencoderMseMax = 10 * 0.0155;
constexpr double kIftFractionMin = 0.99;
constexpr double kFdRelTol = 1e-5;
constexpr double kRk4OrderMin = 3.8;
constexpr double kToyR2Min = 0.99;
constexpr double kToyBudget = 5.0;

constexpr double kKsNu = 33.0;
constexpr double kKsDt = 1e-5;

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;
double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v, int prec = 4) {
  std::ostringstream s;
  s.precision(prec);
  s << v;
  return s.str();
}

Vec chafee_ic() {
  Vec a(3);
  a << 1.0, 0.5, 0.1;
  return a;
}

// Independent Galerkin oracle: 512-point periodic quadrature of −ν(u u_x + u_xx) − 4u_xxxx.
Vec ks_quadrature(const Vec& a, double nu) {
  const int n = static_cast<int>(a.size());
  const int m = 512;
  Vec out = Vec::Zero(n);
  for (int i = 0; i < m; ++i) {
    const double x = 2 * pi * i / m;
    double u = 0, ux = 0, uxx = 0, uxxxx = 0;
    for (int k = 1; k <= n; ++k) {
      const double s = std::sin(k * x), c = std::cos(k * x);
      u += a[k - 1] * s;
      ux += k * a[k - 1] * c;
      uxx -= k * k * a[k - 1] * s;
      uxxxx += std::pow(k, 4) * a[k - 1] * s;
    }
    const double f = -nu * (u * ux + uxx) - 4 * uxxxx;
    for (int k = 1; k <= n; ++k) out[k - 1] += f * std::sin(k * x);
  }
  return out * (2.0 / m);
}

// KS attractor snapshots: 200 trajectories after a short transient, one row per 1e-3.
const Dataset& ks_dataset() {
  static const Dataset ds = [] {
    SamplerConfig cfg;
    cfg.n_trajectories = 200;
    cfg.ic_box.assign(8, {-1.0, 1.0});
    cfg.transient_time = 0.005;
    cfg.record_time = 0.095;
    cfg.snapshot_stride = 100;
    cfg.seed = 11;
    return sample_attractor(ks_field(8, kKsNu), cfg, kKsDt);
  }();
  return ds;
}

struct KsSplit {
  Mat train;  // 2000 snapshots
  Mat test;   // 500 held out
};

const KsSplit& ks_split() {
  static const KsSplit s = [] {
    const Dataset& ds = ks_dataset();
    std::vector<int> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::mt19937_64 rng(1);
    std::shuffle(idx.begin(), idx.end(), rng);
    KsSplit out{Mat(2000, 8), Mat(500, 8)};
    for (int i = 0; i < 2000; ++i) out.train.row(i) = ds.snapshots.row(idx[i]);
    for (int i = 0; i < 500; ++i) out.test.row(i) = ds.snapshots.row(idx[2000 + i]);
    return out;
  }();
  return s;
}

const AutoencoderTrainResult& ks_autoencoder() {
  static const AutoencoderTrainResult ae = [] {
    TrainConfig tc;
    tc.epochs = 300;
    tc.seed = 1;
    return train_autoencoder(make_autoencoder(8, {32, 32}, 3, 1), ks_split().train, tc);
  }();
  return ae;
}

// ---------------------------------------------------------------- 1

Outcome chafee_postprocessing() {
  const auto t0 = Clock::now();
  PipelineConfig p;
  p.initial_condition = chafee_ic();
  p.closure = ClosureKind::euler_galerkin;
  const PipelineResult closed = run_pipeline(p, ModelStore());

  // MLP closure on 5000 attractor snapshots
  SamplerConfig sc;
  sc.n_trajectories = 10;
  sc.ic_box.assign(3, {-1.0, 1.0});
  sc.record_time = 5.0;
  sc.snapshot_stride = 10;
  sc.seed = 21;
  const Dataset ds = sample_attractor(chafee_field(3, 0.16), sc, 1e-3);
  NetSpec spec = default_net_spec();
  spec.train.epochs = 60;
  spec.train.seed = 1;
  const TrainResult net = learn_regression(ds.snapshots.leftCols(2), ds.snapshots.rightCols(1), spec);
  ModelStore store;
  store.put("closure", "mlp", to_json(net.model));
  p.closure = ClosureKind::mlp;
  const PipelineResult learned = run_pipeline(p, store);
  const double wall = seconds_since(t0);

  const bool pass = closed.metrics.mape < kChafeeMapeMax && learned.metrics.mape < kChafeeMapeMax && wall < kChafeeBudget;
  return {pass, "raw " + fmt(closed.metrics.raw_mape) + "%, closed-form " + fmt(closed.metrics.mape) + "%, MLP " +
                    fmt(learned.metrics.mape) + "% (need < " + fmt(kChafeeMapeMax) + "%), " + std::to_string(ds.size()) +
                    " snapshots, " + fmt(wall, 3) + " s"};
}

// ---------------------------------------------------------------- 2

Outcome euler_galerkin_equivalence() {
  const auto t0 = Clock::now();
  const EulerGalerkinConfig cfg = chafee_euler_galerkin(0.16);
  double worst = 0;
  int n = 0;
  for (int i = 0; i < 20; ++i)
    for (int j = 0; j < 20; ++j, ++n) {
      Vec p(2);
      p << -1.5 + 3.0 * i / 19, -1.5 + 3.0 * j / 19;
      worst = std::max(worst, std::abs(euler_galerkin_phi(p, cfg)[0] - chafee_aim_alpha3(p[0], p[1], 0.16)));
    }
  const double wall = seconds_since(t0);
  return {worst < kEgTol && wall < kEgBudget,
          "max |difference| " + fmt(worst) + " over " + std::to_string(n) + " points, " + fmt(wall, 3) + " s"};
}

// ---------------------------------------------------------------- 3

Outcome pod_energy() {
  const auto t0 = Clock::now();
  SamplerConfig sc;
  sc.n_trajectories = 20;
  sc.ic_box.assign(3, {-1.0, 1.0});
  sc.record_time = 5.0;
  sc.snapshot_stride = 10;
  sc.seed = 31;
  const Dataset ds = sample_attractor(chafee_field(3, 0.16), sc, 1e-3);
  const BasisSpec basis(BasisKind::sine_dirichlet, 3);
  const Grid grid = Grid::for_basis(basis);
  const Mat fields = ds.snapshots * synthesis_matrix(basis, grid).transpose();
  const PodModel pod = pod_fit(fields, false);
  const Mat rec = pod_lift_batch(pod, pod_project_batch(pod, fields, 3), 3);
  double total = 0;
  for (Eigen::Index i = 0; i < fields.rows(); ++i)
    total += mape(rec.row(i).transpose(), fields.row(i).transpose());
  const double avg = total / static_cast<double>(fields.rows());
  const double energy = pod.energy_fractions[2];
  const double wall = seconds_since(t0);
  return {energy >= kPodEnergyMin && avg <= kPodMapeMax && wall < kPodBudget,
          "3-mode energy " + fmt(energy, 8) + ", rank-3 MAPE " + fmt(avg) + "%, " + std::to_string(ds.size()) +
              " snapshots, " + fmt(wall, 3) + " s"};
}

// ---------------------------------------------------------------- 4

Outcome ks_galerkin() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    Vec a(8);
    for (int k = 0; k < 8; ++k) a[k] = u(rng);
    worst = std::max(worst, (ks_rhs_8(a, kKsNu) - ks_quadrature(a, kKsNu)).cwiseAbs().maxCoeff());
  }
  bool dispersion = true;
  for (int k = 1; k <= 8; ++k)
    dispersion = dispersion && ks_rhs_8(Vec::Unit(8, k - 1), kKsNu)[k - 1] == kKsNu * k * k - 4.0 * k * k * k * k;
  return {worst < kKsOracleTol && dispersion,
          "max oracle difference " + fmt(worst) + " on 20 states, dispersion " + (dispersion ? "exact" : "WRONG")};
}

// ---------------------------------------------------------------- 5

Outcome gray_box_repair() {
  const auto t0 = Clock::now();
  const VectorField full = ks_field(8, kKsNu), base = ks_field(3, kKsNu);
  const DerivativeData d = projected_derivatives(ks_dataset().snapshots, full, 3);
  NetSpec spec = gray_box_net_spec();
  spec.train.epochs = 30;
  spec.train.seed = 1;
  const LearnedFieldFit gb = learn_gray_box(d, base, spec);
  const VectorField gray = gb.field.as_vector_field();

  std::vector<std::pair<double, double>> box(8, {-1.0, 1.0});
  const Mat ics = uniform_box_samples(box, 20, 77);
  int both = 0, trunc_bad = 0, gray_good = 0;
  double best_trunc = 0, best_gray = 1e300;
  for (int i = 0; i < ics.rows(); ++i) {
    // standard IC: a seeded box draw relaxed for 0.01 with the full model
    const Vec a0 = rk4(full, ics.row(i).transpose(), 0.01, kKsDt).final_state();
    const Vec truth = rk4(full, a0, 0.05, kKsDt).final_state().head(3);
    const double mt = mape(rk4(base, a0.head(3), 0.05, kKsDt).final_state(), truth);
    double mg = std::numeric_limits<double>::infinity();
    try {
      mg = mape(rk4(gray, a0.head(3), 0.05, kKsDt).final_state(), truth);
    } catch (const NumericalFailure&) {
    }
    trunc_bad += mt > kTruncMapeMin;
    gray_good += mg < kGrayMapeMax;
    if (mt > kTruncMapeMin && mg < kGrayMapeMax) {
      ++both;
      if (mg < best_gray) best_gray = mg, best_trunc = mt;
    }
  }
  const double wall = seconds_since(t0);
  std::string detail = std::to_string(both) + "/20 ICs with truncated > " + fmt(kTruncMapeMin) + "% and gray-box < " +
                       fmt(kGrayMapeMax) + "% (truncated fails on " + std::to_string(trunc_bad) + ", gray-box holds on " +
                       std::to_string(gray_good) + ")";
  if (both > 0) detail += "; e.g. truncated " + fmt(best_trunc) + "% vs gray-box " + fmt(best_gray) + "%";
  return {both >= 1, detail + ", " + fmt(wall, 3) + " s"};
}

// ---------------------------------------------------------------- 6

double angle_error(const Vec& est, const Vec& truth) {
  double best = 1e9;
  for (double s : {1.0, -1.0}) {
    double c = 0, sn = 0;
    for (Eigen::Index i = 0; i < est.size(); ++i) {
      c += std::cos(s * est[i] - truth[i]);
      sn += std::sin(s * est[i] - truth[i]);
    }
    const double shift = std::atan2(sn, c);
    double worst = 0;
    for (Eigen::Index i = 0; i < est.size(); ++i)
      worst = std::max(worst, std::abs(std::remainder(s * est[i] - truth[i] - shift, 2 * pi)));
    best = std::min(best, worst);
  }
  return best;
}

Outcome dmaps_suite() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g;
  Mat blob(300, 3);
  for (Eigen::Index i = 0; i < blob.size(); ++i) blob.data()[i] = g(rng);
  const double row_err = (markov_matrix(blob, median_bandwidth(blob)).rowwise().sum().array() - 1.0).abs().maxCoeff();

  std::uniform_real_distribution<double> u(0, 2 * pi);
  Mat circle(300, 2);
  Vec theta(300);
  for (int i = 0; i < 300; ++i) {
    theta[i] = u(rng);
    circle.row(i) << std::cos(theta[i]), std::sin(theta[i]);
  }
  const DiffusionMap cdm = dmaps_fit(circle, median_bandwidth(circle) / 4, 2);
  Vec est(300);
  for (int i = 0; i < 300; ++i) est[i] = std::atan2(cdm.eigenvectors(i, 2), cdm.eigenvectors(i, 1));
  const double angle = angle_error(est, theta);

  Mat line(300, 3);
  for (int i = 0; i < 300; ++i) {
    const double t = i / 299.0;
    line.row(i) << 1.0 + 2.0 * t, -t, 0.5 * t;
  }
  const HarmonicSelection lsel = select_independent(dmaps_fit(line, median_bandwidth(line) / 10, 5));

  const Mat& ks = ks_split().train;
  const auto t_ks = Clock::now();
  const HarmonicSelection ksel = select_independent(dmaps_fit(ks, median_bandwidth(ks), 6));
  const double ks_wall = seconds_since(t_ks);

  auto list = [](const std::vector<int>& v) {
    std::string s;
    for (int k : v) s += (s.empty() ? "" : ",") + std::to_string(k);
    return "{" + s + "}";
  };
  const bool pass = row_err < kRowSumTol && angle < kCircleAngleMax && lsel.kept.size() == 1 && ksel.kept.size() == 3 &&
                    ks_wall < kDmapsBudget;
  return {pass, "row-sum error " + fmt(row_err) + ", circle angle error " + fmt(angle) + " rad, line keeps " +
                    list(lsel.kept) + ", KS (N=2000) keeps " + list(ksel.kept) + " in " + fmt(ks_wall, 3) +
                    " s; total " + fmt(seconds_since(t0), 3) + " s"};
}

// ---------------------------------------------------------------- 7

Outcome lifting_quality() {
  const auto t0 = Clock::now();
  const KsSplit& s = ks_split();
  DiffusionMap dm = dmaps_fit(s.train, median_bandwidth(s.train), 6);
  dm.kept_indices = select_independent(dm).kept;
  const Mat phi = dm.embedding();
  const GeometricHarmonics gh = double_dmaps_lift(dm, s.train, median_bandwidth(phi), 1e-6);
  NetSpec spec = latent_map_net_spec();
  spec.train.epochs = 150;
  spec.train.seed = 3;
  const TrainResult dmap_map = learn_latent_map(s.train.leftCols(3), phi, spec);
  const double dd_mse = mse(gh_extend_batch(gh, forward_batch(dmap_map.model, s.test.leftCols(3))), s.test);

  const AutoencoderTrainResult& ae = ks_autoencoder();
  const TrainResult ae_map = learn_latent_map(s.train.leftCols(3), encode_batch(ae.model, s.train), spec);
  const double ae_mse = mse(decode_batch(ae.model, forward_batch(ae_map.model, s.test.leftCols(3))), s.test);

  return {dd_mse <= kDoubleDmapsMseMax && ae_mse <= kAutoencoderMseMax,
          "held-out MSE: double DMAPs " + fmt(dd_mse) + " (bound " + fmt(kDoubleDmapsMseMax) + "), autoencoder " +
              fmt(ae_mse) + " (bound " + fmt(kAutoencoderMseMax) + "), " + fmt(seconds_since(t0), 3) + " s"};
}

// ---------------------------------------------------------------- 8

Outcome inverse_function_check() {
  // analytic maps: identity and a reflection (a single layer is the linear output)
  Layer id{Mat::Identity(3, 3), Vec::Zero(3)};
  Layer refl{Mat::Identity(3, 3), Vec::Zero(3)};
  refl.w(0, 0) = -1.0;
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  Mat pts(50, 3);
  for (Eigen::Index i = 0; i < pts.size(); ++i) pts.data()[i] = u(rng);
  const IftReport ri = ift_check(Mlp({id}), pts);
  const IftReport rr = ift_check(Mlp({refl}), pts);
  const bool analytic = (ri.determinants.array() == 1.0).all() && (rr.determinants.array() == -1.0).all();

  const AutoencoderTrainResult& ae = ks_autoencoder();
  const Mat latents = encode_batch(ae.model, ks_split().test);
  const IftReport r = ift_check(ae.model.decoder.restrict_outputs({0, 1, 2}), latents);
  return {analytic && r.majority_fraction >= kIftFractionMin,
          std::string("analytic maps ") + (analytic ? "exact" : "WRONG") + "; KS decoder: " + std::to_string(r.positive) +
              " positive, " + std::to_string(r.negative) + " negative of " + std::to_string(latents.rows()) +
              " (majority " + fmt(100 * r.majority_fraction) + "%)"};
}

// ---------------------------------------------------------------- 9

double rel_err(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1e-300, b.norm()); }

// Hashes of every file a command writes, from its manifest.
Json run_outputs(const std::string& cmd, const fs::path& cfg, const fs::path& out) {
  std::ostringstream o, e;
  const int code = cli::run({cmd, "--config", cfg.string(), "--out", out.string()}, o, e);
  if (code != 0) return Json{{"exit", code}, {"stderr", e.str()}};
  return Json::parse(read_file(out / "manifest.json")).at("outputs");
}

Outcome numerics_hygiene() {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1, 1);
  const double h = 1e-6;
  double worst_grad = 0, worst_jac = 0;
  for (int trial = 0; trial < 10; ++trial) {
    Mlp net = Mlp::glorot({3, 6, 5, 2}, 100 + trial);
    Vec x(3), y(2);
    for (int i = 0; i < 3; ++i) x[i] = u(rng);
    for (int i = 0; i < 2; ++i) y[i] = u(rng);
    const Vec theta = net.parameters();
    const Vec g = gradient(net, x, y).flat();
    Vec fd(theta.size());
    for (Eigen::Index i = 0; i < theta.size(); ++i) {
      Vec tp = theta, tm = theta;
      tp[i] += h;
      tm[i] -= h;
      net.set_parameters(tp);
      const double fp = (forward(net, x) - y).squaredNorm();
      net.set_parameters(tm);
      const double fm = (forward(net, x) - y).squaredNorm();
      fd[i] = (fp - fm) / (2 * h);
    }
    net.set_parameters(theta);
    worst_grad = std::max(worst_grad, rel_err(g, fd));
    Mat jf(2, 3);
    for (int c = 0; c < 3; ++c) {
      Vec xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      jf.col(c) = (forward(net, xp) - forward(net, xm)) / (2 * h);
    }
    worst_jac = std::max(worst_jac, rel_err(jacobian(net, x), jf));
  }

  const VectorField f = chafee_field(3, 0.16);
  const Vec ref = rk4(f, chafee_ic(), 1.0, 1e-4).final_state();
  const double e1 = (rk4(f, chafee_ic(), 1.0, 0.1).final_state() - ref).norm();
  const double e2 = (rk4(f, chafee_ic(), 1.0, 0.05).final_state() - ref).norm();
  const double order = std::log2(e1 / e2);

  // every command twice under the same seed
  const fs::path root = fs::temp_directory_path() / "aimrom_acceptance_repro";
  fs::remove_all(root);
  fs::create_directories(root);
  const std::string store = (root / "store").string();
  const std::string data = (root / "sample_a" / "dataset.csv").string();
  const std::vector<std::pair<std::string, std::string>> commands{
      {"simulate", R"({"model": "chafee", "initial_condition": [1, 0.5, 0.1], "final_time": 5})"},
      {"sample", R"({"model": "chafee", "seed": 5, "sampler": {"n_trajectories": 4, "record_time": 5, "snapshot_stride": 10}})"},
      {"train", R"({"kind": "closure", "model": "chafee", "seed": 5, "data": ")" + data + R"(", "store": ")" + store +
                    R"(", "net": {"hidden": [16, 16], "epochs": 20}})"},
      {"postprocess", R"({"model": "chafee", "closure": "mlp", "store": ")" + store +
                          R"(", "initial_condition": [1, 0.5, 0.1]})"},
      {"evaluate", R"({"store": ")" + store + R"(", "common": {"model": "chafee", "initial_condition": [1, 0.5, 0.1]},
                      "pipelines": [{"closure": "euler-galerkin"}, {"closure": "mlp"}]})"},
      {"ensemble", R"({"seed": 5, "n_ic": 10, "store": ")" + store + R"(", "common": {"model": "chafee"},
                      "pipelines": [{"closure": "none"}, {"closure": "mlp"}]})"},
  };
  std::vector<std::string> differing;
  for (const auto& [cmd, text] : commands) {
    const fs::path cfg = root / (cmd + ".json");
    write_file(cfg, text);
    const Json a = run_outputs(cmd, cfg, root / (cmd + "_a"));
    const Json b = run_outputs(cmd, cfg, root / (cmd + "_b"));
    if (a != b || a.contains("exit")) differing.push_back(cmd);
  }
  std::string bad;
  for (const auto& c : differing) bad += " " + c;

  const bool pass = worst_grad < kFdRelTol && worst_jac < kFdRelTol && order >= kRk4OrderMin && differing.empty();
  return {pass, "gradient rel. error " + fmt(worst_grad) + ", Jacobian " + fmt(worst_jac) + ", RK4 order " + fmt(order) +
                    ", commands reproduced: " + (differing.empty() ? "all 6" : "NOT" + bad)};
}

// ---------------------------------------------------------------- 10

Outcome toy_quadratic_manifold() {
  const auto t0 = Clock::now();
  SamplerConfig sc;
  sc.n_trajectories = 10;
  sc.ic_box.assign(2, {0.0, 2.0});
  sc.transient_time = 0.1;
  sc.record_time = 5.0;
  sc.snapshot_stride = 10;
  sc.seed = 10;
  const Dataset ds = sample_attractor(toy_field(0.01), sc, 1e-3);
  const PodModel pod = pod_fit(ds.snapshots, false);
  const Mat c = pod_project_batch(pod, ds.snapshots, 2);
  const QuadraticFit q = quadratic_fit(c.col(0), c.col(1));
  const double wall = seconds_since(t0);
  return {q.r_squared > kToyR2Min && wall < kToyBudget,
          "R^2 " + fmt(q.r_squared, 6) + " (POD2 = " + fmt(q.a) + " POD1^2 + " + fmt(q.b) + " POD1 + " + fmt(q.c) + "), " +
              std::to_string(ds.size()) + " snapshots, " + fmt(wall, 3) + " s"};
}

const std::map<int, std::pair<std::string, std::function<Outcome()>>>& criteria() {
  static const std::map<int, std::pair<std::string, std::function<Outcome()>>> c{
      {1, {"Chafee post-processing MAPE", chafee_postprocessing}},
      {2, {"Euler-Galerkin equals closed form", euler_galerkin_equivalence}},
      {3, {"POD energy on Chafee snapshots", pod_energy}},
      {4, {"KS Galerkin against quadrature", ks_galerkin}},
      {5, {"KS truncation failure and gray-box repair", gray_box_repair}},
      {6, {"diffusion maps suite", dmaps_suite}},
      {7, {"double DMAPs and autoencoder lifting", lifting_quality}},
      {8, {"inverse function theorem check", inverse_function_check}},
      {9, {"numerics hygiene", numerics_hygiene}},
      {10, {"toy quadratic manifold", toy_quadratic_manifold}},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--criterion" && i + 1 < argc) {
      which.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (which.empty())
    for (const auto& [n, c] : criteria()) which.push_back(n);

  int failed = 0;
  for (int n : which) {
    auto it = criteria().find(n);
    if (it == criteria().end()) {
      std::cerr << "no criterion " << n << "\n";
      return 2;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failed += !o.pass;
    std::cout << (o.pass ? "[PASS]" : "[FAIL]") << " criterion " << n << " " << it->second.first << ": " << o.detail
              << std::endl;
  }
  return failed ? 1 : 0;
}
