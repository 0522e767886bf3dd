#include "aimrom/serialize.hpp"

#include <sstream>

#include "aimrom/error.hpp"
#include "aimrom/io.hpp"

namespace aimrom {

namespace {

void expect_schema(const Json& j, const std::string& schema) {
  if (!j.is_object() || !j.contains("schema"))
    throw InvalidInput("model document has no schema tag (expected " + schema + ")");
  const std::string found = j.at("schema").get<std::string>();
  if (found != schema) throw InvalidInput("expected schema " + schema + ", found " + found);
}

Json scaling_to_json(const Scaling& s) {
  return {{"shift", vector_to_json(s.shift)}, {"scale", vector_to_json(s.scale)}};
}

Scaling scaling_from_json(const Json& j) {
  return {vector_from_json(j.at("shift")), vector_from_json(j.at("scale"))};
}

// Row-major CSV block.
std::string matrix_csv_block(const Mat& m) { return csv_string({}, m); }

Mat matrix_from_csv_block(const std::string& s, Eigen::Index rows, Eigen::Index cols) {
  Mat m(rows, cols);
  std::istringstream in(s);
  std::string line;
  for (Eigen::Index r = 0; r < rows; ++r) {
    if (!std::getline(in, line)) throw InvalidInput("csv block: too few rows");
    std::istringstream ls(line);
    std::string cell;
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!std::getline(ls, cell, ',')) throw InvalidInput("csv block: too few columns");
      m(r, c) = std::stod(cell);
    }
  }
  return m;
}

}  // namespace

Json matrix_to_json(const Mat& m) {
  std::vector<double> data;
  data.reserve(static_cast<size_t>(m.size()));
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Mat matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const auto data = j.at("data").get<std::vector<double>>();
  if (static_cast<Eigen::Index>(data.size()) != rows * cols) throw InvalidInput("matrix document: size mismatch");
  Mat m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[static_cast<size_t>(r * cols + c)];
  return m;
}

Json vector_to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vector_from_json(const Json& j) {
  const auto d = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(d.data(), static_cast<Eigen::Index>(d.size()));
}

std::string matrix_hash(const Mat& m) {
  std::string bytes = std::to_string(m.rows()) + "x" + std::to_string(m.cols()) + ":";
  const Mat rm = m;
  bytes.append(reinterpret_cast<const char*>(rm.data()), static_cast<size_t>(rm.size()) * sizeof(double));
  return sha256_hex(bytes);
}

Json to_json(const Mlp& net) {
  Json layers = Json::array();
  for (const auto& l : net.layers())
    layers.push_back({{"weights", matrix_to_json(l.w)}, {"bias", vector_to_json(l.b)}});
  return {{"schema", "aimrom.mlp.v1"},
          {"layer_sizes", net.layer_sizes()},
          {"hidden_activation", "tanh"},
          {"output_activation", "identity"},
          {"layers", layers},
          {"input_scaling", scaling_to_json(net.input_scaling())},
          {"output_scaling", scaling_to_json(net.output_scaling())},
          {"seed", net.seed}};
}

Mlp mlp_from_json(const Json& j) {
  expect_schema(j, "aimrom.mlp.v1");
  std::vector<Layer> layers;
  for (const auto& l : j.at("layers")) layers.push_back({matrix_from_json(l.at("weights")), vector_from_json(l.at("bias"))});
  Mlp net(std::move(layers));
  if (net.layer_sizes() != j.at("layer_sizes").get<std::vector<int>>())
    throw InvalidInput("mlp document: layer_sizes disagree with weights");
  net.set_input_scaling(scaling_from_json(j.at("input_scaling")));
  net.set_output_scaling(scaling_from_json(j.at("output_scaling")));
  net.seed = j.at("seed").get<std::uint64_t>();
  return net;
}

Json to_json(const Autoencoder& ae, const Mat& candidate_latents) {
  return {{"schema", "aimrom.autoencoder.v1"},
          {"bottleneck_dim", ae.bottleneck_dim()},
          {"encoder", to_json(ae.encoder)},
          {"decoder", to_json(ae.decoder)},
          {"candidate_latents", matrix_to_json(candidate_latents)}};
}

Autoencoder autoencoder_from_json(const Json& j, Mat* candidate_latents) {
  expect_schema(j, "aimrom.autoencoder.v1");
  Autoencoder ae{mlp_from_json(j.at("encoder")), mlp_from_json(j.at("decoder"))};
  ae.validate();
  if (candidate_latents) *candidate_latents = matrix_from_json(j.at("candidate_latents"));
  return ae;
}

Json to_json(const PodModel& pod) {
  return {{"schema", "aimrom.pod.v1"},
          {"centered", pod.centered},
          {"numerical_rank", pod.numerical_rank},
          {"mean", vector_to_json(pod.mean)},
          {"singular_values", vector_to_json(pod.singular_values)},
          {"energy_fractions", vector_to_json(pod.energy_fractions)},
          {"modes_rows", pod.modes.rows()},
          {"modes_cols", pod.modes.cols()},
          {"modes_csv", matrix_csv_block(pod.modes)}};
}

PodModel pod_from_json(const Json& j) {
  expect_schema(j, "aimrom.pod.v1");
  PodModel p;
  p.centered = j.at("centered").get<bool>();
  p.numerical_rank = j.at("numerical_rank").get<int>();
  p.mean = vector_from_json(j.at("mean"));
  p.singular_values = vector_from_json(j.at("singular_values"));
  p.energy_fractions = vector_from_json(j.at("energy_fractions"));
  p.modes = matrix_from_csv_block(j.at("modes_csv").get<std::string>(), j.at("modes_rows").get<Eigen::Index>(),
                                  j.at("modes_cols").get<Eigen::Index>());
  return p;
}

Json to_json(const DiffusionMap& dm) {
  return {{"schema", "aimrom.dmaps.v1"},
          {"epsilon", dm.epsilon},
          {"alpha_density", dm.alpha_density},
          {"train_points_hash", matrix_hash(dm.train_points)},
          {"train_points", matrix_to_json(dm.train_points)},
          {"density", vector_to_json(dm.density)},
          {"eigenvalues", vector_to_json(dm.eigenvalues)},
          {"eigenvectors", matrix_to_json(dm.eigenvectors)},
          {"kept_indices", dm.kept_indices}};
}

DiffusionMap dmaps_from_json(const Json& j) {
  expect_schema(j, "aimrom.dmaps.v1");
  DiffusionMap dm;
  dm.epsilon = j.at("epsilon").get<double>();
  dm.alpha_density = j.at("alpha_density").get<double>();
  dm.train_points = matrix_from_json(j.at("train_points"));
  if (matrix_hash(dm.train_points) != j.at("train_points_hash").get<std::string>())
    throw InvalidInput("dmaps document: training data does not match its hash");
  dm.density = vector_from_json(j.at("density"));
  dm.eigenvalues = vector_from_json(j.at("eigenvalues"));
  dm.eigenvectors = matrix_from_json(j.at("eigenvectors"));
  dm.kept_indices = j.at("kept_indices").get<std::vector<int>>();
  return dm;
}

Json to_json(const GeometricHarmonics& gh) {
  return {{"schema", "aimrom.geometric-harmonics.v1"},
          {"epsilon_star", gh.epsilon_star},
          {"delta", gh.delta},
          {"sigma0", gh.sigma0},
          {"train_inputs", matrix_to_json(gh.train_inputs)},
          {"sigma", vector_to_json(gh.sigma)},
          {"psi", matrix_to_json(gh.psi)},
          {"coefficients", matrix_to_json(gh.coefficients)}};
}

GeometricHarmonics gh_from_json(const Json& j) {
  expect_schema(j, "aimrom.geometric-harmonics.v1");
  GeometricHarmonics gh;
  gh.epsilon_star = j.at("epsilon_star").get<double>();
  gh.delta = j.at("delta").get<double>();
  gh.sigma0 = j.at("sigma0").get<double>();
  gh.train_inputs = matrix_from_json(j.at("train_inputs"));
  gh.sigma = vector_from_json(j.at("sigma"));
  gh.psi = matrix_from_json(j.at("psi"));
  gh.coefficients = matrix_from_json(j.at("coefficients"));
  gh.refresh_weights();
  return gh;
}

Json to_json(const LearnedField& field) {
  Json j{{"schema", "aimrom.learned-field.v1"},
         {"kind", field.kind == FieldKind::gray_box ? "gray-box" : "black-box"},
         {"dim", field.dim},
         {"net", to_json(field.net)}};
  if (field.kind == FieldKind::gray_box) {
    if (!field.base_spec) throw InvalidInput("gray-box field without a named base cannot be serialized");
    j["base"] = {{"model", field.base_spec->model},
                 {"modes", field.base_spec->modes},
                 {"nu", field.base_spec->params.nu},
                 {"epsilon", field.base_spec->params.epsilon}};
  }
  return j;
}

LearnedField learned_field_from_json(const Json& j) {
  expect_schema(j, "aimrom.learned-field.v1");
  LearnedField f;
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gray-box") f.kind = FieldKind::gray_box;
  else if (kind == "black-box") f.kind = FieldKind::black_box;
  else throw InvalidInput("learned field: unknown kind '" + kind + "'");
  f.dim = j.at("dim").get<int>();
  f.net = mlp_from_json(j.at("net"));
  if (f.kind == FieldKind::gray_box) {
    const Json& b = j.at("base");
    BaseFieldSpec spec{b.at("model").get<std::string>(), b.at("modes").get<int>(),
                       ModelParams{b.at("nu").get<double>(), b.at("epsilon").get<double>()}};
    f.base = spec.build();
    f.base_spec = spec;
  }
  f.validate();
  return f;
}

}  // namespace aimrom
