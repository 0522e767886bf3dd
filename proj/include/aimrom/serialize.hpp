#pragma once

#include <json.hpp>

#include "aimrom/dmaps.hpp"
#include "aimrom/nn.hpp"
#include "aimrom/pod.hpp"
#include "aimrom/rom.hpp"

namespace aimrom {

using Json = nlohmann::json;

Json matrix_to_json(const Mat& m);  // {"rows", "cols", "data": row-major}
Mat matrix_from_json(const Json& j);
Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j);

Json to_json(const Mlp& net);
Mlp mlp_from_json(const Json& j);

Json to_json(const Autoencoder& ae, const Mat& candidate_latents);
Autoencoder autoencoder_from_json(const Json& j, Mat* candidate_latents = nullptr);

Json to_json(const PodModel& pod);
PodModel pod_from_json(const Json& j);

// Training points are stored together with their content hash.
Json to_json(const DiffusionMap& dm);
DiffusionMap dmaps_from_json(const Json& j);

Json to_json(const GeometricHarmonics& gh);
GeometricHarmonics gh_from_json(const Json& j);

Json to_json(const LearnedField& field);
LearnedField learned_field_from_json(const Json& j);

// Hash of a matrix's shape and exact values.
std::string matrix_hash(const Mat& m);

}  // namespace aimrom
