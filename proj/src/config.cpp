#include "aimrom/config.hpp"

#include <cmath>
#include <limits>

#include "aimrom/error.hpp"
#include "aimrom/io.hpp"

namespace aimrom {

using Json = nlohmann::json;

int ConfigSource::line_of(const std::string& key) const {
  const auto pos = text.find("\"" + key + "\"");
  if (pos == std::string::npos) return 0;
  int line = 1;
  for (size_t i = 0; i < pos; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Json parse_config(const std::string& text, const std::string& name) {
  try {
    Json j = Json::parse(text);
    if (!j.is_object()) throw ConfigError(name + ": top level must be an object");
    return j;
  } catch (const Json::parse_error& e) {
    throw ConfigError(name + ": " + e.what());
  }
}

Json load_config(const std::filesystem::path& path, std::shared_ptr<ConfigSource>* source) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const MissingArtifact&) {
    throw ConfigError("cannot read config file " + path.string());
  }
  if (source) *source = std::make_shared<ConfigSource>(ConfigSource{text, path.filename().string()});
  return parse_config(text, path.filename().string());
}

ConfigSection::ConfigSection(const Json& j, std::string path, std::shared_ptr<const ConfigSource> src)
    : j_(j), path_(std::move(path)), src_(std::move(src)) {
  if (!j_.is_object()) {
    const std::string where = path_.empty() ? "top level" : "'" + path_ + "'";
    throw ConfigError("config " + where + " must be an object");
  }
}

void ConfigSection::fail(const std::string& key, const std::string& why) const {
  std::string msg = "config";
  if (src_) {
    msg += " " + src_->name;
    if (int line = src_->line_of(key)) msg += " line " + std::to_string(line);
  }
  const std::string full = path_.empty() ? key : path_ + "." + key;
  throw ConfigError(msg + ": '" + full + "' " + why);
}

bool ConfigSection::has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

const Json* ConfigSection::get(const std::string& key) {
  used_.insert(key);
  if (!has(key)) return nullptr;
  return &j_.at(key);
}

double ConfigSection::number(const std::string& key, std::optional<double> fallback) {
  const Json* v = get(key);
  if (!v) {
    if (fallback) return *fallback;
    fail(key, "is required");
  }
  if (!v->is_number()) fail(key, "must be a number");
  const double d = v->get<double>();
  if (!std::isfinite(d)) fail(key, "must be finite");
  return d;
}

int ConfigSection::integer(const std::string& key, std::optional<int> fallback) {
  const Json* v = get(key);
  if (!v) {
    if (fallback) return *fallback;
    fail(key, "is required");
  }
  if (!v->is_number_integer()) fail(key, "must be an integer");
  const auto i = v->get<long long>();
  if (i < std::numeric_limits<int>::min() || i > std::numeric_limits<int>::max()) fail(key, "is out of range");
  return static_cast<int>(i);
}

std::uint64_t ConfigSection::seed(const std::string& key, std::uint64_t fallback) {
  const Json* v = get(key);
  if (!v) return fallback;
  if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0))
    fail(key, "must be a non-negative integer");
  return v->get<std::uint64_t>();
}

bool ConfigSection::boolean(const std::string& key, std::optional<bool> fallback) {
  const Json* v = get(key);
  if (!v) {
    if (fallback) return *fallback;
    fail(key, "is required");
  }
  if (!v->is_boolean()) fail(key, "must be true or false");
  return v->get<bool>();
}

std::string ConfigSection::text(const std::string& key, std::optional<std::string> fallback) {
  const Json* v = get(key);
  if (!v) {
    if (fallback) return *fallback;
    fail(key, "is required");
  }
  if (!v->is_string()) fail(key, "must be a string");
  return v->get<std::string>();
}

std::string ConfigSection::choice(const std::string& key, const std::vector<std::string>& allowed,
                                  std::optional<std::string> fallback) {
  const std::string s = text(key, fallback);
  for (const auto& a : allowed)
    if (a == s) return s;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  fail(key, "has unknown value '" + s + "' (expected one of: " + list + ")");
}

Vec ConfigSection::vector(const std::string& key, std::optional<Vec> fallback) {
  const Json* v = get(key);
  if (!v) {
    if (fallback) return *fallback;
    fail(key, "is required");
  }
  if (!v->is_array()) fail(key, "must be an array of numbers");
  Vec out(static_cast<Eigen::Index>(v->size()));
  for (size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_number()) fail(key, "must be an array of numbers");
    out[static_cast<Eigen::Index>(i)] = (*v)[i].get<double>();
  }
  if (!out.allFinite()) fail(key, "must contain finite numbers");
  return out;
}

std::vector<int> ConfigSection::integers(const std::string& key, std::optional<std::vector<int>> fallback) {
  const Json* v = get(key);
  if (!v) {
    if (fallback) return *fallback;
    fail(key, "is required");
  }
  if (!v->is_array()) fail(key, "must be an array of integers");
  std::vector<int> out;
  for (const auto& e : *v) {
    if (!e.is_number_integer()) fail(key, "must be an array of integers");
    out.push_back(e.get<int>());
  }
  return out;
}

std::map<std::string, std::string> ConfigSection::string_map(const std::string& key) {
  const Json* v = get(key);
  std::map<std::string, std::string> out;
  if (!v) return out;
  if (!v->is_object()) fail(key, "must be an object of strings");
  for (const auto& [k, s] : v->items()) {
    if (!s.is_string()) fail(key, "must be an object of strings");
    out[k] = s.get<std::string>();
  }
  return out;
}

std::vector<std::pair<double, double>> ConfigSection::box(const std::string& key, int dim,
                                                          std::optional<std::pair<double, double>> fallback) {
  const Json* v = get(key);
  if (!v) {
    if (fallback) return std::vector<std::pair<double, double>>(dim, *fallback);
    fail(key, "is required");
  }
  auto pair_of = [&](const Json& p) -> std::pair<double, double> {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      fail(key, "must be [lo, hi] or a list of [lo, hi] pairs");
    const double lo = p[0].get<double>(), hi = p[1].get<double>();
    if (!(lo <= hi)) fail(key, "needs lo <= hi");
    return {lo, hi};
  };
  if (v->is_array() && v->size() == 2 && (*v)[0].is_number()) return std::vector(dim, pair_of(*v));
  if (!v->is_array()) fail(key, "must be [lo, hi] or a list of [lo, hi] pairs");
  if (static_cast<int>(v->size()) != dim) fail(key, "needs " + std::to_string(dim) + " intervals");
  std::vector<std::pair<double, double>> out;
  for (const auto& p : *v) out.push_back(pair_of(p));
  return out;
}

ConfigSection ConfigSection::section(const std::string& key) {
  const Json* v = get(key);
  const std::string sub = path_.empty() ? key : path_ + "." + key;
  if (!v) return ConfigSection(Json::object(), sub, src_);
  if (!v->is_object()) fail(key, "must be an object");
  return ConfigSection(*v, sub, src_);
}

std::vector<ConfigSection> ConfigSection::sections(const std::string& key) {
  const Json* v = get(key);
  if (!v) fail(key, "is required");
  if (!v->is_array() || v->empty()) fail(key, "must be a non-empty array of objects");
  std::vector<ConfigSection> out;
  const std::string sub = path_.empty() ? key : path_ + "." + key;
  for (size_t i = 0; i < v->size(); ++i) {
    if (!(*v)[i].is_object()) fail(key, "must be a non-empty array of objects");
    out.emplace_back((*v)[i], sub + "[" + std::to_string(i) + "]", src_);
  }
  return out;
}

void ConfigSection::finish() const {
  for (const auto& [k, v] : j_.items())
    if (!used_.count(k)) fail(k, "is not a recognized key");
}

void override_seeds(Json& j, std::uint64_t seed) {
  if (j.is_object()) {
    for (auto& [k, v] : j.items()) {
      if (k == "seed") v = seed;
      else override_seeds(v, seed);
    }
  } else if (j.is_array()) {
    for (auto& v : j) override_seeds(v, seed);
  }
}

}  // namespace aimrom
