#pragma once

#include <cstdint>
#include <map>
#include <filesystem>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "aimrom/linalg.hpp"

namespace aimrom {

// Parsed config text, kept around so schema errors can cite line numbers.
struct ConfigSource {
  std::string text;
  std::string name;  // file name for messages

  // 1-based line of the first occurrence of "key", or 0.
  int line_of(const std::string& key) const;
};

nlohmann::json parse_config(const std::string& text, const std::string& name);
nlohmann::json load_config(const std::filesystem::path& path, std::shared_ptr<ConfigSource>* source = nullptr);

// Typed, schema-checked access to one JSON object. Every key read is recorded;
// finish() rejects the rest.
class ConfigSection {
 public:
  ConfigSection(const nlohmann::json& j, std::string path, std::shared_ptr<const ConfigSource> src);

  bool has(const std::string& key) const;
  double number(const std::string& key, std::optional<double> fallback = std::nullopt);
  int integer(const std::string& key, std::optional<int> fallback = std::nullopt);
  std::uint64_t seed(const std::string& key, std::uint64_t fallback);
  bool boolean(const std::string& key, std::optional<bool> fallback = std::nullopt);
  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt);
  // One of the allowed values.
  std::string choice(const std::string& key, const std::vector<std::string>& allowed,
                     std::optional<std::string> fallback = std::nullopt);
  Vec vector(const std::string& key, std::optional<Vec> fallback = std::nullopt);
  std::vector<int> integers(const std::string& key, std::optional<std::vector<int>> fallback = std::nullopt);
  std::map<std::string, std::string> string_map(const std::string& key);
  // [[lo,hi], ...] or a single [lo,hi] repeated dim times.
  std::vector<std::pair<double, double>> box(const std::string& key, int dim,
                                             std::optional<std::pair<double, double>> fallback = std::nullopt);
  ConfigSection section(const std::string& key);
  std::vector<ConfigSection> sections(const std::string& key);
  void finish() const;

  [[noreturn]] void fail(const std::string& key, const std::string& why) const;
  const nlohmann::json& raw() const { return j_; }

 private:
  const nlohmann::json* get(const std::string& key);

  nlohmann::json j_;
  std::string path_;
  std::shared_ptr<const ConfigSource> src_;
  std::set<std::string> used_;
};

// Sets every "seed" key (at any depth) and the top-level one.
void override_seeds(nlohmann::json& j, std::uint64_t seed);

}  // namespace aimrom
