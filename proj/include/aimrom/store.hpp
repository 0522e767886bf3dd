#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace aimrom {

// Serialized models keyed by content hash, looked up by human alias.
// Without a root directory the store lives in memory only.
class ModelStore {
 public:
  struct Entry {
    std::string alias;
    std::string kind;
    std::string hash;  // sha256 of the serialized model
    nlohmann::json provenance;
  };

  ModelStore() = default;
  explicit ModelStore(std::filesystem::path root);

  // Returns the content hash. Re-putting an alias replaces it.
  std::string put(const std::string& alias, const std::string& kind, const nlohmann::json& model,
                  const nlohmann::json& provenance = nlohmann::json::object());

  bool contains(const std::string& alias) const;
  const Entry& entry(const std::string& alias) const;
  // MissingArtifact listing the available aliases if alias is unknown; InvalidInput on kind mismatch.
  const nlohmann::json& model(const std::string& alias, const std::string& kind) const;
  nlohmann::json provenance(const std::string& alias) const;
  std::vector<std::string> aliases() const;
  const std::optional<std::filesystem::path>& root() const { return root_; }

 private:
  const nlohmann::json& document(const std::string& alias) const;
  void write_index() const;

  std::optional<std::filesystem::path> root_;
  std::map<std::string, Entry> entries_;
  mutable std::map<std::string, nlohmann::json> docs_;
};

}  // namespace aimrom
