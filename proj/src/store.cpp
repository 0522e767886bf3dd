#include "aimrom/store.hpp"

#include "aimrom/error.hpp"
#include "aimrom/io.hpp"

namespace aimrom {

using Json = nlohmann::json;

namespace {

std::filesystem::path model_path(const std::filesystem::path& root, const std::string& hash) {
  return root / "models" / (hash + ".json");
}

}  // namespace

ModelStore::ModelStore(std::filesystem::path root) : root_(std::move(root)) {
  const auto index = *root_ / "index.json";
  if (!std::filesystem::exists(index)) return;
  Json j;
  try {
    j = Json::parse(read_file(index));
  } catch (const Json::parse_error& e) {
    throw ConfigError("model store index " + index.string() + " is corrupt: " + e.what());
  }
  for (const auto& [alias, e] : j.at("aliases").items())
    entries_[alias] = {alias, e.at("kind").get<std::string>(), e.at("hash").get<std::string>(),
                       e.value("provenance", Json::object())};
}

std::string ModelStore::put(const std::string& alias, const std::string& kind, const Json& model,
                            const Json& provenance) {
  if (alias.empty()) throw InvalidInput("model store: empty alias");
  const std::string hash = sha256_hex(model.dump());
  // Files are shared by identical models, so provenance stays with the alias in the index.
  Json doc{{"schema", "aimrom.store-entry.v1"}, {"kind", kind}, {"hash", hash}, {"model", model}};
  entries_[alias] = {alias, kind, hash, provenance};
  if (root_) {
    write_file(model_path(*root_, hash), doc.dump(1) + "\n");
    write_index();
  }
  docs_[alias] = std::move(doc);
  return hash;
}

void ModelStore::write_index() const {
  Json aliases = Json::object();
  for (const auto& [alias, e] : entries_) aliases[alias] = {{"kind", e.kind}, {"hash", e.hash}, {"provenance", e.provenance}};
  write_file(*root_ / "index.json", Json{{"schema", "aimrom.store-index.v1"}, {"aliases", aliases}}.dump(2) + "\n");
}

bool ModelStore::contains(const std::string& alias) const { return entries_.count(alias) > 0; }

std::vector<std::string> ModelStore::aliases() const {
  std::vector<std::string> out;
  for (const auto& [alias, e] : entries_) out.push_back(alias);
  return out;
}

const ModelStore::Entry& ModelStore::entry(const std::string& alias) const {
  auto it = entries_.find(alias);
  if (it == entries_.end()) {
    std::string list;
    for (const auto& a : aliases()) list += (list.empty() ? "" : ", ") + a;
    throw MissingArtifact("no model with alias '" + alias + "' in the store; available: " +
                          (list.empty() ? "(none)" : list));
  }
  return it->second;
}

const Json& ModelStore::document(const std::string& alias) const {
  const Entry& e = entry(alias);
  auto it = docs_.find(alias);
  if (it != docs_.end()) return it->second;
  const auto path = model_path(*root_, e.hash);
  Json doc;
  try {
    doc = Json::parse(read_file(path));
  } catch (const Json::parse_error& err) {
    throw MissingArtifact("model file " + path.string() + " is corrupt: " + err.what());
  }
  if (sha256_hex(doc.at("model").dump()) != e.hash)
    throw MissingArtifact("model file " + path.string() + " does not match its content hash");
  return docs_[alias] = std::move(doc);
}

const Json& ModelStore::model(const std::string& alias, const std::string& kind) const {
  const Entry& e = entry(alias);
  if (e.kind != kind)
    throw InvalidInput("model '" + alias + "' is a " + e.kind + ", expected a " + kind);
  return document(alias).at("model");
}

Json ModelStore::provenance(const std::string& alias) const { return entry(alias).provenance; }

}  // namespace aimrom
