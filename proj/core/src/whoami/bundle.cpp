#include "rai/whoami/bundle.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace rai::whoami {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw BundleError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::string title_of(const std::string& body, const fs::path& file) {
  std::string line = body.substr(0, body.find('\n'));
  line.erase(0, line.find_first_not_of("# "));
  line = trim(line);
  return line.empty() ? file.stem().string() : line;
}

}  // namespace

IdentityBundle IdentityBundle::load(const fs::path& dir, std::shared_ptr<llm::Embedder> embedder,
                                    const ChunkingOptions& chunking) {
  if (!fs::is_directory(dir)) throw BundleError("identity bundle not found: " + dir.string());
  IdentityBundle bundle;
  bundle.identity_text = trim(read_file(dir / "identity.txt"));
  if (bundle.identity_text.empty()) throw BundleError("identity.txt is empty");
  if (fs::exists(dir / "rules.txt")) bundle.rules_text = trim(read_file(dir / "rules.txt"));

  std::vector<SourceDocument> docs;
  if (fs::is_directory(dir / "docs")) {
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir / "docs")) {
      const auto ext = entry.path().extension();
      if (entry.is_regular_file() && (ext == ".txt" || ext == ".md")) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& f : files) {
      std::string body = read_file(f);
      docs.push_back({f.filename().string(), title_of(body, f), std::move(body)});
    }
  }
  auto store = std::make_shared<ChunkStore>(std::move(embedder));
  try {
    store->ingest(docs, chunking);
  } catch (const std::invalid_argument& ex) {
    throw BundleError(ex.what());
  }
  bundle.store = std::move(store);

  const fs::path manifest = dir / "assets" / "manifest.json";
  if (fs::exists(manifest)) {
    json doc;
    try {
      doc = json::parse(read_file(manifest));
    } catch (const json::exception& ex) {
      throw BundleError("manifest.json: " + std::string(ex.what()));
    }
    if (!doc.is_object()) throw BundleError("manifest.json must map asset ids to entries");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
      const json& entry = it.value();
      if (!entry.is_object() || !entry.contains("kind") || !entry.contains("file")) {
        throw BundleError("asset '" + it.key() + "' needs kind and file");
      }
      Asset asset;
      const std::string kind = entry["kind"].get<std::string>();
      if (kind == "image") {
        asset.kind = Asset::Kind::kImage;
      } else if (kind == "body_description") {
        asset.kind = Asset::Kind::kBodyDescription;
      } else {
        throw BundleError("asset '" + it.key() + "' has unknown kind '" + kind + "'");
      }
      asset.path = dir / "assets" / entry["file"].get<std::string>();
      if (!fs::exists(asset.path)) throw BundleError("asset file missing: " + asset.path.string());
      if (asset.kind == Asset::Kind::kBodyDescription) asset.text = trim(read_file(asset.path));
      bundle.assets.emplace(it.key(), std::move(asset));
    }
  }
  return bundle;
}

std::string build_system_prompt(const IdentityBundle& bundle, const PromptOptions& options) {
  std::string out = bundle.identity_text;
  if (options.include_rules && !bundle.rules_text.empty()) {
    out += "\n\nRules:\n" + bundle.rules_text;
  }
  for (const auto& [id, asset] : bundle.assets) {
    if (asset.kind != Asset::Kind::kBodyDescription) continue;
    out += "\n\nBody description (" + id + "):\n" + asset.text;
  }
  out += "\n\n";
  out += kQueryIdentityHint;
  return out;
}

EmbodimentCondition attach_self_image(const IdentityBundle& bundle, const std::string& asset_id) {
  auto it = bundle.assets.find(asset_id);
  if (it == bundle.assets.end()) throw UnknownAsset("unknown asset '" + asset_id + "'");
  if (it->second.kind != Asset::Kind::kImage) throw WrongKind("asset '" + asset_id + "' is not an image");
  return EmbodimentCondition{asset_id};
}

std::vector<llm::ChatMessage> open_conversation(const std::string& system_prompt,
                                                const EmbodimentCondition& condition,
                                                const std::string& user_text) {
  std::vector<llm::ChatMessage> out;
  out.push_back(llm::ChatMessage::system(system_prompt));
  auto first = llm::ChatMessage::user(user_text);
  if (condition.self_image) first.parts.push_back(toolkit::ContentPart::make_image(*condition.self_image));
  out.push_back(std::move(first));
  return out;
}

std::optional<llm::ImageData> load_image(const IdentityBundle& bundle, const std::string& asset_id) {
  auto it = bundle.assets.find(asset_id);
  if (it == bundle.assets.end() || it->second.kind != Asset::Kind::kImage) return std::nullopt;
  auto ext = it->second.path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  std::string mime = "application/octet-stream";
  if (ext == ".png") mime = "image/png";
  if (ext == ".jpg" || ext == ".jpeg") mime = "image/jpeg";
  if (ext == ".svg") mime = "image/svg+xml";
  if (ext == ".ppm") mime = "image/x-portable-pixmap";
  return llm::ImageData{mime, read_file(it->second.path)};
}

}  // namespace rai::whoami
