#include "iflow/ingest.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>
#include <system_error>

#include <nlohmann/json.hpp>

#include "iflow/errors.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace iflow {

namespace {

std::size_t line_of(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) throw SchemaError(std::string("missing field '") + key + "'", path);
  return *it;
}

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw StorageError("SHA-256 digest failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw StorageError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const fs::path& path, std::string_view data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw StorageError("cannot write " + tmp.string());
    out.write(data.data(), static_cast<std::streamsize>(data.size()));
    out.flush();
    if (!out) throw StorageError("short write to " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw StorageError("cannot rename into " + path.string() + ": " + ec.message());
}

json summary_json(const RunSummary& s) {
  return json{{"run_id", s.run_id},
              {"metadata", s.metadata},
              {"m", s.instances},
              {"n", s.classes},
              {"E", s.epochs}};
}

bool is_run_id(const std::string& id) {
  return id.size() == 64 && std::all_of(id.begin(), id.end(), [](char c) {
           return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f');
         });
}

}  // namespace

RunDocument parse_run_document(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), "line " + std::to_string(line_of(text, e.byte)));
  }
  if (!root.is_object()) throw SchemaError("run document must be an object", "$");

  RunDocument doc;
  const auto& version = require(root, "version", "$");
  if (!version.is_number_integer()) throw SchemaError("version must be an integer", "$.version");
  if (version.get<std::int64_t>() != 1) {
    throw SchemaError("unsupported format version " + version.dump(), "$.version");
  }
  doc.format_version = 1;

  const auto& classes = require(root, "classes", "$");
  if (!classes.is_array()) throw SchemaError("classes must be an array", "$.classes");
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (!classes[c].is_string()) {
      throw SchemaError("class label must be a string", "$.classes[" + std::to_string(c) + "]");
    }
    doc.classes.push_back(classes[c].get<std::string>());
  }
  // First occurrence wins; build_run rejects duplicates afterwards.
  std::unordered_map<std::string, std::int64_t> label_index;
  for (std::size_t c = 0; c < doc.classes.size(); ++c) {
    label_index.emplace(doc.classes[c], static_cast<std::int64_t>(c));
  }

  const auto& epochs = require(root, "epochs", "$");
  if (!epochs.is_number_integer()) throw SchemaError("epochs must be an integer", "$.epochs");
  doc.epochs = epochs.get<std::int64_t>();

  if (auto it = root.find("metadata"); it != root.end() && !it->is_null()) {
    if (!it->is_object()) throw SchemaError("metadata must be an object", "$.metadata");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) {
        throw SchemaError("metadata values must be strings", "$.metadata." + key);
      }
      doc.metadata.emplace(key, value.get<std::string>());
    }
  }

  auto resolve = [&](const json& v, const std::string& path) -> std::int64_t {
    if (v.is_string()) {
      auto it = label_index.find(v.get<std::string>());
      if (it == label_index.end()) {
        throw SchemaError("unknown label '" + v.get<std::string>() + "'", path);
      }
      return it->second;
    }
    if (v.is_number_integer()) return v.get<std::int64_t>();
    throw SchemaError("expected a class label or index", path);
  };

  const auto& instances = require(root, "instances", "$");
  if (!instances.is_array()) throw SchemaError("instances must be an array", "$.instances");
  doc.instances.reserve(instances.size());
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto path = "$.instances[" + std::to_string(i) + "]";
    const auto& obj = instances[i];
    if (!obj.is_object()) throw SchemaError("instance must be an object", path);

    RunDocument::Instance inst;
    const auto& id = require(obj, "id", path);
    if (!id.is_string()) throw SchemaError("instance id must be a string", path + ".id");
    inst.id = id.get<std::string>();

    const auto& label = require(obj, "label", path);
    if (!label.is_string()) throw SchemaError("label must be a class name", path + ".label");
    inst.label = resolve(label, path + ".label");

    const auto& preds = require(obj, "predictions", path);
    if (!preds.is_array()) throw SchemaError("predictions must be an array", path + ".predictions");
    if (doc.epochs >= 0 && preds.size() != static_cast<std::size_t>(doc.epochs)) {
      throw SchemaError("length mismatch: expected " + std::to_string(doc.epochs) +
                            " predictions, got " + std::to_string(preds.size()),
                        path + ".predictions");
    }
    inst.predictions.reserve(preds.size());
    for (std::size_t j = 0; j < preds.size(); ++j) {
      inst.predictions.push_back(
          resolve(preds[j], path + ".predictions[" + std::to_string(j) + "]"));
    }

    if (auto it = obj.find("image"); it != obj.end() && !it->is_null()) {
      if (!it->is_string()) throw SchemaError("image must be a string", path + ".image");
      inst.image = it->get<std::string>();
    }
    doc.instances.push_back(std::move(inst));
  }
  return doc;
}

std::string canonical_json(const RunDocument& doc) {
  ordered_json out;
  out["version"] = doc.format_version;
  out["classes"] = doc.classes;
  out["epochs"] = doc.epochs;
  auto& meta = out["metadata"] = ordered_json::object();
  for (const auto& [k, v] : doc.metadata) meta[k] = v;  // std::map: sorted keys
  auto& instances = out["instances"] = ordered_json::array();
  for (const auto& inst : doc.instances) {
    ordered_json obj;
    obj["id"] = inst.id;
    const bool known = inst.label >= 0 && static_cast<std::size_t>(inst.label) < doc.classes.size();
    if (known) {
      obj["label"] = doc.classes[static_cast<std::size_t>(inst.label)];
    } else {
      obj["label"] = inst.label;
    }
    obj["predictions"] = inst.predictions;
    if (inst.image) obj["image"] = *inst.image;
    instances.push_back(std::move(obj));
  }
  return out.dump();
}

std::string content_digest(const RunDocument& doc) { return sha256_hex(canonical_json(doc)); }

RunDocument to_document(const TrainingRun& run) {
  RunDocument doc;
  doc.classes = run.class_labels();
  doc.epochs = static_cast<std::int64_t>(run.epoch_count());
  doc.metadata = run.metadata();
  doc.instances.reserve(run.instance_count());
  for (const auto& rec : run.instances()) {
    RunDocument::Instance inst;
    inst.id = rec.instance_id;
    inst.label = rec.true_class;
    inst.predictions.assign(rec.predictions.begin(), rec.predictions.end());
    inst.image = rec.payload_ref;
    doc.instances.push_back(std::move(inst));
  }
  return doc;
}

TrainingRun load_run_text(std::string_view text) {
  auto doc = parse_run_document(text);
  auto id = content_digest(doc);
  return build_run(doc, std::move(id));
}

RunStore::RunStore(fs::path root) : root_(std::move(root)) {
  const auto index_path = root_ / "index.json";
  std::error_code ec;
  if (!fs::is_regular_file(index_path, ec)) return;
  json idx;
  try {
    idx = json::parse(read_file(index_path));
  } catch (const json::exception& e) {
    throw StorageError(std::string("corrupt run index: ") + e.what(), index_path.string());
  }
  for (const auto& e : idx.at("runs")) {
    RunSummary s;
    s.run_id = e.at("run_id").get<std::string>();
    s.metadata = e.at("metadata").get<Metadata>();
    s.instances = e.at("m").get<std::size_t>();
    s.classes = e.at("n").get<std::size_t>();
    s.epochs = e.at("E").get<std::size_t>();
    index_.push_back(std::move(s));
  }
}

fs::path RunStore::run_path(const std::string& run_id) const { return root_ / (run_id + ".json"); }

void RunStore::write_index() const {
  json runs = json::array();
  for (const auto& s : index_) runs.push_back(summary_json(s));
  write_file_atomic(root_ / "index.json", json{{"runs", runs}}.dump(1));
}

std::string RunStore::store_run(const RunDocument& doc) {
  auto text = canonical_json(doc);
  auto id = sha256_hex(text);
  const auto run = build_run(doc, id);

  std::unique_lock lock(mutex_);
  auto known = std::find_if(index_.begin(), index_.end(),
                            [&](const RunSummary& s) { return s.run_id == id; });
  if (known != index_.end()) return id;

  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec || !fs::is_directory(root_)) {
    throw StorageError("cannot create store root: " + (ec ? ec.message() : "not a directory"),
                       root_.string());
  }
  write_file_atomic(run_path(id), text);

  index_.push_back(RunSummary{id, run.metadata(), run.instance_count(), run.class_count(),
                              run.epoch_count()});
  try {
    write_index();
  } catch (...) {
    index_.pop_back();
    throw;
  }
  return id;
}

TrainingRun RunStore::load_run(const std::string& run_id) const {
  std::string text;
  {
    std::shared_lock lock(mutex_);
    const bool known = std::any_of(index_.begin(), index_.end(),
                                   [&](const RunSummary& s) { return s.run_id == run_id; });
    if (!is_run_id(run_id) || !known) throw NotFound("unknown run '" + run_id + "'", "run_id");
    text = read_file(run_path(run_id));
  }
  auto doc = parse_run_document(text);
  return build_run(doc, run_id);
}

std::vector<RunSummary> RunStore::list_runs() const {
  std::shared_lock lock(mutex_);
  return index_;
}

RunSummary RunStore::summary(const std::string& run_id) const {
  std::shared_lock lock(mutex_);
  for (const auto& s : index_) {
    if (s.run_id == run_id) return s;
  }
  throw NotFound("unknown run '" + run_id + "'", "run_id");
}

}  // namespace iflow
