#include "ctxcheck/bundle.hpp"

#include <fstream>
#include <sstream>

#include "ctxcheck/error.hpp"

namespace ctxcheck {

using nlohmann::json;

namespace {

const json& require(const json& object, const char* key, const char* where) {
  auto it = object.find(key);
  if (it == object.end()) throw FormatError(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

std::string require_string(const json& value, const std::string& what) {
  if (!value.is_string()) throw FormatError(what + " must be a string");
  return value.get<std::string>();
}

TaintEntry taint_from_json(const json& value) {
  // Either {"origin": ..., "chain": [...]} or the pair form [origin, [...]].
  const json* origin = nullptr;
  const json* chain = nullptr;
  if (value.is_object()) {
    origin = &require(value, "origin", "taint entry");
    chain = &require(value, "chain", "taint entry");
  } else if (value.is_array() && value.size() == 2) {
    origin = &value[0];
    chain = &value[1];
  } else {
    throw FormatError("taint entry must be an object or an [origin, chain] pair");
  }
  TaintEntry entry;
  entry.origin = SourceId(require_string(*origin, "taint origin"));
  if (entry.origin.empty()) throw FormatError("taint origin must not be empty");
  if (!chain->is_array()) throw FormatError("taint chain must be an array");
  for (const auto& id : *chain) {
    SanitizerId sanitizer(require_string(id, "sanitizer id"));
    if (sanitizer.empty()) throw FormatError("sanitizer id must not be empty");
    entry.chain.push_back(std::move(sanitizer));
  }
  return entry;
}

RegistryEntry entry_from_json(const json& value) {
  if (!value.is_object()) throw FormatError("registry entry must be an object");
  RegistryEntry entry;
  entry.sink = SinkId(require_string(require(value, "sink", "registry entry"), "sink"));
  if (entry.sink.empty()) throw FormatError("sink must not be empty");
  const json& taints = require(value, "taints", "registry entry");
  if (!taints.is_array()) throw FormatError("taints must be an array");
  std::set<TaintEntry> entries;
  for (const auto& taint : taints) entries.insert(taint_from_json(taint));
  entry.taint = TaintRecord(std::move(entries));
  return entry;
}

}  // namespace

std::string assemble_chunks(std::span<const std::string> chunks) {
  std::string out;
  for (const auto& chunk : chunks) out += chunk;
  return out;
}

json registry_to_json(const SinkRegistry& registry) {
  json out = json::array();
  for (const auto& [token, entry] : registry) {
    json taints = json::array();
    for (const auto& taint : entry.taint) {
      json chain = json::array();
      for (const auto& id : taint.chain) chain.push_back(id.str());
      taints.push_back({{"origin", taint.origin.str()}, {"chain", std::move(chain)}});
    }
    out.push_back({{"token", token}, {"sink", entry.sink.str()}, {"taints", std::move(taints)}});
  }
  return out;
}

SinkRegistry registry_from_json(const json& value) {
  SinkRegistry registry;
  if (value.is_array()) {
    for (const auto& item : value) {
      if (!item.is_object()) throw FormatError("registry entry must be an object");
      AnnotationToken token(require_string(require(item, "token", "registry entry"), "token"));
      registry.insert(token, entry_from_json(item));
    }
  } else if (value.is_object()) {
    for (const auto& [token, item] : value.items()) registry.insert(AnnotationToken(token), entry_from_json(item));
  } else {
    throw FormatError("registry must be an array or an object keyed by token");
  }
  return registry;
}

json bundle_to_json(const Bundle& bundle) {
  return {{"document", bundle.document}, {"registry", registry_to_json(bundle.registry)}};
}

Bundle bundle_from_json(const json& value) {
  if (!value.is_object()) throw FormatError("bundle must be a JSON object");
  Bundle bundle;
  if (auto it = value.find("document"); it != value.end()) {
    bundle.document = require_string(*it, "document");
  } else if (auto chunks = value.find("chunks"); chunks != value.end()) {
    if (!chunks->is_array()) throw FormatError("chunks must be an array of strings");
    std::vector<std::string> pieces;
    for (const auto& chunk : *chunks) pieces.push_back(require_string(chunk, "chunk"));
    bundle.document = assemble_chunks(pieces);
  } else {
    throw FormatError("bundle: missing field 'document'");
  }
  bundle.registry = registry_from_json(require(value, "registry", "bundle"));
  return bundle;
}

json context_map_to_json(const ContextMap& map) {
  json out = json::object();
  for (const auto& [id, sequences] : map.entries()) {
    json list = json::array();
    for (const auto& sequence : sequences) {
      json names = json::array();
      for (BrowserContext context : sequence) names.push_back(std::string(to_string(context)));
      list.push_back(std::move(names));
    }
    out[id.str()] = std::move(list);
  }
  return out;
}

ContextMap context_map_from_json(const json& value) {
  if (!value.is_object()) throw FormatError("context map must be a JSON object");
  ContextMap map;
  for (const auto& [id, sequences] : value.items()) {
    if (id.empty()) throw FormatError("context map: empty sanitizer id");
    const SanitizerId sanitizer(id);
    map.declare(sanitizer);
    if (!sequences.is_array()) throw FormatError("context map entry for " + id + " must be a list");
    for (const auto& sequence : sequences) {
      if (!sequence.is_array()) throw FormatError("context map entry for " + id + " must hold lists of names");
      ContextSequence parsed;
      for (const auto& name : sequence) {
        const auto context = browser_context_from_string(require_string(name, "context name"));
        if (!context) throw FormatError("unknown browser context '" + name.get<std::string>() + "'");
        parsed.push_back(*context);
      }
      map.add(sanitizer, std::move(parsed));
    }
  }
  return map;
}

std::string to_json_text(const json& value) {
  return value.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw FormatError("cannot read " + path);
  return buffer.str();
}

json read_json_file(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(path + ": " + e.what());
  }
}

void write_file(const std::string& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot open " + path + " for writing");
  out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
  if (!out) throw FormatError("cannot write " + path);
}

}  // namespace ctxcheck
