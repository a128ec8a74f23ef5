#pragma once

// JSON file formats.
//
// Bundle:
//   { "document": "...",            // or "chunks": ["...", ...]
//     "registry": [ { "token": "xtnt...", "sink": "template:0",
//                     "taints": [ { "origin": "request.GET.q",
//                                   "chain": ["html_escape"] } ] } ] }
//
// Context map:
//   { "html_escape": [[], ["HtmlText"], ...], "js_escape": [["JsStringDq"]] }

#include <span>
#include <string>

#include <json.hpp>

#include "ctxcheck/annotations.hpp"
#include "ctxcheck/verifier.hpp"

namespace ctxcheck {

struct Bundle {
  std::string document;
  SinkRegistry registry;

  friend bool operator==(const Bundle&, const Bundle&) = default;
};

// Chunked responses are analysed as their concatenation.
std::string assemble_chunks(std::span<const std::string> chunks);

nlohmann::json registry_to_json(const SinkRegistry& registry);
SinkRegistry registry_from_json(const nlohmann::json& json);

nlohmann::json bundle_to_json(const Bundle& bundle);
// Throws FormatError on anything malformed.
Bundle bundle_from_json(const nlohmann::json& json);

nlohmann::json context_map_to_json(const ContextMap& map);
ContextMap context_map_from_json(const nlohmann::json& json);

// Pretty-printed, newline-terminated; invalid UTF-8 becomes U+FFFD.
std::string to_json_text(const nlohmann::json& json);

// Throws FormatError naming the file on IO or JSON syntax errors.
std::string read_file(const std::string& path);
nlohmann::json read_json_file(const std::string& path);
void write_file(const std::string& path, std::string_view contents);

}  // namespace ctxcheck
