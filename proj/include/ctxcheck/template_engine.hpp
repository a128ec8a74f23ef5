#pragma once

// Minimal autoescaping template language: literal text and
// {{ dotted.path | filter | filter }} expansions. Filters: escape, escapejs,
// urlencode, safe. A value that no filter marked safe is HTML-escaped before
// it is written out.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "ctxcheck/annotations.hpp"
#include "ctxcheck/taint.hpp"

namespace ctxcheck {

enum class Filter { Escape, EscapeJs, UrlEncode, Safe };

std::string_view to_string(Filter filter);

struct Literal {
  std::string text;
  friend bool operator==(const Literal&, const Literal&) = default;
};

struct Expansion {
  std::vector<std::string> path;
  std::vector<Filter> filters;
  SinkId site;
  std::string source;  // original "{{ ... }}" text

  std::string dotted_path() const;
  friend bool operator==(const Expansion&, const Expansion&) = default;
};

using Node = std::variant<Literal, Expansion>;

struct Template {
  std::vector<Node> nodes;

  std::string to_source() const;
  friend bool operator==(const Template&, const Template&) = default;
};

// Throws SyntaxError (with the byte offset) for an unterminated "{{", an
// empty or malformed path, or an unknown filter.
Template parse_template(std::string_view source);

// Variable lookup over a JSON tree. Every string or number leaf is a taint
// source named by its dotted path. Array elements are values handed out in a
// container (query result rows), so they lose their taint when container
// propagation is disabled.
class Environment {
 public:
  Environment() : root_(nlohmann::json::object()) {}
  explicit Environment(nlohmann::json root);

  const nlohmann::json& root() const { return root_; }

 private:
  nlohmann::json root_;
};

// Missing paths and non-scalar nodes resolve to an empty untainted string.
TaintedText resolve_path(const Environment& env, std::span<const std::string> path,
                         TrackingMode mode = TrackingMode::Full);

struct RenderOptions {
  TrackingMode mode = TrackingMode::Full;
  std::uint64_t seed = 0;
  bool annotate = true;
};

struct RenderResult {
  std::string document;
  SinkRegistry registry;
};

RenderResult render(const Template& tmpl, const Environment& env, const RenderOptions& options = {});

// Filter pipeline plus autoescape, without emission.
TaintedText apply_filters(TaintedText value, std::span<const Filter> filters);

}  // namespace ctxcheck
