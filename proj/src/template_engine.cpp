#include "ctxcheck/template_engine.hpp"

#include <algorithm>
#include <cctype>

#include "ctxcheck/error.hpp"
#include "ctxcheck/sanitizers.hpp"

namespace ctxcheck {

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; }
bool is_word(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_'; }

std::string_view trim(std::string_view text) {
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  return text;
}

Filter parse_filter(std::string_view name, std::size_t offset) {
  if (name == "escape") return Filter::Escape;
  if (name == "escapejs") return Filter::EscapeJs;
  if (name == "urlencode") return Filter::UrlEncode;
  if (name == "safe") return Filter::Safe;
  throw SyntaxError("unknown filter '" + std::string(name) + "'", offset);
}

std::vector<std::string> parse_path(std::string_view text, std::size_t offset) {
  std::vector<std::string> path;
  std::size_t start = 0;
  for (;;) {
    const std::size_t dot = text.find('.', start);
    const std::string_view segment = text.substr(start, dot == std::string_view::npos ? text.npos : dot - start);
    if (segment.empty()) throw SyntaxError("empty path segment", offset + start);
    for (std::size_t k = 0; k < segment.size(); ++k) {
      if (!is_word(segment[k])) throw SyntaxError("invalid character in variable path", offset + start + k);
    }
    path.emplace_back(segment);
    if (dot == std::string_view::npos) break;
    start = dot + 1;
  }
  return path;
}

// Offset of `part` inside `whole`; both views alias the same buffer.
std::size_t offset_of(std::string_view whole, std::string_view part) {
  return static_cast<std::size_t>(part.data() - whole.data());
}

bool is_index(const std::string& segment) {
  return !segment.empty() &&
         std::all_of(segment.begin(), segment.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); });
}

}  // namespace

std::string_view to_string(Filter filter) {
  switch (filter) {
    case Filter::Escape: return "escape";
    case Filter::EscapeJs: return "escapejs";
    case Filter::UrlEncode: return "urlencode";
    case Filter::Safe: return "safe";
  }
  return "";
}

std::string Expansion::dotted_path() const {
  std::string out;
  for (const auto& segment : path) {
    if (!out.empty()) out += '.';
    out += segment;
  }
  return out;
}

std::string Template::to_source() const {
  std::string out;
  for (const auto& node : nodes) {
    if (const auto* literal = std::get_if<Literal>(&node)) {
      out += literal->text;
    } else {
      out += std::get<Expansion>(node).source;
    }
  }
  return out;
}

Template parse_template(std::string_view source) {
  Template tmpl;
  std::size_t ordinal = 0;
  std::size_t pos = 0;
  while (pos < source.size()) {
    const std::size_t open = source.find("{{", pos);
    if (open == std::string_view::npos) {
      tmpl.nodes.emplace_back(Literal{std::string(source.substr(pos))});
      break;
    }
    if (open > pos) tmpl.nodes.emplace_back(Literal{std::string(source.substr(pos, open - pos))});
    const std::size_t close = source.find("}}", open + 2);
    if (close == std::string_view::npos) throw SyntaxError("unterminated '{{'", open);

    const std::string_view body = source.substr(open + 2, close - open - 2);
    Expansion expansion;
    std::size_t piece_start = 0;
    bool first = true;
    for (;;) {
      const std::size_t bar = body.find('|', piece_start);
      const std::string_view raw = body.substr(piece_start, bar == std::string_view::npos ? body.npos : bar - piece_start);
      const std::string_view piece = trim(raw);
      const std::size_t piece_offset = open + 2 + (piece.empty() ? offset_of(body, raw) : offset_of(body, piece));
      if (piece.empty()) throw SyntaxError(first ? "empty variable path" : "empty filter name", piece_offset);
      if (first) {
        expansion.path = parse_path(piece, piece_offset);
      } else {
        expansion.filters.push_back(parse_filter(piece, piece_offset));
      }
      first = false;
      if (bar == std::string_view::npos) break;
      piece_start = bar + 1;
    }
    expansion.site = SinkId("template:" + std::to_string(ordinal++));
    expansion.source = std::string(source.substr(open, close + 2 - open));
    tmpl.nodes.emplace_back(std::move(expansion));
    pos = close + 2;
  }
  return tmpl;
}

Environment::Environment(nlohmann::json root) : root_(std::move(root)) {
  if (!root_.is_object()) throw FormatError("environment must be a JSON object");
}

TaintedText resolve_path(const Environment& env, std::span<const std::string> path, TrackingMode mode) {
  const nlohmann::json* node = &env.root();
  bool via_container = false;
  std::string dotted;
  for (const auto& segment : path) {
    if (!dotted.empty()) dotted += '.';
    dotted += segment;
    if (node->is_object()) {
      auto it = node->find(segment);
      if (it == node->end()) return TaintedText();
      node = &*it;
    } else if (node->is_array() && is_index(segment)) {
      const auto index = std::stoull(segment);
      if (index >= node->size()) return TaintedText();
      node = &(*node)[index];
      via_container = true;
    } else {
      return TaintedText();
    }
  }
  const SourceId origin(dotted);
  TaintedText value;
  if (node->is_string()) {
    value = make_source(node->get<std::string>(), origin);
  } else if (node->is_number_integer()) {
    value = number_to_text(make_number_source(node->get<std::int64_t>(), origin, mode));
  } else if (node->is_number()) {
    value = number_to_text(make_number_source(node->get<double>(), origin, mode));
  } else if (node->is_boolean()) {
    // Booleans print like Python's and count as numbers.
    const TaintedNumber number = make_number_source(std::int64_t{node->get<bool>()}, origin, mode);
    value = TaintedText(node->get<bool>() ? "True" : "False", number.taint());
  } else {
    return TaintedText();
  }
  if (via_container && !tracks_containers(mode)) value = value.with_taint({});
  return value;
}

TaintedText apply_filters(TaintedText value, std::span<const Filter> filters) {
  for (Filter filter : filters) {
    switch (filter) {
      case Filter::Escape: value = html_escape(value); break;
      case Filter::EscapeJs: value = js_escape(value); break;
      case Filter::UrlEncode: value = url_encode(value); break;
      case Filter::Safe: value = mark_safe(value); break;
    }
  }
  if (!value.safe_marked()) value = html_escape(value);
  return value;
}

RenderResult render(const Template& tmpl, const Environment& env, const RenderOptions& options) {
  DocumentBuilder out(options.seed, options.annotate);
  RenderResult result;
  for (const auto& node : tmpl.nodes) {
    if (const auto* literal = std::get_if<Literal>(&node)) {
      out.append(literal->text);
      continue;
    }
    const auto& expansion = std::get<Expansion>(node);
    TaintedText value = apply_filters(resolve_path(env, expansion.path, options.mode), expansion.filters);
    emit_to_sink(value, expansion.site, out, result.registry);
  }
  result.document = out.take();
  return result;
}

}  // namespace ctxcheck
