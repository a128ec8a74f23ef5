#include "ctxcheck/model_browser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <regex>
#include <set>

#include "ctxcheck/decoders.hpp"
#include "ctxcheck/error.hpp"

namespace ctxcheck {

namespace {

constexpr std::size_t kExcerptRadius = 32;

bool is_html_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\f' || c == '\r'; }
bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '$' ||
         static_cast<unsigned char>(c) >= 0x80;
}

std::string lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string_view trim(std::string_view text) {
  while (!text.empty() && is_html_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_html_space(text.back())) text.remove_suffix(1);
  return text;
}

bool starts_with_ci(std::string_view text, std::size_t at, std::string_view prefix) {
  if (at + prefix.size() > text.size()) return false;
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    if (std::tolower(static_cast<unsigned char>(text[at + k])) != prefix[k]) return false;
  }
  return true;
}

ContextSequence extend(const ContextSequence& prefix, BrowserContext context) {
  ContextSequence out = prefix;
  out.push_back(context);
  return out;
}

// Position of "</name" closing a raw text element, or npos.
std::size_t find_end_tag(std::string_view text, std::size_t from, std::string_view name) {
  for (std::size_t pos = text.find("</", from); pos != std::string_view::npos; pos = text.find("</", pos + 2)) {
    if (!starts_with_ci(text, pos + 2, name)) continue;
    const std::size_t after = pos + 2 + name.size();
    if (after >= text.size() || is_html_space(text[after]) || text[after] == '/' || text[after] == '>') {
      return pos;
    }
  }
  return std::string_view::npos;
}

const std::set<std::string, std::less<>>& uri_attributes() {
  static const std::set<std::string, std::less<>> names{"href",   "src",  "action",     "formaction",
                                                         "poster", "cite", "background", "data"};
  return names;
}

enum class ScriptKind { Js, Template, Opaque };

ScriptKind script_kind(std::string_view type) {
  static const std::set<std::string, std::less<>> js{
      "",
      "module",
      "text/javascript",
      "application/javascript",
      "application/x-javascript",
      "text/ecmascript",
      "application/ecmascript",
      "text/jscript",
      "text/livescript",
      "text/x-javascript",
      "text/x-ecmascript",
      "text/javascript1.0",
      "text/javascript1.1",
      "text/javascript1.2",
      "text/javascript1.3",
      "text/javascript1.4",
      "text/javascript1.5",
      // Data blocks in JSON syntax lex like JS literals.
      "application/json",
      "application/ld+json",
      "importmap",
      "speculationrules",
  };
  static const std::set<std::string, std::less<>> templates{
      "text/html",          "text/template",          "text/x-template",           "text/ng-template",
      "text/x-handlebars-template", "text/x-jquery-tmpl", "text/x-underscore-template", "text/x-mustache",
  };
  const std::string key = lower(trim(type));
  const std::string_view essence = trim(std::string_view(key).substr(0, key.find(';')));
  if (js.contains(essence)) return ScriptKind::Js;
  if (templates.contains(essence)) return ScriptKind::Template;
  return ScriptKind::Opaque;
}

// Text with registered tokens removed, plus the raw offset of every clean
// character (and of the end).
struct CleanView {
  std::string text;
  std::vector<std::size_t> raw;
};

CleanView clean_view(std::string_view text, const SinkRegistry& registry) {
  CleanView view;
  std::size_t pos = 0;
  auto copy_until = [&](std::size_t end) {
    for (; pos < end; ++pos) {
      view.text.push_back(text[pos]);
      view.raw.push_back(pos);
    }
  };
  for (const auto& hit : locate_tokens(text, registry)) {
    copy_until(hit.offset);
    pos = hit.offset + hit.token.size();
  }
  copy_until(text.size());
  view.raw.push_back(text.size());
  return view;
}

// URL parsers drop ASCII tab and newline anywhere and C0/space at the front.
CleanView url_normalize(const CleanView& in) {
  CleanView out;
  std::size_t i = 0;
  while (i < in.text.size() && static_cast<unsigned char>(in.text[i]) <= 0x20) ++i;
  for (; i < in.text.size(); ++i) {
    const char c = in.text[i];
    if (c == '\t' || c == '\n' || c == '\r') continue;
    out.text.push_back(c);
    out.raw.push_back(in.raw[i]);
  }
  out.raw.push_back(in.raw.back());
  return out;
}

bool is_regex_keyword(std::string_view word) {
  static constexpr std::array<std::string_view, 14> kWords = {
      "return", "typeof", "case",  "do",   "else",  "in",    "of",
      "new",    "delete", "void",  "throw", "instanceof", "yield", "await"};
  return std::find(kWords.begin(), kWords.end(), word) != kWords.end();
}

}  // namespace

struct ModelBrowser::DepthGuard {
  explicit DepthGuard(ModelBrowser& browser) : browser_(browser) {
    ++browser_.depth_;
    ++browser_.invocations_;
  }
  ~DepthGuard() { --browser_.depth_; }
  DepthGuard(const DepthGuard&) = delete;
  DepthGuard& operator=(const DepthGuard&) = delete;

 private:
  ModelBrowser& browser_;
};

struct ModelBrowser::Attribute {
  std::string_view name;
  std::string_view value;
  BrowserContext quoting = BrowserContext::HtmlAttrUnq;
  bool has_value = false;
};

void ModelBrowser::report(std::string_view text, std::size_t begin, std::size_t end,
                          const ContextSequence& context) {
  if (begin >= end) return;
  for (const auto& hit : locate_tokens(text.substr(begin, end - begin), registry_)) {
    const std::size_t offset = begin + hit.offset;
    std::size_t from = offset > kExcerptRadius ? offset - kExcerptRadius : 0;
    std::size_t to = std::min(text.size(), offset + hit.token.size() + kExcerptRadius);
    auto continuation = [&](std::size_t i) { return i < text.size() && (static_cast<unsigned char>(text[i]) & 0xC0) == 0x80; };
    while (from < offset && continuation(from)) ++from;
    while (to > offset && continuation(to)) --to;
    // Search a wider window so tokens cut by the edges are dropped too.
    constexpr std::size_t L = AnnotationToken::kLength;
    const std::size_t wide_from = from > L ? from - L : 0;
    const std::size_t wide_to = std::min(text.size(), to + L);
    const std::string_view wide = text.substr(wide_from, wide_to - wide_from);
    std::string excerpt;
    std::size_t copied = from;
    auto copy_to = [&](std::size_t stop) {
      stop = std::min(stop, to);
      if (stop > copied) excerpt.append(text.substr(copied, stop - copied));
    };
    for (const auto& other : locate_tokens(wide, registry_)) {
      const std::size_t at = wide_from + other.offset;
      copy_to(at);
      if (at == offset) excerpt.append("\xE2\x96\xB8");  // marks the value start
      copied = std::max(copied, at + other.token.size());
    }
    copy_to(to);
    findings_.push_back(Finding{std::string(hit.token), context, std::move(excerpt), depth_});
  }
}

// A region this invocation cannot interpret: its own element becomes Unknown.
void ModelBrowser::report_unknown(std::string_view text, std::size_t begin, std::size_t end,
                                  const ContextSequence& prefix) {
  report(text, begin, end, extend(prefix, BrowserContext::Unknown));
}

// Content handed to a language the model browser does not parse.
void ModelBrowser::opaque_scan(std::string_view text, const ContextSequence& prefix) {
  DepthGuard guard(*this);
  report_unknown(text, 0, text.size(), prefix);
}

bool ModelBrowser::too_deep(std::string_view text, const ContextSequence& prefix) {
  if (depth_ < kMaxDepth) return false;
  opaque_scan(text, prefix);
  return true;
}

// ---------------------------------------------------------------------------
// HTML

void ModelBrowser::html_scan(std::string_view text, const ContextSequence& prefix) {
  if (too_deep(text, prefix)) return;
  DepthGuard guard(*this);
  const ContextSequence as_text = extend(prefix, BrowserContext::HtmlText);
  const ContextSequence as_comment = extend(prefix, BrowserContext::HtmlComment);
  const std::size_t n = text.size();

  std::size_t text_start = 0;
  std::size_t i = 0;
  auto flush_text = [&](std::size_t end) { report(text, text_start, end, as_text); };
  // Skips to just past the next '>' (or the end), reporting the region.
  auto skip_to_gt = [&](std::size_t from, std::size_t body_begin, const ContextSequence* context) {
    const std::size_t gt = text.find('>', from);
    const std::size_t body_end = gt == std::string_view::npos ? n : gt;
    if (context) {
      report(text, body_begin, body_end, *context);
    } else {
      report_unknown(text, body_begin, body_end, prefix);
    }
    return gt == std::string_view::npos ? n : gt + 1;
  };

  while (i < n) {
    if (text[i] != '<' || i + 1 >= n) {
      ++i;
      continue;
    }
    const char next = text[i + 1];
    if (text.compare(i, 4, "<!--") == 0) {
      flush_text(i);
      std::size_t body = i + 4;
      std::size_t close;
      if (text.compare(body, 1, ">") == 0) {
        close = body, i = body + 1;
      } else if (text.compare(body, 2, "->") == 0) {
        close = body, i = body + 2;
      } else {
        close = text.find("-->", body);
        if (close == std::string_view::npos) close = n;
        i = std::min(n, close + 3);
      }
      report(text, body, close, as_comment);
      text_start = i;
      continue;
    }
    if (next == '!' || next == '?') {
      flush_text(i);
      const bool doctype = starts_with_ci(text, i + 2, "doctype");
      i = skip_to_gt(i + 2, i + 2, doctype ? nullptr : &as_comment);
      text_start = i;
      continue;
    }
    if (next == '/') {
      if (i + 2 < n && is_alpha(text[i + 2])) {
        flush_text(i);
        i = skip_to_gt(i + 2, i + 2, nullptr);
        text_start = i;
      } else if (i + 2 < n && text[i + 2] == '>') {
        flush_text(i);
        i += 3;
        text_start = i;
      } else if (i + 2 < n) {
        flush_text(i);
        i = skip_to_gt(i + 2, i + 2, &as_comment);
        text_start = i;
      } else {
        ++i;
      }
      continue;
    }
    if (!is_alpha(next)) {
      ++i;
      continue;
    }

    // Start tag.
    flush_text(i);
    const std::size_t tag_begin = i;
    std::size_t j = i + 1;
    while (j < n && !is_html_space(text[j]) && text[j] != '/' && text[j] != '>') ++j;
    const std::string_view tag_name = text.substr(i + 1, j - i - 1);
    std::vector<Attribute> attributes;
    bool complete = false;
    while (j < n) {
      while (j < n && (is_html_space(text[j]) || text[j] == '/')) ++j;
      if (j >= n) break;
      if (text[j] == '>') {
        ++j;
        complete = true;
        break;
      }
      Attribute attribute;
      const std::size_t name_begin = j++;
      while (j < n && !is_html_space(text[j]) && text[j] != '/' && text[j] != '>' && text[j] != '=') ++j;
      attribute.name = text.substr(name_begin, j - name_begin);
      std::size_t k = j;
      while (k < n && is_html_space(text[k])) ++k;
      if (k < n && text[k] == '=') {
        ++k;
        while (k < n && is_html_space(text[k])) ++k;
        if (k >= n) {
          j = k;
          break;
        }
        attribute.has_value = true;
        if (text[k] == '"' || text[k] == '\'') {
          const char quote = text[k];
          const std::size_t close = text.find(quote, k + 1);
          if (close == std::string_view::npos) {
            j = n;
            break;
          }
          attribute.value = text.substr(k + 1, close - k - 1);
          attribute.quoting = quote == '"' ? BrowserContext::HtmlAttrDq : BrowserContext::HtmlAttrSq;
          j = close + 1;
        } else if (text[k] == '>') {
          j = k;
        } else {
          const std::size_t value_begin = k;
          while (k < n && !is_html_space(text[k]) && text[k] != '>') ++k;
          attribute.value = text.substr(value_begin, k - value_begin);
          attribute.quoting = BrowserContext::HtmlAttrUnq;
          j = k;
        }
      }
      attributes.push_back(attribute);
    }
    if (!complete) {
      // End of input inside a tag: the browser drops the whole tag.
      report_unknown(text, tag_begin, n, prefix);
      i = n;
      text_start = n;
      break;
    }

    report_unknown(text, tag_begin + 1, tag_begin + 1 + tag_name.size(), prefix);
    const std::string tag = lower(tag_name);
    for (const auto& attribute : attributes) {
      const auto name_offset = static_cast<std::size_t>(attribute.name.data() - text.data());
      report_unknown(text, name_offset, name_offset + attribute.name.size(), prefix);
      if (attribute.has_value) html_attribute(tag, attribute, prefix);
    }
    i = html_raw_element(text, j, tag, attributes, prefix);
    text_start = i;
  }
  flush_text(n);
}

void ModelBrowser::html_attribute(std::string_view tag, const Attribute& attribute, const ContextSequence& prefix) {
  const ContextSequence context = extend(prefix, attribute.quoting);
  const std::string name = lower(attribute.name);
  const std::string value = entity_decode(attribute.value, true);
  if (name.starts_with("on")) {
    js_scan(value, context);
  } else if (name == "style") {
    css_scan(value, context, CssInput::DeclarationList);
  } else if (uri_attributes().contains(name)) {
    uri_scan(value, context, tag == "script" && name == "src");
  } else {
    report(value, 0, value.size(), context);
  }
}

// Handles elements whose content is not markup. Returns the offset after the
// element (or `content_begin` for ordinary elements).
std::size_t ModelBrowser::html_raw_element(std::string_view text, std::size_t content_begin, std::string_view tag,
                                           const std::vector<Attribute>& attributes,
                                           const ContextSequence& prefix) {
  enum class Raw { None, Script, Style, Text, Plaintext };
  Raw raw = Raw::None;
  if (tag == "script") {
    raw = Raw::Script;
  } else if (tag == "style") {
    raw = Raw::Style;
  } else if (tag == "textarea" || tag == "title" || tag == "xmp" || tag == "iframe" || tag == "noembed" ||
             tag == "noframes" || tag == "noscript") {
    raw = Raw::Text;
  } else if (tag == "plaintext") {
    raw = Raw::Plaintext;
  }
  if (raw == Raw::None) return content_begin;

  const std::size_t n = text.size();
  std::size_t content_end = raw == Raw::Plaintext ? n : find_end_tag(text, content_begin, tag);
  if (content_end == std::string_view::npos) content_end = n;
  const std::string_view content = text.substr(content_begin, content_end - content_begin);

  switch (raw) {
    case Raw::Script: {
      std::string type;
      for (const auto& attribute : attributes) {
        if (lower(attribute.name) == "type") {
          type = entity_decode(attribute.value, true);
          break;
        }
      }
      const ContextSequence context = extend(prefix, BrowserContext::HtmlScriptData);
      switch (script_kind(type)) {
        case ScriptKind::Js: js_scan(content, context); break;
        case ScriptKind::Template: html_scan(content, context); break;
        case ScriptKind::Opaque: opaque_scan(content, context); break;
      }
      break;
    }
    case Raw::Style:
      css_scan(content, extend(prefix, BrowserContext::HtmlStyleData), CssInput::Stylesheet);
      break;
    case Raw::Text:
    case Raw::Plaintext:
      report(text, content_begin, content_end, extend(prefix, BrowserContext::HtmlText));
      break;
    case Raw::None:
      break;
  }
  if (content_end >= n) return n;
  // Closing tag; anything inside it is not part of the content.
  const std::size_t gt = text.find('>', content_end);
  const std::size_t close_end = gt == std::string_view::npos ? n : gt;
  report_unknown(text, content_end + 2, close_end, prefix);
  return gt == std::string_view::npos ? n : gt + 1;
}

// ---------------------------------------------------------------------------
// JavaScript

void ModelBrowser::js_scan(std::string_view text, const ContextSequence& prefix) {
  if (too_deep(text, prefix)) return;
  DepthGuard guard(*this);
  const ContextSequence as_code = extend(prefix, BrowserContext::JsCode);
  const ContextSequence as_dq = extend(prefix, BrowserContext::JsStringDq);
  const ContextSequence as_sq = extend(prefix, BrowserContext::JsStringSq);
  const ContextSequence as_comment = extend(prefix, BrowserContext::JsComment);
  const std::size_t n = text.size();

  std::size_t code_start = 0;
  std::size_t i = 0;
  // Whether a '/' at the current position would start a regular expression.
  bool regex_allowed = true;
  auto flush_code = [&](std::size_t end) { report(text, code_start, end, as_code); };
  auto line_end = [&](std::size_t from) {
    const std::size_t eol = text.find_first_of("\n\r", from);
    return eol == std::string_view::npos ? n : eol;
  };

  while (i < n) {
    const char c = text[i];
    if (c == '"' || c == '\'' || c == '`') {
      flush_code(i);
      std::size_t j = i + 1;
      bool terminated = false;
      while (j < n) {
        if (text[j] == '\\') {
          j += 2;
          continue;
        }
        if (text[j] == c) {
          terminated = true;
          break;
        }
        if (c != '`' && (text[j] == '\n' || text[j] == '\r')) break;
        ++j;
      }
      j = std::min(j, n);
      if (terminated) {
        report(text, i + 1, j, c == '\'' ? as_sq : as_dq);
        i = j + 1;
      } else {
        report_unknown(text, i + 1, j, prefix);
        i = j;
      }
      code_start = i;
      regex_allowed = false;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      flush_code(i);
      const std::size_t eol = line_end(i + 2);
      report(text, i + 2, eol, as_comment);
      i = code_start = eol;
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      flush_code(i);
      const std::size_t close = text.find("*/", i + 2);
      if (close == std::string_view::npos) {
        report_unknown(text, i + 2, n, prefix);
        i = code_start = n;
      } else {
        report(text, i + 2, close, as_comment);
        i = code_start = close + 2;
      }
      continue;
    }
    if (c == '<' && text.compare(i, 4, "<!--") == 0) {
      flush_code(i);
      const std::size_t eol = line_end(i + 4);
      report(text, i + 4, eol, as_comment);
      i = code_start = eol;
      continue;
    }
    if (c == '/' && regex_allowed) {
      flush_code(i);
      std::size_t j = i + 1;
      bool in_class = false;
      bool terminated = false;
      while (j < n && text[j] != '\n' && text[j] != '\r') {
        if (text[j] == '\\') {
          j += 2;
          continue;
        }
        if (text[j] == '[') in_class = true;
        if (text[j] == ']') in_class = false;
        if (text[j] == '/' && !in_class) {
          terminated = true;
          break;
        }
        ++j;
      }
      j = std::min(j, n);
      if (terminated) {
        ++j;
        while (j < n && is_ident_char(text[j])) ++j;
      }
      // Regular expression bodies are not a modelled context.
      report_unknown(text, i, j, prefix);
      i = code_start = j;
      regex_allowed = false;
      continue;
    }
    if (is_ident_char(c)) {
      std::size_t j = i;
      while (j < n && is_ident_char(text[j])) ++j;
      regex_allowed = is_regex_keyword(text.substr(i, j - i));
      i = j;
      continue;
    }
    if (!is_html_space(c)) regex_allowed = !(c == ')' || c == ']' || c == '}');
    ++i;
  }
  flush_code(n);
}

// ---------------------------------------------------------------------------
// CSS

// Scans [begin, end) until one of `stops` at parenthesis depth 0. Strings,
// comments and url() are interpreted; everything else is reported as
// `plain`. Returns the stop offset or `end`.
std::size_t ModelBrowser::css_run(std::string_view text, std::size_t begin, std::size_t end,
                                  std::string_view stops, BrowserContext plain, const ContextSequence& prefix) {
  const ContextSequence as_plain = extend(prefix, plain);
  const ContextSequence as_string = extend(prefix, BrowserContext::CssString);
  const ContextSequence as_comment = extend(prefix, BrowserContext::CssComment);
  std::size_t segment = begin;
  std::size_t i = begin;
  int parens = 0;
  auto flush = [&](std::size_t to) { report(text, segment, to, as_plain); };

  while (i < end) {
    const char c = text[i];
    if (c == '/' && i + 1 < end && text[i + 1] == '*') {
      flush(i);
      std::size_t close = text.substr(0, end).find("*/", i + 2);
      if (close == std::string_view::npos) close = end;
      report(text, i + 2, close, as_comment);
      i = segment = std::min(end, close + 2);
      continue;
    }
    if (c == '"' || c == '\'') {
      flush(i);
      std::size_t j = i + 1;
      bool terminated = false;
      while (j < end) {
        if (text[j] == '\\') {
          j += 2;
          continue;
        }
        if (text[j] == c) {
          terminated = true;
          break;
        }
        if (text[j] == '\n' || text[j] == '\r' || text[j] == '\f') break;
        ++j;
      }
      j = std::min(j, end);
      if (terminated) {
        report(text, i + 1, j, as_string);
        i = segment = j + 1;
      } else {
        report_unknown(text, i + 1, j, prefix);
        i = segment = j;
      }
      continue;
    }
    if ((c == 'u' || c == 'U') && starts_with_ci(text.substr(0, end), i, "url(") &&
        (i == begin || !(is_ident_char(text[i - 1]) || text[i - 1] == '-'))) {
      flush(i);
      i = segment = css_url(text, i + 4, end, prefix);
      continue;
    }
    if (c == '(') ++parens;
    if (c == ')' && parens > 0) --parens;
    if (parens == 0 && stops.find(c) != std::string_view::npos) {
      flush(i);
      return i;
    }
    ++i;
  }
  flush(end);
  return end;
}

// `begin` points just past "url(". Returns the offset after the closing ')'.
std::size_t ModelBrowser::css_url(std::string_view text, std::size_t begin, std::size_t end,
                                  const ContextSequence& prefix) {
  const ContextSequence context = extend(prefix, BrowserContext::CssDeclValue);
  std::size_t i = begin;
  while (i < end && is_html_space(text[i])) ++i;
  if (i < end && (text[i] == '"' || text[i] == '\'')) {
    const char quote = text[i];
    std::size_t j = i + 1;
    while (j < end && text[j] != quote) j += text[j] == '\\' ? 2 : 1;
    j = std::min(j, end);
    uri_scan(css_unescape(text.substr(i + 1, j - i - 1)), context);
    std::size_t close = text.substr(0, end).find(')', std::min(end, j + 1));
    if (close == std::string_view::npos) close = end;
    report_unknown(text, std::min(end, j + 1), close, prefix);
    return std::min(end, close + 1);
  }
  std::size_t close = i;
  while (close < end && text[close] != ')') close += text[close] == '\\' ? 2 : 1;
  close = std::min(close, end);
  uri_scan(css_unescape(trim(text.substr(i, close - i))), context);
  return std::min(end, close + 1);
}

std::size_t ModelBrowser::css_declarations(std::string_view text, std::size_t begin, std::size_t end,
                                           bool in_block, const ContextSequence& prefix) {
  std::size_t pos = begin;
  while (pos < end) {
    // Property names are not a value position.
    const std::size_t stop = css_run(text, pos, end, ":;{}", BrowserContext::Unknown, prefix);
    if (stop >= end) return end;
    const char c = text[stop];
    if (c == ';') {
      pos = stop + 1;
      continue;
    }
    if (c == '}') {
      if (in_block) return stop + 1;
      pos = stop + 1;
      continue;
    }
    if (c == '{') {
      pos = css_declarations(text, stop + 1, end, true, prefix);
      continue;
    }
    const std::size_t value_stop = css_run(text, stop + 1, end, ";}", BrowserContext::CssDeclValue, prefix);
    if (value_stop >= end) return end;
    if (text[value_stop] == '}' && in_block) return value_stop + 1;
    pos = value_stop + 1;
  }
  return end;
}

std::size_t ModelBrowser::css_rules(std::string_view text, std::size_t begin, std::size_t end, bool nested,
                                    const ContextSequence& prefix) {
  static const std::set<std::string, std::less<>> group_rules{
      "media", "supports", "document", "-moz-document", "layer", "container", "scope", "starting-style"};
  std::size_t pos = begin;
  while (pos < end) {
    // Selectors and at-rule preludes.
    const std::size_t stop = css_run(text, pos, end, "{;}", BrowserContext::Unknown, prefix);
    if (stop >= end) return end;
    const char c = text[stop];
    if (c == ';') {
      pos = stop + 1;
      continue;
    }
    if (c == '}') {
      if (nested) return stop + 1;
      pos = stop + 1;
      continue;
    }
    const std::string_view prelude = trim(text.substr(pos, stop - pos));
    std::string at_rule;
    if (prelude.starts_with('@')) {
      std::size_t k = 1;
      while (k < prelude.size() && (is_ident_char(prelude[k]) || prelude[k] == '-')) ++k;
      at_rule = lower(prelude.substr(1, k - 1));
    }
    pos = group_rules.contains(at_rule) ? css_rules(text, stop + 1, end, true, prefix)
                                        : css_declarations(text, stop + 1, end, true, prefix);
  }
  return end;
}

void ModelBrowser::css_scan(std::string_view text, const ContextSequence& prefix, CssInput input) {
  if (too_deep(text, prefix)) return;
  DepthGuard guard(*this);
  if (input == CssInput::DeclarationList) {
    css_declarations(text, 0, text.size(), false, prefix);
  } else {
    css_rules(text, 0, text.size(), false, prefix);
  }
}

// ---------------------------------------------------------------------------
// URI

void ModelBrowser::uri_scan(std::string_view text, const ContextSequence& prefix, bool script_source) {
  if (too_deep(text, prefix)) return;
  DepthGuard guard(*this);
  if (script_source) {
    // Tainted script sources are never considered safe; no further parsing.
    report(text, 0, text.size(), extend(prefix, BrowserContext::UriScriptSrc));
    return;
  }
  const ContextSequence context = extend(prefix, BrowserContext::Uri);
  static const std::regex kScheme("^([A-Za-z][A-Za-z0-9+.\\-]*):");
  static const std::regex kDataHeader("^([^,]*),");

  const CleanView view = url_normalize(clean_view(text, registry_));
  std::smatch scheme_match;
  if (!std::regex_search(view.text, scheme_match, kScheme)) {
    report(text, 0, text.size(), context);
    return;
  }
  const std::string scheme = lower(scheme_match.str(1));
  const auto colon = static_cast<std::size_t>(scheme_match.length(0)) - 1;
  const std::size_t body_begin = view.raw[colon] + 1;

  if (scheme == "javascript") {
    report(text, 0, body_begin, context);
    js_scan(percent_decode(text.substr(body_begin)), context);
    return;
  }
  if (scheme != "data") {
    report(text, 0, text.size(), context);
    return;
  }

  const std::string after_scheme = view.text.substr(colon + 1);
  std::smatch header_match;
  if (!std::regex_search(after_scheme, header_match, kDataHeader)) {
    report(text, 0, text.size(), context);
    return;
  }
  const std::string header = lower(percent_decode(header_match.str(1)));
  const std::size_t payload_begin = view.raw[colon + 1 + static_cast<std::size_t>(header_match.length(0))];
  report(text, 0, payload_begin, context);

  const std::string media_type(trim(std::string_view(header).substr(0, header.find(';'))));
  bool base64 = false;
  if (const auto semi = header.rfind(';'); semi != std::string::npos) {
    base64 = trim(std::string_view(header).substr(semi + 1)) == "base64";
  }
  const std::string_view payload = text.substr(payload_begin);
  if (media_type != "text/html") {
    report(text, payload_begin, text.size(), context);
    return;
  }
  if (!base64) {
    html_scan(percent_decode(payload), context);
    return;
  }
  // Raw tokens inside base64 data do not survive decoding.
  report_unknown(text, payload_begin, text.size(), prefix);
  const CleanView clean_payload = clean_view(payload, registry_);
  if (auto decoded = base64_decode(percent_decode(clean_payload.text))) {
    html_scan(*decoded, context);
  }
}

// ---------------------------------------------------------------------------

std::vector<Finding> analyze(std::string_view document, const SinkRegistry& registry) {
  ModelBrowser browser(registry);
  browser.html_scan(document, {});
  std::vector<Finding> findings = browser.take_findings();
  std::set<std::string_view> located;
  for (const auto& finding : findings) located.insert(finding.token);
  for (const auto& [token, entry] : registry) {
    if (!located.contains(token)) throw MissingToken(token);
  }
  return findings;
}

std::vector<Finding> html_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry) {
  ModelBrowser browser(registry);
  browser.html_scan(text, prefix);
  return browser.take_findings();
}

std::vector<Finding> js_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry) {
  ModelBrowser browser(registry);
  browser.js_scan(text, prefix);
  return browser.take_findings();
}

std::vector<Finding> css_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry,
                              CssInput input) {
  ModelBrowser browser(registry);
  browser.css_scan(text, prefix, input);
  return browser.take_findings();
}

std::vector<Finding> uri_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry,
                              bool script_source) {
  ModelBrowser browser(registry);
  browser.uri_scan(text, prefix, script_source);
  return browser.take_findings();
}

}  // namespace ctxcheck
