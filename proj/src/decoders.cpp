#include "ctxcheck/decoders.hpp"

#include <cctype>
#include <map>

#include "ctxcheck/utf8.hpp"

namespace ctxcheck {

namespace {

struct NamedEntity {
  std::string_view replacement;
  bool legacy;  // recognised without a trailing ';'
};

const std::map<std::string_view, NamedEntity, std::less<>>& named_entities() {
  static const std::map<std::string_view, NamedEntity, std::less<>> table{
      {"amp", {"&", true}},        {"AMP", {"&", true}},      {"lt", {"<", true}},
      {"LT", {"<", true}},         {"gt", {">", true}},       {"GT", {">", true}},
      {"quot", {"\"", true}},      {"QUOT", {"\"", true}},    {"nbsp", {"\xC2\xA0", true}},
      {"copy", {"\xC2\xA9", true}},  {"reg", {"\xC2\xAE", true}}, {"apos", {"'", false}},
      {"colon", {":", false}},     {"sol", {"/", false}},     {"bsol", {"\\", false}},
      {"lpar", {"(", false}},      {"rpar", {")", false}},    {"semi", {";", false}},
      {"comma", {",", false}},     {"period", {".", false}},  {"equals", {"=", false}},
      {"plus", {"+", false}},      {"num", {"#", false}},     {"excl", {"!", false}},
      {"percnt", {"%", false}},    {"dollar", {"$", false}},  {"ast", {"*", false}},
      {"lsqb", {"[", false}},      {"rsqb", {"]", false}},    {"lbrack", {"[", false}},
      {"rbrack", {"]", false}},    {"lcub", {"{", false}},    {"rcub", {"}", false}},
      {"lbrace", {"{", false}},    {"rbrace", {"}", false}},  {"Tab", {"\t", false}},
      {"NewLine", {"\n", false}},  {"grave", {"`", false}},   {"quest", {"?", false}},
      {"commat", {"@", false}},    {"hyphen", {"-", false}},  {"dash", {"-", false}},
      {"lowbar", {"_", false}},    {"verbar", {"|", false}},  {"vert", {"|", false}},
      {"Hat", {"^", false}},       {"tilde", {"~", false}},   {"midast", {"*", false}},
  };
  return table;
}

bool is_alnum(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

char32_t sanitize_code_point(std::uint32_t cp) {
  if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) return 0xFFFD;
  return static_cast<char32_t>(cp);
}

bool is_css_whitespace(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f'; }

}  // namespace

std::string entity_decode(std::string_view text, bool in_attribute) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '&') {
      out.push_back(text[i++]);
      continue;
    }
    std::size_t j = i + 1;
    if (j < text.size() && text[j] == '#') {
      ++j;
      const bool hex = j < text.size() && (text[j] == 'x' || text[j] == 'X');
      if (hex) ++j;
      const std::size_t digits_start = j;
      std::uint64_t value = 0;
      while (j < text.size() && (hex ? hex_value(text[j]) >= 0 : std::isdigit(static_cast<unsigned char>(text[j])))) {
        value = value * (hex ? 16 : 10) + static_cast<std::uint64_t>(hex ? hex_value(text[j]) : text[j] - '0');
        if (value > 0x110000) value = 0x110000;
        ++j;
      }
      if (j == digits_start) {
        out.push_back(text[i++]);
        continue;
      }
      if (j < text.size() && text[j] == ';') ++j;
      utf8::append(out, sanitize_code_point(static_cast<std::uint32_t>(value)));
      i = j;
      continue;
    }
    while (j < text.size() && is_alnum(text[j])) ++j;
    const std::string_view name = text.substr(i + 1, j - i - 1);
    const bool terminated = j < text.size() && text[j] == ';';
    const auto& table = named_entities();
    const bool followed_by_equals = j < text.size() && text[j] == '=';
    if (auto it = table.find(name); !name.empty() && it != table.end() &&
                                    (terminated || (it->second.legacy && !(in_attribute && followed_by_equals)))) {
      out.append(it->second.replacement);
      i = terminated ? j + 1 : j;
      continue;
    }
    // Longest legacy prefix, e.g. "&ampx" in text mode.
    bool matched = false;
    if (!terminated && !in_attribute) {
      for (std::size_t len = name.size(); len > 0 && !matched; --len) {
        auto it = table.find(name.substr(0, len));
        if (it == table.end() || !it->second.legacy) continue;
        out.append(it->second.replacement);
        i += 1 + len;
        matched = true;
      }
    }
    if (!matched) out.push_back(text[i++]);
  }
  return out;
}

std::string percent_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '%' && i + 2 < text.size() && hex_value(text[i + 1]) >= 0 && hex_value(text[i + 2]) >= 0) {
      out.push_back(static_cast<char>(hex_value(text[i + 1]) * 16 + hex_value(text[i + 2])));
      i += 2;
    } else {
      out.push_back(text[i]);
    }
  }
  return out;
}

std::string css_unescape(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] != '\\' || i + 1 >= text.size()) {
      out.push_back(text[i++]);
      continue;
    }
    const char next = text[i + 1];
    if (next == '\n' || next == '\f') {
      i += 2;
      continue;
    }
    if (next == '\r') {
      i += (i + 2 < text.size() && text[i + 2] == '\n') ? 3 : 2;
      continue;
    }
    if (hex_value(next) >= 0) {
      std::size_t j = i + 1;
      std::uint32_t cp = 0;
      while (j < text.size() && j < i + 7 && hex_value(text[j]) >= 0) {
        cp = cp * 16 + static_cast<std::uint32_t>(hex_value(text[j]));
        ++j;
      }
      if (j < text.size() && text[j] == '\r' && j + 1 < text.size() && text[j + 1] == '\n') {
        j += 2;
      } else if (j < text.size() && is_css_whitespace(text[j])) {
        ++j;
      }
      utf8::append(out, sanitize_code_point(cp));
      i = j;
      continue;
    }
    out.push_back(next);
    i += 2;
  }
  return out;
}

std::string js_string_decode(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  auto read_hex = [&](std::size_t from, std::size_t count, std::uint32_t& value) {
    if (from + count > text.size()) return false;
    value = 0;
    for (std::size_t k = 0; k < count; ++k) {
      const int h = hex_value(text[from + k]);
      if (h < 0) return false;
      value = value * 16 + static_cast<std::uint32_t>(h);
    }
    return true;
  };
  // \uXXXX with surrogate pairing; returns consumed length or 0.
  auto read_u_escape = [&](std::size_t at, std::uint32_t& cp) -> std::size_t {
    if (at + 1 < text.size() && text[at + 1] == '{') {
      std::size_t close = text.find('}', at + 2);
      if (close == std::string_view::npos || close == at + 2 || close - (at + 2) > 6) return 0;
      if (!read_hex(at + 2, close - (at + 2), cp)) return 0;
      if (cp > 0x10FFFF) return 0;
      return close + 1 - (at - 1);
    }
    if (!read_hex(at + 1, 4, cp)) return 0;
    return 6;
  };
  while (i < text.size()) {
    if (text[i] != '\\' || i + 1 >= text.size()) {
      out.push_back(text[i++]);
      continue;
    }
    const char c = text[i + 1];
    std::uint32_t value = 0;
    switch (c) {
      case 'n': out.push_back('\n'); i += 2; continue;
      case 'r': out.push_back('\r'); i += 2; continue;
      case 't': out.push_back('\t'); i += 2; continue;
      case 'b': out.push_back('\b'); i += 2; continue;
      case 'f': out.push_back('\f'); i += 2; continue;
      case 'v': out.push_back('\v'); i += 2; continue;
      case '0':
        if (i + 2 < text.size() && std::isdigit(static_cast<unsigned char>(text[i + 2]))) break;
        out.push_back('\0');
        i += 2;
        continue;
      case '\n': i += 2; continue;
      case '\r': i += (i + 2 < text.size() && text[i + 2] == '\n') ? 3 : 2; continue;
      case 'x':
        if (read_hex(i + 2, 2, value)) {
          utf8::append(out, value);
          i += 4;
          continue;
        }
        break;
      case 'u': {
        const std::size_t used = read_u_escape(i + 1, value);
        if (used == 0) break;
        i += used;
        if (value >= 0xD800 && value <= 0xDBFF && i + 1 < text.size() && text[i] == '\\' && text[i + 1] == 'u') {
          std::uint32_t low = 0;
          const std::size_t low_used = read_u_escape(i + 1, low);
          if (low_used != 0 && low >= 0xDC00 && low <= 0xDFFF) {
            value = 0x10000 + ((value - 0xD800) << 10) + (low - 0xDC00);
            i += low_used;
          }
        }
        utf8::append(out, sanitize_code_point(value));
        continue;
      }
      default:
        break;
    }
    if (c == 'x' || c == 'u') {
      // Malformed escape, copy verbatim.
      out.push_back('\\');
      out.push_back(c);
      i += 2;
      continue;
    }
    // Line separators as continuation.
    if (text.substr(i + 1).starts_with("\xE2\x80\xA8") || text.substr(i + 1).starts_with("\xE2\x80\xA9")) {
      i += 4;
      continue;
    }
    out.push_back(c);
    i += 2;
  }
  return out;
}

std::optional<std::string> base64_decode(std::string_view text) {
  std::string data;
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f') continue;
    data.push_back(c);
  }
  if (data.size() % 4 == 0) {
    for (int k = 0; k < 2 && !data.empty() && data.back() == '='; ++k) data.pop_back();
  }
  if (data.size() % 4 == 1) return std::nullopt;
  auto sextet = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  std::string out;
  std::uint32_t buffer = 0;
  int bits = 0;
  for (char c : data) {
    const int v = sextet(c);
    if (v < 0) return std::nullopt;
    buffer = (buffer << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
    }
  }
  return out;
}

}  // namespace ctxcheck
