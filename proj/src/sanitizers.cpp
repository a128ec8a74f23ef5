#include "ctxcheck/sanitizers.hpp"

#include <cstdio>

#include "ctxcheck/utf8.hpp"

namespace ctxcheck {

namespace {

std::string unicode_escape(char32_t cp) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "\\u%04X", static_cast<unsigned>(cp));
  return buf;
}

EscapeTable build_js_table() {
  EscapeTable table;
  for (char32_t cp : {U'\\', U'\'', U'"', U'`', U'<', U'>', U'&', U'=', U'-', U';', U'\u2028', U'\u2029'}) {
    table.emplace(cp, unicode_escape(cp));
  }
  for (char32_t cp = 0; cp < 0x20; ++cp) table.emplace(cp, unicode_escape(cp));
  return table;
}

}  // namespace

const EscapeTable& html_escape_table() {
  static const EscapeTable table{
      {U'&', "&amp;"}, {U'<', "&lt;"}, {U'>', "&gt;"}, {U'"', "&quot;"}, {U'\'', "&#x27;"},
  };
  return table;
}

const EscapeTable& js_escape_table() {
  static const EscapeTable table = build_js_table();
  return table;
}

std::string apply_escape_table(const EscapeTable& table, std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char32_t cp : utf8::decode(text)) {
    if (auto it = table.find(cp); it != table.end()) {
      out += it->second;
    } else {
      utf8::append(out, cp);
    }
  }
  return out;
}

bool is_url_safe(unsigned char byte) {
  return (byte >= 'A' && byte <= 'Z') || (byte >= 'a' && byte <= 'z') || (byte >= '0' && byte <= '9') ||
         byte == '-' || byte == '.' || byte == '_' || byte == '~' || byte == '/';
}

TaintedText html_escape(const TaintedText& value) {
  return TaintedText(apply_escape_table(html_escape_table(), value.text()),
                     append_sanitizer(value.taint(), sanitizer_ids::kHtmlEscape), true);
}

TaintedText js_escape(const TaintedText& value) {
  return TaintedText(apply_escape_table(js_escape_table(), value.text()),
                     append_sanitizer(value.taint(), sanitizer_ids::kJsEscape), true);
}

TaintedText url_encode(const TaintedText& value) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char byte : value.text()) {
    if (is_url_safe(byte)) {
      out.push_back(static_cast<char>(byte));
    } else {
      out.push_back('%');
      out.push_back(kHex[byte >> 4]);
      out.push_back(kHex[byte & 0x0F]);
    }
  }
  return TaintedText(std::move(out), append_sanitizer(value.taint(), sanitizer_ids::kUrlEncode),
                     value.safe_marked());
}

TaintedText mark_safe(const TaintedText& value) {
  return TaintedText(value.text(), append_sanitizer(value.taint(), sanitizer_ids::kSafe), true);
}

}  // namespace ctxcheck
