#pragma once

#include <map>
#include <set>
#include <string>

#include "ctxcheck/taint.hpp"

namespace ctxcheck {

namespace sanitizer_ids {
inline const SanitizerId kHtmlEscape{"html_escape"};
inline const SanitizerId kJsEscape{"js_escape"};
inline const SanitizerId kUrlEncode{"url_encode"};
inline const SanitizerId kSafe{"safe"};
}  // namespace sanitizer_ids

using EscapeTable = std::map<char32_t, std::string>;

const EscapeTable& html_escape_table();
const EscapeTable& js_escape_table();

// Code points url_encode leaves untouched: ALPHA DIGIT - . _ ~ and '/'.
bool is_url_safe(unsigned char byte);

// `&` `<` `>` `"` `'` to entities; marks the value safe for autoescaping.
TaintedText html_escape(const TaintedText& value);
// Characters significant inside script data or JS strings to \uXXXX.
TaintedText js_escape(const TaintedText& value);
// Percent-encodes the UTF-8 bytes; autoescaping still applies afterwards.
TaintedText url_encode(const TaintedText& value);
// Text unchanged; turns autoescaping off for the value.
TaintedText mark_safe(const TaintedText& value);

std::string apply_escape_table(const EscapeTable& table, std::string_view text);

}  // namespace ctxcheck
