#pragma once

// Layer decoders used before handing content to a nested parser. All of them
// are forgiving: malformed escapes are copied through verbatim. Annotation
// tokens contain only [a-z0-9] and are therefore fixed points of each decoder.

#include <optional>
#include <string>
#include <string_view>

namespace ctxcheck {

// HTML character references. In attribute mode, a legacy named reference
// without ';' followed by an alphanumeric or '=' is left alone.
std::string entity_decode(std::string_view text, bool in_attribute = false);

std::string percent_decode(std::string_view text);

std::string css_unescape(std::string_view text);

std::string js_string_decode(std::string_view text);

// Forgiving base64 as used by data: URIs; nullopt if the payload is not base64.
std::optional<std::string> base64_decode(std::string_view text);

}  // namespace ctxcheck
