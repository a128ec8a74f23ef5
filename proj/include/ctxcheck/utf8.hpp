#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctxcheck::utf8 {

// Decodes UTF-8 into code points. Bytes that do not form a valid sequence are
// mapped to U+DC80..U+DCFF so that encode(decode(s)) == s for any input.
std::vector<char32_t> decode(std::string_view text);

std::string encode(std::span<const char32_t> code_points);
void append(std::string& out, char32_t code_point);

}  // namespace ctxcheck::utf8
