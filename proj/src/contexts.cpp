#include "ctxcheck/contexts.hpp"

#include <array>

namespace ctxcheck {

namespace {

constexpr std::array<BrowserContext, kBrowserContextCount> kAll = {
    BrowserContext::HtmlText,     BrowserContext::HtmlComment,  BrowserContext::HtmlAttrDq,
    BrowserContext::HtmlAttrSq,   BrowserContext::HtmlAttrUnq,  BrowserContext::HtmlScriptData,
    BrowserContext::HtmlStyleData, BrowserContext::JsCode,      BrowserContext::JsStringDq,
    BrowserContext::JsStringSq,   BrowserContext::JsComment,    BrowserContext::CssDeclValue,
    BrowserContext::CssString,    BrowserContext::CssComment,   BrowserContext::Uri,
    BrowserContext::UriScriptSrc, BrowserContext::Unknown,
};

constexpr std::array<std::string_view, kBrowserContextCount> kNames = {
    "HtmlText",   "HtmlComment", "HtmlAttrDq",   "HtmlAttrSq",    "HtmlAttrUnq", "HtmlScriptData",
    "HtmlStyleData", "JsCode",   "JsStringDq",   "JsStringSq",    "JsComment",   "CssDeclValue",
    "CssString",  "CssComment",  "Uri",          "UriScriptSrc",  "Unknown",
};

}  // namespace

std::string_view to_string(BrowserContext context) {
  return kNames[static_cast<std::size_t>(context)];
}

std::optional<BrowserContext> browser_context_from_string(std::string_view name) {
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    if (kNames[i] == name) return kAll[i];
  }
  return std::nullopt;
}

std::span<const BrowserContext> all_browser_contexts() { return kAll; }

std::string format_sequence(std::span<const BrowserContext> sequence) {
  std::string out = "(";
  for (std::size_t i = 0; i < sequence.size(); ++i) {
    if (i) out += ", ";
    out += to_string(sequence[i]);
  }
  out += ")";
  return out;
}

}  // namespace ctxcheck
