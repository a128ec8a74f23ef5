#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ctxcheck {

// One element per nested parser invocation of the model browser.
enum class BrowserContext {
  HtmlText,
  HtmlComment,
  HtmlAttrDq,
  HtmlAttrSq,
  HtmlAttrUnq,
  HtmlScriptData,
  HtmlStyleData,
  JsCode,
  JsStringDq,
  JsStringSq,
  JsComment,
  CssDeclValue,
  CssString,
  CssComment,
  Uri,
  UriScriptSrc,
  Unknown,
};

inline constexpr std::size_t kBrowserContextCount = 17;

// Outermost parser first.
using ContextSequence = std::vector<BrowserContext>;

std::string_view to_string(BrowserContext context);
std::optional<BrowserContext> browser_context_from_string(std::string_view name);
std::span<const BrowserContext> all_browser_contexts();

// "(HtmlScriptData, JsStringDq)"
std::string format_sequence(std::span<const BrowserContext> sequence);

}  // namespace ctxcheck
