#pragma once

// Server-side model of how a browser hands nested content to sub-parsers.
// Every parser invocation contributes exactly one element to the context
// sequence, so the sequence length equals the nesting depth on the path.
//
// Transitions:
//   HTML -> JS   <script> content, on* attributes
//   HTML -> CSS  <style> content, style attribute
//   HTML -> URI  href src action formaction poster cite background data
//   HTML -> HTML <script> with a client-side template type
//   CSS  -> URI  url(...)
//   URI  -> JS   javascript:
//   URI  -> HTML data:text/html

#include <string>
#include <string_view>
#include <vector>

#include "ctxcheck/annotations.hpp"
#include "ctxcheck/contexts.hpp"

namespace ctxcheck {

struct Finding {
  std::string token;
  ContextSequence context;
  std::string excerpt;
  // Parser invocations active when the token was located.
  std::size_t parser_depth = 0;
};

enum class CssInput { DeclarationList, Stylesheet };

class ModelBrowser {
 public:
  // Nesting beyond this depth is reported as Unknown instead of recursing.
  static constexpr std::size_t kMaxDepth = 48;

  explicit ModelBrowser(const SinkRegistry& registry) : registry_(registry) {}

  void html_scan(std::string_view text, const ContextSequence& prefix);
  void js_scan(std::string_view text, const ContextSequence& prefix);
  void css_scan(std::string_view text, const ContextSequence& prefix, CssInput input);
  void uri_scan(std::string_view text, const ContextSequence& prefix, bool script_source = false);

  const std::vector<Finding>& findings() const { return findings_; }
  std::vector<Finding> take_findings() { return std::move(findings_); }
  // Scanner invocations so far, nested ones included.
  std::size_t invocations() const { return invocations_; }

 private:
  struct DepthGuard;
  struct Attribute;

  void report(std::string_view text, std::size_t begin, std::size_t end, const ContextSequence& context);
  void report_unknown(std::string_view text, std::size_t begin, std::size_t end, const ContextSequence& prefix);
  void opaque_scan(std::string_view text, const ContextSequence& prefix);
  bool too_deep(std::string_view text, const ContextSequence& prefix);

  void html_attribute(std::string_view tag, const Attribute& attribute, const ContextSequence& prefix);
  std::size_t html_raw_element(std::string_view text, std::size_t content_begin, std::string_view tag,
                               const std::vector<Attribute>& attributes, const ContextSequence& prefix);

  std::size_t css_run(std::string_view text, std::size_t begin, std::size_t end, std::string_view stops,
                      BrowserContext plain, const ContextSequence& prefix);
  std::size_t css_url(std::string_view text, std::size_t begin, std::size_t end, const ContextSequence& prefix);
  std::size_t css_rules(std::string_view text, std::size_t begin, std::size_t end, bool nested,
                        const ContextSequence& prefix);
  std::size_t css_declarations(std::string_view text, std::size_t begin, std::size_t end, bool in_block,
                               const ContextSequence& prefix);

  const SinkRegistry& registry_;
  std::vector<Finding> findings_;
  std::size_t depth_ = 0;
  std::size_t invocations_ = 0;
};

// Resolves the context sequence of every registered token in `document`.
// Throws MissingToken if a registered token does not occur.
std::vector<Finding> analyze(std::string_view document, const SinkRegistry& registry);

std::vector<Finding> html_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry);
std::vector<Finding> js_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry);
std::vector<Finding> css_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry,
                              CssInput input = CssInput::DeclarationList);
std::vector<Finding> uri_scan(std::string_view text, const ContextSequence& prefix, const SinkRegistry& registry,
                              bool script_source = false);

}  // namespace ctxcheck
