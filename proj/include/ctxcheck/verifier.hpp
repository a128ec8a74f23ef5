#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctxcheck/annotations.hpp"
#include "ctxcheck/contexts.hpp"
#include "ctxcheck/model_browser.hpp"
#include "ctxcheck/taint.hpp"

namespace ctxcheck {

// Per sanitizer, the context sequences it handles correctly on its own.
class ContextMap {
 public:
  using Sequences = std::set<ContextSequence>;

  // Throws FormatError for sequences containing Unknown or UriScriptSrc,
  // which no sanitizer can handle.
  void add(const SanitizerId& sanitizer, ContextSequence handled);
  // Registers a sanitizer that handles nothing.
  void declare(const SanitizerId& sanitizer);

  bool contains(const SanitizerId& sanitizer) const { return handled_.contains(sanitizer); }
  // Throws UnknownSanitizer.
  const Sequences& handled(const SanitizerId& sanitizer) const;
  const std::map<SanitizerId, Sequences>& entries() const { return handled_; }

  friend bool operator==(const ContextMap&, const ContextMap&) = default;

 private:
  std::map<SanitizerId, Sequences> handled_;
};

ContextMap default_context_map();

// True iff `context` = v_n · ... · v_1 with v_k handled by chain[k-1]: the
// first applied sanitizer covers the innermost tail of the sequence.
bool sufficient(std::span<const SanitizerId> chain, std::span<const BrowserContext> context, const ContextMap& map);

enum class BugPattern {
  NoSanitization,
  HtmlInJsCode,
  HtmlInJsString,
  HtmlInUri,
  HtmlInUnquotedAttr,
  HtmlInCssValue,
  OtherMismatch,
};

inline constexpr std::size_t kBugPatternCount = 7;

std::string_view to_string(BugPattern pattern);
std::string_view describe(BugPattern pattern);
std::span<const BugPattern> all_bug_patterns();

// Total; meant for chains already found insufficient.
BugPattern classify(std::span<const SanitizerId> chain, std::span<const BrowserContext> context);

struct SanitizationTriple {
  SourceId origin;
  SanitizerSequence chain;
  SinkId sink;

  friend auto operator<=>(const SanitizationTriple&, const SanitizationTriple&) = default;
  friend bool operator==(const SanitizationTriple&, const SanitizationTriple&) = default;
};

struct Verdict {
  std::string token;
  SanitizationTriple triple;
  ContextSequence context;
  bool sufficient = false;
  std::optional<BugPattern> pattern;  // set iff !sufficient
};

// One verdict per (finding, taint entry), deduplicated by (triple, context).
std::vector<Verdict> verify(std::span<const Finding> findings, const SinkRegistry& registry, const ContextMap& map);

struct Summary {
  std::size_t sanitizations = 0;  // unique triples
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::map<BugPattern, std::size_t> patterns;  // unique triples per pattern, all patterns present

  friend bool operator==(const Summary&, const Summary&) = default;
};

// A triple is incorrect if any of its verdicts is insufficient.
Summary aggregate(std::span<const Verdict> verdicts);

}  // namespace ctxcheck
