#include "ctxcheck/verifier.hpp"

#include <algorithm>
#include <array>

#include "ctxcheck/error.hpp"
#include "ctxcheck/sanitizers.hpp"

namespace ctxcheck {

namespace {

using BC = BrowserContext;

constexpr std::array<BugPattern, kBugPatternCount> kPatterns = {
    BugPattern::NoSanitization, BugPattern::HtmlInJsCode,       BugPattern::HtmlInJsString,
    BugPattern::HtmlInUri,      BugPattern::HtmlInUnquotedAttr, BugPattern::HtmlInCssValue,
    BugPattern::OtherMismatch,
};

bool ends_with(std::span<const BrowserContext> sequence, std::size_t end, std::span<const BrowserContext> tail) {
  if (tail.size() > end) return false;
  return std::equal(tail.begin(), tail.end(), sequence.begin() + static_cast<std::ptrdiff_t>(end - tail.size()));
}

}  // namespace

void ContextMap::add(const SanitizerId& sanitizer, ContextSequence handled) {
  for (BrowserContext context : handled) {
    if (context == BC::Unknown || context == BC::UriScriptSrc) {
      throw FormatError("sanitizer " + sanitizer.str() + " cannot handle " + std::string(to_string(context)));
    }
  }
  handled_[sanitizer].insert(std::move(handled));
}

void ContextMap::declare(const SanitizerId& sanitizer) { handled_[sanitizer]; }

const ContextMap::Sequences& ContextMap::handled(const SanitizerId& sanitizer) const {
  auto it = handled_.find(sanitizer);
  if (it == handled_.end()) throw UnknownSanitizer(sanitizer.str());
  return it->second;
}

ContextMap default_context_map() {
  using namespace sanitizer_ids;
  ContextMap map;
  // The empty sequence means the sanitizer never undoes protection added
  // after it, which lets escape|escapejs verify.
  map.add(kHtmlEscape, {});
  map.add(kHtmlEscape, {BC::HtmlText});
  map.add(kHtmlEscape, {BC::HtmlAttrDq});
  map.add(kHtmlEscape, {BC::HtmlAttrSq});
  map.add(kJsEscape, {BC::JsStringDq});
  map.add(kJsEscape, {BC::JsStringSq});
  map.add(kJsEscape, {BC::HtmlScriptData, BC::JsStringDq});
  map.add(kJsEscape, {BC::HtmlScriptData, BC::JsStringSq});
  map.add(kUrlEncode, {BC::Uri});
  map.add(kSafe, {});
  return map;
}

bool sufficient(std::span<const SanitizerId> chain, std::span<const BrowserContext> context, const ContextMap& map) {
  std::vector<const ContextMap::Sequences*> handled;
  handled.reserve(chain.size());
  for (const auto& id : chain) handled.push_back(&map.handled(id));

  // memo[k][end]: can context[0, end) be covered by chain[k..] (chain[k] on the tail)?
  enum : char { kUnset, kNo, kYes };
  std::vector<std::vector<char>> memo(chain.size() + 1, std::vector<char>(context.size() + 1, kUnset));
  auto covers = [&](auto&& self, std::size_t k, std::size_t end) -> bool {
    if (k == chain.size()) return end == 0;
    char& slot = memo[k][end];
    if (slot != kUnset) return slot == kYes;
    bool ok = false;
    for (const auto& tail : *handled[k]) {
      if (ends_with(context, end, tail) && self(self, k + 1, end - tail.size())) {
        ok = true;
        break;
      }
    }
    slot = ok ? kYes : kNo;
    return ok;
  };
  return covers(covers, 0, context.size());
}

std::string_view to_string(BugPattern pattern) {
  switch (pattern) {
    case BugPattern::NoSanitization: return "NoSanitization";
    case BugPattern::HtmlInJsCode: return "HtmlInJsCode";
    case BugPattern::HtmlInJsString: return "HtmlInJsString";
    case BugPattern::HtmlInUri: return "HtmlInUri";
    case BugPattern::HtmlInUnquotedAttr: return "HtmlInUnquotedAttr";
    case BugPattern::HtmlInCssValue: return "HtmlInCssValue";
    case BugPattern::OtherMismatch: return "OtherMismatch";
  }
  return "OtherMismatch";
}

std::string_view describe(BugPattern pattern) {
  switch (pattern) {
    case BugPattern::NoSanitization: return "No sanitization";
    case BugPattern::HtmlInJsCode: return "HTML sanitization in JavaScript code";
    case BugPattern::HtmlInJsString: return "HTML sanitization in JavaScript string";
    case BugPattern::HtmlInUri: return "HTML sanitization in URI";
    case BugPattern::HtmlInUnquotedAttr: return "HTML sanitization in unquoted HTML attribute";
    case BugPattern::HtmlInCssValue: return "HTML sanitization in CSS declaration value";
    case BugPattern::OtherMismatch: return "Other sanitizer/context mismatch";
  }
  return "";
}

std::span<const BugPattern> all_bug_patterns() { return kPatterns; }

BugPattern classify(std::span<const SanitizerId> chain, std::span<const BrowserContext> context) {
  using namespace sanitizer_ids;
  const bool effective = std::any_of(chain.begin(), chain.end(), [](const SanitizerId& id) { return id != kSafe; });
  if (!effective) return BugPattern::NoSanitization;
  const bool html = std::find(chain.begin(), chain.end(), kHtmlEscape) != chain.end();
  if (!html || context.empty()) return BugPattern::OtherMismatch;
  switch (context.back()) {
    case BC::JsCode: return BugPattern::HtmlInJsCode;
    case BC::JsStringDq:
    case BC::JsStringSq: return BugPattern::HtmlInJsString;
    case BC::Uri:
    case BC::UriScriptSrc: return BugPattern::HtmlInUri;
    case BC::HtmlAttrUnq: return BugPattern::HtmlInUnquotedAttr;
    case BC::CssDeclValue:
    case BC::CssString: return BugPattern::HtmlInCssValue;
    default: return BugPattern::OtherMismatch;
  }
}

std::vector<Verdict> verify(std::span<const Finding> findings, const SinkRegistry& registry, const ContextMap& map) {
  std::vector<Verdict> verdicts;
  std::set<std::pair<SanitizationTriple, ContextSequence>> seen;
  for (const auto& finding : findings) {
    const RegistryEntry* entry = registry.find(finding.token);
    if (!entry) throw MissingToken(finding.token);
    for (const auto& taint : entry->taint) {
      SanitizationTriple triple{taint.origin, taint.chain, entry->sink};
      if (!seen.emplace(triple, finding.context).second) continue;
      Verdict verdict;
      verdict.token = finding.token;
      verdict.triple = std::move(triple);
      verdict.context = finding.context;
      verdict.sufficient = sufficient(taint.chain, finding.context, map);
      if (!verdict.sufficient) verdict.pattern = classify(taint.chain, finding.context);
      verdicts.push_back(std::move(verdict));
    }
  }
  return verdicts;
}

Summary aggregate(std::span<const Verdict> verdicts) {
  std::map<SanitizationTriple, std::set<BugPattern>> triples;
  for (const auto& verdict : verdicts) {
    auto& patterns = triples[verdict.triple];
    if (verdict.pattern) patterns.insert(*verdict.pattern);
  }
  Summary summary;
  for (BugPattern pattern : kPatterns) summary.patterns[pattern] = 0;
  summary.sanitizations = triples.size();
  for (const auto& [triple, patterns] : triples) {
    if (patterns.empty()) {
      ++summary.correct;
      continue;
    }
    ++summary.incorrect;
    for (BugPattern pattern : patterns) ++summary.patterns[pattern];
  }
  return summary;
}

}  // namespace ctxcheck
