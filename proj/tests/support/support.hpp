#pragma once

// Shared generators, oracles and fixture loaders for the unit and
// acceptance test binaries.

#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ctxcheck/annotations.hpp"
#include "ctxcheck/contexts.hpp"
#include "ctxcheck/taint.hpp"
#include "ctxcheck/verifier.hpp"

namespace ctxcheck::testing {

std::string fixture_path(const std::string& relative);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::size_t below(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }
  std::size_t between(std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(engine_);
  }
  bool coin() { return below(2) == 0; }
  template <typename T>
  const T& pick(std::span<const T> items) { return items[below(items.size())]; }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

// Small pools keep collisions between generated values frequent.
SourceId random_origin(Rng& rng);
SanitizerId random_sanitizer(Rng& rng);
SanitizerSequence random_chain(Rng& rng, std::size_t max_length);
TaintRecord random_record(Rng& rng, std::size_t max_entries = 4);
// Mixed ASCII, markup characters and multibyte code points.
std::string random_text(Rng& rng, std::size_t max_length = 12);

// Explicit enumeration of M_{s_i} x ... x M_{s_1}.
bool brute_force_sufficient(std::span<const SanitizerId> chain, std::span<const BrowserContext> context,
                            const ContextMap& map);

struct OracleCase {
  ContextMap map;
  SanitizerSequence chain;
  ContextSequence context;
};

// Up to 4 sanitizers, sequences of length <= 2 per entry, chains of length
// <= 3 and contexts of length <= 4, over a narrow alphabet so that matches
// are common.
OracleCase random_oracle_case(Rng& rng);

struct PropertyResult {
  std::string name;
  std::size_t cases = 0;
  std::size_t failures = 0;
  std::string first_failure;

  bool ok() const { return failures == 0; }
};

// Taint algebra properties, `cases` random inputs each.
std::vector<PropertyResult> taint_algebra_properties(std::uint64_t seed, std::size_t cases);

PropertyResult oracle_equivalence(std::uint64_t seed, std::size_t cases);

// Each decoder maps a valid token to itself.
PropertyResult decoder_fixed_point(std::uint64_t seed, std::size_t cases);

struct ExpectedFlaw {
  std::string origin;
  std::string pattern;
  std::vector<std::string> context;

  friend auto operator<=>(const ExpectedFlaw&, const ExpectedFlaw&) = default;
};

struct CorpusCase {
  std::string name;
  std::string template_path;
  std::string env_path;
  TrackingMode mode = TrackingMode::Full;
  std::size_t correct = 0;
  std::size_t incorrect = 0;
  std::set<ExpectedFlaw> flaws;
  std::optional<std::pair<std::string, std::string>> key_flaw;  // origin, pattern
};

std::vector<CorpusCase> load_corpus();
const CorpusCase& corpus_case(const std::vector<CorpusCase>& corpus, std::string_view name);

struct RenderedCase {
  std::string document;
  SinkRegistry registry;
};

RenderedCase render_case(const CorpusCase& c, bool annotate = true, std::uint64_t seed = 7);

struct ContextRow {
  std::string name;
  std::string html;  // "@@" marks the value position
  ContextSequence context;
};

std::vector<ContextRow> load_context_table();

// Registers one token with a placeholder taint and substitutes it for "@@".
struct PlacedToken {
  std::string document;
  SinkRegistry registry;
  std::string token;
};

PlacedToken place_token(std::string_view html, std::uint64_t seed = 1);

std::set<ExpectedFlaw> flaws_of(std::span<const Verdict> verdicts);

}  // namespace ctxcheck::testing
