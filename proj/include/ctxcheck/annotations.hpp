#pragma once

// Annotation tokens mark where a tainted value lands in the rendered output.
// A token is "xtnt" followed by 32 lowercase hex digits and is inserted
// directly in front of the value text.

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "ctxcheck/taint.hpp"

namespace ctxcheck {

class AnnotationToken {
 public:
  static constexpr std::string_view kPrefix = "xtnt";
  static constexpr std::size_t kHexDigits = 32;
  static constexpr std::size_t kLength = kPrefix.size() + kHexDigits;

  // Throws FormatError if `text` is not a well-formed token.
  explicit AnnotationToken(std::string text);

  static bool is_valid(std::string_view text);

  const std::string& str() const { return text_; }

  friend auto operator<=>(const AnnotationToken&, const AnnotationToken&) = default;
  friend bool operator==(const AnnotationToken&, const AnnotationToken&) = default;

 private:
  std::string text_;
};

// Seedable generator of 128-bit random tokens.
class TokenSource {
 public:
  explicit TokenSource(std::uint64_t seed = 0) : engine_(seed) {}
  AnnotationToken next();

 private:
  std::mt19937_64 engine_;
};

struct RegistryEntry {
  TaintRecord taint;
  SinkId sink;

  friend bool operator==(const RegistryEntry&, const RegistryEntry&) = default;
};

class SinkRegistry {
 public:
  using Map = std::map<std::string, RegistryEntry, std::less<>>;

  // Throws FormatError on a duplicate token or an untainted record.
  void insert(const AnnotationToken& token, RegistryEntry entry);

  const RegistryEntry* find(std::string_view token) const;
  bool contains(std::string_view token) const { return find(token) != nullptr; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  const Map& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  friend bool operator==(const SinkRegistry&, const SinkRegistry&) = default;

 private:
  Map entries_;
};

class DocumentBuilder {
 public:
  explicit DocumentBuilder(std::uint64_t seed = 0, bool annotate = true)
      : tokens_(seed), annotate_(annotate) {}

  void append(std::string_view text) { out_.append(text); }
  AnnotationToken fresh_token(const SinkRegistry& registry);

  bool annotating() const { return annotate_; }
  const std::string& str() const { return out_; }
  std::string take() { return std::move(out_); }

 private:
  TokenSource tokens_;
  bool annotate_;
  std::string out_;
};

// Untainted values are appended verbatim; tainted ones get a fresh token in
// front and a registry entry, unless the builder has annotation disabled.
// Returns the token when one was inserted.
std::optional<AnnotationToken> emit_to_sink(const TaintedText& value, const SinkId& sink,
                                            DocumentBuilder& out, SinkRegistry& registry);

struct TokenHit {
  std::size_t offset;
  std::string_view token;
};

// Registered tokens occurring in `text`, in order of appearance.
std::vector<TokenHit> locate_tokens(std::string_view text, const SinkRegistry& registry);

// Removes every registered token. Throws UnknownResidue if a registered token
// is still present afterwards.
std::string strip_annotations(std::string_view document, const SinkRegistry& registry);

}  // namespace ctxcheck
