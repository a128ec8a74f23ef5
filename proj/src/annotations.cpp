#include "ctxcheck/annotations.hpp"

#include "ctxcheck/error.hpp"

namespace ctxcheck {

namespace {

bool is_lower_hex(char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); }

}  // namespace

AnnotationToken::AnnotationToken(std::string text) : text_(std::move(text)) {
  if (!is_valid(text_)) throw FormatError("malformed annotation token: " + text_);
}

bool AnnotationToken::is_valid(std::string_view text) {
  if (text.size() != kLength || !text.starts_with(kPrefix)) return false;
  for (char c : text.substr(kPrefix.size())) {
    if (!is_lower_hex(c)) return false;
  }
  return true;
}

AnnotationToken TokenSource::next() {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string text(AnnotationToken::kPrefix);
  for (int half = 0; half < 2; ++half) {
    std::uint64_t bits = engine_();
    for (int i = 0; i < 16; ++i) {
      text.push_back(kHex[bits >> 60]);
      bits <<= 4;
    }
  }
  return AnnotationToken(std::move(text));
}

void SinkRegistry::insert(const AnnotationToken& token, RegistryEntry entry) {
  if (entry.taint.empty()) throw FormatError("registry entry for " + token.str() + " is untainted");
  if (entry.sink.empty()) throw FormatError("registry entry for " + token.str() + " has no sink");
  if (!entries_.emplace(token.str(), std::move(entry)).second) {
    throw FormatError("duplicate annotation token: " + token.str());
  }
}

const RegistryEntry* SinkRegistry::find(std::string_view token) const {
  auto it = entries_.find(token);
  return it == entries_.end() ? nullptr : &it->second;
}

AnnotationToken DocumentBuilder::fresh_token(const SinkRegistry& registry) {
  for (;;) {
    AnnotationToken token = tokens_.next();
    if (!registry.contains(token.str())) return token;
  }
}

std::optional<AnnotationToken> emit_to_sink(const TaintedText& value, const SinkId& sink,
                                            DocumentBuilder& out, SinkRegistry& registry) {
  if (!value.tainted() || !out.annotating()) {
    out.append(value.text());
    return std::nullopt;
  }
  AnnotationToken token = out.fresh_token(registry);
  registry.insert(token, RegistryEntry{value.taint(), sink});
  out.append(token.str());
  out.append(value.text());
  return token;
}

std::vector<TokenHit> locate_tokens(std::string_view text, const SinkRegistry& registry) {
  std::vector<TokenHit> hits;
  if (registry.empty()) return hits;
  std::size_t pos = text.find(AnnotationToken::kPrefix);
  while (pos != std::string_view::npos) {
    std::string_view candidate = text.substr(pos, AnnotationToken::kLength);
    if (candidate.size() == AnnotationToken::kLength && registry.contains(candidate)) {
      hits.push_back({pos, candidate});
      pos = text.find(AnnotationToken::kPrefix, pos + AnnotationToken::kLength);
    } else {
      pos = text.find(AnnotationToken::kPrefix, pos + 1);
    }
  }
  return hits;
}

std::string strip_annotations(std::string_view document, const SinkRegistry& registry) {
  std::string out;
  out.reserve(document.size());
  std::size_t start = 0;
  for (const auto& hit : locate_tokens(document, registry)) {
    out.append(document.substr(start, hit.offset - start));
    start = hit.offset + hit.token.size();
  }
  out.append(document.substr(start));
  if (auto residue = locate_tokens(out, registry); !residue.empty()) {
    throw UnknownResidue("annotation token survived stripping: " + std::string(residue.front().token));
  }
  return out;
}

}  // namespace ctxcheck
