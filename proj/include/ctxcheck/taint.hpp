#pragma once

// Extended taint tracking: every value carries the set of sanitizer
// sequences applied to it since it left a taint source, together with the
// identity of that source.

#include <compare>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace ctxcheck {

// Thin string wrapper so that source, sink and sanitizer ids cannot be mixed up.
template <typename Tag>
class Identifier {
 public:
  Identifier() = default;
  explicit Identifier(std::string value) : value_(std::move(value)) {}

  const std::string& str() const { return value_; }
  bool empty() const { return value_.empty(); }

  friend auto operator<=>(const Identifier&, const Identifier&) = default;
  friend bool operator==(const Identifier&, const Identifier&) = default;

 private:
  std::string value_;
};

struct SourceTag {};
struct SanitizerTag {};
struct SinkTag {};

using SourceId = Identifier<SourceTag>;
using SanitizerId = Identifier<SanitizerTag>;
using SinkId = Identifier<SinkTag>;

// Application order: the first applied sanitizer comes first.
using SanitizerSequence = std::vector<SanitizerId>;

struct TaintEntry {
  SourceId origin;
  SanitizerSequence chain;

  friend auto operator<=>(const TaintEntry&, const TaintEntry&) = default;
  friend bool operator==(const TaintEntry&, const TaintEntry&) = default;
};

// Set of (origin, chain) pairs. The empty record means "untainted".
class TaintRecord {
 public:
  TaintRecord() = default;
  TaintRecord(std::initializer_list<TaintEntry> entries) : entries_(entries) {}
  explicit TaintRecord(std::set<TaintEntry> entries) : entries_(std::move(entries)) {}

  static TaintRecord from_source(SourceId origin);

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  const std::set<TaintEntry>& entries() const { return entries_; }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  std::set<SourceId> origins() const;

  friend bool operator==(const TaintRecord&, const TaintRecord&) = default;

 private:
  std::set<TaintEntry> entries_;
};

// Appends `sanitizer` to every chain in the record.
TaintRecord append_sanitizer(const TaintRecord& record, const SanitizerId& sanitizer);
TaintRecord merge_taint(const TaintRecord& a, const TaintRecord& b);

enum class TrackingMode {
  Full,
  NoNumeric,             // numbers never carry taint
  NoNumericNoContainer,  // ... and container-producing operations drop taint
};

std::string_view to_string(TrackingMode mode);
TrackingMode tracking_mode_from_string(std::string_view name);

inline bool tracks_numbers(TrackingMode mode) { return mode == TrackingMode::Full; }
inline bool tracks_containers(TrackingMode mode) {
  return mode != TrackingMode::NoNumericNoContainer;
}

class TaintedText {
 public:
  TaintedText() = default;
  explicit TaintedText(std::string text, TaintRecord taint = {}, bool safe_marked = false)
      : text_(std::move(text)), taint_(std::move(taint)), safe_marked_(safe_marked) {}

  const std::string& text() const { return text_; }
  const TaintRecord& taint() const { return taint_; }
  // Set by filters that suppress autoescaping; not part of the taint algebra.
  bool safe_marked() const { return safe_marked_; }
  bool tainted() const { return !taint_.empty(); }

  TaintedText with_text(std::string text) const { return TaintedText(std::move(text), taint_, safe_marked_); }
  TaintedText with_taint(TaintRecord taint) const { return TaintedText(text_, std::move(taint), safe_marked_); }
  TaintedText with_safe_marked(bool safe) const { return TaintedText(text_, taint_, safe); }

  friend bool operator==(const TaintedText&, const TaintedText&) = default;

 private:
  std::string text_;
  TaintRecord taint_;
  bool safe_marked_ = false;
};

class TaintedNumber {
 public:
  using Value = std::variant<std::int64_t, double>;

  TaintedNumber() = default;
  TaintedNumber(Value value, TaintRecord taint) : value_(value), taint_(std::move(taint)) {}

  const Value& value() const { return value_; }
  const TaintRecord& taint() const { return taint_; }

  friend bool operator==(const TaintedNumber&, const TaintedNumber&) = default;

 private:
  Value value_ = std::int64_t{0};
  TaintRecord taint_;
};

TaintedText make_source(std::string text, SourceId origin);

// Numeric source; in modes that do not track numbers the value starts clean.
TaintedNumber make_number_source(TaintedNumber::Value value, SourceId origin,
                                 TrackingMode mode = TrackingMode::Full);

TaintedText mark_sanitized(const TaintedText& value, const SanitizerId& sanitizer);

TaintedText concat(const TaintedText& a, const TaintedText& b);
TaintedText concat(std::span<const TaintedText> parts);

// String interpolation: each "{}" in `format` is replaced by the next argument.
TaintedText interpolate(const TaintedText& format, std::span<const TaintedText> args);

// Single-operand operations keep the operand's taint.
TaintedText substr(const TaintedText& value, std::size_t pos, std::size_t count = std::string::npos);
TaintedText to_upper(const TaintedText& value);
TaintedText to_lower(const TaintedText& value);
// Every occurrence of `from` is replaced; the result merges value and replacement taint.
TaintedText replace_all(const TaintedText& value, std::string_view from, const TaintedText& to);

// Container-returning operations: pieces carry the input taint unless the mode
// disables container propagation.
std::vector<TaintedText> split(const TaintedText& value, std::string_view sep,
                               TrackingMode mode = TrackingMode::Full);
TaintedText join(std::span<const TaintedText> pieces, const TaintedText& sep);

std::vector<TaintedNumber> to_char_codes(const TaintedText& value, TrackingMode mode = TrackingMode::Full);
TaintedText from_char_codes(std::span<const TaintedNumber> codes);

// Decomposes into code points and rebuilds the string; taint survives only
// when numbers are tracked.
TaintedText char_roundtrip(const TaintedText& value, TrackingMode mode = TrackingMode::Full);

// Stringification as a template would print the number.
TaintedText number_to_text(const TaintedNumber& number);

}  // namespace ctxcheck
