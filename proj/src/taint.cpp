#include "ctxcheck/taint.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

#include "ctxcheck/error.hpp"
#include "ctxcheck/utf8.hpp"

namespace ctxcheck {

TaintRecord TaintRecord::from_source(SourceId origin) {
  return TaintRecord{TaintEntry{std::move(origin), {}}};
}

std::set<SourceId> TaintRecord::origins() const {
  std::set<SourceId> out;
  for (const auto& entry : entries_) out.insert(entry.origin);
  return out;
}

TaintRecord append_sanitizer(const TaintRecord& record, const SanitizerId& sanitizer) {
  std::set<TaintEntry> out;
  for (const auto& entry : record) {
    TaintEntry next = entry;
    next.chain.push_back(sanitizer);
    out.insert(std::move(next));
  }
  return TaintRecord(std::move(out));
}

TaintRecord merge_taint(const TaintRecord& a, const TaintRecord& b) {
  std::set<TaintEntry> out = a.entries();
  out.insert(b.begin(), b.end());
  return TaintRecord(std::move(out));
}

std::string_view to_string(TrackingMode mode) {
  switch (mode) {
    case TrackingMode::Full: return "full";
    case TrackingMode::NoNumeric: return "no-numeric";
    case TrackingMode::NoNumericNoContainer: return "no-containers";
  }
  return "full";
}

TrackingMode tracking_mode_from_string(std::string_view name) {
  if (name == "full") return TrackingMode::Full;
  if (name == "no-numeric") return TrackingMode::NoNumeric;
  if (name == "no-containers") return TrackingMode::NoNumericNoContainer;
  throw FormatError("unknown tracking mode: " + std::string(name));
}

TaintedText make_source(std::string text, SourceId origin) {
  return TaintedText(std::move(text), TaintRecord::from_source(std::move(origin)));
}

TaintedNumber make_number_source(TaintedNumber::Value value, SourceId origin, TrackingMode mode) {
  if (!tracks_numbers(mode)) return TaintedNumber(value, {});
  return TaintedNumber(value, TaintRecord::from_source(std::move(origin)));
}

TaintedText mark_sanitized(const TaintedText& value, const SanitizerId& sanitizer) {
  return value.with_taint(append_sanitizer(value.taint(), sanitizer));
}

TaintedText concat(const TaintedText& a, const TaintedText& b) {
  return TaintedText(a.text() + b.text(), merge_taint(a.taint(), b.taint()),
                     a.safe_marked() && b.safe_marked());
}

TaintedText concat(std::span<const TaintedText> parts) {
  if (parts.empty()) return TaintedText();
  TaintedText out = parts.front();
  for (const auto& part : parts.subspan(1)) out = concat(out, part);
  return out;
}

TaintedText interpolate(const TaintedText& format, std::span<const TaintedText> args) {
  const std::string& fmt = format.text();
  TaintedText out = format.with_text("");
  std::size_t next_arg = 0;
  std::size_t literal_start = 0;
  for (std::size_t pos = fmt.find("{}"); pos != std::string::npos && next_arg < args.size();
       pos = fmt.find("{}", literal_start)) {
    out = concat(out, format.with_text(fmt.substr(literal_start, pos - literal_start)));
    out = concat(out, args[next_arg++]);
    literal_start = pos + 2;
  }
  return concat(out, format.with_text(fmt.substr(literal_start)));
}

TaintedText substr(const TaintedText& value, std::size_t pos, std::size_t count) {
  if (pos > value.text().size()) pos = value.text().size();
  return value.with_text(value.text().substr(pos, count));
}

TaintedText to_upper(const TaintedText& value) {
  std::string text = value.text();
  for (char& c : text) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return value.with_text(std::move(text));
}

TaintedText to_lower(const TaintedText& value) {
  std::string text = value.text();
  for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return value.with_text(std::move(text));
}

TaintedText replace_all(const TaintedText& value, std::string_view from, const TaintedText& to) {
  if (from.empty()) return value;
  const std::string& text = value.text();
  std::string out;
  bool replaced = false;
  std::size_t start = 0;
  for (std::size_t pos = text.find(from); pos != std::string::npos; pos = text.find(from, start)) {
    out.append(text, start, pos - start);
    out.append(to.text());
    start = pos + from.size();
    replaced = true;
  }
  out.append(text, start);
  if (!replaced) return value;
  return TaintedText(std::move(out), merge_taint(value.taint(), to.taint()),
                     value.safe_marked() && to.safe_marked());
}

std::vector<TaintedText> split(const TaintedText& value, std::string_view sep, TrackingMode mode) {
  const TaintRecord piece_taint = tracks_containers(mode) ? value.taint() : TaintRecord{};
  const std::string& text = value.text();
  std::vector<TaintedText> out;
  auto emit = [&](std::string piece) { out.emplace_back(std::move(piece), piece_taint, false); };
  if (sep.empty()) {
    // Whitespace-splitting variant: runs of blanks separate, empty pieces dropped.
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
      std::size_t j = i;
      while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
      if (j > i) emit(text.substr(i, j - i));
      i = j;
    }
    return out;
  }
  std::size_t start = 0;
  for (std::size_t pos = text.find(sep); pos != std::string::npos; pos = text.find(sep, start)) {
    emit(text.substr(start, pos - start));
    start = pos + sep.size();
  }
  emit(text.substr(start));
  return out;
}

TaintedText join(std::span<const TaintedText> pieces, const TaintedText& sep) {
  if (pieces.empty()) return TaintedText();
  TaintedText out = pieces.front();
  for (const auto& piece : pieces.subspan(1)) out = concat(concat(out, sep), piece);
  return out;
}

std::vector<TaintedNumber> to_char_codes(const TaintedText& value, TrackingMode mode) {
  const TaintRecord code_taint = tracks_numbers(mode) ? value.taint() : TaintRecord{};
  std::vector<TaintedNumber> out;
  for (char32_t cp : utf8::decode(value.text())) {
    out.emplace_back(static_cast<std::int64_t>(cp), code_taint);
  }
  return out;
}

TaintedText from_char_codes(std::span<const TaintedNumber> codes) {
  std::string text;
  TaintRecord taint;
  for (const auto& code : codes) {
    const auto cp = std::visit([](auto v) { return static_cast<std::int64_t>(v); }, code.value());
    utf8::append(text, cp < 0 ? char32_t{0xFFFD} : static_cast<char32_t>(cp));
    taint = merge_taint(taint, code.taint());
  }
  return TaintedText(std::move(text), std::move(taint));
}

TaintedText char_roundtrip(const TaintedText& value, TrackingMode mode) {
  const auto codes = to_char_codes(value, mode);
  // An empty string has no codes to carry the taint, so the record is restored
  // from the input rather than rebuilt from the pieces.
  return TaintedText(from_char_codes(codes).text(),
                     tracks_numbers(mode) ? value.taint() : TaintRecord{});
}

TaintedText number_to_text(const TaintedNumber& number) {
  std::string text;
  if (const auto* i = std::get_if<std::int64_t>(&number.value())) {
    text = std::to_string(*i);
  } else {
    const double d = std::get<double>(number.value());
    std::ostringstream os;
    os.precision(15);
    os << d;
    text = os.str();
    if (std::isfinite(d) && text.find_first_of(".e") == std::string::npos) text += ".0";
  }
  return TaintedText(std::move(text), number.taint());
}

}  // namespace ctxcheck
