#include "support.hpp"

#include <algorithm>
#include <array>
#include <functional>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ctxcheck/bundle.hpp"
#include "ctxcheck/decoders.hpp"
#include "ctxcheck/sanitizers.hpp"
#include "ctxcheck/template_engine.hpp"
#include "ctxcheck/utf8.hpp"

#ifndef CTXCHECK_FIXTURE_DIR
#error "CTXCHECK_FIXTURE_DIR must be defined"
#endif

namespace ctxcheck::testing {

using nlohmann::json;

std::string fixture_path(const std::string& relative) { return std::string(CTXCHECK_FIXTURE_DIR) + "/" + relative; }

namespace {

constexpr std::array<const char*, 5> kOrigins{"request.GET.q", "request.POST.body", "db.user.name", "cookie.sid",
                                              "env.path"};
constexpr std::array<const char*, 5> kSanitizers{"html_escape", "js_escape", "url_encode", "safe", "custom"};

std::string describe(const TaintRecord& record) {
  std::ostringstream out;
  out << "{";
  for (const auto& entry : record) {
    out << "(" << entry.origin.str() << ",(";
    for (std::size_t i = 0; i < entry.chain.size(); ++i) out << (i ? "," : "") << entry.chain[i].str();
    out << "))";
  }
  out << "}";
  return out.str();
}

void check(PropertyResult& result, bool ok, const std::function<std::string()>& message) {
  ++result.cases;
  if (ok) return;
  if (result.failures++ == 0) result.first_failure = message();
}

}  // namespace

SourceId random_origin(Rng& rng) { return SourceId(kOrigins[rng.below(kOrigins.size())]); }

SanitizerId random_sanitizer(Rng& rng) { return SanitizerId(kSanitizers[rng.below(kSanitizers.size())]); }

SanitizerSequence random_chain(Rng& rng, std::size_t max_length) {
  SanitizerSequence chain(rng.between(0, max_length));
  for (auto& id : chain) id = random_sanitizer(rng);
  return chain;
}

TaintRecord random_record(Rng& rng, std::size_t max_entries) {
  std::set<TaintEntry> entries;
  const std::size_t n = rng.between(0, max_entries);
  for (std::size_t i = 0; i < n; ++i) entries.insert(TaintEntry{random_origin(rng), random_chain(rng, 3)});
  return TaintRecord(std::move(entries));
}

std::string random_text(Rng& rng, std::size_t max_length) {
  static constexpr std::array<char32_t, 16> kSpecial{U'<', U'>', U'&', U'"', U'\'', U'\\', U'/', U' ',
                                                     U',', U'\n', U'=', U'-', U'é', U' ', U'中',
                                                     U'\U0001F600'};
  std::string out;
  const std::size_t n = rng.between(0, max_length);
  for (std::size_t i = 0; i < n; ++i) {
    if (rng.below(3) == 0) {
      utf8::append(out, kSpecial[rng.below(kSpecial.size())]);
    } else {
      out.push_back(static_cast<char>('a' + rng.below(26)));
    }
  }
  return out;
}

bool brute_force_sufficient(std::span<const SanitizerId> chain, std::span<const BrowserContext> context,
                            const ContextMap& map) {
  std::vector<std::vector<ContextSequence>> factors;
  for (const auto& id : chain) {
    const auto& handled = map.handled(id);
    factors.emplace_back(handled.begin(), handled.end());
  }
  const ContextSequence target(context.begin(), context.end());
  // choice[k] indexes into factors[k]; the product is v_i ... v_1, so the
  // last-applied sanitizer's sequence comes first.
  std::vector<std::size_t> choice(factors.size(), 0);
  for (const auto& f : factors)
    if (f.empty()) return false;
  while (true) {
    ContextSequence product;
    for (std::size_t k = factors.size(); k-- > 0;) {
      const auto& v = factors[k][choice[k]];
      product.insert(product.end(), v.begin(), v.end());
    }
    if (product == target) return true;
    std::size_t k = 0;
    while (k < choice.size() && ++choice[k] == factors[k].size()) choice[k++] = 0;
    if (k == choice.size()) return false;
  }
}

OracleCase random_oracle_case(Rng& rng) {
  static constexpr std::array<BrowserContext, 5> kAlphabet{BrowserContext::HtmlText, BrowserContext::HtmlAttrDq,
                                                           BrowserContext::HtmlScriptData,
                                                           BrowserContext::JsStringDq, BrowserContext::Uri};
  auto random_sequence = [&](std::size_t max_length) {
    ContextSequence sequence(rng.between(0, max_length));
    for (auto& c : sequence) c = kAlphabet[rng.below(kAlphabet.size())];
    return sequence;
  };

  OracleCase c;
  const std::size_t sanitizers = rng.between(1, 4);
  std::vector<SanitizerId> ids;
  for (std::size_t i = 0; i < sanitizers; ++i) {
    ids.emplace_back("s" + std::to_string(i));
    c.map.declare(ids.back());
    const std::size_t entries = rng.between(0, 4);
    for (std::size_t e = 0; e < entries; ++e) c.map.add(ids.back(), random_sequence(2));
  }
  const std::size_t length = rng.between(0, 3);
  for (std::size_t i = 0; i < length; ++i) c.chain.push_back(ids[rng.below(ids.size())]);

  // Half the contexts are drawn from the product itself so both outcomes
  // are well represented.
  bool built = false;
  if (rng.coin()) {
    ContextSequence product;
    built = true;
    for (std::size_t k = c.chain.size(); k-- > 0;) {
      const auto& handled = c.map.handled(c.chain[k]);
      if (handled.empty()) {
        built = false;
        break;
      }
      auto it = handled.begin();
      std::advance(it, static_cast<std::ptrdiff_t>(rng.below(handled.size())));
      product.insert(product.end(), it->begin(), it->end());
    }
    if (built && product.size() <= 4) {
      c.context = std::move(product);
    } else {
      built = false;
    }
  }
  if (!built) c.context = random_sequence(4);
  return c;
}

std::vector<PropertyResult> taint_algebra_properties(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  PropertyResult commutative{"merge_taint commutative"};
  PropertyResult associative{"merge_taint associative"};
  PropertyResult idempotent{"merge_taint idempotent"};
  PropertyResult identity{"merge_taint identity"};
  PropertyResult distribution{"append_sanitizer distributes over merge_taint"};
  PropertyResult every_chain{"sanitizers append one id to every chain"};
  PropertyResult chain_order{"chain order preserved"};
  PropertyResult origins{"origins preserved under concat/split/char_roundtrip"};
  PropertyResult transparency{"operations leave inputs unchanged and repeat identically"};

  for (std::size_t n = 0; n < cases; ++n) {
    const TaintRecord a = random_record(rng);
    const TaintRecord b = random_record(rng);
    const TaintRecord c = random_record(rng);
    check(commutative, merge_taint(a, b) == merge_taint(b, a), [&] { return describe(a) + " " + describe(b); });
    check(associative, merge_taint(merge_taint(a, b), c) == merge_taint(a, merge_taint(b, c)),
          [&] { return describe(a) + " " + describe(b) + " " + describe(c); });
    check(idempotent, merge_taint(a, a) == a, [&] { return describe(a); });
    check(identity, merge_taint(a, TaintRecord{}) == a && merge_taint(TaintRecord{}, a) == a,
          [&] { return describe(a); });

    const SanitizerId s = random_sanitizer(rng);
    check(distribution,
          append_sanitizer(merge_taint(a, b), s) == merge_taint(append_sanitizer(a, s), append_sanitizer(b, s)),
          [&] { return describe(a) + " " + describe(b) + " " + s.str(); });

    {
      const TaintedText value(random_text(rng), a);
      const std::array<TaintedText, 4> outputs{html_escape(value), js_escape(value), url_encode(value),
                                               mark_safe(value)};
      const std::array<SanitizerId, 4> ids{sanitizer_ids::kHtmlEscape, sanitizer_ids::kJsEscape,
                                           sanitizer_ids::kUrlEncode, sanitizer_ids::kSafe};
      bool ok = true;
      for (std::size_t i = 0; i < outputs.size(); ++i)
        ok = ok && outputs[i].taint() == append_sanitizer(a, ids[i]);
      check(every_chain, ok, [&] { return describe(a); });
    }

    {
      const SourceId origin = random_origin(rng);
      const SanitizerId s1 = random_sanitizer(rng);
      const SanitizerId s2 = random_sanitizer(rng);
      const TaintedText v = mark_sanitized(mark_sanitized(make_source(random_text(rng), origin), s1), s2);
      check(chain_order, v.taint() == TaintRecord{TaintEntry{origin, {s1, s2}}},
            [&] { return describe(v.taint()); });
    }

    {
      // Random pipeline over a pool of sourced values; every pool entry
      // tracks the origin set it must carry.
      struct Item {
        TaintedText value;
        std::set<SourceId> expected;
      };
      std::vector<Item> pool;
      std::set<SourceId> all;
      const std::size_t inputs = rng.between(1, 4);
      for (std::size_t i = 0; i < inputs; ++i) {
        Item item{TaintedText(random_text(rng), random_record(rng, 3)), {}};
        if (item.value.taint().empty()) item.value = make_source(item.value.text(), random_origin(rng));
        item.expected = item.value.taint().origins();
        all.insert(item.expected.begin(), item.expected.end());
        pool.push_back(std::move(item));
      }
      bool ok = true;
      std::string failure;
      const std::size_t steps = rng.between(1, 8);
      for (std::size_t step = 0; step < steps && ok; ++step) {
        const Item& x = pool[rng.below(pool.size())];
        switch (rng.below(3)) {
          case 0: {
            const Item& y = pool[rng.below(pool.size())];
            Item out{concat(x.value, y.value), x.expected};
            out.expected.insert(y.expected.begin(), y.expected.end());
            pool.push_back(std::move(out));
            break;
          }
          case 1: {
            static constexpr std::array<std::string_view, 4> kSeps{",", " ", "", "ab"};
            const auto pieces = split(x.value, kSeps[rng.below(kSeps.size())]);
            const std::set<SourceId> expected = x.expected;
            for (const auto& piece : pieces) pool.push_back(Item{piece, expected});
            break;
          }
          default:
            pool.push_back(Item{char_roundtrip(x.value), x.expected});
            break;
        }
        for (const auto& item : pool) {
          if (item.value.taint().origins() != item.expected) {
            ok = false;
            failure = "origins " + describe(item.value.taint());
            break;
          }
        }
      }
      if (ok) {
        std::vector<TaintedText> values;
        for (const auto& item : pool) values.push_back(item.value);
        ok = concat(values).taint().origins() == all;
        if (!ok) failure = "union of all values lost an origin";
      }
      check(origins, ok, [&] { return failure; });
    }

    {
      const TaintedText x(random_text(rng), a, rng.coin());
      const TaintedText y(random_text(rng), b, rng.coin());
      const TaintedText x0 = x;
      const TaintedText y0 = y;
      bool ok = concat(x, y) == concat(x, y) && split(x, ",") == split(x, ",") && char_roundtrip(x) == char_roundtrip(x) &&
                html_escape(x) == html_escape(x) && js_escape(x) == js_escape(x) && url_encode(x) == url_encode(x) &&
                replace_all(x, "a", y) == replace_all(x, "a", y) && to_upper(x) == to_upper(x);
      ok = ok && x == x0 && y == y0;
      check(transparency, ok, [&] { return "value " + x.text(); });
    }
  }
  return {commutative, associative, idempotent, identity, distribution, every_chain, chain_order, origins,
          transparency};
}

PropertyResult oracle_equivalence(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  PropertyResult result{"sufficient agrees with product enumeration"};
  for (std::size_t n = 0; n < cases; ++n) {
    const OracleCase c = random_oracle_case(rng);
    const bool fast = sufficient(c.chain, c.context, c.map);
    const bool slow = brute_force_sufficient(c.chain, c.context, c.map);
    check(result, fast == slow, [&] {
      std::string chain;
      for (const auto& id : c.chain) chain += id.str() + " ";
      return "chain " + chain + "context " + format_sequence(c.context) + " fast=" + std::to_string(fast);
    });
  }
  return result;
}

PropertyResult decoder_fixed_point(std::uint64_t seed, std::size_t cases) {
  Rng rng(seed);
  PropertyResult result{"decoders fix tokens"};
  for (std::size_t n = 0; n < cases; ++n) {
    const std::string token = TokenSource(rng.engine()()).next().str();
    const bool ok = entity_decode(token) == token && entity_decode(token, true) == token &&
                    percent_decode(token) == token && css_unescape(token) == token &&
                    js_string_decode(token) == token && html_escape(TaintedText(token)).text() == token &&
                    js_escape(TaintedText(token)).text() == token && url_encode(TaintedText(token)).text() == token;
    check(result, ok, [&] { return token; });
  }
  return result;
}

std::vector<CorpusCase> load_corpus() {
  const json manifest = read_json_file(fixture_path("corpus.json"));
  std::vector<CorpusCase> corpus;
  for (const auto& item : manifest) {
    CorpusCase c;
    c.name = item.at("name").get<std::string>();
    c.template_path = fixture_path("corpus/" + item.at("template").get<std::string>());
    c.env_path = fixture_path("corpus/" + item.at("env").get<std::string>());
    c.mode = tracking_mode_from_string(item.value("mode", std::string("full")));
    c.correct = item.at("correct").get<std::size_t>();
    c.incorrect = item.at("incorrect").get<std::size_t>();
    for (const auto& flaw : item.at("flaws"))
      c.flaws.insert(ExpectedFlaw{flaw.at("origin").get<std::string>(), flaw.at("pattern").get<std::string>(),
                                  flaw.at("context").get<std::vector<std::string>>()});
    if (auto key = item.find("key_flaw"); key != item.end())
      c.key_flaw = std::pair{key->at("origin").get<std::string>(), key->at("pattern").get<std::string>()};
    corpus.push_back(std::move(c));
  }
  return corpus;
}

const CorpusCase& corpus_case(const std::vector<CorpusCase>& corpus, std::string_view name) {
  for (const auto& c : corpus)
    if (c.name == name) return c;
  throw std::runtime_error("no corpus case " + std::string(name));
}

RenderedCase render_case(const CorpusCase& c, bool annotate, std::uint64_t seed) {
  const Template tmpl = parse_template(read_file(c.template_path));
  const Environment env(read_json_file(c.env_path));
  RenderResult result = render(tmpl, env, RenderOptions{c.mode, seed, annotate});
  return RenderedCase{std::move(result.document), std::move(result.registry)};
}

std::vector<ContextRow> load_context_table() {
  std::vector<ContextRow> rows;
  for (const auto& item : read_json_file(fixture_path("context_table.json"))) {
    ContextRow row{item.at("name").get<std::string>(), item.at("html").get<std::string>(), {}};
    for (const auto& name : item.at("context")) {
      const auto context = browser_context_from_string(name.get<std::string>());
      if (!context) throw std::runtime_error("bad context name in table: " + name.get<std::string>());
      row.context.push_back(*context);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

PlacedToken place_token(std::string_view html, std::uint64_t seed) {
  PlacedToken placed;
  placed.token = TokenSource(seed).next().str();
  placed.registry.insert(AnnotationToken(placed.token),
                         RegistryEntry{TaintRecord::from_source(SourceId("probe")), SinkId("probe:0")});
  const std::size_t at = html.find("@@");
  if (at == std::string_view::npos) throw std::runtime_error("snippet without @@ marker");
  placed.document = std::string(html.substr(0, at)) + placed.token + std::string(html.substr(at + 2));
  return placed;
}

std::set<ExpectedFlaw> flaws_of(std::span<const Verdict> verdicts) {
  std::set<ExpectedFlaw> flaws;
  for (const auto& v : verdicts) {
    if (v.sufficient) continue;
    std::vector<std::string> names;
    for (BrowserContext c : v.context) names.emplace_back(to_string(c));
    flaws.insert(ExpectedFlaw{v.triple.origin.str(), std::string(to_string(*v.pattern)), std::move(names)});
  }
  return flaws;
}

}  // namespace ctxcheck::testing
