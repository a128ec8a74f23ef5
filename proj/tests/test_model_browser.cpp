#include <doctest.h>

#include <set>

#include "ctxcheck/error.hpp"
#include "ctxcheck/model_browser.hpp"
#include "support/doctest_print.hpp"
#include "support/support.hpp"

using namespace ctxcheck;
using testing::place_token;
using BC = BrowserContext;

namespace {

ContextSequence context_of(std::string_view html) {
  const auto placed = place_token(html);
  const auto findings = analyze(placed.document, placed.registry);
  REQUIRE(findings.size() == 1);
  return findings[0].context;
}

std::string percent_encode_all(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c)) {
      out.push_back(static_cast<char>(c));
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

std::string base64_encode(std::string_view bytes) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const unsigned v = (unsigned char)bytes[i] << 16 | (unsigned char)bytes[i + 1] << 8 | (unsigned char)bytes[i + 2];
    for (int s = 18; s >= 0; s -= 6) out += kAlphabet[(v >> s) & 63];
  }
  if (i + 1 == bytes.size()) {
    const unsigned v = (unsigned char)bytes[i] << 16;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const unsigned v = (unsigned char)bytes[i] << 16 | (unsigned char)bytes[i + 1] << 8;
    out += kAlphabet[(v >> 18) & 63];
    out += kAlphabet[(v >> 12) & 63];
    out += kAlphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

}  // namespace

TEST_CASE("context table") {
  for (const auto& row : testing::load_context_table()) {
    INFO(row.name << ": " << row.html);
    const auto placed = place_token(row.html);
    const auto findings = analyze(placed.document, placed.registry);
    REQUIRE(findings.size() == 1);
    CHECK(format_sequence(findings[0].context) == format_sequence(row.context));
  }
}

TEST_CASE("depth law holds on every finding") {
  for (const auto& row : testing::load_context_table()) {
    INFO(row.name);
    const auto placed = place_token(row.html);
    for (const auto& finding : analyze(placed.document, placed.registry))
      CHECK(finding.parser_depth == finding.context.size());
  }
  for (const auto& c : testing::load_corpus()) {
    INFO(c.name);
    const auto rendered = testing::render_case(c);
    for (const auto& finding : analyze(rendered.document, rendered.registry))
      CHECK(finding.parser_depth == finding.context.size());
  }
}

TEST_CASE("data:text/html nesting yields 2k+1 contexts") {
  const std::string token = TokenSource(1).next().str();
  for (int k = 1; k <= 3; ++k) {
    std::string html = "<p>@@</p>";
    for (int level = 0; level < k; ++level)
      html = "<iframe src=\"data:text/html," + percent_encode_all(level == 0 ? "<p>" + token + "</p>" : html) +
             "\"></iframe>";
    const std::size_t at = html.find(token);
    REQUIRE(at != std::string::npos);
    html.replace(at, token.size(), "@@");

    ContextSequence expected;
    for (int level = 0; level < k; ++level) {
      expected.push_back(BC::HtmlAttrDq);
      expected.push_back(BC::Uri);
    }
    expected.push_back(BC::HtmlText);
    INFO("k = " << k);
    CHECK(context_of(html) == expected);
    CHECK(expected.size() == static_cast<std::size_t>(2 * k + 1));
  }
}

TEST_CASE("base64 data payloads are decoded") {
  const auto placed = place_token("@@");
  const std::string html =
      "<iframe src=\"data:text/html;base64," + base64_encode("<b title='" + placed.token + "'>x</b>") + "\"></iframe>";
  const auto findings = analyze(html, placed.registry);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].context == ContextSequence{BC::HtmlAttrDq, BC::Uri, BC::HtmlAttrSq});

  // The URI layer cannot decode a payload with raw token text in it.
  CHECK(context_of("<iframe src=\"data:text/html;base64,PHA+@@\"></iframe>") ==
        ContextSequence{BC::HtmlAttrDq, BC::Unknown});
}

TEST_CASE("forgiving html") {
  CHECK(context_of("<p>a < b @@") == ContextSequence{BC::HtmlText});
  CHECK(context_of("<div class=\"x\" title=\"@@") == ContextSequence{BC::Unknown});
  CHECK(context_of("<script>var s = \"@@") == ContextSequence{BC::HtmlScriptData, BC::Unknown});
  CHECK(context_of("<style>p { content: \"@@") == ContextSequence{BC::HtmlStyleData, BC::Unknown});
  CHECK(context_of("<!-- @@") == ContextSequence{BC::HtmlComment});
  CHECK(context_of("<p>x</p><@@") == ContextSequence{BC::Unknown});
  CHECK(context_of("<SCRIPT>x = '@@'</SCRIPT>") == ContextSequence{BC::HtmlScriptData, BC::JsStringSq});
  CHECK(context_of("<script>var s = \"</script><p>@@\";") == ContextSequence{BC::HtmlText});
  CHECK(context_of("<style>p{color:red}</style>@@") == ContextSequence{BC::HtmlText});
}

TEST_CASE("tokens in tag and attribute names are Unknown") {
  CHECK(context_of("<div @@=1>") == ContextSequence{BC::Unknown});
  CHECK(context_of("<@@div>") == ContextSequence{BC::Unknown});
}

TEST_CASE("mode of entity decoding per layer") {
  // Attribute values are decoded once; script content is raw.
  CHECK(context_of("<a onclick=\"f(&quot;@@&quot;)\">") == ContextSequence{BC::HtmlAttrDq, BC::JsStringDq});
  CHECK(context_of("<script>f(&quot;@@&quot;)</script>") == ContextSequence{BC::HtmlScriptData, BC::JsCode});
  CHECK(context_of("<a href=\"javascript:f(&amp;quot;@@)\">") ==
        ContextSequence{BC::HtmlAttrDq, BC::Uri, BC::JsCode});
}

TEST_CASE("several tokens in one document") {
  SinkRegistry registry;
  TokenSource tokens(4);
  std::vector<std::string> ids;
  for (int i = 0; i < 3; ++i) {
    ids.push_back(tokens.next().str());
    registry.insert(AnnotationToken(ids.back()),
                    RegistryEntry{TaintRecord::from_source(SourceId("s")), SinkId("t:" + std::to_string(i))});
  }
  const std::string doc = "<p>" + ids[0] + "x</p><a href=\"" + ids[1] + "y\">" + "<script>var a='" + ids[2] +
                          "z';</script>";
  const auto findings = analyze(doc, registry);
  REQUIRE(findings.size() == 3);
  CHECK(findings[0].context == ContextSequence{BC::HtmlText});
  CHECK(findings[1].context == ContextSequence{BC::HtmlAttrDq, BC::Uri});
  CHECK(findings[2].context == ContextSequence{BC::HtmlScriptData, BC::JsStringSq});
  CHECK(findings[0].token == ids[0]);

  SUBCASE("determinism") { CHECK(analyze(doc, registry).size() == 3); }

  SUBCASE("completeness") {
    CHECK_THROWS_AS(analyze("<p>nothing</p>", registry), MissingToken);
    try {
      analyze("<p>" + ids[0] + "</p>", registry);
      FAIL("expected MissingToken");
    } catch (const MissingToken& e) {
      CHECK((e.token() == ids[1] || e.token() == ids[2]));
    }
  }
}

TEST_CASE("excerpts mark the value and drop tokens") {
  const auto placed = place_token("<p>before @@value after</p>");
  const auto findings = analyze(placed.document, placed.registry);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].excerpt.find("before \xE2\x96\xB8value after") != std::string::npos);
  CHECK(findings[0].excerpt.find("xtnt") == std::string::npos);
}

TEST_CASE("deep nesting stops at the depth limit") {
  const std::string token = TokenSource(2).next().str();
  std::string html = "<p>" + token + "</p>";
  for (std::size_t level = 0; level < ModelBrowser::kMaxDepth; ++level)
    html = "<iframe src=\"data:text/html," + percent_encode_all(html) + "\"></iframe>";
  SinkRegistry registry;
  registry.insert(AnnotationToken(token), RegistryEntry{TaintRecord::from_source(SourceId("s")), SinkId("t")});
  const auto findings = analyze(html, registry);
  REQUIRE(findings.size() == 1);
  CHECK(findings[0].context.size() <= ModelBrowser::kMaxDepth + 1);
  CHECK(findings[0].context.back() == BC::Unknown);
  CHECK(findings[0].parser_depth == findings[0].context.size());
}

TEST_CASE("direct scanner entry points") {
  const auto placed = place_token("@@");
  CHECK(js_scan("var x = '" + placed.token + "'", {}, placed.registry)[0].context == ContextSequence{BC::JsStringSq});
  CHECK(css_scan("color: " + placed.token, {}, placed.registry)[0].context == ContextSequence{BC::CssDeclValue});
  CHECK(uri_scan("javascript:" + placed.token, {}, placed.registry)[0].context == ContextSequence{BC::Uri, BC::JsCode});
  CHECK(uri_scan(placed.token, {}, placed.registry, true)[0].context == ContextSequence{BC::UriScriptSrc});
  CHECK(html_scan(placed.token, {BC::HtmlAttrDq, BC::Uri}, placed.registry)[0].context ==
        ContextSequence{BC::HtmlAttrDq, BC::Uri, BC::HtmlText});
}

TEST_CASE("css details") {
  CHECK(context_of("<style>@media screen { p { color: @@ } }</style>") ==
        ContextSequence{BC::HtmlStyleData, BC::CssDeclValue});
  CHECK(context_of("<style>@import url(@@);</style>") == ContextSequence{BC::HtmlStyleData, BC::CssDeclValue, BC::Uri});
  CHECK(context_of("<p style=\"@@: red\">") == ContextSequence{BC::HtmlAttrDq, BC::Unknown});
  CHECK(context_of("<p style=\"font-family: 'a@@'\">") == ContextSequence{BC::HtmlAttrDq, BC::CssString});
  CHECK(context_of("<p style=\"background: url('javascript:@@')\">") ==
        ContextSequence{BC::HtmlAttrDq, BC::CssDeclValue, BC::Uri, BC::JsCode});
}

TEST_CASE("context names round-trip") {
  for (BC c : all_browser_contexts()) CHECK(browser_context_from_string(to_string(c)) == c);
  CHECK(all_browser_contexts().size() == kBrowserContextCount);
  CHECK_FALSE(browser_context_from_string("HtmlBody").has_value());
  CHECK(format_sequence(ContextSequence{BC::HtmlScriptData, BC::JsStringDq}) == "(HtmlScriptData, JsStringDq)");
  CHECK(format_sequence(ContextSequence{}) == "()");
}

TEST_CASE("random markup: every token is located and the depth law holds") {
  static const std::vector<std::string> kFragments{
      "<p>", "</p>", "<div class=\"", "\">", "'", "\"", "<a href=\"", "javascript:", "data:text/html,", "<script>",
      "</script>", "<style>", "</style>", " style=\"color:", "url(", ")", "<!--", "-->", "/*", "*/", "//", "\n",
      "<", ">", "=", " ", "&amp;", "&#x3c;", "%3C", "%22", "\\", "`", "${", "}", "{", ";", "/", "<textarea>",
      "</textarea>", " onclick=", "<script type=\"text/template\">", "base64,", "<iframe src='", "<!DOCTYPE html>",
      "</", "<?x ?>", "<![CDATA[", "]]>", "@media x {", "\\x3c", "\xE2\x80\xA8", "\xC3\xA9", "\xFF"};
  testing::Rng rng(31);
  for (int n = 0; n < 1500; ++n) {
    SinkRegistry registry;
    TokenSource tokens(static_cast<std::uint64_t>(n) + 100);
    std::string doc;
    const std::size_t pieces = rng.between(1, 30);
    for (std::size_t i = 0; i < pieces; ++i) {
      if (rng.below(5) == 0) {
        const AnnotationToken token = tokens.next();
        registry.insert(token, RegistryEntry{TaintRecord::from_source(SourceId("s")), SinkId("t")});
        doc += token.str();
      }
      doc += kFragments[rng.below(kFragments.size())];
    }
    INFO("document: " << doc);
    std::vector<Finding> findings;
    CHECK_NOTHROW(findings = analyze(doc, registry));
    std::set<std::string> found;
    for (const auto& f : findings) {
      found.insert(f.token);
      CHECK(f.parser_depth == f.context.size());
      CHECK_FALSE(f.context.empty());
    }
    CHECK(found.size() == registry.size());
  }
}
