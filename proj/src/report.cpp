#include "ctxcheck/report.hpp"

#include <map>
#include <set>
#include <sstream>

#include "ctxcheck/error.hpp"

namespace ctxcheck {

using nlohmann::json;

namespace {

json context_json(const ContextSequence& context) {
  json names = json::array();
  for (BrowserContext c : context) names.push_back(std::string(to_string(c)));
  return names;
}

json chain_json(const SanitizerSequence& chain) {
  json ids = json::array();
  for (const auto& id : chain) ids.push_back(id.str());
  return ids;
}

std::string format_chain(const SanitizerSequence& chain) {
  std::string out = "(";
  for (std::size_t i = 0; i < chain.size(); ++i) {
    if (i) out += ", ";
    out += chain[i].str();
  }
  return out + ")";
}

std::string dotted(std::string_view label, std::size_t width) {
  std::string out(label);
  out += ' ';
  while (out.size() < width) out += '.';
  return out + ' ';
}

}  // namespace

Report build_report(const Bundle& bundle, const ContextMap& map) {
  for (const auto& [token, entry] : bundle.registry)
    for (const auto& taint : entry.taint)
      for (const auto& id : taint.chain)
        if (!map.contains(id)) throw UnknownSanitizer(id.str());

  Report report;
  report.findings = analyze(bundle.document, bundle.registry);
  report.verdicts = verify(report.findings, bundle.registry, map);
  report.summary = aggregate(report.verdicts);
  report.clean_document = strip_annotations(bundle.document, bundle.registry);
  return report;
}

json report_to_json(const Report& report) {
  std::multimap<std::string, const Verdict*> by_token;
  for (const auto& verdict : report.verdicts) by_token.emplace(verdict.token, &verdict);

  json findings = json::array();
  for (const auto& finding : report.findings) {
    json verdicts = json::array();
    bool flawed = false;
    std::string sink;
    auto [lo, hi] = by_token.equal_range(finding.token);
    for (auto it = lo; it != hi; ++it) {
      const Verdict& v = *it->second;
      if (v.context != finding.context) continue;
      sink = v.triple.sink.str();
      flawed = flawed || !v.sufficient;
      verdicts.push_back({{"origin", v.triple.origin.str()},
                          {"chain", chain_json(v.triple.chain)},
                          {"sufficient", v.sufficient},
                          {"pattern", v.pattern ? json(std::string(to_string(*v.pattern))) : json(nullptr)}});
    }
    findings.push_back({{"token", finding.token},
                        {"sink", sink},
                        {"context", context_json(finding.context)},
                        {"excerpt", finding.excerpt},
                        {"flawed", flawed},
                        {"verdicts", std::move(verdicts)}});
  }

  json patterns = json::object();
  for (const auto& [pattern, count] : report.summary.patterns) patterns[std::string(to_string(pattern))] = count;

  return {{"findings", std::move(findings)},
          {"summary",
           {{"sanitizations", report.summary.sanitizations},
            {"correct", report.summary.correct},
            {"incorrect", report.summary.incorrect},
            {"patterns", std::move(patterns)}}},
          {"clean_document", report.clean_document}};
}

std::string report_to_text(const Report& report) {
  std::ostringstream out;
  std::set<SanitizationTriple> shown;
  bool any = false;
  for (const auto& verdict : report.verdicts) {
    if (verdict.sufficient) continue;
    if (!any) out << "Flaws\n";
    any = true;
    out << "  " << verdict.triple.sink.str() << "  " << verdict.triple.origin.str() << "  "
        << format_chain(verdict.triple.chain) << "\n"
        << "    context  " << format_sequence(verdict.context) << "\n"
        << "    pattern  " << describe(*verdict.pattern) << "\n";
    for (const auto& finding : report.findings)
      if (finding.token == verdict.token && finding.context == verdict.context) {
        out << "    excerpt  " << finding.excerpt << "\n";
        break;
      }
  }
  if (!any) out << "No flaws found.\n";

  constexpr std::size_t width = 48;
  out << "\nSanitizations\n"
      << "  " << dotted("All", width) << report.summary.sanitizations << "\n"
      << "  " << dotted("Correct", width) << report.summary.correct << "\n"
      << "  " << dotted("Incorrect", width) << report.summary.incorrect << "\n"
      << "\nBug patterns\n";
  for (const auto& [pattern, count] : report.summary.patterns)
    out << "  " << dotted(describe(pattern), width) << count << "\n";
  return out.str();
}

json contexts_to_json(const Report& report, const SinkRegistry& registry) {
  json out = json::array();
  for (const auto& finding : report.findings) {
    const RegistryEntry* entry = registry.find(finding.token);
    out.push_back({{"token", finding.token},
                   {"sink", entry ? entry->sink.str() : std::string()},
                   {"context", context_json(finding.context)}});
  }
  return out;
}

std::string contexts_to_text(const Report& report, const SinkRegistry& registry) {
  std::ostringstream out;
  for (const auto& finding : report.findings) {
    const RegistryEntry* entry = registry.find(finding.token);
    out << (entry ? entry->sink.str() : std::string("-")) << '\t' << finding.token << '\t'
        << format_sequence(finding.context) << '\n';
  }
  return out.str();
}

}  // namespace ctxcheck
