#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "ctxcheck/bundle.hpp"
#include "ctxcheck/model_browser.hpp"
#include "ctxcheck/verifier.hpp"

namespace ctxcheck {

struct Report {
  std::vector<Finding> findings;
  std::vector<Verdict> verdicts;
  Summary summary;
  std::string clean_document;

  bool flawed() const { return summary.incorrect > 0; }
};

// analyze, verify, aggregate and strip in one pass. Throws UnknownSanitizer
// before any analysis if the bundle uses an id the map does not know.
Report build_report(const Bundle& bundle, const ContextMap& map);

nlohmann::json report_to_json(const Report& report);
std::string report_to_text(const Report& report);

// One entry per located token, in document order:
//   [ { "token": "xtnt...", "sink": "template:0", "context": ["HtmlText"] } ]
nlohmann::json contexts_to_json(const Report& report, const SinkRegistry& registry);
std::string contexts_to_text(const Report& report, const SinkRegistry& registry);

}  // namespace ctxcheck
