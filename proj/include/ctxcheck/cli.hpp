#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <string_view>

#include "ctxcheck/bundle.hpp"
#include "ctxcheck/report.hpp"
#include "ctxcheck/template_engine.hpp"

namespace ctxcheck {

namespace exit_code {
inline constexpr int kClean = 0;
inline constexpr int kFlawed = 1;
inline constexpr int kError = 2;
}  // namespace exit_code

Bundle cmd_render(std::string_view template_source, const Environment& env, const RenderOptions& options);
Report cmd_analyze(const Bundle& bundle, const ContextMap& map);

// `args` excludes the program name.
//   render   TEMPLATE ENV        -> annotated bundle
//   analyze  BUNDLE              -> report, exit 1 if flawed
//   check    TEMPLATE ENV        -> render + analyze
//   contexts BUNDLE              -> context sequences per sink
int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace ctxcheck
