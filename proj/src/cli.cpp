#include "ctxcheck/cli.hpp"

#include <CLI11.hpp>

#include <optional>
#include <ostream>

#include "ctxcheck/error.hpp"

namespace ctxcheck {

using nlohmann::json;

Bundle cmd_render(std::string_view template_source, const Environment& env, const RenderOptions& options) {
  RenderResult result = render(parse_template(template_source), env, options);
  return Bundle{std::move(result.document), std::move(result.registry)};
}

Report cmd_analyze(const Bundle& bundle, const ContextMap& map) { return build_report(bundle, map); }

namespace {

enum class Format { Json, Text };

struct Options {
  std::string template_path;
  std::string env_path;
  std::string bundle_path;
  std::string map_path;
  std::string output_path;
  std::string clean_path;
  std::string mode = "full";
  std::uint64_t seed = 0;
  Format format = Format::Json;
};

ContextMap load_map(const Options& options) {
  if (options.map_path.empty()) return default_context_map();
  return context_map_from_json(read_json_file(options.map_path));
}

Bundle load_bundle(const Options& options) { return bundle_from_json(read_json_file(options.bundle_path)); }

Bundle render_files(const Options& options) {
  const std::string source = read_file(options.template_path);
  Environment env(read_json_file(options.env_path));
  return cmd_render(source, env, RenderOptions{tracking_mode_from_string(options.mode), options.seed, true});
}

void emit(const Options& options, std::ostream& out, const std::string& text) {
  if (options.output_path.empty()) {
    out << text;
  } else {
    write_file(options.output_path, text);
  }
}

int report_and_exit(const Options& options, const Report& report, std::ostream& out) {
  if (!options.clean_path.empty()) write_file(options.clean_path, report.clean_document);
  emit(options, out, options.format == Format::Json ? to_json_text(report_to_json(report)) : report_to_text(report));
  return report.flawed() ? exit_code::kFlawed : exit_code::kClean;
}

}  // namespace

int run_cli(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Context-sensitive sanitization checker for server-rendered HTML", "ctxcheck"};
  app.require_subcommand(1);
  Options options;
  const std::map<std::string, Format> formats{{"json", Format::Json}, {"text", Format::Text}};

  auto add_render_inputs = [&](CLI::App* cmd) {
    cmd->add_option("template", options.template_path, "Template file")->required();
    cmd->add_option("env", options.env_path, "Environment (JSON object)")->required();
    cmd->add_option("--mode", options.mode, "Taint tracking mode")
        ->check(CLI::IsMember({"full", "no-numeric", "no-containers"}));
    cmd->add_option("--seed", options.seed, "Annotation token seed");
  };
  auto add_report_options = [&](CLI::App* cmd) {
    cmd->add_option("--context-map", options.map_path, "Context map (JSON)");
    cmd->add_option("--format", options.format, "Report format")->transform(CLI::CheckedTransformer(formats));
    cmd->add_option("--clean-out", options.clean_path, "Write the de-annotated document here");
  };

  CLI::App* render_cmd = app.add_subcommand("render", "Render a template into an annotated bundle");
  add_render_inputs(render_cmd);
  render_cmd->add_option("-o,--output", options.output_path, "Output file");

  CLI::App* analyze_cmd = app.add_subcommand("analyze", "Check the sanitization of an annotated bundle");
  analyze_cmd->add_option("bundle", options.bundle_path, "Bundle file")->required();
  add_report_options(analyze_cmd);
  analyze_cmd->add_option("-o,--output", options.output_path, "Output file");

  CLI::App* check_cmd = app.add_subcommand("check", "Render and analyze in one step");
  add_render_inputs(check_cmd);
  add_report_options(check_cmd);
  check_cmd->add_option("-o,--output", options.output_path, "Output file");

  CLI::App* contexts_cmd = app.add_subcommand("contexts", "List the browser contexts of each sink");
  contexts_cmd->add_option("bundle", options.bundle_path, "Bundle file")->required();
  contexts_cmd->add_option("--format", options.format, "Output format")->transform(CLI::CheckedTransformer(formats));
  contexts_cmd->add_option("-o,--output", options.output_path, "Output file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::kClean;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return exit_code::kClean;
  } catch (const CLI::ParseError& e) {
    err << "ctxcheck: " << e.what() << "\n";
    return exit_code::kError;
  }

  try {
    if (render_cmd->parsed()) {
      emit(options, out, to_json_text(bundle_to_json(render_files(options))));
      return exit_code::kClean;
    }
    if (analyze_cmd->parsed()) return report_and_exit(options, cmd_analyze(load_bundle(options), load_map(options)), out);
    if (check_cmd->parsed()) return report_and_exit(options, cmd_analyze(render_files(options), load_map(options)), out);
    if (contexts_cmd->parsed()) {
      const Bundle bundle = load_bundle(options);
      Report report;
      report.findings = analyze(bundle.document, bundle.registry);
      emit(options, out,
           options.format == Format::Json ? to_json_text(contexts_to_json(report, bundle.registry))
                                          : contexts_to_text(report, bundle.registry));
      return exit_code::kClean;
    }
  } catch (const Error& e) {
    err << "ctxcheck: " << e.what() << "\n";
    return exit_code::kError;
  } catch (const json::exception& e) {
    err << "ctxcheck: " << e.what() << "\n";
    return exit_code::kError;
  }
  return exit_code::kError;
}

}  // namespace ctxcheck
