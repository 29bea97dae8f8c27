#include <cstdint>
#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "subergo/config.hpp"
#include "subergo/experiment.hpp"
#include "subergo/presets.hpp"
#include "subergo/version.hpp"

namespace {

using nlohmann::json;

// One line a human can act on; the full detail lives in summary.json.
std::string headline(const json& s) {
  if (s.contains("comparison")) return s["comparison"].value("text", "compared");
  if (s.contains("certificate")) {
    std::string line = "certificate " + s["certificate"].value("status", "?");
    const std::string reason = s["certificate"].value("reason", "");
    if (!reason.empty()) line += " (" + reason + ")";
    return line;
  }
  if (s.contains("nested")) {
    std::string line = "nested certificate " + s["nested"].value("status", "?");
    const std::string reason = s["nested"].value("reason", "");
    if (!reason.empty()) line += " (" + reason + ")";
    return line;
  }
  if (s.contains("verdict")) return "survival check: " + s.value("verdict", "?");
  if (s.contains("classification"))
    return "regime: " + s["classification"].value("regime", "?");
  if (s.contains("heavy_tail"))
    return "obstruction: " + s["heavy_tail"].value("verdict", "?");
  if (s.contains("scan")) return "drift scan: " + s["scan"].value("verdict", "?");
  if (s.contains("conductance"))
    return s["conductance"].value("obstruction", false)
               ? std::string("conductance obstruction confirmed")
               : std::string("no conductance obstruction");
  if (s.contains("regularity_sweep")) return "regularity sweep written";
  if (s.contains("entries")) return "rate menu written";
  if (s.contains("fit_error")) return "fit unavailable: " + s.value("fit_error", "");
  return "done";
}

int execute(const subergo::cfg::ExperimentConfig& config, const std::string& out_override,
            const std::string& preset_name) {
  subergo::runner::ResultBundle bundle = subergo::runner::run(config);
  if (!preset_name.empty()) bundle.metadata["preset"] = preset_name;
  const std::string dir = out_override.empty() ? config.out_dir() : out_override;
  subergo::runner::write_bundle(bundle, config, dir);
  std::printf("%s\n", headline(bundle.summary).c_str());
  std::printf("results under %s (exit %d)\n", dir.c_str(), bundle.exit_status);
  return bundle.exit_status;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"subgeometric ergodicity workbench"};
  app.set_version_flag("--version", std::string(subergo::kVersion));
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  auto* run_cmd = app.add_subcommand("run", "run an experiment from a config file");
  run_cmd->add_option("config", config_path, "config file (sectioned text or json)")
      ->required();
  run_cmd->add_option("--out", out_dir, "override the output directory");

  std::string preset_name;
  std::string preset_out;
  std::int64_t seed_override = -1;
  auto* preset_cmd = app.add_subcommand("preset", "run a canned experiment by name");
  preset_cmd->add_option("name", preset_name, "preset name (see `subergo list`)")
      ->required();
  preset_cmd->add_option("--seed", seed_override, "override the preset seed");
  preset_cmd->add_option("--out", preset_out, "override the output directory");

  auto* list_cmd = app.add_subcommand("list", "list the available presets");

  CLI11_PARSE(app, argc, argv);

  try {
    if (list_cmd->parsed()) {
      for (const auto& p : subergo::presets::catalog())
        std::printf("%-28s %-16s expects %-16s %s\n", p.name.c_str(), p.anchor.c_str(),
                    p.expect.c_str(), p.description.c_str());
      return 0;
    }
    if (run_cmd->parsed()) {
      const subergo::cfg::ExperimentConfig config =
          subergo::cfg::parse_config_file(config_path);
      return execute(config, out_dir, "");
    }
    const subergo::presets::Preset* p = subergo::presets::find(preset_name);
    if (p == nullptr) {
      std::fprintf(stderr, "unknown preset '%s'; try `subergo list`\n",
                   preset_name.c_str());
      return subergo::runner::kExitConfig;
    }
    json doc = subergo::cfg::parse_config_text(p->config_text).doc();
    if (seed_override >= 0) doc["numeric"]["seed"] = seed_override;
    const subergo::cfg::ExperimentConfig config(doc);
    return execute(config, preset_out, p->name);
  } catch (const subergo::cfg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return subergo::runner::kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return subergo::runner::kExitConfig;
  }
}
