#pragma once

#include <span>
#include <string>

namespace subergo::presets {

// Canned experiment: a config plus the verdict its canonical run must reach.
// `anchor` ties the preset to the construction it reruns, in the same
// vocabulary as the preset names.
struct Preset {
  std::string name;
  std::string anchor;
  std::string description;
  std::string config_text;
  std::string expect;
};

std::span<const Preset> catalog();
const Preset* find(const std::string& name);

}  // namespace subergo::presets
