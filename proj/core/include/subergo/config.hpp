#pragma once

#include <cstdint>
#include <nlohmann/json.hpp>
#include <stdexcept>
#include <string>
#include <vector>

namespace subergo::cfg {

// A config that failed to parse or validate. what() lists every offending
// field, one per line.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Experiment description: four sections (model, action, numeric, output)
// behind a fully-resolved json tree that gets echoed into every result bundle.
class ExperimentConfig {
 public:
  explicit ExperimentConfig(nlohmann::json doc);

  const nlohmann::json& doc() const { return doc_; }
  std::string model_kind() const;  // jump | langevin | cpou
  std::string action() const;      // simulate | drift-check | nested-check |
                                   // converge | classify | rates
  std::uint64_t seed() const;
  std::string out_dir() const;

  bool has(const char* section, const char* key) const;
  double num(const char* section, const char* key, double fallback) const;
  std::int64_t integer(const char* section, const char* key,
                       std::int64_t fallback) const;
  std::string str(const char* section, const char* key,
                  const std::string& fallback) const;
  std::vector<double> nums(const char* section, const char* key) const;

 private:
  nlohmann::json doc_;
};

// Sectioned key = value text into a json tree. Accepted values: quoted
// strings, integers, floats, true/false, and one-line arrays of those.
// Duplicate sections or keys are errors (this is how a config with two model
// sections is rejected).
nlohmann::json structured_text_to_json(const std::string& text);

// Auto-detects the format: a first non-space '{' means json, anything else
// the sectioned text form. Parse errors and validation failures both raise
// ConfigError with the full field list.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace subergo::cfg
