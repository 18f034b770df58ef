#pragma once

// Flat namespaced run configuration: every tunable is a "section.key" string
// with a typed setter and a canonical rendering. Config files are one
// "key = value" per line with '#' comments.

#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "riskavi/agent.hpp"
#include "riskavi/env.hpp"

namespace riskavi::cli {

enum class Scale { smoke, full };

Scale parse_scale(const std::string& s);
std::string to_string(Scale s);

struct RunConfig {
  AgentConfig agent;
  EnvConfig env;
  Scale scale = Scale::full;
  std::string output_dir;  ///< empty: $RISKAVI_OUTPUT_ROOT (or ./runs) / run id
  std::string run_id;      ///< empty: derived from command, variant and seed
};

/// Bad key or value. `line` is 0 when the setting did not come from a file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& what, std::string key, int line = 0)
      : std::runtime_error(what), key_(std::move(key)), line_(line) {}
  const std::string& key() const noexcept { return key_; }
  int line() const noexcept { return line_; }

 private:
  std::string key_;
  int line_;
};

/// Defaults for a scale. Paper: 1e6 steps, T = 1000, Table 2 values.
/// Smoke: 2e4 steps, T = 200, kappa = 0.05, epsilon decays over the first
/// 20% of steps.
RunConfig default_config(Scale scale);

/// Switch presets while keeping the caller's other settings: only the keys the
/// presets differ in are overwritten.
void apply_scale(RunConfig& cfg, Scale scale);

/// All registered keys, sorted.
std::vector<std::string> config_keys();
bool is_config_key(const std::string& key);

void set_value(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0);
std::string get_value(const RunConfig& cfg, const std::string& key);

/// Parse "key = value" lines into `cfg`. Throws ConfigError carrying the line.
void load_config_text(const std::string& text, RunConfig& cfg);
void load_config_file(const std::filesystem::path& path, RunConfig& cfg);

/// Every key, sorted, as "key=value" lines. Doubles round-trip exactly.
std::string render_config(const RunConfig& cfg);
std::map<std::string, std::string> config_map(const RunConfig& cfg);

/// Cross-field checks (agent, env, risk, optimizer). Throws ConfigError.
void validate(const RunConfig& cfg);

/// Output directory for a command: explicit run.output_dir, else
/// <root>/<run id> with root from RISKAVI_OUTPUT_ROOT or "runs".
std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::string& default_id);

inline constexpr const char* kOutputRootEnv = "RISKAVI_OUTPUT_ROOT";

std::string format_double(double v);

using Override = std::pair<std::string, std::string>;

/// Pull "--section.key value" and "--section.key=value" pairs out of an
/// argument list, leaving everything else in place. Throws ConfigError when a
/// dotted flag has no value.
std::vector<Override> extract_overrides(std::vector<std::string>& args);

/// Precedence, lowest first: scale preset, config file, dotted overrides.
/// The preset comes from `scale_flag`, else run.scale in the file or
/// overrides, else `command_default`.
RunConfig resolve_config(Scale command_default, std::optional<Scale> scale_flag,
                         const std::optional<std::filesystem::path>& config_file,
                         const std::vector<Override>& overrides);

}  // namespace riskavi::cli
