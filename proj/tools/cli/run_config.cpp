#include "cli/run_config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

namespace riskavi::cli {
namespace {

struct Entry {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("invalid value '" + value + "' for " + key + " (expected " + expected + ")", key);
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) bad_value(key, s, "a real number");
  return v;
}

long to_long(const std::string& key, const std::string& s) {
  // Accept integral reals such as 1e6 or 20000.
  const double d = to_double(key, s);
  if (d != static_cast<double>(static_cast<long>(d))) bad_value(key, s, "an integer");
  return static_cast<long>(d);
}

std::size_t to_size(const std::string& key, const std::string& s) {
  const long v = to_long(key, s);
  if (v < 0) bad_value(key, s, "a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (s.empty() || ec != std::errc{} || ptr != end) bad_value(key, s, "an unsigned integer");
  return v;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  bad_value(key, s, "true or false");
}

std::string from_bool(bool b) { return b ? "true" : "false"; }

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_size(key, item));
  if (out.empty()) bad_value(key, s, "a comma-separated list of widths");
  return out;
}

std::string from_size_list(const std::vector<std::size_t>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

#define RV_DOUBLE(name, field)                                                     \
  {name, {[](RunConfig& c, const std::string& v) { c.field = to_double(name, v); }, \
          [](const RunConfig& c) { return format_double(c.field); }}}
#define RV_LONG(name, field)                                                     \
  {name, {[](RunConfig& c, const std::string& v) { c.field = to_long(name, v); }, \
          [](const RunConfig& c) { return std::to_string(c.field); }}}
#define RV_SIZE(name, field)                                                     \
  {name, {[](RunConfig& c, const std::string& v) { c.field = to_size(name, v); }, \
          [](const RunConfig& c) { return std::to_string(c.field); }}}
#define RV_U64(name, field)                                                     \
  {name, {[](RunConfig& c, const std::string& v) { c.field = to_u64(name, v); }, \
          [](const RunConfig& c) { return std::to_string(c.field); }}}
#define RV_BOOL(name, field)                                                     \
  {name, {[](RunConfig& c, const std::string& v) { c.field = to_bool(name, v); }, \
          [](const RunConfig& c) { return from_bool(c.field); }}}
#define RV_STRING(name, field)                                          \
  {name, {[](RunConfig& c, const std::string& v) { c.field = v; }, \
          [](const RunConfig& c) { return c.field; }}}

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> reg = {
      {"agent.variant",
       {[](RunConfig& c, const std::string& v) {
          try {
            c.agent.variant = parse_variant(v);
          } catch (const std::invalid_argument&) {
            bad_value("agent.variant", v, "avi, qr_avi, e_qravi or rho_qravi");
          }
        },
        [](const RunConfig& c) { return to_string(c.agent.variant); }}},
      RV_DOUBLE("agent.gamma", agent.gamma),
      RV_DOUBLE("agent.kappa", agent.kappa),
      RV_SIZE("agent.n_tau", agent.n_tau),
      RV_SIZE("agent.batch", agent.batch),
      RV_LONG("agent.train_freq", agent.train_freq),
      RV_LONG("agent.target_freq", agent.target_freq),
      RV_DOUBLE("agent.eta", agent.eta),
      RV_DOUBLE("agent.eps0", agent.eps0),
      RV_DOUBLE("agent.epsT", agent.epsT),
      RV_LONG("agent.eps_decay_steps", agent.eps_decay_steps),
      RV_LONG("agent.total_env_steps", agent.total_env_steps),
      RV_SIZE("agent.replay_capacity", agent.replay_capacity),
      RV_U64("agent.seed", agent.seed),
      {"agent.qr_norm",
       {[](RunConfig& c, const std::string& v) {
          if (v == "mean_both") c.agent.qr_norm = QrNormalization::mean_both;
          else if (v == "literal") c.agent.qr_norm = QrNormalization::literal;
          else bad_value("agent.qr_norm", v, "mean_both or literal");
        },
        [](const RunConfig& c) {
          return std::string(c.agent.qr_norm == QrNormalization::literal ? "literal" : "mean_both");
        }}},
      RV_BOOL("agent.risk_shaped_targets", agent.risk_shaped_targets),
      RV_LONG("agent.checkpoint_every", agent.checkpoint_every),

      RV_DOUBLE("risk.beta", agent.risk.beta),
      RV_DOUBLE("risk.c_max", agent.risk.c_max),
      RV_DOUBLE("risk.lambda", agent.risk.lambda),

      {"net.hidden",
       {[](RunConfig& c, const std::string& v) { c.agent.net.hidden = to_size_list("net.hidden", v); },
        [](const RunConfig& c) { return from_size_list(c.agent.net.hidden); }}},
      {"net.optimizer",
       {[](RunConfig& c, const std::string& v) {
          if (v == "adam") c.agent.net.optimizer.kind = OptimizerKind::adam;
          else if (v == "sgd") c.agent.net.optimizer.kind = OptimizerKind::sgd;
          else bad_value("net.optimizer", v, "adam or sgd");
        },
        [](const RunConfig& c) {
          return std::string(c.agent.net.optimizer.kind == OptimizerKind::adam ? "adam" : "sgd");
        }}},
      RV_DOUBLE("net.lr", agent.net.optimizer.lr),
      RV_DOUBLE("net.beta1", agent.net.optimizer.beta1),
      RV_DOUBLE("net.beta2", agent.net.optimizer.beta2),
      RV_DOUBLE("net.epsilon", agent.net.optimizer.epsilon),
      RV_BOOL("net.diminishing", agent.net.optimizer.diminishing),
      RV_DOUBLE("net.k_alpha", agent.net.optimizer.k_alpha),

      {"kde.bandwidth",
       {[](RunConfig& c, const std::string& v) {
          auto& r = c.agent.kde.rule;
          if (v == "scott") r.kind = BandwidthKind::scott;
          else if (v == "paper_literal") r.kind = BandwidthKind::paper_literal;
          else if (v == "fixed") r.kind = BandwidthKind::fixed;
          else bad_value("kde.bandwidth", v, "scott, paper_literal or fixed");
        },
        [](const RunConfig& c) {
          switch (c.agent.kde.rule.kind) {
            case BandwidthKind::scott: return std::string("scott");
            case BandwidthKind::paper_literal: return std::string("paper_literal");
            case BandwidthKind::fixed: break;
          }
          return std::string("fixed");
        }}},
      RV_DOUBLE("kde.h", agent.kde.rule.value),
      RV_SIZE("kde.grid_size", agent.kde.grid_size),

      RV_LONG("env.horizon", env.horizon),
      RV_DOUBLE("env.wheel_radius", env.wheel_radius),
      RV_DOUBLE("env.half_axle", env.half_axle),
      RV_DOUBLE("env.wheel_speed", env.wheel_speed),
      RV_DOUBLE("env.robot_radius", env.robot_radius),
      RV_DOUBLE("env.hazard_radius", env.hazard_radius),
      RV_DOUBLE("env.obstacle_half_width", env.obstacle_half_width),
      RV_DOUBLE("env.goal_radius", env.goal_radius),
      RV_DOUBLE("env.lidar_range", env.lidar_range),
      RV_SIZE("env.lidar_bins", env.lidar_bins),
      RV_SIZE("env.n_hazards", env.n_hazards),
      RV_SIZE("env.n_obstacles", env.n_obstacles),
      RV_DOUBLE("env.step_penalty", env.step_penalty),
      RV_DOUBLE("env.goal_bonus", env.goal_bonus),
      RV_DOUBLE("env.arena_half_width", env.arena_half_width),
      RV_DOUBLE("env.spawn_half_width", env.spawn_half_width),
      RV_DOUBLE("env.pose_noise", env.pose_noise),
      RV_U64("env.seed", env.seed),

      {"run.scale",
       {[](RunConfig& c, const std::string& v) {
          try {
            c.scale = parse_scale(v);
          } catch (const std::invalid_argument&) {
            bad_value("run.scale", v, "smoke or full");
          }
        },
        [](const RunConfig& c) { return to_string(c.scale); }}},
      RV_STRING("run.output_dir", output_dir),
      RV_STRING("run.id", run_id),
  };
  return reg;
}

#undef RV_DOUBLE
#undef RV_LONG
#undef RV_SIZE
#undef RV_U64
#undef RV_BOOL
#undef RV_STRING

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) throw std::runtime_error("format_double: buffer too small");
  return std::string(buf, ptr);
}

Scale parse_scale(const std::string& s) {
  if (s == "smoke") return Scale::smoke;
  if (s == "full") return Scale::full;
  throw std::invalid_argument("unknown scale '" + s + "' (expected smoke or full)");
}

std::string to_string(Scale s) { return s == Scale::smoke ? "smoke" : "full"; }

void apply_scale(RunConfig& cfg, Scale scale) {
  cfg.scale = scale;
  if (scale == Scale::full) {
    cfg.agent.total_env_steps = 1'000'000;
    cfg.env.horizon = 1000;
    cfg.agent.kappa = 1.0;
    cfg.agent.eps_decay_steps = 0;
  } else {
    cfg.agent.total_env_steps = 20'000;
    cfg.env.horizon = 200;
    cfg.agent.kappa = 0.05;
    cfg.agent.eps_decay_steps = 4'000;
  }
}

RunConfig default_config(Scale scale) {
  RunConfig cfg;
  apply_scale(cfg, scale);
  return cfg;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : registry()) keys.push_back(k);
  return keys;
}

bool is_config_key(const std::string& key) { return registry().count(key) != 0; }

void set_value(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  const auto it = registry().find(key);
  if (it == registry().end()) throw ConfigError("unknown config key '" + key + "'", key, line);
  try {
    it->second.set(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(e.what(), key, line);
  }
}

std::string get_value(const RunConfig& cfg, const std::string& key) {
  const auto it = registry().find(key);
  if (it == registry().end()) throw ConfigError("unknown config key '" + key + "'", key);
  return it->second.get(cfg);
}

void load_config_text(const std::string& text, RunConfig& cfg) {
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'", "", line_no);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      set_value(cfg, key, value, line_no);
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(line_no) + ": " + e.what(), key, line_no);
    }
  }
}

void load_config_file(const std::filesystem::path& path, RunConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string(), "");
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    load_config_text(ss.str(), cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), e.key(), e.line());
  }
}

std::map<std::string, std::string> config_map(const RunConfig& cfg) {
  std::map<std::string, std::string> out;
  for (const auto& [k, entry] : registry()) out[k] = entry.get(cfg);
  return out;
}

std::string render_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_map(cfg)) out += k + "=" + v + "\n";
  return out;
}

void validate(const RunConfig& cfg) {
  auto wrap = [](const char* section, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what(), section);
    }
  };
  wrap("risk", [&] { cfg.agent.risk.validate(); });
  wrap("agent", [&] { cfg.agent.validate(); });
  wrap("env", [&] { cfg.env.validate(); });
  wrap("net", [&] { cfg.agent.net.optimizer.validate(); });
}

std::filesystem::path resolve_output_dir(const RunConfig& cfg, const std::string& default_id) {
  if (!cfg.output_dir.empty()) return cfg.output_dir;
  const char* root = std::getenv(kOutputRootEnv);
  const std::filesystem::path base = (root && *root) ? root : "runs";
  return base / (cfg.run_id.empty() ? default_id : cfg.run_id);
}

std::vector<Override> extract_overrides(std::vector<std::string>& args) {
  std::vector<Override> out;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    const bool dotted = a.rfind("--", 0) == 0 && a.find('.') != std::string::npos &&
                        a.find('.') < a.find('=');
    if (!dotted) {
      rest.push_back(a);
      continue;
    }
    const auto eq = a.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(a.substr(2, eq - 2), a.substr(eq + 1));
    } else {
      const std::string key = a.substr(2);
      if (i + 1 >= args.size()) throw ConfigError("missing value for --" + key, key);
      out.emplace_back(key, args[++i]);
    }
  }
  args = std::move(rest);
  return out;
}

RunConfig resolve_config(Scale command_default, std::optional<Scale> scale_flag,
                         const std::optional<std::filesystem::path>& config_file,
                         const std::vector<Override>& overrides) {
  auto layer = [&](RunConfig& cfg) {
    if (config_file) load_config_file(*config_file, cfg);
    for (const auto& [k, v] : overrides) set_value(cfg, k, v);
  };
  Scale scale = command_default;
  if (scale_flag) {
    scale = *scale_flag;
  } else {
    RunConfig probe = default_config(command_default);
    layer(probe);
    scale = probe.scale;
  }
  RunConfig cfg = default_config(scale);
  layer(cfg);
  cfg.scale = scale;
  return cfg;
}

}  // namespace riskavi::cli
