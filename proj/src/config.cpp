#include "morphevo/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

namespace morphevo {

MorphologyGrid ExperimentConfig::training_grid(
    const Morphology& default_morphology) const {
  return MorphologyGrid::make(grid_origin_x, grid_origin_y, grid_step_x,
                              grid_step_y, set_size, default_morphology);
}

MorphologyGrid ExperimentConfig::global_grid() const {
  return MorphologyGrid::make_rect(grid_origin_x, grid_origin_y, grid_step_x,
                                   grid_step_y, global_nx, global_ny);
}

double ExperimentConfig::resolved_x_split() const {
  if (x_split) return *x_split;
  const int side = std::max(1, static_cast<int>(std::lround(
                                   std::sqrt(static_cast<double>(set_size)))));
  return grid_origin_x + 0.5 * (side - 1) * grid_step_x;
}

static std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

namespace {

struct KeySetter {
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

[[noreturn]] void bad_value(const std::string& path, const std::string& value) {
  throw ConfigError("config error: invalid value '" + value + "' for key " + path);
}

long parse_long(const std::string& path, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long out = std::stol(v, &pos);
    if (pos != v.size()) bad_value(path, v);
    return out;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    bad_value(path, v);
  }
}

double parse_double(const std::string& path, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double out = std::stod(v, &pos);
    if (pos != v.size()) bad_value(path, v);
    return out;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    bad_value(path, v);
  }
}

std::uint64_t parse_u64(const std::string& path, const std::string& v) {
  try {
    std::size_t pos = 0;
    const unsigned long long out = std::stoull(v, &pos);
    if (pos != v.size()) bad_value(path, v);
    return out;
  } catch (const ConfigError&) {
    throw;
  } catch (...) {
    bad_value(path, v);
  }
}

const std::map<std::string, KeySetter>& key_registry() {
  static const std::map<std::string, KeySetter> registry = {
      {"experiment.name", {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.name = v; }}},
      {"experiment.out_dir", {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }}},
      {"experiment.n_runs", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.n_runs = static_cast<int>(parse_long(p, v)); }}},
      {"experiment.base_seed", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.base_seed = parse_u64(p, v); }}},
      {"experiment.jobs", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.jobs = static_cast<int>(parse_long(p, v)); }}},
      {"env.name", {[](ExperimentConfig& c, const std::string&, const std::string& v) { c.env_name = v; }}},
      {"env.x_split", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.x_split = parse_double(p, v); }}},
      {"net.hidden", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.hidden = static_cast<int>(parse_long(p, v)); }}},
      {"training.set_size", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.set_size = static_cast<int>(parse_long(p, v)); }}},
      {"training.grid_origin_x", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.grid_origin_x = parse_double(p, v); }}},
      {"training.grid_origin_y", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.grid_origin_y = parse_double(p, v); }}},
      {"training.grid_step_x", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.grid_step_x = parse_double(p, v); }}},
      {"training.grid_step_y", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.grid_step_y = parse_double(p, v); }}},
      {"training.schedule", {[](ExperimentConfig& c, const std::string& p, const std::string& v) {
         try { c.schedule = Schedule::kind_from_string(v); } catch (...) { bad_value(p, v); }
       }}},
      {"training.walk_step", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.walk_step = static_cast<int>(parse_long(p, v)); }}},
      {"evolution.max_generations", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.max_generations = parse_long(p, v); }}},
      {"evolution.stagnation_window", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.stagnation_window = static_cast<int>(parse_long(p, v)); }}},
      {"evolution.sigma0", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.sigma0 = parse_double(p, v); }}},
      {"evolution.outlier_std_multiplier", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.outlier_std_multiplier = parse_double(p, v); }}},
      {"evolution.satisfaction_target", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.satisfaction_target = parse_double(p, v); }}},
      {"evolution.checkpoint_every", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.checkpoint_every = parse_long(p, v); }}},
      {"evolution.stop_after_generations", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.stop_after_generations = parse_long(p, v); }}},
      {"evolution.eval_threads", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.eval_threads = static_cast<int>(parse_long(p, v)); }}},
      {"evaluation.n_eval", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.n_eval = static_cast<int>(parse_long(p, v)); }}},
      {"evaluation.global_nx", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.global_nx = static_cast<int>(parse_long(p, v)); }}},
      {"evaluation.global_ny", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.global_ny = static_cast<int>(parse_long(p, v)); }}},
      {"evaluation.local_distance", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.local_distance = parse_double(p, v); }}},
      {"stats.alpha", {[](ExperimentConfig& c, const std::string& p, const std::string& v) { c.alpha = parse_double(p, v); }}},
      {"stats.p_adjust", {[](ExperimentConfig& c, const std::string& p, const std::string& v) {
         try { c.p_adjust = p_adjust_from_string(v); } catch (...) { bad_value(p, v); }
       }}},
  };
  return registry;
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t comment = line.find_first_of("#;");
    if (comment != std::string::npos) line = line.substr(0, comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        throw ConfigError("config error: unterminated section header at line " +
                          std::to_string(line_no));
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config error: expected key = value at line " +
                        std::to_string(line_no));
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string path = section.empty() ? key : section + "." + key;
    const auto it = key_registry().find(path);
    if (it == key_registry().end()) {
      throw ConfigError("config error: unknown key " + path + " at line " +
                        std::to_string(line_no));
    }
    it->second.set(cfg, path, value);
  }

  if (cfg.env_name.empty()) {
    throw ConfigError("config error: missing required key env.name");
  }
  if (cfg.env_name != "cartpole" && cfg.env_name != "synthetic") {
    throw ConfigError("config error: env.name must be cartpole or synthetic");
  }
  if (cfg.n_runs < 1) throw ConfigError("config error: experiment.n_runs must be >= 1");
  if (cfg.jobs < 1) throw ConfigError("config error: experiment.jobs must be >= 1");
  if (cfg.hidden < 1) throw ConfigError("config error: net.hidden must be >= 1");
  if (cfg.walk_step < 1) throw ConfigError("config error: training.walk_step must be >= 1");
  if (cfg.max_generations < 0) throw ConfigError("config error: evolution.max_generations must be >= 0");
  if (cfg.stagnation_window < 1) throw ConfigError("config error: evolution.stagnation_window must be >= 1");
  if (!(cfg.sigma0 > 0.0)) throw ConfigError("config error: evolution.sigma0 must be > 0");
  if (!(cfg.outlier_std_multiplier >= 0.0)) {
    throw ConfigError("config error: evolution.outlier_std_multiplier must be >= 0");
  }
  if (cfg.eval_threads < 1) throw ConfigError("config error: evolution.eval_threads must be >= 1");
  if (cfg.n_eval < 1) throw ConfigError("config error: evaluation.n_eval must be >= 1");
  if (cfg.global_nx < 1 || cfg.global_ny < 1) {
    throw ConfigError("config error: evaluation.global_nx/global_ny must be >= 1");
  }
  if (cfg.local_distance < 0) throw ConfigError("config error: evaluation.local_distance must be >= 0");
  if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0)) throw ConfigError("config error: stats.alpha must be in (0, 1)");
  {
    const int side = static_cast<int>(std::lround(std::sqrt(static_cast<double>(cfg.set_size))));
    if (cfg.set_size < 1 || side * side != cfg.set_size) {
      throw ConfigError("config error: training.set_size must be a perfect square");
    }
  }
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("config error: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string ExperimentConfig::canonical_text() const {
  char buf[64];
  const auto fmt = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  std::ostringstream out;
  out << "env.name = " << env_name << "\n";
  if (x_split) out << "env.x_split = " << fmt(*x_split) << "\n";
  out << "evaluation.global_nx = " << global_nx << "\n";
  out << "evaluation.global_ny = " << global_ny << "\n";
  out << "evaluation.local_distance = " << fmt(local_distance) << "\n";
  out << "evaluation.n_eval = " << n_eval << "\n";
  out << "evolution.max_generations = " << max_generations << "\n";
  out << "evolution.outlier_std_multiplier = " << fmt(outlier_std_multiplier) << "\n";
  if (satisfaction_target) {
    out << "evolution.satisfaction_target = " << fmt(*satisfaction_target) << "\n";
  }
  out << "evolution.sigma0 = " << fmt(sigma0) << "\n";
  out << "evolution.stagnation_window = " << stagnation_window << "\n";
  out << "experiment.base_seed = " << base_seed << "\n";
  out << "experiment.n_runs = " << n_runs << "\n";
  out << "net.hidden = " << hidden << "\n";
  out << "stats.alpha = " << fmt(alpha) << "\n";
  out << "stats.p_adjust = " << p_adjust_to_string(p_adjust) << "\n";
  out << "training.grid_origin_x = " << fmt(grid_origin_x) << "\n";
  out << "training.grid_origin_y = " << fmt(grid_origin_y) << "\n";
  out << "training.grid_step_x = " << fmt(grid_step_x) << "\n";
  out << "training.grid_step_y = " << fmt(grid_step_y) << "\n";
  out << "training.schedule = " << Schedule::kind_to_string(schedule) << "\n";
  out << "training.set_size = " << set_size << "\n";
  out << "training.walk_step = " << walk_step << "\n";
  return out.str();
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a64(canonical_text()); }

}  // namespace morphevo
