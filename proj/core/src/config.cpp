#include "rair/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "rair/error.hpp"

namespace rair {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

long long parse_int(const std::string& v) {
  long long out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("expected an integer, got '" + v + "'");
  return out;
}

int parse_i32(const std::string& v) {
  const long long x = parse_int(v);
  if (x < -2147483648LL || x > 2147483647LL) throw ConfigError("integer out of range: " + v);
  return static_cast<int>(x);
}

std::uint64_t parse_u64(const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError("expected an unsigned integer, got '" + v + "'");
  return out;
}

double parse_double(const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out)) throw ConfigError("expected a number, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("expected true or false, got '" + v + "'");
}

std::vector<int> parse_int_list(const std::string& v) {
  std::vector<int> out;
  for (const auto& item : split(v, ',')) out.push_back(parse_i32(item));
  return out;
}

std::string fmt_double(double d) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  // shortest form that round-trips
  for (int prec = 1; prec <= 17; ++prec) {
    char b2[32];
    std::snprintf(b2, sizeof b2, "%.*g", prec, d);
    if (std::strtod(b2, nullptr) == d) return b2;
  }
  return buf;
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

std::string fmt_int_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

struct Key {
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define RAIR_INT(member)                                                              \
  Key {                                                                               \
    [](RunConfig& c, const std::string& v) { c.member = parse_i32(v); },              \
        [](const RunConfig& c) { return std::to_string(c.member); }                   \
  }
#define RAIR_DOUBLE(member)                                                           \
  Key {                                                                               \
    [](RunConfig& c, const std::string& v) { c.member = parse_double(v); },           \
        [](const RunConfig& c) { return fmt_double(c.member); }                       \
  }
#define RAIR_BOOL(member)                                                             \
  Key {                                                                               \
    [](RunConfig& c, const std::string& v) { c.member = parse_bool(v); },             \
        [](const RunConfig& c) { return fmt_bool(c.member); }                         \
  }

const std::map<std::string, Key>& registry() {
  static const std::map<std::string, Key> keys = [] {
    std::map<std::string, Key> k;
    k["run.seed"] = {[](RunConfig& c, const std::string& v) { c.seed = parse_u64(v); },
                     [](const RunConfig& c) { return std::to_string(c.seed); }};
    k["run.episode_length"] = RAIR_INT(episode_length);
    k["run.frame_every"] = RAIR_INT(frame_every);
    k["render.cell_px"] = RAIR_INT(cell_px);

    k["env.width"] = RAIR_INT(env.width);
    k["env.height"] = RAIR_INT(env.height);
    k["env.num_entities"] = RAIR_INT(env.num_entities);
    k["env.persistency_T"] = RAIR_INT(env.persistency_T);
    k["env.colors"] = RAIR_INT(env.colors_c);
    k["env.diagonal_moves"] = RAIR_BOOL(env.diagonal_moves);
    k["env.frozen"] = {[](RunConfig& c, const std::string& v) {
                         c.env.frozen_mask.clear();
                         const auto idx = parse_int_list(v);
                         if (idx.empty()) return;
                         if (c.env.num_entities <= 0) throw ConfigError("env.num_entities must be set first");
                         c.env.frozen_mask.assign(c.env.num_entities, false);
                         for (int i : idx) {
                           if (i < 0 || i >= c.env.num_entities) {
                             throw ConfigError("frozen index " + std::to_string(i) + " out of range");
                           }
                           c.env.frozen_mask[i] = true;
                         }
                       },
                       [](const RunConfig& c) {
                         std::vector<int> idx;
                         for (std::size_t i = 0; i < c.env.frozen_mask.size(); ++i) {
                           if (c.env.frozen_mask[i]) idx.push_back(static_cast<int>(i));
                         }
                         return fmt_int_list(idx);
                       }};

    k["phi.variant"] = {[](RunConfig& c, const std::string& v) {
                          try {
                            c.phi.variant = phi_variant_from_string(v);
                          } catch (const Error& e) {
                            throw ConfigError(e.what());
                          }
                          c.phi.order_k = c.phi.variant == PhiVariant::Direct ? 1 : 2;
                        },
                        [](const RunConfig& c) { return to_string(c.phi.variant); }};
    k["phi.bin_size"] = RAIR_DOUBLE(phi.bin_size);
    k["phi.subspace"] = {[](RunConfig& c, const std::string& v) { c.phi.subspace = parse_int_list(v); },
                         [](const RunConfig& c) { return fmt_int_list(c.phi.subspace); }};
    k["phi.include_color"] = RAIR_BOOL(phi.include_color);
    k["phi.axis_tagged"] = RAIR_BOOL(phi.axis_tagged);

    k["planner.samples_P"] = RAIR_INT(planner.samples_P);
    k["planner.horizon_H"] = RAIR_INT(planner.horizon_H);
    k["planner.elites_K"] = RAIR_INT(planner.elites_K);
    k["planner.cem_iterations"] = RAIR_INT(planner.cem_iterations);
    k["planner.noise_beta"] = RAIR_DOUBLE(planner.noise_beta);
    k["planner.sigma_init"] = RAIR_DOUBLE(planner.sigma_init);
    k["planner.momentum_alpha"] = RAIR_DOUBLE(planner.momentum_alpha);
    k["planner.elite_fraction_xi"] = RAIR_DOUBLE(planner.elite_fraction_xi);
    k["planner.use_mean_actions"] = RAIR_BOOL(planner.use_mean_actions);
    k["planner.shift_elites"] = RAIR_BOOL(planner.shift_elites);
    k["planner.keep_elites"] = RAIR_BOOL(planner.keep_elites);
    k["planner.cost_mode"] = {[](RunConfig& c, const std::string& v) { c.planner.cost_mode = cost_mode_from_string(v); },
                              [](const RunConfig& c) { return to_string(c.planner.cost_mode); }};

    k["ensemble.members"] = RAIR_INT(ensemble.members);
    k["ensemble.hidden"] = {[](RunConfig& c, const std::string& v) { c.ensemble.hidden = parse_int_list(v); },
                            [](const RunConfig& c) { return fmt_int_list(c.ensemble.hidden); }};
    k["ensemble.learning_rate"] = RAIR_DOUBLE(ensemble.learning_rate);
    k["ensemble.momentum"] = RAIR_DOUBLE(ensemble.momentum);
    k["ensemble.batch_size"] = RAIR_INT(ensemble.batch_size);
    k["ensemble.epochs"] = RAIR_INT(ensemble.epochs);

    k["freeplay.iterations"] = RAIR_INT(fp_iterations);
    k["freeplay.rollouts_per_iter"] = RAIR_INT(fp_rollouts_per_iter);
    k["freeplay.episode_length"] = RAIR_INT(fp_episode_length);
    k["freeplay.checkpoint_every"] = RAIR_INT(fp_checkpoint_every);
    k["intrinsic.lambda"] = RAIR_DOUBLE(lambda);
    k["intrinsic.components"] = {
        [](RunConfig& c, const std::string& v) { c.components = intrinsic_components_from_string(v); },
        [](const RunConfig& c) { return to_string(c.components); }};

    k["recreate.template"] = {[](RunConfig& c, const std::string& v) { c.template_cells = parse_cells(v); },
                              [](const RunConfig& c) { return format_cells(c.template_cells); }};
    k["recreate.movable"] = RAIR_INT(movable);
    k["recreate.spawn"] = {[](RunConfig& c, const std::string& v) {
                             auto s = parse_int_list(v);
                             if (s.size() != 4) throw ConfigError("expected col0,row0,col1,row1");
                             c.spawn = s;
                           },
                           [](const RunConfig& c) { return fmt_int_list(c.spawn); }};
    k["recreate.movable_start"] = {[](RunConfig& c, const std::string& v) { c.movable_start = parse_cells(v); },
                                   [](const RunConfig& c) { return format_cells(c.movable_start); }};
    k["recreate.rollouts"] = RAIR_INT(rc_rollouts);
    k["recreate.episode_length"] = RAIR_INT(rc_episode_length);

    k["oracle.width"] = RAIR_INT(oracle_width);
    k["oracle.height"] = RAIR_INT(oracle_height);
    k["oracle.num_entities"] = RAIR_INT(oracle_entities);

    k["analyze.random_probes"] = RAIR_INT(analyze_probes);
    k["analyze.favor_trials"] = RAIR_INT(analyze_trials);
    return k;
  }();
  return keys;
}

#undef RAIR_INT
#undef RAIR_DOUBLE
#undef RAIR_BOOL

}  // namespace

std::string format_cells(const std::vector<Cell>& cells) {
  std::string s;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) s += ' ';
    s += std::to_string(cells[i].col) + ':' + std::to_string(cells[i].row);
  }
  return s;
}

std::vector<Cell> parse_cells(const std::string& text) {
  std::vector<Cell> out;
  for (const auto& item : split(text, ' ')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw ConfigError("expected col:row cells, got '" + item + "'");
    out.push_back({parse_i32(trim(item.substr(0, colon))), parse_i32(trim(item.substr(colon + 1)))});
  }
  return out;
}

std::map<std::string, std::string> RunConfig::flatten() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, key] : registry()) out[name] = key.get(*this);
  return out;
}

std::vector<std::string> known_config_keys() {
  std::vector<std::string> out;
  for (const auto& [name, key] : registry()) out.push_back(name);
  return out;
}

std::map<std::string, ConfigEntry> parse_config_text(const std::string& text, const std::string& source) {
  std::map<std::string, ConfigEntry> entries;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string origin = source + ":" + std::to_string(lineno);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(origin + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(origin + ": missing key before '='");
    if (entries.count(key)) throw ConfigError(origin + ": " + key + ": duplicate key (first set at " + entries[key].origin + ")");
    entries[key] = {trim(line.substr(eq + 1)), origin};
  }
  return entries;
}

std::map<std::string, ConfigEntry> load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open config file");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

void apply_overrides(std::map<std::string, ConfigEntry>& entries, const std::vector<std::string>& overrides) {
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos) throw ConfigError("--set " + o + ": expected key=value");
    const std::string key = trim(o.substr(0, eq));
    if (key.empty()) throw ConfigError("--set " + o + ": missing key");
    entries[key] = {trim(o.substr(eq + 1)), "--set"};
  }
}

RunConfig resolve_config(const std::map<std::string, ConfigEntry>& entries) {
  RunConfig c;
  const auto& keys = registry();
  // env.num_entities must be known before env.frozen is interpreted
  std::vector<std::string> order;
  for (const auto& [name, entry] : entries) {
    if (name != "env.frozen") order.push_back(name);
  }
  if (entries.count("env.frozen")) order.push_back("env.frozen");
  for (const auto& name : order) {
    const auto& entry = entries.at(name);
    const auto it = keys.find(name);
    if (it == keys.end()) throw ConfigError(entry.origin + ": " + name + ": unknown key");
    try {
      it->second.set(c, entry.value);
    } catch (const Error& e) {
      throw ConfigError(entry.origin + ": " + name + ": " + e.what());
    }
  }
  auto origin_of = [&](const std::string& prefix) {
    for (const auto& [name, entry] : entries) {
      if (name.rfind(prefix, 0) == 0) return entry.origin + ": ";
    }
    return std::string("defaults: ");
  };
  auto check = [&](const std::string& prefix, const std::function<void()>& f) {
    try {
      f();
    } catch (const Error& e) {
      throw ConfigError(origin_of(prefix) + e.what());
    }
  };
  check("env.", [&] { c.env.validate(); });
  check("phi.", [&] {
    c.phi.validate(2);
    if (c.phi.include_color && c.env.colors_c == 0) throw ConfigError("phi.include_color needs env.colors > 0");
  });
  check("planner.", [&] { c.planner.validate(); });
  check("ensemble.", [&] { c.ensemble.validate(); });
  check("run.", [&] {
    if (c.episode_length < 1) throw ConfigError("run.episode_length must be positive");
    if (c.frame_every < 0) throw ConfigError("run.frame_every must be >= 0");
  });
  check("render.", [&] {
    if (c.cell_px < 3 || c.cell_px > 64) throw ConfigError("render.cell_px must be in [3, 64]");
  });
  check("analyze.", [&] {
    if (c.analyze_probes < 0 || c.analyze_trials < 1) throw ConfigError("analyze settings must be positive");
  });
  return c;
}

FreePlayConfig RunConfig::freeplay_config() const {
  FreePlayConfig f;
  f.iterations = fp_iterations;
  f.rollouts_per_iter = fp_rollouts_per_iter;
  f.episode_length = fp_episode_length;
  f.checkpoint_every = fp_checkpoint_every;
  f.planner = planner;
  f.ensemble = ensemble;
  f.env = env;
  f.seed = seed;
  return f;
}

IntrinsicSpec RunConfig::intrinsic_spec() const {
  IntrinsicSpec s;
  s.phi = phi;
  s.components = components;
  s.lambda = components == IntrinsicComponents::RaIROnly ? 0.0 : lambda;
  return s;
}

RecreationConfig RunConfig::recreation_config() const {
  RecreationConfig r;
  r.env = env;
  r.env.frozen_mask.clear();
  r.template_cells = template_cells;
  r.movable = movable;
  r.spawn_col0 = spawn[0];
  r.spawn_row0 = spawn[1];
  r.spawn_col1 = spawn[2];
  r.spawn_row1 = spawn[3];
  r.movable_start = movable_start;
  r.rollouts = rc_rollouts;
  r.episode_length = rc_episode_length;
  r.bin_size = phi.bin_size;
  r.planner = planner;
  r.seed = seed;
  return r;
}

TableOptions RunConfig::table_options() const {
  TableOptions t;
  t.seed = seed;
  t.random_probes = analyze_probes;
  t.favor_trials = analyze_trials;
  return t;
}

}  // namespace rair
