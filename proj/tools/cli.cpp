#include "cli.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <CLI11.hpp>
#include <openssl/evp.h>

#include "rair/error.hpp"
#include "rair/oracle.hpp"
#include "rair/table1.hpp"
#include "rair_presets.hpp"
#include "rair_version.hpp"

namespace rair::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::map<std::string, ConfigEntry> preset(const std::string& subcommand) {
  const auto& presets = bundled_presets();
  const auto it = presets.find(subcommand);
  if (it == presets.end()) throw Error("no preset for subcommand '" + subcommand + "'");
  return parse_config_text(it->second, "configs/" + subcommand + ".cfg");
}

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read " + file.string() + " for checksum");
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    throw Error("sha256 unavailable");
  }
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[i]);
  return os.str();
}

void write_manifest_atomic(const fs::path& dir, const json& manifest) {
  const fs::path tmp = dir / "manifest.json.tmp";
  {
    std::ofstream os(tmp, std::ios::trunc);
    os << manifest.dump(2) << '\n';
    if (!os) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, dir / "manifest.json");
}

namespace {

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct Options {
  std::string config;
  std::vector<std::string> sets;
  std::optional<std::uint64_t> seed;
  std::string out;
  int workers = 1;
  bool dry_run = false;
};

// Tracks emitted files for the manifest.
class Outputs {
 public:
  explicit Outputs(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }
  const fs::path& dir() const { return dir_; }

  fs::path path(const std::string& rel) {
    const fs::path p = dir_ / rel;
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    if (std::find(files_.begin(), files_.end(), rel) == files_.end()) files_.push_back(rel);
    return p;
  }
  void write_text(const std::string& rel, const std::string& text) {
    std::ofstream os(path(rel), std::ios::binary | std::ios::trunc);
    os << text;
    if (!os) throw Error("cannot write " + (dir_ / rel).string());
  }
  void write_bytes(const std::string& rel, const std::vector<std::uint8_t>& bytes) {
    std::ofstream os(path(rel), std::ios::binary | std::ios::trunc);
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw Error("cannot write " + (dir_ / rel).string());
  }
  void track(const std::string& rel) {
    if (std::find(files_.begin(), files_.end(), rel) == files_.end()) files_.push_back(rel);
  }
  json listing() const {
    std::vector<std::string> sorted = files_;
    std::sort(sorted.begin(), sorted.end());
    json out = json::array();
    for (const auto& rel : sorted) {
      out.push_back({{"path", rel}, {"bytes", fs::file_size(dir_ / rel)}, {"sha256", sha256_hex(dir_ / rel)}});
    }
    return out;
  }

 private:
  fs::path dir_;
  std::vector<std::string> files_;
};

// Line-buffered text file that is tracked by Outputs.
class TextSink {
 public:
  TextSink(Outputs& outputs, const std::string& rel) : os_(outputs.path(rel), std::ios::binary | std::ios::trunc) {
    if (!os_) throw Error("cannot open " + (outputs.dir() / rel).string());
  }
  void line(const std::string& s) { os_ << s << '\n'; }
  void raw(const std::string& s) { os_ << s; }
  void close() {
    os_.close();
    if (!os_) throw Error("write failed");
  }

 private:
  std::ofstream os_;
};

std::string frame_name(std::uint64_t n) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "frames/%05llu.ppm", static_cast<unsigned long long>(n));
  return buf;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

RunConfig resolve(const std::string& subcommand, const Options& o) {
  auto entries = preset(subcommand);
  if (!o.config.empty()) {
    for (auto& [k, v] : load_config_file(o.config)) entries[k] = v;
  }
  apply_overrides(entries, o.sets);
  if (o.seed) entries["run.seed"] = {std::to_string(*o.seed), "--seed"};
  return resolve_config(entries);
}

json manifest_base(const std::string& subcommand, const RunConfig& cfg, const Options& o, const std::string& started) {
  json flat = json::object();
  for (const auto& [k, v] : cfg.flatten()) flat[k] = v;
  return {{"subcommand", subcommand},
          {"version", kVersionString},
          {"seed", cfg.seed},
          {"config", flat},
          {"config_file", o.config},
          {"overrides", o.sets},
          {"workers", o.workers},
          {"started_at", started}};
}

void finish(Outputs& outputs, json manifest) {
  manifest["finished_at"] = utc_now();
  manifest["outputs"] = outputs.listing();
  write_manifest_atomic(outputs.dir(), manifest);
}

// ---- subcommands ----

int cmd_pattern(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const std::string started = utc_now();
  Outputs outputs(o.out);
  GridConfig genv = cfg.env;
  genv.seed = derive_seed(cfg.seed, "env");
  const GridWorld world(genv);
  const GroundTruthModel model(world);
  PlannerConfig pc = cfg.planner;
  pc.seed = derive_seed(cfg.seed, "planner");
  Objective objective;
  objective.phi = cfg.phi;

  const Configuration start = world.reset();
  TextSink rollout(outputs, "rollout.jsonl");
  TextSink metrics(outputs, "metrics.csv");
  metrics.raw("step,rair,moved,actuated\n");
  metrics.raw("0," + num(rair_reward(entity_views(start), cfg.phi)) + ",0," + std::to_string(start.cursor.entity) + "\n");
  outputs.write_bytes(frame_name(0), render_ppm(start, genv.width, genv.height, cfg.cell_px));

  MpcOptions options;
  options.workers = o.workers;
  options.on_step = [&](const StepRecord& rec, const Configuration& next) {
    rollout.line(rec.to_json().dump());
    metrics.raw(std::to_string(rec.step + 1) + "," + num(rec.rair) + "," + (rec.moved ? "1" : "0") + "," +
                std::to_string(rec.actuated) + "\n");
    const std::uint64_t n = rec.step + 1;
    if (cfg.frame_every > 0 && n % static_cast<std::uint64_t>(cfg.frame_every) == 0) {
      outputs.write_bytes(frame_name(n), render_ppm(next, genv.width, genv.height, cfg.cell_px));
    }
  };
  const RolloutRecord rec = mpc_rollout(model, world, start, pc, objective, cfg.episode_length, options);
  rollout.close();
  metrics.close();

  TextSink diag(outputs, "diagnostics.jsonl");
  for (const auto& d : rec.diagnostics) diag.line(d.to_json().dump());
  diag.close();

  const auto final_frame = static_cast<std::uint64_t>(cfg.episode_length);
  outputs.write_bytes(frame_name(final_frame), render_ppm(rec.final_state, genv.width, genv.height, cfg.cell_px));
  const std::string ascii = render_ascii(rec.final_state, genv.width, genv.height);
  outputs.write_text("final.txt", ascii);
  const json report = {{"initial_rair", rec.initial_rair},
                       {"final_rair", rec.final_rair()},
                       {"steps", rec.steps.size()},
                       {"initial_state", to_json(rec.initial)},
                       {"final_state", to_json(rec.final_state)}};
  outputs.write_text("report.json", report.dump(2) + "\n");
  finish(outputs, manifest_base("pattern", cfg, o, started));

  out << ascii << "initial RaIR " << num(rec.initial_rair) << ", final RaIR " << num(rec.final_rair()) << "\n";
  return kExitOk;
}

int cmd_freeplay(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const std::string started = utc_now();
  Outputs outputs(o.out);
  const FreePlayConfig fc = cfg.freeplay_config();
  const IntrinsicSpec spec = cfg.intrinsic_spec();
  TextSink rollout(outputs, "rollout.jsonl");
  TextSink metrics(outputs, "metrics.csv");
  TextSink metrics_jsonl(outputs, "metrics.jsonl");
  metrics.raw(metrics_csv_header());

  FreePlayCallbacks cb;
  cb.checkpoint_dir = outputs.dir() / "checkpoints";
  cb.on_rollout = [&](int it, int r, const RolloutRecord& rec) {
    for (const auto& s : rec.steps) {
      json j = s.to_json();
      j["iteration"] = it;
      j["rollout"] = r;
      rollout.line(j.dump());
    }
    if (r == fc.rollouts_per_iter - 1) {
      outputs.write_bytes(frame_name(static_cast<std::uint64_t>(it)),
                          render_ppm(rec.final_state, fc.env.width, fc.env.height, cfg.cell_px));
    }
  };
  cb.on_iteration = [&](const IterationMetrics& m) {
    metrics.raw(metrics_csv_row(m));
    metrics_jsonl.line(m.to_json().dump());
    out << "iteration " << m.iteration << ": best RaIR " << num(m.best_rair) << ", mean disagreement "
        << num(m.mean_disagreement) << "\n";
  };
  FreePlayResult result = run_free_play(fc, spec, o.workers, cb);
  rollout.close();
  metrics.close();
  metrics_jsonl.close();
  for (const auto& p : result.checkpoints) {
    const auto rel = fs::relative(p, outputs.dir()).generic_string();
    outputs.track(rel);
    auto sidecar = rel.substr(0, rel.size() - 4) + ".json";
    outputs.track(sidecar);
  }
  json series = json::array();
  for (const auto& m : result.metrics) series.push_back(m.to_json());
  const json report = {{"intrinsic", spec.to_json()},
                       {"ensemble", result.ensemble.sidecar()},
                       {"buffer_size", result.buffer.size()},
                       {"metrics", series}};
  outputs.write_text("report.json", report.dump(2) + "\n");
  finish(outputs, manifest_base("freeplay", cfg, o, started));
  return kExitOk;
}

int cmd_recreate(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const std::string started = utc_now();
  Outputs outputs(o.out);
  const RecreationConfig rc = cfg.recreation_config();
  TextSink rollout(outputs, "rollout.jsonl");
  const RecreationReport report = run_recreation(rc, o.workers, [&](int r, const RolloutRecord& rec) {
    for (const auto& s : rec.steps) {
      json j = s.to_json();
      j["rollout"] = r;
      rollout.line(j.dump());
    }
    outputs.write_bytes(frame_name(static_cast<std::uint64_t>(r)),
                        render_ppm(rec.final_state, rc.env.width, rc.env.height, cfg.cell_px));
  });
  rollout.close();
  TextSink metrics(outputs, "metrics.csv");
  metrics.raw("rollout,success,success_at_start,initial_rair,final_rair\n");
  for (const auto& r : report.rollouts) {
    metrics.raw(std::to_string(r.rollout) + "," + (r.success ? "1" : "0") + "," + (r.success_at_start ? "1" : "0") +
                "," + num(r.initial_rair) + "," + num(r.final_rair) + "\n");
  }
  metrics.close();
  outputs.write_text("report.json", report.to_json().dump(2) + "\n");
  finish(outputs, manifest_base("recreate", cfg, o, started));
  out << "recreation fraction " << num(report.fraction) << " (" << report.rollouts.size() << " rollouts)\n";
  return kExitOk;
}

int cmd_analyze(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const std::string started = utc_now();
  Outputs outputs(o.out);
  const TableReport report = analyze_symmetry_table(cfg.table_options());
  const json j = report.to_json();
  outputs.write_text("report.json", j.dump(2) + "\n");
  finish(outputs, manifest_base("analyze", cfg, o, started));

  out << std::left << std::setw(24) << "operation";
  for (const auto& c : report.columns) out << std::setw(14) << c;
  out << "\n";
  for (std::size_t r = 0; r < report.rows.size(); ++r) {
    out << std::setw(24) << report.rows[r];
    for (std::size_t c = 0; c < report.columns.size(); ++c) {
      const auto& cell = report.cells[r][c];
      std::string v = std::string(cell.invariant ? "inv" : "-") + "/" + (cell.favored ? "fav" : "-");
      if (cell.invariant != reference_invariance()[r][c] || cell.favored != reference_favoring()[r][c]) v += "*";
      out << std::setw(14) << v;
    }
    out << "\n";
  }
  out << "invariance mismatches " << report.invariance_mismatches() << ", favoring mismatches "
      << report.favoring_mismatches() << " (* marks a divergence from the reference table)\n";
  return kExitOk;
}

int cmd_oracle(const RunConfig& cfg, const Options& o, std::ostream& out) {
  const std::string started = utc_now();
  // refusal happens before any output is created
  const OracleResult result = exhaustive_optimum(cfg.oracle_width, cfg.oracle_height, cfg.oracle_entities, cfg.phi);
  Outputs outputs(o.out);
  json j = result.to_json();
  j["width"] = cfg.oracle_width;
  j["height"] = cfg.oracle_height;
  j["num_entities"] = cfg.oracle_entities;
  j["phi"] = to_string(cfg.phi.variant);
  j["bin_size"] = cfg.phi.bin_size;
  outputs.write_text("report.json", j.dump(2) + "\n");
  finish(outputs, manifest_base("oracle", cfg, o, started));
  out << "optimum " << num(result.optimum) << " over " << result.placements << " placements, " << result.argmax.size()
      << " argmax configurations\n";
  for (const auto& a : result.argmax) {
    for (std::size_t i = 0; i < a.size(); ++i) out << (i ? " " : "") << a[i].col << ":" << a[i].row;
    out << "\n";
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Regularity as intrinsic reward: grid-world experiments, analysis and oracles", "rair"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersionString));

  struct Sub {
    std::string name;
    std::string help;
    int (*fn)(const RunConfig&, const Options&, std::ostream&);
  };
  const std::vector<Sub> subs = {
      {"pattern", "GT-model regularity optimization (pattern emergence)", cmd_pattern},
      {"freeplay", "free play: intrinsic MPC with a learned ensemble", cmd_freeplay},
      {"recreate", "re-create a frozen template arrangement", cmd_recreate},
      {"analyze", "symmetry invariance/favoring matrix", cmd_analyze},
      {"oracle", "exhaustive optimum on a small grid", cmd_oracle},
  };
  std::vector<Options> options(subs.size());
  std::vector<std::uint64_t> seeds(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* sc = app.add_subcommand(subs[i].name, subs[i].help);
    Options& o = options[i];
    o.out = "rair-out/" + subs[i].name;
    sc->add_option("--config", o.config, "key=value config file layered over the subcommand preset");
    sc->add_option("--set", o.sets, "override one key (repeatable), e.g. --set planner.samples_P=32")
        ->allow_extra_args(false);
    sc->add_option("--seed", seeds[i], "root seed (overrides run.seed)");
    sc->add_option("--out", o.out, "output directory")->capture_default_str();
    sc->add_option("--workers", o.workers, "planner worker threads")->check(CLI::Range(1, 256))->capture_default_str();
    sc->add_flag("--dry-run", o.dry_run, "validate and print the resolved config, then exit");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  for (std::size_t i = 0; i < subs.size(); ++i) {
    CLI::App* sc = app.get_subcommand(subs[i].name);
    if (!sc->parsed()) continue;
    Options& o = options[i];
    if (sc->count("--seed") > 0) o.seed = seeds[i];
    try {
      const RunConfig cfg = resolve(subs[i].name, o);
      if (o.dry_run) {
        for (const auto& [k, v] : cfg.flatten()) out << k << " = " << v << "\n";
        return kExitOk;
      }
      return subs[i].fn(cfg, o, out);
    } catch (const ConfigError& e) {
      err << "config error: " << e.what() << "\n";
      return kExitConfig;
    } catch (const OracleRefusal& e) {
      err << "error: " << e.what() << "\n";
      return kExitOracleRefusal;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << "\n";
      return kExitRuntime;
    }
  }
  return kExitConfig;
}

}  // namespace rair::cli
