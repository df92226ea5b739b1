#pragma once

#include <chrono>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "ggs/harness.hpp"
#include "ggs/landscape.hpp"
#include "ggs/run_config.hpp"
#include "ggs/version.hpp"

namespace ggs {

namespace fs = std::filesystem;

/// Command-line overrides applied on top of a loaded config.
struct RunOptions {
  fs::path out_root;  // empty: GGS_OUT_DIR, then ./runs
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  bool quiet = false;
  std::ostream* log = &std::cerr;
};

struct RunOutcome {
  int exit_code = 0;
  fs::path run_dir;
  std::string error;
};

inline fs::path resolve_out_root(const RunOptions& options) {
  if (!options.out_root.empty()) return options.out_root;
  if (const char* env = std::getenv("GGS_OUT_DIR"); env != nullptr && *env != '\0') return env;
  return "runs";
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y%m%dT%H%M%SZ", &tm);
  return buf;
}

/// Creates <root>/<name>-<timestamp>, adding -2, -3, ... on collision.
inline fs::path create_run_dir(const fs::path& root, const std::string& name) {
  fs::create_directories(root);
  const std::string base = name + "-" + utc_timestamp();
  for (int k = 1;; ++k) {
    const fs::path dir = root / (k == 1 ? base : base + "-" + std::to_string(k));
    if (fs::create_directory(dir)) return dir;
  }
}

inline void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

inline void write_json(const fs::path& path, const nlohmann::ordered_json& doc) { write_text(path, doc.dump(2) + "\n"); }

/// Resolved job count: config or override, 0 meaning min(examples, cores).
inline std::size_t resolve_jobs(std::size_t configured, std::size_t examples) {
  if (configured > 0) return configured;
  return std::max<std::size_t>(1, std::min(examples, default_jobs()));
}

namespace detail {

class RunLog {
 public:
  RunLog(std::ostream* out, bool quiet) : out_(out), quiet_(quiet) {}
  void operator()(const std::string& line) const {
    if (!quiet_ && out_ != nullptr) *out_ << line << std::endl;
  }

 private:
  std::ostream* out_;
  bool quiet_;
};

inline TrainEvalSplit load_dataset(const RunConfig& cfg) {
  if (cfg.dataset.kind == "grayscale") return split_every(load_grayscale(cfg.dataset.path), cfg.dataset.eval_every);
  return make_blobs(cfg.dataset.blobs);
}

inline const char* kZooIds[] = {"surrogate_mlp", "mlp_reseeded", "mlp_wide", "linear_softmax"};

inline ModelZoo load_or_build_zoo(const RunConfig& cfg, const TrainEvalSplit& data, const RunLog& log) {
  if (cfg.zoo.models_dir.empty()) {
    log("training zoo on " + data.train.id + " (" + std::to_string(data.train.size()) + " points)");
    return build_zoo(data, cfg.zoo.spec);
  }
  log("loading zoo from " + cfg.zoo.models_dir);
  ModelZoo zoo;
  const fs::path dir = cfg.zoo.models_dir;
  zoo.surrogate = make_member(kZooIds[0], load_model(dir / (std::string(kZooIds[0]) + ".ggsm")), data.eval);
  for (std::size_t k = 1; k < 4; ++k)
    zoo.targets.push_back(make_member(kZooIds[k], load_model(dir / (std::string(kZooIds[k]) + ".ggsm")), data.eval));
  zoo.validate(cfg.zoo.spec.accuracy_floor);
  return zoo;
}

inline nlohmann::ordered_json report_header(const RunConfig& cfg) {
  nlohmann::ordered_json h;
  h["tool"] = "ggs";
  h["version"] = kVersion;
  h["experiment"] = to_string(cfg.experiment);
  h["seeds"] = {{"attack", cfg.seed},
                {"dataset", cfg.dataset.kind == "blobs" ? cfg.dataset.blobs.seed : 0},
                {"zoo", cfg.zoo.spec.seed}};
  h["eligibility"] = {{"filter", to_string(cfg.eval.eligibility)},
                      {"description", eligibility_description(cfg.eval.eligibility)}};
  h["config"] = to_json(cfg);
  return h;
}

inline nlohmann::ordered_json asr_row_json(const AsrTable& table, const AsrRow& r) {
  nlohmann::ordered_json j;
  j["method"] = r.name;
  j["sampler"] = to_string(r.config.sampler);
  j["attacked"] = r.attacked;
  nlohmann::ordered_json cells = nlohmann::ordered_json::object();
  for (std::size_t m = 0; m < r.cells.size(); ++m)
    cells[table.model_ids[m]] = {{"asr", r.cells[m].rate}, {"successes", r.cells[m].successes}, {"eligible", r.cells[m].eligible}};
  j["models"] = cells;
  j["white_box_asr"] = r.cells.front().rate;
  j["mean_transfer_asr"] = r.mean_transfer;
  j["mean_linf"] = r.mean_linf;
  j["max_linf"] = r.max_linf;
  j["mean_l2"] = r.mean_l2;
  j["mean_final_loss"] = r.mean_final_loss;
  return j;
}

inline nlohmann::ordered_json zoo_json(const ModelZoo& zoo) {
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const ZooMember* m : zoo.members()) {
    arr.push_back({{"id", m->id},
                   {"widths", m->model.widths},
                   {"activation", to_string(m->model.activation)},
                   {"parameters", m->model.parameters.size()},
                   {"train_accuracy", m->model.final_accuracy},
                   {"clean_eval_accuracy", m->clean_accuracy}});
  }
  return arr;
}

inline void write_zoo_csv(std::ostream& out, const ModelZoo& zoo) {
  CsvWriter csv(out);
  csv.row({"model_id", "widths", "activation", "parameters", "train_accuracy", "clean_eval_accuracy"});
  for (const ZooMember* m : zoo.members()) {
    std::string widths;
    for (std::size_t w : m->model.widths) widths += (widths.empty() ? "" : "x") + std::to_string(w);
    csv.field(m->id).field(widths).field(to_string(m->model.activation));
    csv.field(static_cast<std::uint64_t>(m->model.parameters.size())).field(m->model.final_accuracy).field(m->clean_accuracy);
    csv.end_row();
  }
}

inline void write_example_csv(std::ostream& out, const AsrTable& table) {
  CsvWriter csv(out);
  std::vector<std::string> header{"method", "example_index", "label", "attack_label", "final_loss", "linf", "l2"};
  for (const auto& id : table.model_ids) {
    header.push_back(id + "_clean_correct");
    header.push_back(id + "_success");
  }
  csv.row(header);
  for (const AsrRow& r : table.rows) {
    for (const ExampleOutcome& o : r.outcomes) {
      csv.field(r.name).field(static_cast<std::uint64_t>(o.index)).field(static_cast<std::uint64_t>(o.label));
      csv.field(static_cast<std::uint64_t>(o.attack_label)).field(o.final_loss).field(o.linf).field(o.l2);
      for (std::size_t m = 0; m < o.success.size(); ++m) {
        csv.field(o.clean_correct[m] ? 1 : 0).field(o.success[m] ? 1 : 0);
      }
      csv.end_row();
    }
  }
}

inline void write_trace_csv(std::ostream& out, const AttackResult& r, const InputPoint& x) {
  CsvWriter csv(out);
  csv.row({"outer", "loss", "momentum_l1", "degenerate_inner_sum", "zero_sign_steps", "zero_sign_guidance", "linf",
           "cosine_early", "cosine_late"});
  for (std::size_t t = 0; t < r.trace.outer.size(); ++t) {
    const OuterRecord& rec = r.trace.outer[t];
    const Vec& prof = rec.cosine.values;
    csv.field(static_cast<std::uint64_t>(t + 1)).field(rec.loss).field(rec.momentum_l1);
    csv.field(rec.degenerate_inner_sum ? 1 : 0).field(static_cast<std::uint64_t>(rec.zero_sign_steps));
    csv.field(static_cast<std::uint64_t>(rec.zero_sign_guidance));
    csv.field(norm_linf(subtract(r.trace.iterates[t], x.view())));
    csv.field(profile_mean(prof, 0, prof.size() / 2)).field(profile_mean(prof, prof.size() / 2, prof.size()));
    csv.end_row();
  }
}

inline void write_csv_file(const fs::path& path, const std::function<void(std::ostream&)>& fill) {
  std::ostringstream buf;
  fill(buf);
  write_text(path, buf.str());
}

inline std::string percent(double rate) {
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(2);
  s << rate * 100.0 << "%";
  return s.str();
}

inline void summarize_table(std::ostream& s, const AsrTable& table) {
  s << "models:";
  for (std::size_t m = 0; m < table.model_ids.size(); ++m)
    s << " " << table.model_ids[m] << " (clean " << percent(table.clean_accuracy[m]) << ")";
  s << "\n";
  for (const AsrRow& r : table.rows) {
    s << "  " << r.name << ": white-box " << percent(r.cells.front().rate) << ", mean transfer " << percent(r.mean_transfer)
      << ", attacked " << r.attacked << ", max linf " << format_double(r.max_linf) << "\n";
  }
}

// ---------------------------------------------------------------------------
// Experiments
// ---------------------------------------------------------------------------

inline void run_attack_experiment(const RunConfig& cfg, const ModelZoo& zoo, const Dataset& eval, EvalOptions options,
                                  const fs::path& dir, std::ostream& summary, const RunLog& log) {
  AttackConfig ac = cfg.attack;
  ac.rng_seed = cfg.seed;
  const NamedConfig named{to_string(ac.sampler), ac};
  log("attacking with " + named.name);
  const AsrTable table = evaluate_transfer(zoo, eval, {named}, options);
  write_csv_file(dir / "attack_results.csv", [&](std::ostream& o) { write_example_csv(o, table); });
  write_csv_file(dir / "asr.csv", [&](std::ostream& o) { write_asr_csv(o, table); });
  auto doc = report_header(cfg);
  doc["zoo"] = zoo_json(zoo);
  doc["rows"] = nlohmann::ordered_json::array({asr_row_json(table, table.rows.front())});
  write_json(dir / "asr.json", doc);

  if (cfg.save_traces) {
    fs::create_directories(dir / "traces");
    const auto& outcomes = table.rows.front().outcomes;
    const std::size_t n = std::min<std::size_t>(8, outcomes.size());
    for (std::size_t j = 0; j < n; ++j) {
      const ExampleOutcome& o = outcomes[j];
      AttackConfig c = ac;
      c.rng_seed = example_seed(ac.rng_seed, o.index);
      if (c.targeted) c.target_label = o.attack_label;
      const InputPoint x = eval.point(o.index);
      const AttackResult r = run_attack(*zoo.surrogate.oracle, x, o.label, c);
      write_csv_file(dir / "traces" / ("example_" + std::to_string(o.index) + ".csv"),
                     [&](std::ostream& out) { write_trace_csv(out, r, x); });
    }
  }
  summarize_table(summary, table);
}

inline void write_cosine_csv(std::ostream& out, const AblationReport& report) {
  CsvWriter csv(out);
  csv.row({"sampler", "inner_step", "cosine"});
  for (const AblationEntry& e : report.entries) {
    if (!uses_inner_loop(e.sampler)) continue;
    const Vec& prof = e.row.mean_cosine_profile;
    for (std::size_t i = 0; i < prof.size(); ++i)
      csv.field(to_string(e.sampler)).field(static_cast<std::uint64_t>(i + 1)).field(prof[i]).end_row();
  }
}

inline void run_ablation_experiment(const RunConfig& cfg, const ModelZoo& zoo, const Dataset& eval,
                                    const EvalOptions& options, const fs::path& dir, std::ostream& summary,
                                    const RunLog& log) {
  AttackConfig base = cfg.attack;
  base.rng_seed = cfg.seed;
  log("running sampler ablation");
  ProbeSpec probe = default_ablation_probe(base.epsilon > 0.0 ? base.epsilon : kDefaultEpsilon);
  probe.seed = cfg.probe.spec.seed;
  const AblationReport report = ablation_report(zoo, eval, base, options, probe, cfg.probe.examples);
  write_csv_file(dir / "ablation_report.csv", [&](std::ostream& o) { write_ablation_csv(o, report); });
  write_csv_file(dir / "cosine_profiles.csv", [&](std::ostream& o) { write_cosine_csv(o, report); });
  auto doc = report_header(cfg);
  doc["zoo"] = zoo_json(zoo);
  doc["flatness"] = {{"definition", "1 - (center_loss - mean loss at radius) / max(center_loss, 1e-12), clamped to [0, 1]"},
                     {"radius", *report.probe.flatness_radius},
                     {"magnitudes", report.probe.magnitudes},
                     {"num_directions", report.probe.num_directions}};
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const AblationEntry& e : report.entries) {
    auto j = asr_row_json(report.table, e.row);
    j["mean_flatness"] = e.mean_flatness;
    j["mean_center_loss"] = e.mean_center_loss;
    j["probed"] = e.probed;
    j["cosine_early"] = e.cosine_early;
    j["cosine_late"] = e.cosine_late;
    j["cosine_profile"] = e.row.mean_cosine_profile;
    rows.push_back(j);
  }
  doc["rows"] = rows;
  write_json(dir / "ablation.json", doc);
  summarize_table(summary, report.table);
  for (const AblationEntry& e : report.entries)
    summary << "  " << to_string(e.sampler) << ": flatness " << format_double(e.mean_flatness) << ", center loss "
            << format_double(e.mean_center_loss) << "\n";
}

inline void run_sweep_experiment(const RunConfig& cfg, const ModelZoo& zoo, const Dataset& eval,
                                 const EvalOptions& options, const fs::path& dir, std::ostream& summary,
                                 const RunLog& log) {
  AttackConfig base = cfg.attack;
  base.rng_seed = cfg.seed;
  log(std::string("sweeping ") + to_string(cfg.sweep.parameter) + " over " + std::to_string(cfg.sweep.values.size()) +
      " values");
  const SweepTable table = sweep(zoo, eval, base, cfg.sweep.parameter, cfg.sweep.values, options);
  write_csv_file(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(o, table); });
  auto doc = report_header(cfg);
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  nlohmann::ordered_json timing = nlohmann::ordered_json::array();
  AsrTable shim;
  shim.model_ids = table.model_ids;
  for (const SweepRow& r : table.rows) {
    auto j = asr_row_json(shim, r.row);
    j["value"] = r.value;
    rows.push_back(j);
    timing.push_back({{"value", r.value}, {"runtime_seconds", r.runtime_seconds}});
    summary << "  " << to_string(table.parameter) << "=" << format_double(r.value) << ": mean transfer "
            << percent(r.row.mean_transfer) << ", white-box " << percent(r.row.cells.front().rate) << "\n";
  }
  doc["rows"] = rows;
  write_json(dir / "sweep.json", doc);
  nlohmann::ordered_json t;
  t["parameter"] = to_string(table.parameter);
  t["jobs"] = options.jobs;
  t["rows"] = timing;
  write_json(dir / "timing.json", t);
}

inline void run_probe_experiment(const RunConfig& cfg, const ModelZoo& zoo, const Dataset& eval,
                                 EvalOptions options, const fs::path& dir, std::ostream& summary, const RunLog& log) {
  options.keep_adversarial = true;
  std::vector<NamedConfig> configs;
  for (Sampler s : cfg.probe.samplers) {
    AttackConfig c = cfg.attack;
    c.sampler = s;
    c.rng_seed = cfg.seed;
    configs.push_back({to_string(s), c});
  }
  log("attacking and probing " + std::to_string(configs.size()) + " samplers");
  const AsrTable table = evaluate_transfer(zoo, eval, configs, options);

  std::vector<std::pair<std::string, FlatnessReport>> reports;
  std::ostringstream summary_csv;
  CsvWriter csv(summary_csv);
  csv.row({"sampler", "probed", "mean_flatness", "mean_center_loss", "mean_sharpness"});
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const AsrRow& row : table.rows) {
    const std::size_t n = std::min(cfg.probe.examples, row.outcomes.size());
    std::vector<FlatnessReport> probes(n);
    parallel_for(n, options.jobs, [&](std::size_t j) {
      const ExampleOutcome& o = row.outcomes[j];
      probes[j] = cfg.probe.two_dimensional ? probe_2d(*zoo.surrogate.oracle, o.adversarial, o.attack_label, cfg.probe.spec)
                                            : probe_1d(*zoo.surrogate.oracle, o.adversarial, o.attack_label, cfg.probe.spec);
    });
    double flat = 0.0, center = 0.0, sharp = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      flat += probes[j].flatness;
      center += probes[j].center_loss;
      sharp += probes[j].sharpness;
      reports.emplace_back(row.name + "/" + std::to_string(row.outcomes[j].index), std::move(probes[j]));
    }
    const double k = static_cast<double>(std::max<std::size_t>(1, n));
    csv.field(row.name).field(static_cast<std::uint64_t>(n)).field(flat / k).field(center / k).field(sharp / k).end_row();
    rows.push_back({{"sampler", row.name}, {"probed", n}, {"mean_flatness", flat / k}, {"mean_center_loss", center / k},
                    {"mean_sharpness", sharp / k}});
    summary << "  " << row.name << ": flatness " << format_double(flat / k) << ", center loss "
            << format_double(center / k) << " over " << n << " examples\n";
  }
  write_csv_file(dir / "probe.csv", [&](std::ostream& o) { write_probe_csv(o, reports); });
  write_text(dir / "probe_summary.csv", summary_csv.str());
  auto doc = report_header(cfg);
  doc["flatness"] = {{"definition", "1 - (center_loss - mean loss at radius) / max(center_loss, 1e-12), clamped to [0, 1]"},
                     {"radius", *cfg.probe.spec.flatness_radius}};
  doc["rows"] = rows;
  write_json(dir / "probe_summary.json", doc);
}

inline void run_train_zoo_experiment(const RunConfig& cfg, const ModelZoo& zoo, const fs::path& dir,
                                     std::ostream& summary) {
  fs::create_directories(dir / "models");
  for (const ZooMember* m : zoo.members()) save_model(m->model, dir / "models" / (m->id + ".ggsm"));
  write_csv_file(dir / "zoo.csv", [&](std::ostream& o) { write_zoo_csv(o, zoo); });
  auto doc = report_header(cfg);
  doc["zoo"] = zoo_json(zoo);
  write_json(dir / "zoo.json", doc);
  for (const ZooMember* m : zoo.members())
    summary << "  " << m->id << ": clean eval accuracy " << percent(m->clean_accuracy) << "\n";
}

}  // namespace detail

/// Applies command-line overrides to a parsed config.
inline RunConfig apply_overrides(RunConfig cfg, const RunOptions& options) {
  if (options.seed) cfg.seed = *options.seed;
  if (options.jobs) cfg.jobs = *options.jobs;
  if (options.quiet) cfg.verbosity = Verbosity::Quiet;
  return cfg;
}

/// Executes a resolved config into a fresh run directory. Runtime failures
/// leave partial outputs plus a FAILED marker and yield exit code 1.
inline RunOutcome execute_run(const RunConfig& cfg, const RunOptions& options) {
  RunOutcome outcome;
  const detail::RunLog log(options.log, cfg.verbosity == Verbosity::Quiet);
  outcome.run_dir = create_run_dir(resolve_out_root(options), cfg.run_name());
  const fs::path& dir = outcome.run_dir;
  std::ostringstream summary;
  try {
    write_text(dir / "config.yaml", to_yaml(cfg));
    summary << "ggs " << kVersion << "\n";
    summary << "experiment: " << to_string(cfg.experiment) << " (" << cfg.run_name() << ")\n";
    summary << "seed: " << cfg.seed << "\n";
    summary << "eligibility: " << eligibility_description(cfg.eval.eligibility) << "\n";
    const AttackConfig& a = cfg.attack;
    summary << "attack: sampler " << to_string(a.sampler) << ", epsilon " << format_double(a.epsilon) << ", T "
            << a.outer_iters << ", alpha " << format_double(a.alpha()) << ", N " << a.inner_iters << ", zeta "
            << format_double(a.sample_radius) << ", gamma " << format_double(a.momentum_decay) << "\n";

    const TrainEvalSplit data = detail::load_dataset(cfg);
    data.train.validate();
    data.eval.validate();
    const ModelZoo zoo = detail::load_or_build_zoo(cfg, data, log);

    EvalOptions options_eval = cfg.eval;
    const std::size_t examples = options_eval.max_examples == 0 ? data.eval.size()
                                                                : std::min(options_eval.max_examples, data.eval.size());
    options_eval.jobs = resolve_jobs(cfg.jobs, examples);
    log("using " + std::to_string(options_eval.jobs) + " worker thread(s)");

    switch (cfg.experiment) {
      case ExperimentKind::Attack:
        detail::run_attack_experiment(cfg, zoo, data.eval, options_eval, dir, summary, log);
        break;
      case ExperimentKind::Ablation:
        detail::run_ablation_experiment(cfg, zoo, data.eval, options_eval, dir, summary, log);
        break;
      case ExperimentKind::Sweep:
        detail::run_sweep_experiment(cfg, zoo, data.eval, options_eval, dir, summary, log);
        break;
      case ExperimentKind::Probe:
        detail::run_probe_experiment(cfg, zoo, data.eval, options_eval, dir, summary, log);
        break;
      case ExperimentKind::TrainZoo:
        detail::run_train_zoo_experiment(cfg, zoo, dir, summary);
        break;
    }
    write_text(dir / "summary.txt", summary.str());
  } catch (const std::exception& e) {
    outcome.exit_code = 1;
    outcome.error = e.what();
    summary << "FAILED: " << e.what() << "\n";
    try {
      write_text(dir / "summary.txt", summary.str());
      write_text(dir / "FAILED", std::string(e.what()) + "\n");
    } catch (...) {
    }
  }
  return outcome;
}

/// `ggs run <config>`: exit 0 on success, 1 on runtime failure, 2 when the
/// config does not parse or validate (no run directory is created then).
inline RunOutcome cmd_run(const fs::path& config_path, const RunOptions& options) {
  RunConfig cfg;
  try {
    cfg = apply_overrides(load_run_config(config_path), options);
  } catch (const ConfigError& e) {
    return {2, {}, e.what()};
  }
  RunOutcome out = execute_run(cfg, options);
  const detail::RunLog log(options.log, cfg.verbosity == Verbosity::Quiet);
  if (out.exit_code == 0) log("wrote " + out.run_dir.string());
  return out;
}

/// Default attack settings as a runnable config.
inline std::string cmd_defaults() {
  RunConfig cfg;
  cfg.experiment = ExperimentKind::Attack;
  std::ostringstream out;
  out << "# epsilon = 16/255, step_size = epsilon/outer_iters, sample_radius = 2 * epsilon\n";
  out << to_yaml(cfg);
  return out.str();
}

}  // namespace ggs
