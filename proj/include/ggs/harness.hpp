#pragma once

#include <chrono>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "ggs/attack.hpp"
#include "ggs/csv.hpp"
#include "ggs/dataset.hpp"
#include "ggs/mlp.hpp"
#include "ggs/parallel.hpp"
#include "ggs/probe.hpp"
#include "ggs/train.hpp"

namespace ggs {

// ---------------------------------------------------------------------------
// Model zoo
// ---------------------------------------------------------------------------

struct ZooSpec {
  std::size_t hidden = 32;
  std::size_t wide_hidden = 64;
  Activation activation = Activation::Tanh;
  std::size_t epochs = 600;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double accuracy_floor = 0.9;
  std::uint64_t seed = 11;
};

struct ZooMember {
  std::string id;
  ToyModel model;
  double clean_accuracy = 0.0;  // on the eval split
  std::shared_ptr<const MlpOracle> oracle;
};

/// Surrogate plus target models trained on the same task.
struct ModelZoo {
  ZooMember surrogate;
  std::vector<ZooMember> targets;

  [[nodiscard]] std::vector<const ZooMember*> members() const {
    std::vector<const ZooMember*> out{&surrogate};
    for (const auto& t : targets) out.push_back(&t);
    return out;
  }

  void validate(double accuracy_floor) const {
    for (const ZooMember* m : members()) {
      require(m->model.input_dim() == surrogate.model.input_dim(), "zoo: member '" + m->id + "' has a different input shape");
      require(m->model.num_classes() == surrogate.model.num_classes(),
              "zoo: member '" + m->id + "' has a different class count");
      require(m->clean_accuracy > accuracy_floor, "zoo: member '" + m->id + "' clean eval accuracy " +
                                                      format_double(m->clean_accuracy) + " does not exceed floor " +
                                                      format_double(accuracy_floor));
    }
  }
};

inline ZooMember make_member(std::string id, ToyModel model, const Dataset& eval) {
  ZooMember m;
  m.id = std::move(id);
  m.oracle = std::make_shared<const MlpOracle>(model);
  m.clean_accuracy = accuracy(*m.oracle, eval);
  m.model = std::move(model);
  return m;
}

/// Surrogate: two-hidden-layer MLP. Targets: the same architecture with a
/// different seed, a wider two-hidden-layer MLP, and a linear softmax model.
inline ModelZoo build_zoo(const TrainEvalSplit& data, const ZooSpec& spec) {
  auto train = [&](std::vector<std::size_t> hidden, std::uint64_t seed) {
    TrainSpec ts;
    ts.hidden = std::move(hidden);
    ts.activation = spec.activation;
    ts.seed = seed;
    ts.epochs = spec.epochs;
    ts.learning_rate = spec.learning_rate;
    ts.momentum = spec.momentum;
    ts.accuracy_floor = spec.accuracy_floor;
    return train_toy_model(data.train, ts);
  };
  const std::size_t h = spec.hidden;
  const std::size_t w = spec.wide_hidden;
  ModelZoo zoo;
  zoo.surrogate = make_member("surrogate_mlp", train({h, h}, spec.seed), data.eval);
  zoo.targets.push_back(make_member("mlp_reseeded", train({h, h}, spec.seed + 1), data.eval));
  zoo.targets.push_back(make_member("mlp_wide", train({w, w}, spec.seed + 2), data.eval));
  zoo.targets.push_back(make_member("linear_softmax", train({}, spec.seed + 3), data.eval));
  zoo.validate(spec.accuracy_floor);
  return zoo;
}

// ---------------------------------------------------------------------------
// Attack success and transfer evaluation
// ---------------------------------------------------------------------------

/// Untargeted: prediction differs from the true label. Targeted: prediction
/// equals the target label.
inline bool attack_success(const Classifier& target, std::span<const double> x_adv, std::size_t true_label,
                           bool targeted, std::optional<std::size_t> target_label = std::nullopt) {
  const std::size_t predicted = target.predict(x_adv);
  if (targeted) {
    require(target_label.has_value(), "attack_success: targeted attack without target label");
    return predicted == *target_label;
  }
  return predicted != true_label;
}

enum class Eligibility {
  CleanCorrect,  // attack examples the surrogate gets right; score each target on examples it gets right
  All            // no filtering
};

inline const char* to_string(Eligibility e) { return e == Eligibility::CleanCorrect ? "clean_correct" : "all"; }

inline std::string eligibility_description(Eligibility e) {
  if (e == Eligibility::All) return "all examples attacked and scored, regardless of clean correctness";
  return "attacked: examples the surrogate classifies correctly when clean; "
         "per-model ASR: over attacked examples that model classifies correctly when clean";
}

struct EvalOptions {
  std::size_t jobs = 1;
  Eligibility eligibility = Eligibility::CleanCorrect;
  std::size_t max_examples = 0;  // 0 = every example in the split
  std::size_t target_shift = 1;  // targeted: target = (label + shift) mod K
  bool keep_adversarial = false;
};

struct NamedConfig {
  std::string name;
  AttackConfig config;
};

struct ExampleOutcome {
  std::size_t index = 0;
  std::size_t label = 0;
  std::size_t attack_label = 0;
  std::vector<bool> clean_correct;  // per zoo member
  std::vector<bool> success;        // per zoo member
  double final_loss = 0.0;
  double linf = 0.0;
  double l2 = 0.0;
  Vec adversarial;
  Vec cosine_profile;
};

struct AsrCell {
  double rate = 0.0;
  std::size_t successes = 0;
  std::size_t eligible = 0;
};

struct AsrRow {
  std::string name;
  AttackConfig config;
  std::vector<AsrCell> cells;  // surrogate first, then targets
  double mean_transfer = 0.0;
  std::size_t attacked = 0;
  double mean_linf = 0.0;
  double max_linf = 0.0;
  double mean_l2 = 0.0;
  double mean_final_loss = 0.0;
  Vec mean_cosine_profile;
  std::vector<ExampleOutcome> outcomes;
};

struct AsrTable {
  std::vector<std::string> model_ids;
  Vec clean_accuracy;
  Eligibility eligibility = Eligibility::CleanCorrect;
  std::vector<AsrRow> rows;
};

/// Per-example attack seed: every sampler sees the same seed for the same
/// example, so cross-row differences come from the configuration alone.
inline std::uint64_t example_seed(std::uint64_t base_seed, std::size_t example_index) {
  return CounterRng(base_seed).split(example_index + 1).key();
}

inline std::vector<std::size_t> eligible_examples(const ModelZoo& zoo, const Dataset& data, const EvalOptions& options) {
  std::vector<std::size_t> out;
  const std::size_t limit = options.max_examples == 0 ? data.size() : std::min(options.max_examples, data.size());
  for (std::size_t i = 0; i < limit; ++i) {
    if (options.eligibility == Eligibility::All || zoo.surrogate.oracle->predict(data.inputs[i]) == data.labels[i])
      out.push_back(i);
  }
  return out;
}

inline AsrRow evaluate_config(const ModelZoo& zoo, const Dataset& data, const NamedConfig& named,
                              const std::vector<std::size_t>& examples, const EvalOptions& options) {
  const auto members = zoo.members();
  const std::size_t classes = zoo.surrogate.model.num_classes();
  std::vector<ExampleOutcome> outcomes(examples.size());

  parallel_for(examples.size(), options.jobs, [&](std::size_t j) {
    const std::size_t i = examples[j];
    ExampleOutcome& o = outcomes[j];
    o.index = i;
    o.label = data.labels[i];
    AttackConfig cfg = named.config;
    cfg.rng_seed = example_seed(named.config.rng_seed, i);
    if (cfg.targeted) cfg.target_label = (o.label + options.target_shift) % classes;
    o.attack_label = cfg.targeted ? *cfg.target_label : o.label;

    const AttackResult r = run_attack(*zoo.surrogate.oracle, data.point(i), o.label, cfg);
    for (const ZooMember* m : members) {
      o.clean_correct.push_back(m->oracle->predict(data.inputs[i]) == o.label);
      o.success.push_back(attack_success(*m->oracle, r.adversarial.view(), o.label, cfg.targeted, cfg.target_label));
    }
    o.final_loss = r.final_loss;
    o.linf = r.perturbation_linf;
    o.l2 = r.perturbation_l2;
    o.cosine_profile = mean_cosine_profile(r.trace);
    if (options.keep_adversarial) o.adversarial = r.adversarial.values();
  });

  AsrRow row;
  row.name = named.name;
  row.config = named.config;
  row.attacked = outcomes.size();
  row.cells.resize(members.size());
  std::size_t profiles = 0;
  for (const ExampleOutcome& o : outcomes) {
    for (std::size_t m = 0; m < members.size(); ++m) {
      if (options.eligibility == Eligibility::CleanCorrect && !o.clean_correct[m]) continue;
      row.cells[m].eligible += 1;
      row.cells[m].successes += o.success[m] ? 1 : 0;
    }
    row.mean_linf += o.linf;
    row.mean_l2 += o.l2;
    row.max_linf = std::max(row.max_linf, o.linf);
    row.mean_final_loss += o.final_loss;
    if (!o.cosine_profile.empty()) {
      if (row.mean_cosine_profile.empty()) row.mean_cosine_profile.assign(o.cosine_profile.size(), 0.0);
      axpy(1.0, o.cosine_profile, row.mean_cosine_profile);
      ++profiles;
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, outcomes.size()));
  row.mean_linf /= n;
  row.mean_l2 /= n;
  row.mean_final_loss /= n;
  for (double& e : row.mean_cosine_profile) e /= static_cast<double>(profiles);
  for (AsrCell& c : row.cells)
    c.rate = c.eligible == 0 ? 0.0 : static_cast<double>(c.successes) / static_cast<double>(c.eligible);
  for (std::size_t m = 1; m < row.cells.size(); ++m) row.mean_transfer += row.cells[m].rate;
  if (row.cells.size() > 1) row.mean_transfer /= static_cast<double>(row.cells.size() - 1);
  row.outcomes = std::move(outcomes);
  return row;
}

/// Attacks every eligible example on the surrogate and scores success on the
/// surrogate (white-box column) and each target (transfer columns).
inline AsrTable evaluate_transfer(const ModelZoo& zoo, const Dataset& data, const std::vector<NamedConfig>& configs,
                                  const EvalOptions& options = {}) {
  data.validate();
  require(data.dim() == zoo.surrogate.model.input_dim(), "evaluate_transfer: dataset and zoo input shapes differ");
  const auto examples = eligible_examples(zoo, data, options);
  if (examples.empty())
    throw std::runtime_error(std::string("evaluate_transfer: no eligible examples under filter '") +
                             to_string(options.eligibility) + "'");
  AsrTable table;
  table.eligibility = options.eligibility;
  for (const ZooMember* m : zoo.members()) {
    table.model_ids.push_back(m->id);
    table.clean_accuracy.push_back(m->clean_accuracy);
  }
  for (const NamedConfig& named : configs) table.rows.push_back(evaluate_config(zoo, data, named, examples, options));
  return table;
}

inline void write_asr_csv(std::ostream& out, const AsrTable& table) {
  CsvWriter csv(out);
  std::vector<std::string> header{"method",        "sampler",        "epsilon",        "step_size",
                                  "outer_iters",   "inner_iters",    "sample_radius",  "momentum_decay",
                                  "targeted",      "attacked"};
  for (const auto& id : table.model_ids) {
    header.push_back(id + "_asr");
    header.push_back(id + "_successes");
    header.push_back(id + "_eligible");
  }
  for (const char* h : {"white_box_asr", "mean_transfer_asr", "mean_linf", "max_linf", "mean_l2", "mean_final_loss"})
    header.emplace_back(h);
  csv.row(header);
  for (const AsrRow& r : table.rows) {
    csv.field(r.name).field(to_string(r.config.sampler)).field(r.config.epsilon).field(r.config.alpha());
    csv.field(r.config.outer_iters).field(r.config.inner_iters).field(r.config.sample_radius).field(r.config.momentum_decay);
    csv.field(r.config.targeted ? "true" : "false").field(static_cast<std::uint64_t>(r.attacked));
    for (const AsrCell& c : r.cells)
      csv.field(c.rate).field(static_cast<std::uint64_t>(c.successes)).field(static_cast<std::uint64_t>(c.eligible));
    csv.field(r.cells.front().rate).field(r.mean_transfer).field(r.mean_linf).field(r.max_linf).field(r.mean_l2);
    csv.field(r.mean_final_loss);
    csv.end_row();
  }
}

// ---------------------------------------------------------------------------
// Ablation and sweeps
// ---------------------------------------------------------------------------

struct AblationEntry {
  Sampler sampler = Sampler::Ggs;
  AsrRow row;
  double mean_flatness = 0.0;
  double mean_center_loss = 0.0;
  std::size_t probed = 0;
  double cosine_early = 0.0;  // mean over the first half of inner steps
  double cosine_late = 0.0;   // mean over the second half
};

struct AblationReport {
  AsrTable table;
  std::vector<AblationEntry> entries;
  ProbeSpec probe;
};

inline ProbeSpec default_ablation_probe(double epsilon) {
  ProbeSpec spec;
  spec.num_directions = 8;
  spec.magnitudes.clear();
  for (int k = -4; k <= 4; ++k) spec.magnitudes.push_back(k * epsilon);
  spec.flatness_radius = 2.0 * epsilon;
  return spec;
}

/// Runs every sampler with all other settings held fixed and reports ASR,
/// surrogate-loss flatness at the adversarial examples, and inner cosine
/// profiles per sampler.
inline AblationReport ablation_report(const ModelZoo& zoo, const Dataset& data, const AttackConfig& base,
                                      EvalOptions options = {}, std::optional<ProbeSpec> probe = std::nullopt,
                                      std::size_t probe_examples = 32) {
  options.keep_adversarial = true;
  std::vector<NamedConfig> configs;
  for (Sampler s : kAllSamplers) {
    AttackConfig c = base;
    c.sampler = s;
    configs.push_back({to_string(s), c});
  }
  AblationReport report;
  report.table = evaluate_transfer(zoo, data, configs, options);
  report.probe = probe.value_or(default_ablation_probe(base.epsilon > 0.0 ? base.epsilon : kDefaultEpsilon));
  if (!report.probe.flatness_radius) report.probe.flatness_radius = report.probe.magnitudes.back();
  for (std::size_t k = 0; k < kAllSamplers.size(); ++k) {
    AblationEntry e;
    e.sampler = kAllSamplers[k];
    e.row = report.table.rows[k];
    const auto& outcomes = e.row.outcomes;
    const std::size_t n = std::min(probe_examples, outcomes.size());
    std::vector<FlatnessReport> probes(n);
    parallel_for(n, options.jobs, [&](std::size_t j) {
      probes[j] = probe_1d(*zoo.surrogate.oracle, outcomes[j].adversarial, outcomes[j].attack_label, report.probe);
    });
    for (const FlatnessReport& p : probes) {
      e.mean_flatness += p.flatness;
      e.mean_center_loss += p.center_loss;
    }
    e.probed = n;
    if (n > 0) {
      e.mean_flatness /= static_cast<double>(n);
      e.mean_center_loss /= static_cast<double>(n);
    }
    const auto& prof = e.row.mean_cosine_profile;
    e.cosine_early = profile_mean(prof, 0, prof.size() / 2);
    e.cosine_late = profile_mean(prof, prof.size() / 2, prof.size());
    report.entries.push_back(std::move(e));
  }
  return report;
}

inline void write_ablation_csv(std::ostream& out, const AblationReport& report) {
  CsvWriter csv(out);
  std::vector<std::string> header{"sampler", "attacked", "white_box_asr", "mean_transfer_asr"};
  for (std::size_t m = 1; m < report.table.model_ids.size(); ++m) header.push_back(report.table.model_ids[m] + "_asr");
  for (const char* h : {"mean_flatness", "mean_center_loss", "probed", "cosine_early", "cosine_late", "mean_linf",
                        "mean_l2"})
    header.emplace_back(h);
  csv.row(header);
  for (const AblationEntry& e : report.entries) {
    csv.field(to_string(e.sampler)).field(static_cast<std::uint64_t>(e.row.attacked));
    csv.field(e.row.cells.front().rate).field(e.row.mean_transfer);
    for (std::size_t m = 1; m < e.row.cells.size(); ++m) csv.field(e.row.cells[m].rate);
    csv.field(e.mean_flatness).field(e.mean_center_loss).field(static_cast<std::uint64_t>(e.probed));
    csv.field(e.cosine_early).field(e.cosine_late).field(e.row.mean_linf).field(e.row.mean_l2);
    csv.end_row();
  }
}

enum class SweepParameter { Zeta, InnerIters };

inline const char* to_string(SweepParameter p) { return p == SweepParameter::Zeta ? "zeta" : "n"; }

struct SweepRow {
  double value = 0.0;
  AsrRow row;
  double runtime_seconds = 0.0;
};

struct SweepTable {
  SweepParameter parameter = SweepParameter::Zeta;
  std::vector<std::string> model_ids;
  std::vector<SweepRow> rows;
};

/// One transfer evaluation per parameter value, everything else fixed.
inline SweepTable sweep(const ModelZoo& zoo, const Dataset& data, const AttackConfig& base, SweepParameter parameter,
                        const Vec& values, const EvalOptions& options = {}) {
  require(!values.empty(), "sweep: values must be nonempty");
  SweepTable table;
  table.parameter = parameter;
  for (const ZooMember* m : zoo.members()) table.model_ids.push_back(m->id);
  for (double value : values) {
    AttackConfig c = base;
    if (parameter == SweepParameter::Zeta) {
      require(value >= 0.0, "sweep: zeta values must be >= 0");
      c.sample_radius = value;
    } else {
      require(value >= 1.0 && value == std::floor(value), "sweep: N values must be positive integers");
      c.inner_iters = static_cast<int>(value);
    }
    const auto start = std::chrono::steady_clock::now();
    AsrTable t = evaluate_transfer(zoo, data, {{std::string(to_string(parameter)) + "=" + format_double(value), c}}, options);
    const auto stop = std::chrono::steady_clock::now();
    table.rows.push_back({value, std::move(t.rows.front()), std::chrono::duration<double>(stop - start).count()});
  }
  return table;
}

/// Runtime is deliberately excluded so the CSV is reproducible byte for byte.
inline void write_sweep_csv(std::ostream& out, const SweepTable& table) {
  CsvWriter csv(out);
  std::vector<std::string> header{"parameter", "value", "attacked", "white_box_asr", "mean_transfer_asr"};
  for (std::size_t m = 1; m < table.model_ids.size(); ++m) header.push_back(table.model_ids[m] + "_asr");
  header.emplace_back("mean_linf");
  csv.row(header);
  for (const SweepRow& r : table.rows) {
    csv.field(to_string(table.parameter)).field(r.value).field(static_cast<std::uint64_t>(r.row.attacked));
    csv.field(r.row.cells.front().rate).field(r.row.mean_transfer);
    for (std::size_t m = 1; m < r.row.cells.size(); ++m) csv.field(r.row.cells[m].rate);
    csv.field(r.row.mean_linf);
    csv.end_row();
  }
}

}  // namespace ggs
