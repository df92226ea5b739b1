#pragma once

#include <yaml-cpp/yaml.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ggs/config.hpp"
#include "ggs/csv.hpp"
#include "ggs/dataset.hpp"
#include "ggs/harness.hpp"
#include "ggs/probe.hpp"

namespace ggs {

inline constexpr int kConfigSchemaVersion = 1;

enum class ExperimentKind { Attack, Ablation, Sweep, Probe, TrainZoo };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::Attack:
      return "attack";
    case ExperimentKind::Ablation:
      return "ablation";
    case ExperimentKind::Sweep:
      return "sweep";
    case ExperimentKind::Probe:
      return "probe";
    case ExperimentKind::TrainZoo:
      return "train_zoo";
  }
  return "?";
}

enum class Verbosity { Quiet, Normal, Verbose };

inline const char* to_string(Verbosity v) {
  return v == Verbosity::Quiet ? "quiet" : v == Verbosity::Verbose ? "verbose" : "normal";
}

struct DatasetConfig {
  std::string kind = "blobs";  // blobs | grayscale
  BlobSpec blobs{};
  std::string path;            // grayscale
  std::size_t eval_every = 5;  // grayscale
};

struct ZooConfig {
  ZooSpec spec{};
  std::string models_dir;  // load a trained zoo instead of training
};

struct SweepConfig {
  SweepParameter parameter = SweepParameter::Zeta;
  Vec values;
};

struct ProbeConfig {
  std::vector<Sampler> samplers{Sampler::NoneMi, Sampler::Rs, Sampler::Ggs};
  std::size_t examples = 32;
  ProbeSpec spec{};
  bool two_dimensional = false;
};

/// Everything one `ggs run` needs. Serializes to the same YAML it is read
/// from, so a stored copy re-executes to identical outputs.
struct RunConfig {
  int schema_version = kConfigSchemaVersion;
  ExperimentKind experiment = ExperimentKind::Ablation;
  std::string name;
  std::uint64_t seed = 0;
  std::size_t jobs = 0;  // 0 = min(examples, logical cores)
  Verbosity verbosity = Verbosity::Normal;
  DatasetConfig dataset{};
  ZooConfig zoo{};
  AttackConfig attack{};
  EvalOptions eval{};
  bool save_traces = false;
  SweepConfig sweep{};
  ProbeConfig probe{};

  [[nodiscard]] std::string run_name() const { return name.empty() ? std::string(to_string(experiment)) : name; }
};

/// Parse or validation failure, anchored to a line of the config file.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& file, int line, const std::string& message)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + message), line_(line) {}
  [[nodiscard]] int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

class YamlReader {
 public:
  explicit YamlReader(std::string file) : file_(std::move(file)) {}

  [[noreturn]] void fail(const YAML::Node& node, const std::string& message) const {
    throw ConfigError(file_, node.Mark().line + 1, message);
  }

  void require_map(const YAML::Node& node, const std::string& path) const {
    if (!node.IsMap()) fail(node, "'" + path + "' must be a mapping");
  }

  /// Rejects keys outside `allowed`.
  void check_keys(const YAML::Node& node, const std::string& path, const std::set<std::string>& allowed) const {
    for (const auto& kv : node) {
      const auto key = kv.first.as<std::string>();
      if (!allowed.contains(key)) fail(kv.first, "unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
  }

  template <typename T>
  void read(const YAML::Node& parent, const char* key, const std::string& path, T& out) const {
    const YAML::Node node = parent[key];
    if (!node) return;
    try {
      out = node.as<T>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + path + "." + key + "' has the wrong type");
    }
  }

  void read_size(const YAML::Node& parent, const char* key, const std::string& path, std::size_t& out) const {
    const YAML::Node node = parent[key];
    if (!node) return;
    long long v = 0;
    try {
      v = node.as<long long>();
    } catch (const YAML::Exception&) {
      fail(node, "'" + path + "." + key + "' must be an integer");
    }
    if (v < 0) fail(node, "'" + path + "." + key + "' must be >= 0");
    out = static_cast<std::size_t>(v);
  }

  const std::string& file() const { return file_; }

 private:
  std::string file_;
};

inline Activation parse_activation(const YamlReader& r, const YAML::Node& node) {
  const auto s = node.as<std::string>();
  if (s == "tanh") return Activation::Tanh;
  if (s == "softplus") return Activation::Softplus;
  if (s == "identity") return Activation::Identity;
  r.fail(node, "unknown activation '" + s + "' (expected tanh, softplus or identity)");
}

inline Sampler parse_sampler_node(const YamlReader& r, const YAML::Node& node) {
  const auto s = node.as<std::string>();
  if (auto parsed = parse_sampler(s)) return *parsed;
  r.fail(node, "unknown sampler '" + s + "' (expected mi, ni, rs, mgs or ggs)");
}

}  // namespace detail

inline RunConfig parse_run_config(const std::string& text, const std::string& file = "<config>") {
  detail::YamlReader r(file);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(file, e.mark.line + 1, e.msg);
  }
  if (!root || !root.IsMap()) throw ConfigError(file, 1, "config must be a YAML mapping");
  r.check_keys(root, "", {"schema_version", "experiment", "name", "seed", "jobs", "verbosity", "dataset", "zoo",
                          "attack", "eval", "sweep", "probe"});

  RunConfig cfg;
  if (!root["schema_version"]) throw ConfigError(file, 1, "missing required key 'schema_version'");
  r.read(root, "schema_version", "", cfg.schema_version);
  if (cfg.schema_version != kConfigSchemaVersion)
    r.fail(root["schema_version"], "unsupported schema_version " + std::to_string(cfg.schema_version) + " (expected " +
                                       std::to_string(kConfigSchemaVersion) + ")");

  if (!root["experiment"]) throw ConfigError(file, 1, "missing required key 'experiment'");
  {
    const auto node = root["experiment"];
    const auto s = node.as<std::string>();
    if (s == "attack") cfg.experiment = ExperimentKind::Attack;
    else if (s == "ablation") cfg.experiment = ExperimentKind::Ablation;
    else if (s == "sweep") cfg.experiment = ExperimentKind::Sweep;
    else if (s == "probe") cfg.experiment = ExperimentKind::Probe;
    else if (s == "train_zoo") cfg.experiment = ExperimentKind::TrainZoo;
    else r.fail(node, "unknown experiment '" + s + "' (expected attack, ablation, sweep, probe or train_zoo)");
  }
  r.read(root, "name", "", cfg.name);
  for (char c : cfg.name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.'))
      r.fail(root["name"], "'name' may contain only letters, digits, '-', '_' and '.'");
  r.read(root, "seed", "", cfg.seed);
  r.read_size(root, "jobs", "", cfg.jobs);
  if (const auto node = root["verbosity"]) {
    const auto s = node.as<std::string>();
    if (s == "quiet") cfg.verbosity = Verbosity::Quiet;
    else if (s == "normal") cfg.verbosity = Verbosity::Normal;
    else if (s == "verbose") cfg.verbosity = Verbosity::Verbose;
    else r.fail(node, "unknown verbosity '" + s + "'");
  }

  if (const auto ds = root["dataset"]) {
    r.require_map(ds, "dataset");
    r.check_keys(ds, "dataset", {"kind", "dim", "classes", "points_per_class", "eval_points_per_class",
                                 "modes_per_class", "spread", "center_lo", "center_hi", "seed", "path", "eval_every"});
    auto& b = cfg.dataset.blobs;
    r.read(ds, "kind", "dataset", cfg.dataset.kind);
    if (cfg.dataset.kind != "blobs" && cfg.dataset.kind != "grayscale")
      r.fail(ds["kind"], "unknown dataset kind '" + cfg.dataset.kind + "' (expected blobs or grayscale)");
    r.read_size(ds, "dim", "dataset", b.dim);
    r.read_size(ds, "classes", "dataset", b.classes);
    r.read_size(ds, "points_per_class", "dataset", b.points_per_class);
    r.read_size(ds, "eval_points_per_class", "dataset", b.eval_points_per_class);
    r.read_size(ds, "modes_per_class", "dataset", b.modes_per_class);
    r.read(ds, "spread", "dataset", b.spread);
    r.read(ds, "center_lo", "dataset", b.center_lo);
    r.read(ds, "center_hi", "dataset", b.center_hi);
    r.read(ds, "seed", "dataset", b.seed);
    r.read(ds, "path", "dataset", cfg.dataset.path);
    r.read_size(ds, "eval_every", "dataset", cfg.dataset.eval_every);
    if (b.dim == 0) r.fail(ds["dim"], "'dataset.dim' must be positive");
    if (b.classes < 2) r.fail(ds["classes"], "'dataset.classes' must be at least 2");
    if (b.spread <= 0.0) r.fail(ds["spread"], "'dataset.spread' must be positive");
    if (cfg.dataset.kind == "grayscale" && cfg.dataset.path.empty())
      r.fail(ds, "'dataset.path' is required for grayscale datasets");
  }

  if (const auto zoo = root["zoo"]) {
    r.require_map(zoo, "zoo");
    r.check_keys(zoo, "zoo", {"hidden", "wide_hidden", "activation", "epochs", "learning_rate", "momentum",
                              "accuracy_floor", "seed", "models_dir"});
    auto& z = cfg.zoo.spec;
    r.read_size(zoo, "hidden", "zoo", z.hidden);
    r.read_size(zoo, "wide_hidden", "zoo", z.wide_hidden);
    if (zoo["activation"]) z.activation = detail::parse_activation(r, zoo["activation"]);
    r.read_size(zoo, "epochs", "zoo", z.epochs);
    r.read(zoo, "learning_rate", "zoo", z.learning_rate);
    r.read(zoo, "momentum", "zoo", z.momentum);
    r.read(zoo, "accuracy_floor", "zoo", z.accuracy_floor);
    r.read(zoo, "seed", "zoo", z.seed);
    r.read(zoo, "models_dir", "zoo", cfg.zoo.models_dir);
    if (z.hidden == 0 || z.wide_hidden == 0) r.fail(zoo, "zoo hidden widths must be positive");
    if (z.epochs == 0) r.fail(zoo["epochs"], "'zoo.epochs' must be positive");
    if (z.learning_rate <= 0.0) r.fail(zoo["learning_rate"], "'zoo.learning_rate' must be positive");
  }

  if (const auto at = root["attack"]) {
    r.require_map(at, "attack");
    r.check_keys(at, "attack", {"epsilon", "epsilon_255", "outer_iters", "step_size", "inner_iters", "sample_radius",
                                "sample_radius_factor", "momentum_decay", "sampler", "targeted", "target_label",
                                "redraw_init_per_outer", "transform", "transform_min_scale", "save_traces"});
    auto& a = cfg.attack;
    if (at["epsilon"] && at["epsilon_255"]) r.fail(at["epsilon_255"], "give either 'attack.epsilon' or 'attack.epsilon_255'");
    r.read(at, "epsilon", "attack", a.epsilon);
    if (at["epsilon_255"]) {
      double e255 = 0.0;
      r.read(at, "epsilon_255", "attack", e255);
      a.epsilon = e255 / 255.0;
    }
    r.read(at, "outer_iters", "attack", a.outer_iters);
    if (at["step_size"]) {
      double s = 0.0;
      r.read(at, "step_size", "attack", s);
      a.step_size = s;
    }
    r.read(at, "inner_iters", "attack", a.inner_iters);
    if (at["sample_radius"] && at["sample_radius_factor"])
      r.fail(at["sample_radius_factor"], "give either 'attack.sample_radius' or 'attack.sample_radius_factor'");
    if (at["sample_radius_factor"]) {
      double f = 0.0;
      r.read(at, "sample_radius_factor", "attack", f);
      a.sample_radius = f * a.epsilon;
    } else if (at["sample_radius"]) {
      r.read(at, "sample_radius", "attack", a.sample_radius);
    } else {
      a.sample_radius = 2.0 * a.epsilon;
    }
    r.read(at, "momentum_decay", "attack", a.momentum_decay);
    if (at["sampler"]) a.sampler = detail::parse_sampler_node(r, at["sampler"]);
    r.read(at, "targeted", "attack", a.targeted);
    if (at["target_label"]) {
      std::size_t t = 0;
      r.read_size(at, "target_label", "attack", t);
      a.target_label = t;
    }
    r.read(at, "redraw_init_per_outer", "attack", a.redraw_init_per_outer);
    if (const auto tn = at["transform"]) {
      const auto s = tn.as<std::string>();
      if (s == "none") a.transform.kind = TransformKind::Identity;
      else if (s == "resize_pad") a.transform.kind = TransformKind::ResizePad;
      else r.fail(tn, "unknown transform '" + s + "' (expected none or resize_pad)");
    }
    r.read(at, "transform_min_scale", "attack", a.transform.min_scale);
    r.read(at, "save_traces", "attack", cfg.save_traces);
    // Targeted harness runs pick a target per example; validate with a placeholder label.
    AttackConfig check = a;
    if (check.targeted && !check.target_label) check.target_label = 0;
    try {
      check.validate();
    } catch (const ContractViolation& e) {
      const std::string what = e.what();
      YAML::Node anchor = at;
      if (what.find("step_size") != std::string::npos && at["step_size"]) anchor = at["step_size"];
      else if (what.find("epsilon") != std::string::npos && at["epsilon"]) anchor = at["epsilon"];
      else if (what.find("outer_iters") != std::string::npos && at["outer_iters"]) anchor = at["outer_iters"];
      else if (what.find("inner_iters") != std::string::npos && at["inner_iters"]) anchor = at["inner_iters"];
      else if (what.find("sample_radius") != std::string::npos && at["sample_radius"]) anchor = at["sample_radius"];
      else if (what.find("momentum_decay") != std::string::npos && at["momentum_decay"]) anchor = at["momentum_decay"];
      r.fail(anchor, "attack: " + what);
    }
  }

  if (const auto ev = root["eval"]) {
    r.require_map(ev, "eval");
    r.check_keys(ev, "eval", {"eligibility", "max_examples", "target_shift"});
    if (const auto el = ev["eligibility"]) {
      const auto s = el.as<std::string>();
      if (s == "clean_correct") cfg.eval.eligibility = Eligibility::CleanCorrect;
      else if (s == "all") cfg.eval.eligibility = Eligibility::All;
      else r.fail(el, "unknown eligibility '" + s + "' (expected clean_correct or all)");
    }
    r.read_size(ev, "max_examples", "eval", cfg.eval.max_examples);
    r.read_size(ev, "target_shift", "eval", cfg.eval.target_shift);
  }

  if (const auto sw = root["sweep"]) {
    r.require_map(sw, "sweep");
    r.check_keys(sw, "sweep", {"parameter", "values", "factors"});
    if (const auto p = sw["parameter"]) {
      const auto s = p.as<std::string>();
      if (s == "zeta") cfg.sweep.parameter = SweepParameter::Zeta;
      else if (s == "n") cfg.sweep.parameter = SweepParameter::InnerIters;
      else r.fail(p, "unknown sweep parameter '" + s + "' (expected zeta or n)");
    }
    if (sw["values"] && sw["factors"]) r.fail(sw["factors"], "give either 'sweep.values' or 'sweep.factors'");
    if (sw["values"]) r.read(sw, "values", "sweep", cfg.sweep.values);
    if (sw["factors"]) {
      if (cfg.sweep.parameter != SweepParameter::Zeta) r.fail(sw["factors"], "'sweep.factors' applies to zeta sweeps only");
      Vec factors;
      r.read(sw, "factors", "sweep", factors);
      for (double f : factors) cfg.sweep.values.push_back(f * cfg.attack.epsilon);
    }
    for (double v : cfg.sweep.values) {
      if (v < 0.0) r.fail(sw, "sweep values must be >= 0");
      if (cfg.sweep.parameter == SweepParameter::InnerIters && (v < 1.0 || v != std::floor(v)))
        r.fail(sw, "sweep values for n must be positive integers");
    }
  }
  if (cfg.experiment == ExperimentKind::Sweep && cfg.sweep.values.empty())
    throw ConfigError(file, root["sweep"] ? root["sweep"].Mark().line + 1 : 1, "sweep experiment needs nonempty 'sweep.values' or 'sweep.factors'");

  if (const auto pr = root["probe"]) {
    r.require_map(pr, "probe");
    r.check_keys(pr, "probe", {"samplers", "examples", "num_directions", "magnitudes", "magnitude_factors",
                               "distribution", "seed", "radius", "two_dimensional"});
    if (const auto ss = pr["samplers"]) {
      if (!ss.IsSequence()) r.fail(ss, "'probe.samplers' must be a list");
      cfg.probe.samplers.clear();
      for (const auto& s : ss) cfg.probe.samplers.push_back(detail::parse_sampler_node(r, s));
    }
    r.read_size(pr, "examples", "probe", cfg.probe.examples);
    r.read_size(pr, "num_directions", "probe", cfg.probe.spec.num_directions);
    if (pr["magnitudes"] && pr["magnitude_factors"])
      r.fail(pr["magnitude_factors"], "give either 'probe.magnitudes' or 'probe.magnitude_factors'");
    if (pr["magnitudes"]) r.read(pr, "magnitudes", "probe", cfg.probe.spec.magnitudes);
    if (pr["magnitude_factors"]) {
      Vec factors;
      r.read(pr, "magnitude_factors", "probe", factors);
      cfg.probe.spec.magnitudes.clear();
      for (double f : factors) cfg.probe.spec.magnitudes.push_back(f * cfg.attack.epsilon);
    }
    if (const auto d = pr["distribution"]) {
      const auto s = d.as<std::string>();
      if (s == "unit_gaussian") cfg.probe.spec.distribution = DirectionDistribution::UnitGaussian;
      else if (s == "signed_rademacher") cfg.probe.spec.distribution = DirectionDistribution::SignedRademacher;
      else r.fail(d, "unknown probe distribution '" + s + "'");
    }
    r.read(pr, "seed", "probe", cfg.probe.spec.seed);
    if (pr["radius"]) {
      double radius = 0.0;
      r.read(pr, "radius", "probe", radius);
      cfg.probe.spec.flatness_radius = radius;
    }
    r.read(pr, "two_dimensional", "probe", cfg.probe.two_dimensional);
    try {
      cfg.probe.spec.validate();
    } catch (const ContractViolation& e) {
      r.fail(pr, e.what());
    }
    if (cfg.probe.spec.flatness_radius) {
      const double radius = *cfg.probe.spec.flatness_radius;
      const bool found = std::any_of(cfg.probe.spec.magnitudes.begin(), cfg.probe.spec.magnitudes.end(),
                                     [&](double m) { return std::abs(std::abs(m) - radius) <= 1e-12 * std::max(1.0, radius); });
      if (!found) r.fail(pr["radius"], "'probe.radius' must be one of the probed magnitudes");
    }
  }
  if (!cfg.probe.spec.flatness_radius) cfg.probe.spec.flatness_radius = std::abs(cfg.probe.spec.magnitudes.back());
  return cfg;
}

inline RunConfig load_run_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), 0, "cannot open config file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path.string());
}

/// Fully resolved config as an ordered JSON tree (also the source for the
/// stored YAML copy).
inline nlohmann::ordered_json to_json(const RunConfig& c) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["schema_version"] = c.schema_version;
  j["experiment"] = to_string(c.experiment);
  j["name"] = c.run_name();
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["verbosity"] = to_string(c.verbosity);

  ordered_json ds;
  ds["kind"] = c.dataset.kind;
  if (c.dataset.kind == "blobs") {
    const auto& b = c.dataset.blobs;
    ds["dim"] = b.dim;
    ds["classes"] = b.classes;
    ds["points_per_class"] = b.points_per_class;
    ds["eval_points_per_class"] = b.eval_points_per_class;
    ds["modes_per_class"] = b.modes_per_class;
    ds["spread"] = b.spread;
    ds["center_lo"] = b.center_lo;
    ds["center_hi"] = b.center_hi;
    ds["seed"] = b.seed;
  } else {
    ds["path"] = c.dataset.path;
    ds["eval_every"] = c.dataset.eval_every;
  }
  j["dataset"] = ds;

  ordered_json zoo;
  const auto& z = c.zoo.spec;
  zoo["hidden"] = z.hidden;
  zoo["wide_hidden"] = z.wide_hidden;
  zoo["activation"] = to_string(z.activation);
  zoo["epochs"] = z.epochs;
  zoo["learning_rate"] = z.learning_rate;
  zoo["momentum"] = z.momentum;
  zoo["accuracy_floor"] = z.accuracy_floor;
  zoo["seed"] = z.seed;
  if (!c.zoo.models_dir.empty()) zoo["models_dir"] = c.zoo.models_dir;
  j["zoo"] = zoo;

  ordered_json at;
  const auto& a = c.attack;
  at["epsilon"] = a.epsilon;
  at["outer_iters"] = a.outer_iters;
  at["step_size"] = a.alpha();
  at["inner_iters"] = a.inner_iters;
  at["sample_radius"] = a.sample_radius;
  at["momentum_decay"] = a.momentum_decay;
  at["sampler"] = to_string(a.sampler);
  at["targeted"] = a.targeted;
  if (a.target_label) at["target_label"] = *a.target_label;
  at["redraw_init_per_outer"] = a.redraw_init_per_outer;
  at["transform"] = a.transform.kind == TransformKind::ResizePad ? "resize_pad" : "none";
  at["transform_min_scale"] = a.transform.min_scale;
  at["save_traces"] = c.save_traces;
  j["attack"] = at;

  ordered_json ev;
  ev["eligibility"] = to_string(c.eval.eligibility);
  ev["max_examples"] = c.eval.max_examples;
  ev["target_shift"] = c.eval.target_shift;
  j["eval"] = ev;

  if (c.experiment == ExperimentKind::Sweep) {
    ordered_json sw;
    sw["parameter"] = to_string(c.sweep.parameter);
    sw["values"] = c.sweep.values;
    j["sweep"] = sw;
  }
  if (c.experiment == ExperimentKind::Probe) {
    ordered_json pr;
    std::vector<std::string> samplers;
    for (Sampler s : c.probe.samplers) samplers.emplace_back(to_string(s));
    pr["samplers"] = samplers;
    pr["examples"] = c.probe.examples;
    pr["num_directions"] = c.probe.spec.num_directions;
    pr["magnitudes"] = c.probe.spec.magnitudes;
    pr["distribution"] = to_string(c.probe.spec.distribution);
    pr["seed"] = c.probe.spec.seed;
    pr["radius"] = *c.probe.spec.flatness_radius;
    pr["two_dimensional"] = c.probe.two_dimensional;
    j["probe"] = pr;
  }
  if (c.experiment == ExperimentKind::Ablation) {
    // The ablation probes a fixed grid; only the example count and seed apply.
    ordered_json pr;
    pr["examples"] = c.probe.examples;
    pr["seed"] = c.probe.spec.seed;
    j["probe"] = pr;
  }
  return j;
}

namespace detail {

inline void emit_json_as_yaml(YAML::Emitter& out, const nlohmann::ordered_json& j) {
  if (j.is_object()) {
    out << YAML::BeginMap;
    for (const auto& [k, v] : j.items()) {
      out << YAML::Key << k << YAML::Value;
      emit_json_as_yaml(out, v);
    }
    out << YAML::EndMap;
  } else if (j.is_array()) {
    out << YAML::Flow << YAML::BeginSeq;
    for (const auto& v : j) emit_json_as_yaml(out, v);
    out << YAML::EndSeq;
  } else if (j.is_boolean()) {
    out << (j.get<bool>() ? "true" : "false");
  } else if (j.is_number_float()) {
    out << format_double(j.get<double>());
  } else if (j.is_number_unsigned()) {
    out << std::to_string(j.get<std::uint64_t>());
  } else if (j.is_number_integer()) {
    out << std::to_string(j.get<std::int64_t>());
  } else if (j.is_string()) {
    out << j.get<std::string>();
  } else {
    out << YAML::Null;
  }
}

}  // namespace detail

inline std::string to_yaml(const RunConfig& c) {
  YAML::Emitter out;
  detail::emit_json_as_yaml(out, to_json(c));
  return std::string(out.c_str()) + "\n";
}

}  // namespace ggs
