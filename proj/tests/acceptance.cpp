// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//
//   ggs_acceptance            run every criterion
//   ggs_acceptance 1 3 9      run a subset

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "ggs/experiment.hpp"
#include "ggs/ggs.hpp"
#include "ggs/verify.hpp"

using namespace ggs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double limit_seconds;
  std::function<Outcome()> run;
};

std::size_t jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string pct(double rate) {
  std::ostringstream s;
  s.precision(2);
  s << std::fixed << 100.0 * rate << "%";
  return s.str();
}

std::string num(double v) { return format_double(v); }

// 1 ------------------------------------------------------------------------

Outcome gradient_fidelity() {
  using namespace verify_detail;
  struct Case {
    std::string name;
    std::shared_ptr<const GradientOracle> oracle;
    double tol;
  };
  std::vector<Case> cases;
  cases.push_back({"landscape_sum", std::make_shared<SyntheticLandscape>(random_landscape(6, Composition::Sum, 1)), 1e-6});
  cases.push_back(
      {"landscape_smoothmax", std::make_shared<SyntheticLandscape>(random_landscape(6, Composition::SmoothMax, 2)), 1e-6});
  cases.push_back({"landscape_suite", std::make_shared<SyntheticLandscape>(bundled_landscape_case(0).landscape), 1e-6});
  cases.push_back({"linear_softmax", std::make_shared<LinearSoftmaxOracle>(random_layer(6, 4, 3, 2.0)), 1e-6});
  const auto tanh_mlp = std::make_shared<MlpOracle>(random_mlp({6, 10, 8, 4}, Activation::Tanh, 4));
  const auto softplus_mlp = std::make_shared<MlpOracle>(random_mlp({6, 12, 4}, Activation::Softplus, 5));
  cases.push_back({"mlp_tanh", tanh_mlp, 1e-5});
  cases.push_back({"mlp_softplus", softplus_mlp, 1e-5});
  cases.push_back({"ensemble", ensemble_oracle({tanh_mlp, softplus_mlp}, {0.3, 0.7}), 1e-5});

  Outcome out{true, ""};
  for (std::size_t k = 0; k < cases.size(); ++k) {
    const GradientCheckReport r = check_gradient(*cases[k].oracle, 20, 1e-5, 100 + k);
    const bool ok = r.max_relative_error <= cases[k].tol;
    out.passed = out.passed && ok;
    out.detail += (k ? ", " : "") + cases[k].name + " " + num(r.max_relative_error) + (ok ? "" : " (over limit)");
  }
  return out;
}

// 2 ------------------------------------------------------------------------

double ulp(double v) {
  v = std::abs(v);
  return std::nextafter(v, std::numeric_limits<double>::infinity()) - v;
}

Outcome budget_invariants() {
  const std::size_t runs = 1000;
  std::vector<int> violations(runs, 0);
  std::vector<double> excess(runs, 0.0);
  parallel_for(runs, jobs(), [&](std::size_t r) {
    CounterRng rng(r, 0xb0d6);
    const std::size_t dim = 2 + rng.next() % 9;
    const auto oracles = verify_detail::attack_oracles(dim, 1000 + r);
    const GradientOracle& oracle = *oracles[rng.next() % oracles.size()];
    AttackConfig c;
    c.sampler = kAllSamplers[r % kAllSamplers.size()];
    c.epsilon = rng.uniform(0.0, 0.3);
    c.outer_iters = 1 + static_cast<int>(rng.next() % 10);
    c.inner_iters = 1 + static_cast<int>(rng.next() % 8);
    c.step_size = c.epsilon * rng.uniform(0.05, 1.0);
    c.sample_radius = c.epsilon * rng.uniform(0.0, 8.0);
    c.momentum_decay = rng.uniform(0.0, 1.5);
    c.redraw_init_per_outer = rng.next() % 2 == 0;
    c.rng_seed = r;
    Vec x(dim);
    rng.fill_uniform(x, 0.0, 1.0);
    // Some inputs start on the box faces.
    for (double& e : x)
      if (rng.uniform01() < 0.1) e = rng.next() % 2 ? 1.0 : 0.0;
    const std::size_t label = rng.next() % oracle.num_classes();
    const AttackResult res = run_attack(oracle, InputPoint(x), label, c);
    for (std::size_t d = 0; d < dim; ++d) {
      const double a = res.adversarial[d];
      const double delta = std::abs(a - x[d]);
      const double limit = c.epsilon + 4.0 * ulp(std::max(std::abs(a), std::abs(x[d])));
      if (delta > limit || a < 0.0 || a > 1.0 || !std::isfinite(a)) ++violations[r];
      excess[r] = std::max(excess[r], delta - c.epsilon);
    }
  });
  const int bad = std::accumulate(violations.begin(), violations.end(), 0);
  return {bad == 0, std::to_string(runs) + " runs, " + std::to_string(bad) + " coordinate violations, largest |delta| - eps " +
                        num(*std::max_element(excess.begin(), excess.end()))};
}

// 3 ------------------------------------------------------------------------

Outcome degeneration() {
  const std::size_t pairs = 50;
  double worst = 0.0;
  std::size_t compared = 0;
  for (std::size_t p = 0; p < pairs; ++p) {
    CounterRng rng(p, 0xde9e);
    const std::size_t dim = 2 + rng.next() % 7;
    const auto oracles = verify_detail::attack_oracles(dim, 500 + p);
    const GradientOracle& oracle = *oracles[p % oracles.size()];
    Vec x(dim);
    rng.fill_uniform(x, 0.0, 1.0);
    const std::size_t label = rng.next() % oracle.num_classes();
    AttackConfig c;
    c.sample_radius = 0.0;
    c.epsilon = rng.uniform(0.01, 0.2);
    c.inner_iters = 1 + static_cast<int>(rng.next() % 20);
    c.rng_seed = p;
    const auto ref = verify_detail::reference_mi_trajectory(oracle, x, label, c.epsilon, c.alpha(), c.outer_iters,
                                                            c.momentum_decay);
    for (Sampler s : {Sampler::Rs, Sampler::Mgs, Sampler::Ggs}) {
      c.sampler = s;
      const AttackResult r = run_attack(oracle, InputPoint(x), label, c);
      if (r.trace.iterates.size() != ref.size()) return {false, "trajectory length mismatch"};
      for (std::size_t t = 0; t < ref.size(); ++t)
        for (std::size_t d = 0; d < dim; ++d) worst = std::max(worst, std::abs(r.trace.iterates[t][d] - ref[t][d]));
      ++compared;
    }
  }
  return {worst <= 1e-12, std::to_string(compared) + " trajectories vs MI reference, max elementwise deviation " + num(worst)};
}

// 4 ------------------------------------------------------------------------

Outcome table_ordering() {
  const std::vector<Sampler> samplers{Sampler::NoneMi, Sampler::Rs, Sampler::Mgs, Sampler::Ggs};
  Vec mean(samplers.size(), 0.0);
  std::string per_seed;
  const int seeds = 5;
  for (int s = 1; s <= seeds; ++s) {
    BlobSpec b;
    b.seed = static_cast<std::uint64_t>(s);
    const TrainEvalSplit data = make_blobs(b);
    const ModelZoo zoo = build_zoo(data, ZooSpec{});
    std::vector<NamedConfig> cfgs;
    for (Sampler sm : samplers) {
      AttackConfig c;
      c.sampler = sm;
      c.rng_seed = 0;
      c.log_inner_gradients = false;
      cfgs.push_back({to_string(sm), c});
    }
    EvalOptions opt;
    opt.jobs = jobs();
    const AsrTable t = evaluate_transfer(zoo, data.eval, cfgs, opt);
    per_seed += " seed" + std::to_string(s) + "[";
    for (std::size_t k = 0; k < samplers.size(); ++k) {
      mean[k] += t.rows[k].mean_transfer / seeds;
      per_seed += (k ? " " : "") + std::string(to_string(samplers[k])) + "=" + pct(t.rows[k].mean_transfer);
    }
    per_seed += "]";
  }
  const double ggs = mean[3], rs = mean[1], mgs = mean[2];
  const bool ok = ggs - rs >= 0.03 && ggs - mgs >= 0.03;
  return {ok, "mean transfer ASR mi " + pct(mean[0]) + ", rs " + pct(rs) + ", mgs " + pct(mgs) + ", ggs " + pct(ggs) +
                  "; ggs-rs " + num(100.0 * (ggs - rs)) + "pp, ggs-mgs " + num(100.0 * (ggs - mgs)) +
                  "pp (need >= 3pp each);" + per_seed};
}

// 5, 6 ---------------------------------------------------------------------

ProbeSpec landscape_probe(const LandscapeSuiteSpec& suite) {
  ProbeSpec p;
  const double r = suite.flat_width / 2.0;
  p.magnitudes = {-r, -r / 2.0, 0.0, r / 2.0, r};
  p.flatness_radius = r;
  p.num_directions = 16;
  p.seed = 7;
  return p;
}

Outcome flat_maxima() {
  const LandscapeSuiteSpec suite;
  const ProbeSpec probe = landscape_probe(suite);
  const int seeds = 20;
  double flat_rs = 0, flat_ggs = 0, center_rs = 0, center_ggs = 0;
  for (int s = 0; s < seeds; ++s) {
    const LandscapeCase lc = bundled_landscape_case(static_cast<std::uint64_t>(s), suite);
    for (Sampler sm : {Sampler::Rs, Sampler::Ggs}) {
      AttackConfig c;
      c.sampler = sm;
      c.rng_seed = 100 + static_cast<std::uint64_t>(s);
      const AttackResult r = run_attack(lc.landscape, InputPoint(lc.start), 0, c);
      const FlatnessReport rep = probe_1d(lc.landscape, r.adversarial.view(), 0, probe);
      (sm == Sampler::Rs ? flat_rs : flat_ggs) += rep.flatness / seeds;
      (sm == Sampler::Rs ? center_rs : center_ggs) += rep.center_loss / seeds;
    }
  }
  const bool geq = flat_ggs >= flat_rs && center_ggs >= center_rs;
  const bool margin = flat_ggs >= 1.05 * flat_rs || center_ggs >= 1.05 * center_rs;
  return {geq && margin, "flatness ggs " + num(flat_ggs) + " vs rs " + num(flat_rs) + " (" +
                             num(100.0 * (flat_ggs / flat_rs - 1.0)) + "%), center loss ggs " + num(center_ggs) +
                             " vs rs " + num(center_rs) + " (" + num(100.0 * (center_ggs / center_rs - 1.0)) +
                             "%); need both >= and one >= +5%"};
}

Outcome cosine_shape() {
  const int runs = 50;
  int rising = 0;
  double early_sum = 0.0, late_sum = 0.0;
  for (int s = 0; s < runs; ++s) {
    const LandscapeCase lc = bundled_landscape_case(static_cast<std::uint64_t>(s));
    AttackConfig c;
    c.sampler = Sampler::Ggs;
    c.inner_iters = 20;
    c.rng_seed = 100 + static_cast<std::uint64_t>(s);
    const AttackResult r = run_attack(lc.landscape, InputPoint(lc.start), 0, c);
    const Vec profile = mean_cosine_profile(r.trace);
    const double early = profile_mean(profile, 0, 10);
    const double late = profile_mean(profile, 10, 20);
    early_sum += early / runs;
    late_sum += late / runs;
    rising += late > early ? 1 : 0;
  }
  return {rising >= 40, std::to_string(rising) + "/" + std::to_string(runs) +
                            " runs with steps 11-20 above steps 1-10 (need >= 40); mean early " + num(early_sum) +
                            ", late " + num(late_sum)};
}

// 7 ------------------------------------------------------------------------

Outcome zeta_shape() {
  const TrainEvalSplit data = make_blobs(BlobSpec{});
  const ModelZoo zoo = build_zoo(data, ZooSpec{});
  AttackConfig base;
  base.log_inner_gradients = false;
  const Vec factors{0.0, 0.5, 1.0, 2.0, 4.0, 8.0};
  Vec values;
  for (double f : factors) values.push_back(f * base.epsilon);
  EvalOptions opt;
  opt.jobs = jobs();
  const SweepTable t = sweep(zoo, data.eval, base, SweepParameter::Zeta, values, opt);
  Vec asr;
  std::string detail = "mean transfer ASR by zeta/eps:";
  for (std::size_t k = 0; k < t.rows.size(); ++k) {
    asr.push_back(t.rows[k].row.mean_transfer);
    detail += " " + num(factors[k]) + "=" + pct(asr.back());
  }
  const std::size_t best = static_cast<std::size_t>(std::max_element(asr.begin(), asr.end()) - asr.begin());
  const bool interior = best > 0 && best + 1 < asr.size() && asr[best] > asr.front() && asr[best] > asr.back();
  return {interior, detail + "; argmax at " + num(factors[best]) + " eps"};
}

// 8 ------------------------------------------------------------------------

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<fs::path> csv_files(const fs::path& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") out.push_back(fs::relative(e.path(), dir));
  std::sort(out.begin(), out.end());
  return out;
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / ("ggs_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(root);
  std::size_t files = 0;
  std::string mismatches;
  for (const char* name : {"ablation.yaml", "attack.yaml"}) {
    std::vector<RunOutcome> runs;
    for (std::size_t j : {std::size_t{1}, std::size_t{1}, std::size_t{3}}) {
      RunOptions o;
      o.out_root = root;
      o.jobs = j;
      o.quiet = true;
      o.log = nullptr;
      runs.push_back(cmd_run(fs::path(GGS_CONFIG_DIR) / name, o));
      if (runs.back().exit_code != 0) return {false, std::string(name) + ": run failed: " + runs.back().error};
    }
    const auto ref_files = csv_files(runs[0].run_dir);
    for (std::size_t k = 1; k < runs.size(); ++k) {
      if (csv_files(runs[k].run_dir) != ref_files) mismatches += std::string(" ") + name + ": file sets differ;";
      for (const fs::path& f : ref_files) {
        ++files;
        if (slurp(runs[0].run_dir / f) != slurp(runs[k].run_dir / f))
          mismatches += std::string(" ") + name + ":" + f.string() + " (run " + std::to_string(k + 1) + ");";
      }
    }
  }
  fs::remove_all(root);
  return {mismatches.empty(), std::to_string(files) + " CSV comparisons across jobs 1, 1, 3" +
                                  (mismatches.empty() ? std::string(", all byte-identical") : "; differ:" + mismatches)};
}

// 9 ------------------------------------------------------------------------

Outcome sampling_pathology() {
  const int runs = 20;
  std::size_t checks = 0;
  std::string failures;
  for (int r = 0; r < runs; ++r) {
    CounterRng rng(static_cast<std::uint64_t>(r), 0x9a7);
    const std::size_t dim = 4 + rng.next() % 6;
    const auto oracles = verify_detail::attack_oracles(dim, 900 + static_cast<std::uint64_t>(r));
    const GradientOracle& oracle = *oracles[static_cast<std::size_t>(r) % 3];
    Vec x(dim);
    rng.fill_uniform(x, 0.1, 0.9);
    const std::size_t label = rng.next() % oracle.num_classes();
    for (Sampler s : {Sampler::Mgs, Sampler::Ggs}) {
      AttackConfig c;
      c.sampler = s;
      c.inner_iters = 8;
      c.outer_iters = 3;
      c.rng_seed = 40 + static_cast<std::uint64_t>(r);
      c.log_sampling_points = true;
      const AttackResult res = run_attack(oracle, InputPoint(x), label, c);
      const std::vector<Vec>& iterates = res.trace.iterates;
      for (std::size_t t = 0; t < res.trace.outer.size(); ++t) {
        const OuterRecord& rec = res.trace.outer[t];
        const Vec& x_t = t == 0 ? x : iterates[t - 1];
        const std::vector<Vec>& g = rec.inner_gradients;
        for (std::size_t i = 2; i < g.size(); ++i) {
          const std::vector<Vec> prev(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(i));
          const Vec& noise = rec.sampling_noise[i];
          const Vec logged = rec.sampling_points[i];
          auto replay = [&](const std::vector<Vec>& history) {
            return replay_sampling_point(s, x_t, noise, rec.initial_guidance, history);
          };
          ++checks;
          if (replay(prev) != logged) failures += " replay(" + std::string(to_string(s)) + ")";
          // Opposite gradients everywhere make every guidance sign flip.
          auto negate = [](Vec v) {
            for (double& e : v) e = -e;
            return v;
          };
          if (s == Sampler::Mgs) {
            std::vector<Vec> perm = prev;
            std::reverse(perm.begin(), perm.end());
            std::rotate(perm.begin(), perm.begin() + 1, perm.end());
            if (replay(perm) != logged) failures += " mgs-permutation";
          } else {
            std::vector<Vec> older = prev;
            for (std::size_t k = 0; k + 1 < older.size(); ++k) older[k] = negate(older[k]);
            if (replay(older) != logged) failures += " ggs-older";
            std::vector<Vec> last = prev;
            last.back() = negate(last.back());
            const bool has_signal = std::any_of(prev.back().begin(), prev.back().end(), [](double e) { return e != 0.0; });
            const bool noise_nonzero = std::any_of(noise.begin(), noise.end(), [](double e) { return e != 0.0; });
            if (has_signal && noise_nonzero && replay(last) == logged) failures += " ggs-last";
          }
        }
      }
    }
  }
  return {failures.empty(), std::to_string(checks) + " replayed sampling points" +
                                (failures.empty() ? std::string(", all invariances hold") : ";" + failures.substr(0, 300))};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "gradient fidelity", 5.0, gradient_fidelity},
      {2, "budget invariants", 120.0, budget_invariants},
      {3, "degeneration to MI at zeta 0", 60.0, degeneration},
      {4, "sampler ordering on blob zoo", 900.0, table_ordering},
      {5, "flat maxima on landscape suite", 300.0, flat_maxima},
      {6, "inner cosine profile rises", 180.0, cosine_shape},
      {7, "zeta sweep interior maximum", 1200.0, zeta_shape},
      {8, "run determinism", 300.0, determinism},
      {9, "mgs/ggs sampling replay", 60.0, sampling_pathology},
  };
  std::set<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.insert(std::atoi(argv[a]));

  int failed = 0;
  for (const Criterion& c : all) {
    if (!wanted.empty() && !wanted.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.limit_seconds;
    const bool passed = o.passed && in_time;
    failed += passed ? 0 : 1;
    std::ostringstream t;
    t.precision(1);
    t << std::fixed << secs << "s";
    std::cout << (passed ? "PASS" : "FAIL") << " criterion " << c.id << " (" << c.name << "): " << o.detail << " ["
              << t.str() << (in_time ? "" : ", over time limit") << "]" << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
