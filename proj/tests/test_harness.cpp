#include <gtest/gtest.h>

#include <sstream>

#include "support.hpp"

using namespace ggs;

namespace {

struct SmallWorld {
  TrainEvalSplit data;
  ModelZoo zoo;
};

const SmallWorld& small_world() {
  static const SmallWorld w = [] {
    BlobSpec b;
    b.dim = 4;
    b.points_per_class = 60;
    b.eval_points_per_class = 20;
    b.seed = 5;
    ZooSpec z;
    z.hidden = 8;
    z.wide_hidden = 12;
    z.epochs = 150;
    z.accuracy_floor = 0.6;
    SmallWorld out{make_blobs(b), {}};
    out.zoo = build_zoo(out.data, z);
    return out;
  }();
  return w;
}

AttackConfig small_attack(Sampler s) {
  AttackConfig c;
  c.sampler = s;
  c.inner_iters = 4;
  c.outer_iters = 5;
  c.rng_seed = 13;
  return c;
}

}  // namespace

TEST(AttackSuccess, UntargetedAndTargetedSemantics) {
  LinearSoftmaxOracle lin(LinearLayer{2, 2, Vec{1.0, 0.0, 0.0, 1.0}, Vec{0.0, 0.0}});
  const Vec x{0.9, 0.1};  // predicts class 0
  EXPECT_FALSE(attack_success(lin, x, 0, false));
  EXPECT_TRUE(attack_success(lin, x, 1, false));
  EXPECT_TRUE(attack_success(lin, x, 1, true, 0));
  EXPECT_FALSE(attack_success(lin, x, 0, true, 1));
  EXPECT_THROW((void)attack_success(lin, x, 0, true), ContractViolation);
}

TEST(Zoo, MembersShareShapesAndClearFloor) {
  const SmallWorld& w = small_world();
  const auto members = w.zoo.members();
  ASSERT_EQ(members.size(), 4u);
  EXPECT_EQ(members[0]->id, "surrogate_mlp");
  EXPECT_EQ(members[3]->id, "linear_softmax");
  EXPECT_EQ(members[3]->model.num_layers(), 1u);
  for (const ZooMember* m : members) EXPECT_GT(m->clean_accuracy, 0.6);
  EXPECT_THROW(w.zoo.validate(1.0), ContractViolation);
}

TEST(Transfer, CellsAreRatesOverEligibleCounts) {
  const SmallWorld& w = small_world();
  EvalOptions opt;
  opt.max_examples = 30;
  const AsrTable t = evaluate_transfer(w.zoo, w.data.eval, {{"ggs", small_attack(Sampler::Ggs)}}, opt);
  ASSERT_EQ(t.rows.size(), 1u);
  const AsrRow& row = t.rows[0];
  EXPECT_EQ(row.attacked, eligible_examples(w.zoo, w.data.eval, opt).size());
  ASSERT_EQ(row.cells.size(), 4u);
  EXPECT_EQ(row.cells[0].eligible, row.attacked);
  for (const AsrCell& c : row.cells) {
    EXPECT_GE(c.rate, 0.0);
    EXPECT_LE(c.rate, 1.0);
    EXPECT_LE(c.eligible, row.attacked);
    EXPECT_DOUBLE_EQ(c.rate, static_cast<double>(c.successes) / static_cast<double>(c.eligible));
  }
  EXPECT_LE(row.max_linf, kDefaultEpsilon * (1.0 + 1e-12));
}

TEST(Transfer, EligibilityFilterIsIdempotent) {
  const SmallWorld& w = small_world();
  EvalOptions opt;
  const auto first = eligible_examples(w.zoo, w.data.eval, opt);
  Dataset filtered = w.data.eval;
  filtered.inputs.clear();
  filtered.labels.clear();
  for (std::size_t i : first) {
    filtered.inputs.push_back(w.data.eval.inputs[i]);
    filtered.labels.push_back(w.data.eval.labels[i]);
  }
  EXPECT_EQ(eligible_examples(w.zoo, filtered, opt).size(), filtered.size());
  opt.eligibility = Eligibility::All;
  EXPECT_EQ(eligible_examples(w.zoo, w.data.eval, opt).size(), w.data.eval.size());
}

TEST(Transfer, EmptyEligibleSetNamesFilter) {
  const SmallWorld& w = small_world();
  Dataset wrong = w.data.eval;
  wrong.inputs.clear();
  wrong.labels.clear();
  for (std::size_t i = 0; i < 10; ++i) {
    const std::size_t pred = w.zoo.surrogate.oracle->predict(w.data.eval.inputs[i]);
    wrong.inputs.push_back(w.data.eval.inputs[i]);
    wrong.labels.push_back((pred + 1) % wrong.num_classes);
  }
  try {
    (void)evaluate_transfer(w.zoo, wrong, {{"mi", small_attack(Sampler::NoneMi)}});
    FAIL() << "expected an error";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("clean_correct"), std::string::npos);
  }
}

TEST(Transfer, IdenticalAcrossJobCounts) {
  const SmallWorld& w = small_world();
  EvalOptions one;
  one.max_examples = 20;
  EvalOptions three = one;
  three.jobs = 3;
  const std::vector<NamedConfig> cfgs{{"rs", small_attack(Sampler::Rs)}, {"ggs", small_attack(Sampler::Ggs)}};
  std::ostringstream a, b;
  write_asr_csv(a, evaluate_transfer(w.zoo, w.data.eval, cfgs, one));
  write_asr_csv(b, evaluate_transfer(w.zoo, w.data.eval, cfgs, three));
  EXPECT_EQ(a.str(), b.str());
}

TEST(Transfer, TargetedUsesShiftedLabel) {
  const SmallWorld& w = small_world();
  EvalOptions opt;
  opt.max_examples = 10;
  opt.target_shift = 2;
  AttackConfig c = small_attack(Sampler::Ggs);
  c.targeted = true;
  const AsrTable t = evaluate_transfer(w.zoo, w.data.eval, {{"t", c}}, opt);
  for (const ExampleOutcome& o : t.rows[0].outcomes) EXPECT_EQ(o.attack_label, (o.label + 2) % 3);
}

TEST(Ablation, FiveRowsAndZetaZeroCollapsesSamplers) {
  const SmallWorld& w = small_world();
  EvalOptions opt;
  opt.max_examples = 15;
  AttackConfig base = small_attack(Sampler::Ggs);
  base.sample_radius = 0.0;
  const AblationReport r = ablation_report(w.zoo, w.data.eval, base, opt, std::nullopt, 4);
  ASSERT_EQ(r.entries.size(), 5u);
  const AblationEntry* mi = nullptr;
  for (const AblationEntry& e : r.entries)
    if (e.sampler == Sampler::NoneMi) mi = &e;
  ASSERT_NE(mi, nullptr);
  for (const AblationEntry& e : r.entries) {
    EXPECT_EQ(e.probed, 4u);
    EXPECT_GE(e.mean_flatness, 0.0);
    EXPECT_LE(e.mean_flatness, 1.0);
    if (e.sampler == Sampler::NiLookahead) continue;
    for (std::size_t j = 0; j < e.row.outcomes.size(); ++j)
      EXPECT_EQ(e.row.outcomes[j].adversarial, mi->row.outcomes[j].adversarial) << to_string(e.sampler);
  }
  std::ostringstream csv;
  write_ablation_csv(csv, r);
  const std::string s = csv.str();
  EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 6);
}

TEST(Sweep, ZetaZeroRowMatchesMomentumBaseline) {
  const SmallWorld& w = small_world();
  EvalOptions opt;
  opt.max_examples = 15;
  const AttackConfig base = small_attack(Sampler::Ggs);
  const SweepTable t = sweep(w.zoo, w.data.eval, base, SweepParameter::Zeta, {0.0, base.epsilon}, opt);
  ASSERT_EQ(t.rows.size(), 2u);
  const AsrTable mi = evaluate_transfer(w.zoo, w.data.eval, {{"mi", small_attack(Sampler::NoneMi)}}, opt);
  for (std::size_t m = 0; m < mi.rows[0].cells.size(); ++m)
    EXPECT_EQ(t.rows[0].row.cells[m].successes, mi.rows[0].cells[m].successes);
  EXPECT_GE(t.rows[1].runtime_seconds, 0.0);
}

TEST(Sweep, RejectsBadValues) {
  const SmallWorld& w = small_world();
  const AttackConfig base = small_attack(Sampler::Ggs);
  EXPECT_THROW((void)sweep(w.zoo, w.data.eval, base, SweepParameter::Zeta, {}), ContractViolation);
  EXPECT_THROW((void)sweep(w.zoo, w.data.eval, base, SweepParameter::Zeta, {-0.1}), ContractViolation);
  EXPECT_THROW((void)sweep(w.zoo, w.data.eval, base, SweepParameter::InnerIters, {2.5}), ContractViolation);
}

TEST(Sweep, CsvHasNoRuntimeColumn) {
  const SmallWorld& w = small_world();
  EvalOptions opt;
  opt.max_examples = 5;
  std::ostringstream out;
  write_sweep_csv(out, sweep(w.zoo, w.data.eval, small_attack(Sampler::Ggs), SweepParameter::InnerIters, {1.0, 2.0}, opt));
  const std::string s = out.str();
  EXPECT_EQ(s.substr(0, s.find("\r\n")),
            "parameter,value,attacked,white_box_asr,mean_transfer_asr,mlp_reseeded_asr,mlp_wide_asr,"
            "linear_softmax_asr,mean_linf");
  EXPECT_NE(s.find("\r\nn,1,"), std::string::npos);
}
