// tests/test_trainer.cc

// Copyright 2026 The octsep Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>

#include "doctest.h"
#include "signal/metrics.h"
#include "train_fixture.h"
#include "trainer/trainer.h"

using namespace octsep;
using namespace octsep::testing;

namespace {

using GradMap = std::map<std::string, nn::Mat<float>>;

GradMap Grads(Model &m) {
  GradMap g;
  m.Visit([&](const std::string &name, nn::Param<float> &p) { g[name] = p.grad; });
  return g;
}

GradMap Values(Model &m) {
  GradMap g;
  m.Visit([&](const std::string &name, nn::Param<float> &p) { g[name] = p.value; });
  return g;
}

double MaxDiff(const GradMap &a, const GradMap &b) {
  double d = 0.0;
  for (const auto &[name, m] : a) {
    const auto it = b.find(name);
    REQUIRE(it != b.end());
    d = std::max(d, static_cast<double>((m - it->second).cwiseAbs().maxCoeff()));
  }
  return d;
}

std::unique_ptr<Model> MakeModel(const Config &c, bool refiner, std::uint64_t seed = 5) {
  auto m = std::make_unique<Model>(ModelConfigFromConfig(c, refiner));
  m->Init(seed);
  return m;
}

// FiLM starts as the identity, which makes every condition produce the same
// output. Random modulation gives an untrained model that distinguishes them.
std::unique_ptr<Model> RandomModel(const Config &c, bool refiner, std::uint64_t seed = 5) {
  auto m = MakeModel(c, refiner, seed);
  Rng rng(seed + 100);
  for (int b = 0; b < m->separator().config().num_blocks; ++b) {
    nn::FillGaussian(m->separator().film(b).gamma.w.value, rng, 0.3);
    nn::FillGaussian(m->separator().film(b).beta.w.value, rng, 0.3);
  }
  return m;
}

std::vector<TrainExample> TrainExamples(std::size_t n, std::size_t epoch = 0) {
  Config c = SmallConfig("unused");
  c.Set("mix.train_size", std::to_string(n));
  return MaterializeSplit(StreamForSplit(c, SmallClips(), Split::kTrain), epoch);
}

RegimeOptions Options(const std::string &regime) {
  RegimeOptions o;
  o.regime = RegimeSpec::Parse(regime);
  return o;
}

bool AllValid(const TrainExample &ex) {
  for (ConditionType t : kAllConditionTypes)
    if (!ex.annotation.IsValid(t)) return false;
  return true;
}

std::vector<nlohmann::json> ReadJsonl(const std::string &path) {
  std::vector<nlohmann::json> out;
  std::ifstream in(path);
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) out.push_back(nlohmann::json::parse(line));
  return out;
}

}  // namespace

TEST_CASE("regime spec and options parsing") {
  CHECK(RegimeSpec::Parse("oct").regime == Regime::kOct);
  CHECK(RegimeSpec::Parse("octpp").regime == Regime::kOctpp);
  const RegimeSpec s = RegimeSpec::Parse("single:harmonicity");
  CHECK(s.regime == Regime::kSingle);
  CHECK(s.single_type == ConditionType::kHarmonicity);
  CHECK(s.ToString() == "single:harmonicity");
  CHECK_THROWS_AS(RegimeSpec::Parse("sgd"), Error);
  CHECK_THROWS_AS(RegimeOptions::ParsePrior("energy:0,text:0"), Error);
  CHECK_THROWS_AS(RegimeOptions::ParsePrior("energy:-1"), Error);
  const auto prior = RegimeOptions::ParsePrior("energy:2,text:1");
  CHECK(prior[Index(ConditionType::kEnergy)] == 2.0);
  CHECK(prior[Index(ConditionType::kOrder)] == 0.0);
  CHECK(!RegimeOptions::ParseAnchor("none"));
  CHECK(*RegimeOptions::ParseAnchor("text") == ConditionType::kText);
}

TEST_CASE("learning rate halves every 15 epochs") {
  CHECK(LearningRate(1e-3, 15, 0) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(LearningRate(1e-3, 15, 14) == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK(LearningRate(1e-3, 15, 15) == doctest::Approx(5e-4).epsilon(1e-15));
  CHECK(LearningRate(1e-3, 15, 29) == doctest::Approx(5e-4).epsilon(1e-15));
  CHECK(LearningRate(1e-3, 15, 30) == doctest::Approx(2.5e-4).epsilon(1e-15));
}

TEST_CASE("target draw is seeded and covers both sources") {
  const auto a = TrainExamples(40), b = TrainExamples(40);
  int first = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].target == b[i].target);
    first += a[i].target == 0;
  }
  CHECK(first > 5);
  CHECK(first < 35);
}

TEST_CASE("hct loss is the sum of the two reconstruction terms") {
  const Config c = SmallConfig("unused");
  auto model = MakeModel(c, false);
  const TrainExample ex = TrainExamples(1)[0];
  const nn::Vec<float> cv = model->encoder().Encode(ConditionFor(ex.annotation, ex.target, ConditionType::kText));
  const HctForward f = HctLoss(model->separator(), ex, cv, false);
  const SeparatorOutput<float> out = model->separator().Forward(ex.mixture, cv, nullptr);
  const double manual = ReconstructionLoss<float>(out.target, ex.target_source()) +
                        ReconstructionLoss<float>(out.other, ex.other_source());
  CHECK(f.terms.total == manual);

  const double perfect = ReconstructionLoss<float>(ex.target_source(), ex.target_source()) +
                         ReconstructionLoss<float>(ex.other_source(), ex.other_source());
  const double swapped = ReconstructionLoss<float>(ex.other_source(), ex.target_source()) +
                         ReconstructionLoss<float>(ex.target_source(), ex.other_source());
  CHECK(perfect <= -120.0);
  CHECK(swapped > perfect);
}

TEST_CASE("argmin over a loss table") {
  const std::vector<CandidateLoss> table = {{{ConditionType::kEnergy, "high"}, -10.1},
                                            {{ConditionType::kHarmonicity, "harmonic"}, -12.3},
                                            {{ConditionType::kOrder, "first"}, -9.8},
                                            {{ConditionType::kText, "Organ"}, -11.0}};
  CHECK(ArgminLoss(table) == 1);
  std::vector<CandidateLoss> tie = table;
  tie[3].loss = -12.3;
  CHECK(ArgminLoss(tie) == 1);
  CHECK(ArgminLoss({table[2]}) == 0);
  CHECK_THROWS_AS(ArgminLoss({}), Error);
}

TEST_CASE("optimal condition selection matches a brute-force sweep") {
  const Config c = SmallConfig("unused");
  auto model = RandomModel(c, false);
  int checked = 0;
  for (const TrainExample &ex : TrainExamples(30)) {
    if (!AllValid(ex)) continue;
    const std::vector<Condition> cands = EquivalentConditions(ex.annotation, ex.target);
    REQUIRE(cands.size() == 4);
    std::vector<nn::Vec<float>> vecs;
    for (const Condition &cd : cands) vecs.push_back(model->encoder().Encode(cd));
    const Selection sel = SelectOptimalCondition(model->separator(), ex, cands, vecs);
    int best = -1;
    double best_loss = 0.0;
    for (int k = 0; k < 4; ++k) {
      const double l = HctLoss(model->separator(), ex, vecs[k], false).terms.total;
      CHECK(sel.table[k].loss == l);
      if (best < 0 || l < best_loss) {
        best = k;
        best_loss = l;
      }
    }
    CHECK(sel.index == best);
    CHECK(sel.winner.terms.total == best_loss);
    ++checked;
  }
  CHECK(checked >= 3);

  // Identical candidate vectors tie; the first in type order wins.
  const TrainExample ex = TrainExamples(1)[0];
  const nn::Vec<float> v = model->encoder().Null();
  const Selection tie = SelectOptimalCondition(
      model->separator(), ex, {{ConditionType::kEnergy, "high"}, {ConditionType::kText, "Organ"}}, {v, v});
  CHECK(tie.index == 0);
  CHECK_THROWS_AS(SelectOptimalCondition(model->separator(), ex, {}, {}), Error);
}

TEST_CASE("oct gradients come only from the selected condition") {
  const Config c = SmallConfig("unused");
  auto oct = RandomModel(c, false);
  auto manual = RandomModel(c, false);
  for (const TrainExample &ex : TrainExamples(6)) {
    oct->ZeroGrad();
    const SampleReport r = TrainSample(*oct, ex, Options("oct"), 1.0);
    REQUIRE(!r.skipped);
    for (const CandidateLoss &cl : r.table) CHECK(r.table[r.selected].loss <= cl.loss);
    CHECK(!r.anchor_loss);
    manual->ZeroGrad();
    RegimeOptions single = Options("single:text");
    single.regime.single_type = r.table[r.selected].condition.type;
    const SampleReport s = TrainSample(*manual, ex, single, 1.0);
    CHECK(s.loss == r.loss);
    CHECK(MaxDiff(Grads(*oct), Grads(*manual)) == 0.0);
  }
}

TEST_CASE("oct anchor adds a second term only when the winner has another type") {
  const Config c = SmallConfig("unused");
  auto oct = RandomModel(c, false);
  auto manual = RandomModel(c, false);
  RegimeOptions opts = Options("oct");
  opts.anchor = ConditionType::kText;
  int with_anchor = 0, without = 0;
  for (const TrainExample &ex : TrainExamples(40)) {
    oct->ZeroGrad();
    const SampleReport r = TrainSample(*oct, ex, opts, 1.0);
    const ConditionType best = r.table[r.selected].condition.type;
    manual->ZeroGrad();
    RegimeOptions single = Options("single:text");
    single.regime.single_type = best;
    double expected = TrainSample(*manual, ex, single, 1.0).loss;
    if (best == ConditionType::kText) {
      CHECK(!r.anchor_loss);
      ++without;
    } else {
      REQUIRE(r.anchor_loss);
      expected += TrainSample(*manual, ex, Options("single:text"), 1.0).loss;
      ++with_anchor;
    }
    CHECK(r.loss == expected);
    CHECK(MaxDiff(Grads(*oct), Grads(*manual)) == 0.0);
    if (with_anchor > 0 && without > 0 && with_anchor + without >= 8) break;
  }
  CHECK(with_anchor > 0);
  CHECK(without > 0);
}

TEST_CASE("oct restricted to one condition type reproduces single-condition training") {
  const Config c = SmallConfig("unused");
  for (const char *type : {"text", "harmonicity"}) {
    auto a = RandomModel(c, false);
    auto b = RandomModel(c, false);
    RegimeOptions oct = Options("oct");
    oct.candidate_types = RegimeOptions::ParseTypeSet(type);
    Trainer ta(a.get(), oct, TrainOptions{});
    Trainer tb(b.get(), Options(std::string("single:") + type), TrainOptions{});
    const auto ex = TrainExamples(18);
    for (std::size_t s = 0; s < 6; ++s) {
      const std::vector<TrainExample> batch(ex.begin() + 3 * s, ex.begin() + 3 * s + 3);
      const StepReport ra = ta.Step(batch, 0), rb = tb.Step(batch, 0);
      CHECK(ra.skipped == rb.skipped);
      CHECK(std::abs(ra.loss - rb.loss) <= 1e-6);
    }
    CHECK(MaxDiff(Values(*a), Values(*b)) == 0.0);
  }
}

TEST_CASE("octpp at pass-through with zero regularizer matches oct") {
  const Config c = SmallConfig("unused");
  auto oct = RandomModel(c, false);
  auto pp = RandomModel(c, true);
  RegimeOptions opp = Options("octpp");
  opp.reg_weight = 0.0;
  for (const TrainExample &ex : TrainExamples(5)) {
    const SampleReport a = TrainSample(*oct, ex, Options("oct"), 1.0);
    const SampleReport b = TrainSample(*pp, ex, opp, 1.0);
    REQUIRE(a.table.size() == b.table.size());
    CHECK(a.selected == b.selected);
    CHECK(std::abs(a.table[a.selected].loss - b.table[b.selected].loss) <= 1e-6);
    for (std::size_t k = 0; k < a.table.size(); ++k) CHECK(a.table[k].loss == b.table[k].loss);
  }
  // Step 0 through the trainer.
  auto oct2 = RandomModel(c, false);
  auto pp2 = RandomModel(c, true);
  Trainer ta(oct2.get(), Options("oct"), TrainOptions{});
  Trainer tb(pp2.get(), opp, TrainOptions{});
  const auto batch = TrainExamples(3);
  const StepReport ra = ta.Step(batch, 0), rb = tb.Step(batch, 0);
  CHECK(std::abs(ra.ToJson(ta.regime().regime)["terms"]["selected"].get<double>() -
                 rb.ToJson(tb.regime().regime)["terms"]["selected"].get<double>()) <= 1e-6);
}

TEST_CASE("octpp loss equals an independent recomputation of its three terms") {
  Config c = SmallConfig("unused");
  c.Set("refine.init", "random");
  auto model = RandomModel(c, true);
  RegimeOptions opts = Options("octpp");
  opts.reg_weight = 0.7;
  int diagonal = 0, off = 0;
  for (const TrainExample &ex : TrainExamples(30)) {
    model->ZeroGrad();
    const SampleReport r = TrainSample(*model, ex, opts, 1.0);
    REQUIRE(r.input);
    const Condition star = r.table[r.selected].condition;
    const nn::Vec<float> rc = model->refiner().Refine(ex.mixture, model->encoder().Encode(*r.input));
    const nn::Vec<float> rs = model->refiner().Refine(ex.mixture, model->encoder().Encode(star));
    const double lc = HctLoss(model->separator(), ex, rc, false).terms.total;
    const double ls = HctLoss(model->separator(), ex, rs, false).terms.total;
    const double reg = (rc - rs).cast<double>().squaredNorm();
    CHECK(r.loss == doctest::Approx(lc + ls + 0.7 * reg).epsilon(1e-9));
    CHECK(*r.consistency == doctest::Approx(reg).epsilon(1e-9));
    if (*r.input == star) {
      CHECK(*r.consistency == 0.0);
      CHECK(r.loss == 2.0 * r.table[r.selected].loss);
      ++diagonal;
    } else {
      ++off;
    }
    // The refiner receives gradient.
    double refiner_grad = 0.0;
    model->refiner().Visit("", [&](const std::string &, nn::Param<float> &p) { refiner_grad += p.grad.squaredNorm(); });
    CHECK(refiner_grad > 0.0);
  }
  CHECK(diagonal > 0);
  CHECK(off > 0);
}

TEST_CASE("octpp gradient matches a directional finite difference") {
  Config c = SmallConfig("unused");
  c.Set("refine.init", "random");
  auto model = RandomModel(c, true);
  RegimeOptions opts = Options("octpp");
  opts.reg_weight = 0.5;
  const TrainExample ex = TrainExamples(2)[1];
  model->ZeroGrad();
  TrainSample(*model, ex, opts, 1.0);
  const GradMap g = Grads(*model);
  double gg = 0.0;
  for (const auto &[name, m] : g) gg += m.cast<double>().squaredNorm();
  REQUIRE(gg > 0.0);
  const GradMap base = Values(*model);
  const auto loss_at = [&](double t) {
    model->Visit([&](const std::string &name, nn::Param<float> &p) {
      p.value = base.at(name) + static_cast<float>(t) * g.at(name);
    });
    model->ZeroGrad();
    return TrainSample(*model, ex, opts, 1.0).loss;
  };
  const double h = 1e-3 / std::sqrt(gg);
  const double fd = (loss_at(h) - loss_at(-h)) / (2.0 * h);
  CHECK(fd == doctest::Approx(gg).epsilon(0.05));
}

TEST_CASE("pit step uses the better of the two assignments") {
  const Config c = SmallConfig("unused");
  auto model = RandomModel(c, false);
  int perms = 0;
  const auto exs = TrainExamples(6);
  for (const TrainExample &ex : exs) {
    model->ZeroGrad();
    const SampleReport r = TrainSample(*model, ex, Options("pit"), 1.0);
    const SeparatorOutput<float> out = model->separator().Forward(ex.mixture, model->encoder().Null(), nullptr);
    const double keep = ReconstructionLoss<float>(out.target, ex.sources[0]) +
                        ReconstructionLoss<float>(out.other, ex.sources[1]);
    const double swap = ReconstructionLoss<float>(out.other, ex.sources[0]) +
                        ReconstructionLoss<float>(out.target, ex.sources[1]);
    CHECK(r.loss == doctest::Approx(std::min(keep, swap)).epsilon(1e-12));
    CHECK((r.permutation[0] == 0) == (keep <= swap));
    // Only the null vector among the condition parameters receives gradient.
    double discrete = 0.0, null = 0.0;
    model->encoder().Visit("", [&](const std::string &name, nn::Param<float> &p) {
      (name == "null" ? null : discrete) += p.grad.squaredNorm();
    });
    CHECK(null > 0.0);
    CHECK(discrete == 0.0);
  }
  Trainer t(model.get(), Options("pit"), TrainOptions{});
  const StepReport s = t.Step(exs, 0);
  CHECK(s.permutation_counts[0] + s.permutation_counts[1] == static_cast<int>(exs.size()));
}

TEST_CASE("hct draws valid conditions from the prior") {
  std::array<int, kNumConditionTypes> counts{};
  Rng rng(3);
  ConditionAnnotation a;
  a.valid = {true, false, true, true};
  const std::array<double, kNumConditionTypes> prior{1.0, 5.0, 0.0, 3.0};
  for (int i = 0; i < 4000; ++i) ++counts[Index(*SampleConditionType(a, prior, rng))];
  CHECK(counts[Index(ConditionType::kHarmonicity)] == 0);
  CHECK(counts[Index(ConditionType::kOrder)] == 0);
  CHECK(counts[Index(ConditionType::kEnergy)] == doctest::Approx(1000).epsilon(0.15));
  a.valid = {false, true, false, false};
  CHECK(!SampleConditionType(a, {1.0, 0.0, 1.0, 1.0}, rng));
}

TEST_CASE("training makes the condition matter") {
  const Config c = SmallConfig("unused");
  auto model = MakeModel(c, false);
  TrainOptions o;
  o.lr = 3e-3;
  Trainer t(model.get(), Options("hct"), o);
  const auto exs = TrainExamples(60);
  const TrainExample &probe = exs[0];
  const auto gap = [&] {
    const auto a = model->Separate(probe.mixture, ConditionFor(probe.annotation, 0, ConditionType::kEnergy));
    const auto b = model->Separate(probe.mixture, ConditionFor(probe.annotation, 1, ConditionType::kEnergy));
    double d = 0.0;
    for (std::size_t i = 0; i < a.target.size(); ++i) d = std::max(d, double(std::abs(a.target[i] - b.target[i])));
    return d;
  };
  CHECK(gap() == 0.0);
  for (std::size_t s = 0; s < 20; ++s) t.Step({exs.begin() + 3 * s, exs.begin() + 3 * s + 3}, 0);
  CHECK(gap() > 1e-6);
}

TEST_CASE("octpp training moves the refinement away from pass-through") {
  const Config c = SmallConfig("unused");
  auto model = MakeModel(c, true);
  Trainer t(model.get(), Options("octpp"), TrainOptions{});
  const auto exs = TrainExamples(30);
  const Condition q = ConditionFor(exs[0].annotation, 0, ConditionType::kText);
  const nn::Vec<float> cv = model->encoder().Encode(q);
  CHECK((model->refiner().Refine(exs[0].mixture, cv) - cv).cwiseAbs().maxCoeff() == 0.0f);
  for (std::size_t s = 0; s < 10; ++s) t.Step({exs.begin() + 3 * s, exs.begin() + 3 * s + 3}, 0);
  const nn::Vec<float> cv2 = model->encoder().Encode(q);
  CHECK((model->refiner().Refine(exs[0].mixture, cv2) - cv2).cwiseAbs().maxCoeff() > 1e-5f);
}

TEST_CASE("non-finite loss aborts with the batch seeds") {
  const Config c = SmallConfig("unused");
  auto model = MakeModel(c, false);
  Trainer t(model.get(), Options("oct"), TrainOptions{});
  std::vector<TrainExample> batch = TrainExamples(2);
  batch[1].mixture[10] = std::numeric_limits<float>::quiet_NaN();
  try {
    t.Step(batch, 0);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kNumeric);
    CHECK(std::string(e.what()).find(std::to_string(batch[1].seed)) != std::string::npos);
  }
}

TEST_CASE("checkpoint round trip and namespace rules") {
  const auto dir = ScratchDir("ckpt");
  const Config c = SmallConfig(dir.string());
  auto model = MakeModel(c, true, 9);
  nn::Adam<float> adam;
  Trainer t(model.get(), Options("octpp"), TrainOptions{});
  t.Step(TrainExamples(3), 0);
  Checkpoint ck;
  ck.header["note"] = "x";
  StoreModel(*model, &t.optimizer(), &ck);
  SaveCheckpoint((dir / "a.ckpt").string(), ck);
  const Checkpoint back = LoadCheckpoint((dir / "a.ckpt").string());
  CHECK(back.header["note"] == "x");
  CHECK(back.header["adam_steps"] == 1);
  CHECK(HasRefiner(back));
  auto other = MakeModel(c, true, 10);
  nn::Adam<float> adam2;
  RestoreModel(back, other.get(), &adam2);
  CHECK(MaxDiff(Values(*model), Values(*other)) == 0.0);
  CHECK(adam2.steps() == 1);
  CHECK(adam2.state().size() == t.optimizer().state().size());

  // Without the refiner namespace the archive loads as an OCT-only model and
  // a refiner model keeps its own initialization.
  Checkpoint plain;
  auto oct = MakeModel(c, false, 11);
  StoreModel(*oct, nullptr, &plain);
  CHECK(!HasRefiner(plain));
  auto pp = MakeModel(c, true, 12);
  const GradMap before = Values(*pp);
  RestoreModel(plain, pp.get(), nullptr);
  CHECK(MaxDiff(Values(*oct), [&] {
          GradMap v = Values(*pp);
          for (auto it = v.begin(); it != v.end();) it = it->first.rfind("refiner/", 0) == 0 ? v.erase(it) : ++it;
          return v;
        }()) == 0.0);
  CHECK((pp->refiner().Refine(TrainExamples(1)[0].mixture, pp->encoder().Null()) - pp->encoder().Null())
            .cwiseAbs()
            .maxCoeff() == 0.0f);

  Config wide = c;
  wide.Set("model.channels", "10");
  auto wrong = MakeModel(wide, false);
  CHECK_THROWS_AS(RestoreModel(plain, wrong.get(), nullptr), Error);
  std::ofstream((dir / "bad.ckpt").string()) << "not a checkpoint";
  CHECK_THROWS_AS(LoadCheckpoint((dir / "bad.ckpt").string()), Error);
}

TEST_CASE("run_training: metrics, checkpoints, determinism and resume") {
  const auto root = ScratchDir("run");
  Config full = SmallConfig((root / "full").string());
  const TrainResult a = RunTraining(full, SmallClips());
  const auto recs = ReadJsonl(a.metrics_path);
  int steps = 0, epochs = 0;
  for (const auto &r : recs) {
    CHECK(r["schema"] == kMetricsSchema);
    if (r["kind"] == "step") {
      ++steps;
      CHECK(r.contains("c_star"));
      CHECK(std::isfinite(r["loss"].get<double>()));
    }
    if (r["kind"] == "epoch") {
      ++epochs;
      CHECK(r["validation"]["pairs"] == 8);
    }
  }
  CHECK(steps == 8);
  CHECK(epochs == 3);
  CHECK(std::filesystem::exists(a.best_checkpoint));
  CHECK(std::filesystem::exists(a.last_checkpoint));

  // The best checkpoint reproduces its recorded validation score.
  const LoadedModel best = LoadModel(a.best_checkpoint);
  const auto val = MaterializeSplit(StreamForSplit(full, SmallClips(), Split::kValidation));
  const ValidationResult v = Validate(*best.model, val, RegimeSpec::Parse("oct"));
  CHECK(v.si_sdr == a.best_validation);

  // Same seed, same run.
  Config again = full;
  again.Set("out.dir", (root / "again").string());
  const TrainResult b = RunTraining(again, SmallClips());
  const auto recs_b = ReadJsonl(b.metrics_path);
  REQUIRE(recs_b.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    nlohmann::json x = recs[i], y = recs_b[i];
    for (const char *k : {"train_seconds", "config_hash"}) {
      x.erase(k);
      y.erase(k);
    }
    CHECK(x == y);
  }

  // Interrupted after one epoch, then resumed.
  Config part = full;
  part.Set("out.dir", (root / "resumed").string());
  part.Set("train.epochs", "1");
  RunTraining(part, SmallClips());
  part.Set("train.epochs", "2");
  part.Set("train.resume", "true");
  const TrainResult c = RunTraining(part, SmallClips());
  const auto recs_c = ReadJsonl(c.metrics_path);
  REQUIRE(recs_c.size() == recs.size());
  for (std::size_t i = 0; i < recs.size(); ++i) {
    CHECK(recs_c[i]["kind"] == recs[i]["kind"]);
    if (recs[i]["kind"] == "step") {
      CHECK(std::abs(recs_c[i]["loss"].get<double>() - recs[i]["loss"].get<double>()) <= 1e-6);
      CHECK(std::abs(recs_c[i]["grad_norm"].get<double>() - recs[i]["grad_norm"].get<double>()) <= 1e-6);
    }
    if (recs[i]["kind"] == "epoch")
      CHECK(std::abs(recs_c[i]["validation"]["si_sdr"].get<double>() -
                     recs[i]["validation"]["si_sdr"].get<double>()) <= 1e-6);
  }
  const Checkpoint ca = LoadCheckpoint(a.last_checkpoint), cc = LoadCheckpoint(c.last_checkpoint);
  for (const auto &[name, m] : ca.tensors) CHECK((m - cc.tensors.at(name)).cwiseAbs().maxCoeff() <= 1e-6f);

  // Resuming under a different model layout is refused.
  Config changed = part;
  changed.Set("model.channels", "10");
  CHECK_THROWS_AS(RunTraining(changed, SmallClips()), Error);
}
