// trainer/regimes.cc

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

#include "trainer/regimes.h"

#include <sstream>

#include "signal/metrics.h"
#include "signal/pit.h"

namespace octsep {

RegimeSpec RegimeSpec::Parse(const std::string &s) {
  RegimeSpec r;
  if (s == "pit") {
    r.regime = Regime::kPit;
  } else if (s == "hct") {
    r.regime = Regime::kHct;
  } else if (s == "oct") {
    r.regime = Regime::kOct;
  } else if (s == "octpp" || s == "oct++") {
    r.regime = Regime::kOctpp;
  } else if (s.rfind("single:", 0) == 0) {
    r.regime = Regime::kSingle;
    r.single_type = ParseConditionType(s.substr(7));
  } else {
    Fail(ErrorCode::kConfig, "unknown regime '", s, "' (expected pit, hct, oct, octpp or single:<type>)");
  }
  return r;
}

std::string RegimeSpec::ToString() const {
  switch (regime) {
    case Regime::kPit: return "pit";
    case Regime::kHct: return "hct";
    case Regime::kOct: return "oct";
    case Regime::kOctpp: return "octpp";
    case Regime::kSingle: return std::string("single:") + ConditionTypeName(single_type);
  }
  return "?";
}

std::array<double, kNumConditionTypes> RegimeOptions::ParsePrior(const std::string &s) {
  std::array<double, kNumConditionTypes> w{};
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto colon = item.find(':');
    Require(colon != std::string::npos, ErrorCode::kConfig, "prior entry '", item, "': expected <type>:<weight>");
    const ConditionType t = ParseConditionType(item.substr(0, colon));
    double v = 0.0;
    try {
      v = std::stod(item.substr(colon + 1));
    } catch (const std::exception &) {
      Fail(ErrorCode::kConfig, "prior entry '", item, "': bad weight");
    }
    Require(v >= 0.0 && std::isfinite(v), ErrorCode::kConfig, "prior weights must be nonnegative");
    w[Index(t)] = v;
  }
  double sum = 0.0;
  for (double v : w) sum += v;
  Require(sum > 0.0, ErrorCode::kConfig, "prior weights must not all be zero");
  return w;
}

std::array<bool, kNumConditionTypes> RegimeOptions::ParseTypeSet(const std::string &s) {
  std::array<bool, kNumConditionTypes> set{};
  std::istringstream in(s);
  std::string item;
  bool any = false;
  while (std::getline(in, item, ',')) {
    set[Index(ParseConditionType(item))] = true;
    any = true;
  }
  Require(any, ErrorCode::kConfig, "candidate type set must not be empty");
  return set;
}

std::optional<ConditionType> RegimeOptions::ParseAnchor(const std::string &s) {
  if (s.empty() || s == "none") return std::nullopt;
  return ParseConditionType(s);
}

std::vector<float> ToFloat(const std::vector<double> &x) { return {x.begin(), x.end()}; }

TrainExample MakeTrainExample(const MixtureSample &sample) {
  TrainExample ex;
  ex.mixture = ToFloat(sample.mixture.samples);
  ex.sources[0] = ToFloat(sample.sources[0].samples);
  ex.sources[1] = ToFloat(sample.sources[1].samples);
  ex.annotation = sample.annotation;
  ex.seed = sample.seed;
  Rng rng(DeriveSeed({sample.seed, 0x7a49e7}));
  ex.target = static_cast<int>(UniformIndex(rng, 2));
  return ex;
}

HctForward HctLoss(const Separator<float> &sep, const TrainExample &ex, const nn::Vec<float> &c, bool keep_cache) {
  HctForward f;
  f.output = sep.Forward(ex.mixture, c, keep_cache ? &f.cache : nullptr);
  f.terms.target = ReconstructionLoss<float>(f.output.target, ex.target_source());
  f.terms.other = ReconstructionLoss<float>(f.output.other, ex.other_source());
  f.terms.total = f.terms.target + f.terms.other;
  return f;
}

nn::Vec<float> HctBackward(Separator<float> &sep, const TrainExample &ex, const HctForward &fwd, double scale) {
  std::vector<float> gt(ex.mixture.size()), go(ex.mixture.size());
  ReconstructionLoss<float>(fwd.output.target, ex.target_source(), gt);
  ReconstructionLoss<float>(fwd.output.other, ex.other_source(), go);
  const float s = static_cast<float>(scale);
  for (float &v : gt) v *= s;
  for (float &v : go) v *= s;
  return sep.Backward(fwd.cache, gt, go);
}

int ArgminLoss(const std::vector<CandidateLoss> &table) {
  Require(!table.empty(), ErrorCode::kInvalidArgument, "optimal condition: empty loss table");
  int best = 0;
  for (std::size_t k = 1; k < table.size(); ++k)
    if (table[k].loss < table[best].loss) best = static_cast<int>(k);
  return best;
}

Selection SelectOptimalCondition(const Separator<float> &sep, const TrainExample &ex,
                                 const std::vector<Condition> &candidates,
                                 const std::vector<nn::Vec<float>> &vectors) {
  Require(!candidates.empty(), ErrorCode::kInvalidArgument, "optimal condition: empty candidate set");
  Require(candidates.size() == vectors.size(), ErrorCode::kInvalidArgument,
          "optimal condition: candidate/vector count mismatch");
  Selection sel;
  for (std::size_t k = 0; k < candidates.size(); ++k) {
    HctForward f = HctLoss(sep, ex, vectors[k], true);
    sel.table.push_back({candidates[k], f.terms.total});
    if (sel.index < 0 || f.terms.total < sel.table[sel.index].loss) {
      sel.index = static_cast<int>(k);
      sel.winner = std::move(f);
    }
  }
  return sel;
}

std::optional<ConditionType> SampleConditionType(const ConditionAnnotation &a,
                                                 const std::array<double, kNumConditionTypes> &prior, Rng &rng) {
  double sum = 0.0;
  for (ConditionType t : kAllConditionTypes)
    if (a.IsValid(t)) sum += prior[Index(t)];
  if (sum <= 0.0) return std::nullopt;
  const double u = Uniform(rng, 0.0, sum);
  double acc = 0.0;
  std::optional<ConditionType> last;
  for (ConditionType t : kAllConditionTypes) {
    if (!a.IsValid(t) || prior[Index(t)] <= 0.0) continue;
    acc += prior[Index(t)];
    last = t;
    if (u < acc) return t;
  }
  return last;
}

namespace {

Rng ConditionRng(const TrainExample &ex) { return Rng(DeriveSeed({ex.seed, 0xc07d})); }

std::vector<Condition> Candidates(const TrainExample &ex, const RegimeOptions &opts) {
  std::vector<Condition> out;
  for (const Condition &c : EquivalentConditions(ex.annotation, ex.target))
    if (opts.candidate_types[Index(c.type)]) out.push_back(c);
  return out;
}

SampleReport SingleConditionSample(Model &model, const TrainExample &ex, const Condition &c, double scale) {
  SampleReport r;
  r.input = c;
  const HctForward f = HctLoss(model.separator(), ex, model.encoder().Encode(c), true);
  model.encoder().Backward(c, HctBackward(model.separator(), ex, f, scale));
  r.terms = f.terms;
  r.loss = f.terms.total;
  return r;
}

SampleReport PitSample(Model &model, const TrainExample &ex, double scale) {
  SampleReport r;
  Separator<float>::Cache cache;
  const SeparatorOutput<float> out = model.separator().Forward(ex.mixture, model.encoder().Null(), &cache);
  const std::array<const std::vector<float> *, 2> est = {&out.target, &out.other};
  CostMatrix cost(2, std::vector<double>(2));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) cost[i][j] = ReconstructionLoss<float>(*est[j], ex.sources[i]);
  const PitResult pit = SolveAssignment(cost);
  std::array<std::vector<float>, 2> grad = {std::vector<float>(ex.mixture.size()),
                                            std::vector<float>(ex.mixture.size())};
  for (int i = 0; i < 2; ++i) {
    const int j = pit.permutation[i];
    ReconstructionLoss<float>(*est[j], ex.sources[i], grad[j]);
    for (float &v : grad[j]) v *= static_cast<float>(scale);
  }
  model.encoder().BackwardNull(model.separator().Backward(cache, grad[0], grad[1]));
  r.loss = pit.loss;
  r.terms.total = pit.loss;
  r.terms.target = cost[0][pit.permutation[0]];
  r.terms.other = cost[1][pit.permutation[1]];
  r.permutation = {pit.permutation[0], pit.permutation[1]};
  return r;
}

SampleReport OctSample(Model &model, const TrainExample &ex, const RegimeOptions &opts, double scale) {
  SampleReport r;
  const std::vector<Condition> cands = Candidates(ex, opts);
  if (cands.empty()) {
    r.skipped = true;
    return r;
  }
  std::vector<nn::Vec<float>> vecs;
  for (const Condition &c : cands) vecs.push_back(model.encoder().Encode(c));
  Selection sel = SelectOptimalCondition(model.separator(), ex, cands, vecs);
  const Condition &best = cands[sel.index];
  model.encoder().Backward(best, HctBackward(model.separator(), ex, sel.winner, scale));
  r.table = std::move(sel.table);
  r.selected = sel.index;
  r.terms = sel.winner.terms;
  r.loss = sel.winner.terms.total;
  if (opts.anchor && *opts.anchor != best.type && ex.annotation.IsValid(*opts.anchor)) {
    const Condition anchor = ConditionFor(ex.annotation, ex.target, *opts.anchor);
    const HctForward f = HctLoss(model.separator(), ex, model.encoder().Encode(anchor), true);
    model.encoder().Backward(anchor, HctBackward(model.separator(), ex, f, scale));
    r.anchor_loss = f.terms.total;
    r.loss += f.terms.total;
  }
  return r;
}

SampleReport OctppSample(Model &model, const TrainExample &ex, const RegimeOptions &opts, double scale) {
  SampleReport r;
  Require(model.has_refiner(), ErrorCode::kConfig, "octpp regime requires a refiner");
  const std::vector<Condition> cands = Candidates(ex, opts);
  std::optional<Condition> input;
  if (opts.anchor && ex.annotation.IsValid(*opts.anchor)) {
    input = ConditionFor(ex.annotation, ex.target, *opts.anchor);
  } else {
    Rng rng = ConditionRng(ex);
    if (const auto t = SampleConditionType(ex.annotation, opts.prior, rng)) input = ConditionFor(ex.annotation, ex.target, *t);
  }
  if (cands.empty() || !input) {
    r.skipped = true;
    return r;
  }
  Refiner<float> &ref = model.refiner();
  Refiner<float>::MixtureCache mcache;
  const nn::Vec<float> phi = ref.EncodeMixture(ex.mixture, &mcache);

  std::vector<nn::Vec<float>> refined(cands.size());
  std::vector<Refiner<float>::RefineCache> rcache(cands.size());
  int input_index = -1;
  for (std::size_t k = 0; k < cands.size(); ++k) {
    refined[k] = ref.RefineEncoded(phi, model.encoder().Encode(cands[k]), &rcache[k]);
    if (cands[k] == *input) input_index = static_cast<int>(k);
  }
  Selection sel = SelectOptimalCondition(model.separator(), ex, cands, refined);
  const nn::Vec<float> &r_star = refined[sel.index];

  nn::Vec<float> d_phi = nn::Vec<float>::Zero(phi.size());
  const double lambda = opts.reg_weight;
  if (input_index == sel.index) {
    // c = c*: the two reconstruction terms coincide and the penalty is zero.
    const nn::Vec<float> dr = HctBackward(model.separator(), ex, sel.winner, 2.0 * scale);
    model.encoder().Backward(cands[sel.index], ref.RefineBackward(rcache[sel.index], dr, &d_phi));
    r.input_loss = sel.winner.terms.total;
    r.consistency = 0.0;
  } else {
    Refiner<float>::RefineCache input_cache;
    const nn::Vec<float> r_c = input_index >= 0
                                   ? refined[input_index]
                                   : ref.RefineEncoded(phi, model.encoder().Encode(*input), &input_cache);
    const Refiner<float>::RefineCache &c_cache = input_index >= 0 ? rcache[input_index] : input_cache;
    const HctForward f_c = HctLoss(model.separator(), ex, r_c, true);
    const nn::Vec<float> diff = r_c - r_star;
    const double consistency = diff.cast<double>().squaredNorm();
    nn::Vec<float> dr_c = HctBackward(model.separator(), ex, f_c, scale);
    nn::Vec<float> dr_star = HctBackward(model.separator(), ex, sel.winner, scale);
    dr_c += static_cast<float>(2.0 * lambda * scale) * diff;
    if (!opts.stop_gradient_target) dr_star -= static_cast<float>(2.0 * lambda * scale) * diff;
    model.encoder().Backward(*input, ref.RefineBackward(c_cache, dr_c, &d_phi));
    model.encoder().Backward(cands[sel.index], ref.RefineBackward(rcache[sel.index], dr_star, &d_phi));
    r.input_loss = f_c.terms.total;
    r.consistency = consistency;
  }
  ref.EncodeMixtureBackward(mcache, d_phi);
  r.input = input;
  r.table = std::move(sel.table);
  r.selected = sel.index;
  r.terms = sel.winner.terms;
  r.loss = *r.input_loss + sel.winner.terms.total + lambda * *r.consistency;
  return r;
}

}  // namespace

SampleReport TrainSample(Model &model, const TrainExample &ex, const RegimeOptions &opts, double scale) {
  switch (opts.regime.regime) {
    case Regime::kPit:
      return PitSample(model, ex, scale);
    case Regime::kSingle: {
      if (!ex.annotation.IsValid(opts.regime.single_type)) {
        SampleReport r;
        r.skipped = true;
        return r;
      }
      return SingleConditionSample(model, ex, ConditionFor(ex.annotation, ex.target, opts.regime.single_type),
                                   scale);
    }
    case Regime::kHct: {
      Rng rng = ConditionRng(ex);
      const auto t = SampleConditionType(ex.annotation, opts.prior, rng);
      if (!t) {
        SampleReport r;
        r.skipped = true;
        return r;
      }
      return SingleConditionSample(model, ex, ConditionFor(ex.annotation, ex.target, *t), scale);
    }
    case Regime::kOct:
      return OctSample(model, ex, opts, scale);
    case Regime::kOctpp:
      return OctppSample(model, ex, opts, scale);
  }
  Fail(ErrorCode::kInternal, "unhandled regime");
}

}  // namespace octsep
