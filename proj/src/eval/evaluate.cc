// eval/evaluate.cc

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

#include "eval/evaluate.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <thread>

#include "signal/metrics.h"

namespace octsep {

TestSet MakeTestSet(const DatasetStream &stream) {
  auto shared = std::make_shared<const DatasetStream>(stream);
  TestSet t;
  t.size = stream.size();
  t.seed = stream.seed();
  t.get = [shared](std::size_t i) { return MakeTrainExample(shared->Get(0, i)); };
  return t;
}

TestSet MakeTestSet(std::vector<TrainExample> examples, std::uint64_t seed) {
  auto shared = std::make_shared<const std::vector<TrainExample>>(std::move(examples));
  TestSet t;
  t.size = shared->size();
  t.seed = seed;
  t.get = [shared](std::size_t i) { return (*shared)[i]; };
  return t;
}

Stats ComputeStats(std::vector<double> values) {
  Stats s;
  s.count = values.size();
  if (values.empty()) return s;
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / values.size();
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(ss / values.size());
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  s.median = n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
  return s;
}

std::map<std::string, Stats> Aggregate(const std::vector<MixtureRecord> &records) {
  std::map<std::string, std::vector<double>> groups;
  for (const MixtureRecord &r : records) {
    for (const TargetScore &t : r.targets) {
      for (const auto &[metric, v] : {std::pair<std::string, double>{"si_sdr", t.si_sdr}, {"si_sdri", t.si_sdri}}) {
        groups[metric + "/all"].push_back(v);
        if (!t.valid) continue;
        groups[metric + "/valid"].push_back(v);
        groups[metric + "/type:" + t.condition].push_back(v);
      }
    }
  }
  for (const char *metric : {"si_sdr", "si_sdri"}) {
    groups[std::string(metric) + "/all"];
    groups[std::string(metric) + "/valid"];
  }
  std::map<std::string, Stats> out;
  for (auto &[k, v] : groups) out[k] = ComputeStats(std::move(v));
  return out;
}

std::size_t EvalReport::skipped_mixtures() const {
  std::size_t n = 0;
  for (const MixtureRecord &r : records) n += !(r.targets[0].valid && r.targets[1].valid);
  return n;
}

nlohmann::json RecordToJson(const MixtureRecord &r) {
  nlohmann::json targets = nlohmann::json::array();
  for (int k = 0; k < 2; ++k) {
    const TargetScore &t = r.targets[k];
    targets.push_back({{"source", k},
                       {"class", r.classes[k]},
                       {"condition", t.condition},
                       {"value", t.value},
                       {"valid", t.valid},
                       {"si_sdr", t.si_sdr},
                       {"si_sdri", t.si_sdri},
                       {"mixture_si_sdr", t.mixture_si_sdr}});
  }
  return {{"index", r.index}, {"seed", r.seed}, {"targets", targets}};
}

MixtureRecord RecordFromJson(const nlohmann::json &j) {
  MixtureRecord r;
  r.index = j.at("index");
  r.seed = j.at("seed");
  const auto &targets = j.at("targets");
  Require(targets.size() == 2, ErrorCode::kData, "evaluation record must hold two targets");
  for (int k = 0; k < 2; ++k) {
    const auto &t = targets[k];
    r.classes[k] = t.at("class");
    r.targets[k].condition = t.at("condition");
    r.targets[k].value = t.at("value");
    r.targets[k].valid = t.at("valid");
    r.targets[k].si_sdr = t.at("si_sdr");
    r.targets[k].si_sdri = t.at("si_sdri");
    r.targets[k].mixture_si_sdr = t.at("mixture_si_sdr");
  }
  return r;
}

namespace {

using Scorer = std::function<MixtureRecord(const TrainExample &)>;

std::vector<MixtureRecord> Run(const TestSet &test, const Scorer &score, int threads) {
  Require(static_cast<bool>(test.get), ErrorCode::kInvalidArgument, "test set has no accessor");
  std::vector<MixtureRecord> out(test.size);
  if (threads <= 0) threads = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  threads = static_cast<int>(std::min<std::size_t>(threads, std::max<std::size_t>(test.size, 1)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  const auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < test.size;) {
      try {
        const TrainExample ex = test.get(i);
        MixtureRecord r = score(ex);
        r.index = i;
        r.seed = ex.seed;
        for (int k = 0; k < 2; ++k) r.classes[k] = ConditionFor(ex.annotation, k, ConditionType::kText).value;
        out[i] = std::move(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
        next = test.size;
      }
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (std::thread &t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return out;
}

TargetScore Score(const TrainExample &ex, int target, std::span<const float> est, const Condition &c, bool valid) {
  TargetScore s;
  s.condition = ConditionTypeName(c.type);
  s.value = c.value;
  s.valid = valid;
  s.si_sdr = SiSdr<float>(est, ex.sources[target]);
  s.mixture_si_sdr = SiSdr<float>(ex.mixture, ex.sources[target]);
  s.si_sdri = s.si_sdr - s.mixture_si_sdr;
  return s;
}

// Best-scoring valid condition for one target; the first in type order wins
// ties.
TargetScore BestOver(const TrainExample &ex, int target,
                     const std::function<const SeparationModel &(ConditionType)> &model_for) {
  TargetScore best;
  best.si_sdr = -std::numeric_limits<double>::infinity();
  for (const Condition &c : EquivalentConditions(ex.annotation, target)) {
    const SeparatorOutput<float> out = model_for(c.type).Separate(ex.mixture, c);
    TargetScore s = Score(ex, target, out.target, c, true);
    if (s.si_sdr > best.si_sdr) best = std::move(s);
  }
  return best;
}

}  // namespace

EvalReport EvaluateCondition(const SeparationModel &model, const TestSet &test, ConditionType type, int threads) {
  EvalReport r;
  r.protocol = "condition";
  r.condition = ConditionTypeName(type);
  r.records = Run(
      test,
      [&](const TrainExample &ex) {
        MixtureRecord m;
        for (int k = 0; k < 2; ++k) {
          const Condition c = ConditionFor(ex.annotation, k, type);
          m.targets[k] = Score(ex, k, model.Separate(ex.mixture, c).target, c, ex.annotation.IsValid(type));
        }
        return m;
      },
      threads);
  return r;
}

EvalReport EvaluateOracleEnsemble(const std::map<ConditionType, const SeparationModel *> &models, const TestSet &test,
                                  int threads) {
  EvalReport r;
  r.protocol = "ensemble";
  const auto model_for = [&](ConditionType t) -> const SeparationModel & {
    const auto it = models.find(t);
    Require(it != models.end() && it->second != nullptr, ErrorCode::kConfig, "ensemble has no model for the ",
            ConditionTypeName(t), " condition");
    return *it->second;
  };
  r.records = Run(
      test,
      [&](const TrainExample &ex) {
        MixtureRecord m;
        for (int k = 0; k < 2; ++k) m.targets[k] = BestOver(ex, k, model_for);
        return m;
      },
      threads);
  return r;
}

EvalReport EvaluateOracleOct(const SeparationModel &model, const TestSet &test, int threads) {
  EvalReport r;
  r.protocol = "oracle-oct";
  r.records = Run(
      test,
      [&](const TrainExample &ex) {
        MixtureRecord m;
        for (int k = 0; k < 2; ++k)
          m.targets[k] = BestOver(ex, k, [&](ConditionType) -> const SeparationModel & { return model; });
        return m;
      },
      threads);
  return r;
}

EvalReport EvaluatePitOracle(const SeparationModel &model, const TestSet &test, int threads) {
  EvalReport r;
  r.protocol = "pit-oracle";
  r.records = Run(
      test,
      [&](const TrainExample &ex) {
        const SeparatorOutput<float> out = model.SeparateUnconditioned(ex.mixture);
        const std::array<const std::vector<float> *, 2> est = {&out.target, &out.other};
        std::array<std::array<double, 2>, 2> s{};  // s[slot][source]
        for (int j = 0; j < 2; ++j)
          for (int k = 0; k < 2; ++k) s[j][k] = SiSdr<float>(*est[j], ex.sources[k]);
        const int first = s[0][0] + s[1][1] >= s[1][0] + s[0][1] ? 0 : 1;
        MixtureRecord m;
        for (int k = 0; k < 2; ++k) {
          TargetScore &t = m.targets[k];
          t.condition = "pit";
          t.si_sdr = s[k == 0 ? first : 1 - first][k];
          t.mixture_si_sdr = SiSdr<float>(ex.mixture, ex.sources[k]);
          t.si_sdri = t.si_sdr - t.mixture_si_sdr;
        }
        return m;
      },
      threads);
  return r;
}

}  // namespace octsep
