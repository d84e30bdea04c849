#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "conditioning/condition.h"
#include "conditioning/condition_encoder.h"
#include "conditioning/text_embed.h"
#include "doctest.h"
#include "test_util.h"

using namespace octsep;

namespace {

Waveform Constant(double level, std::size_t n = 8000) { return Waveform(std::vector<double>(n, level), 8000); }

SourceMetadata Meta(const std::string &cls, const std::string &harm) { return {cls, "S", harm, cls}; }

}  // namespace

TEST_CASE("annotation of the guitar and dog-bark mixture") {
  // Energies 1.0 and 0.5 after gains: unit-energy source, then sqrt(0.5) gain.
  const Waveform guitar = Constant(std::sqrt(1.0 / 8000)), bark = Constant(std::sqrt(1.0 / 8000));
  const ConditionAnnotation a =
      Annotate({guitar, bark}, {1.0, std::sqrt(0.5)}, {Meta("Guitar", "harmonic"), Meta("Dog bark", "percussive")},
               {0.0, 1.0});
  CHECK(a.energies[0] == doctest::Approx(1.0));
  CHECK(a.energies[1] == doctest::Approx(0.5));
  CHECK(a.sources[0].energy == "high");
  CHECK(a.sources[0].harmonicity == "harmonic");
  CHECK(a.sources[0].order == "first");
  CHECK(a.sources[0].text == "Guitar");
  CHECK(a.sources[1].energy == "low");
  CHECK(a.sources[1].order == "second");
  for (ConditionType t : kAllConditionTypes) CHECK(a.IsValid(t));
  CHECK(EquivalentConditions(a, 0).size() == 4);
  CHECK(ConditionFor(a, 0, ConditionType::kEnergy).ToString() == "energy:high");
  CHECK(ConditionFor(a, 1, ConditionType::kText).ToString() == "text:Dog bark");
}

TEST_CASE("validity rules") {
  const Waveform s = Constant(0.1);
  SUBCASE("shared harmonicity tag") {
    const auto a = Annotate({s, s}, {1.0, 0.5}, {Meta("A", "harmonic"), Meta("B", "harmonic")}, {0.0, 1.0});
    CHECK_FALSE(a.IsValid(ConditionType::kHarmonicity));
    CHECK(a.IsValid(ConditionType::kEnergy));
    CHECK(a.IsValid(ConditionType::kOrder));
    CHECK(a.IsValid(ConditionType::kText));
  }
  SUBCASE("onsets closer than 50 ms") {
    const auto a = Annotate({s, s}, {1.0, 0.5}, {Meta("A", "harmonic"), Meta("B", "percussive")}, {0.0, 0.02});
    CHECK_FALSE(a.IsValid(ConditionType::kOrder));
    const auto eq = EquivalentConditions(a, 1);
    CHECK(eq.size() == 3);
  }
  SUBCASE("harmonicity and order invalid leave energy and text") {
    const auto a = Annotate({s, s}, {1.0, 0.5}, {Meta("A", "harmonic"), Meta("B", "harmonic")}, {0.3, 0.3});
    const auto eq = EquivalentConditions(a, 0);
    REQUIRE(eq.size() == 2);
    CHECK(eq[0].ToString() == "energy:high");
    CHECK(eq[1].ToString() == "text:A");
  }
  SUBCASE("energy ties go to the lower index") {
    const auto a = Annotate({s, s}, {1.0, 1.0}, {Meta("A", "harmonic"), Meta("B", "percussive")}, {0.0, 1.0});
    CHECK(a.sources[0].energy == "high");
    CHECK(a.sources[1].energy == "low");
  }
  SUBCASE("missing metadata") {
    CHECK_THROWS_AS(Annotate({s, s}, {1, 1}, {Meta("A", ""), Meta("B", "harmonic")}, {0, 1}), Error);
    CHECK_THROWS_AS(Annotate({s, s}, {1, 1}, {{"", "S", "harmonic", ""}, Meta("B", "harmonic")}, {0, 1}), Error);
    CHECK_THROWS_AS(Annotate({s}, {1}, {Meta("A", "harmonic")}, {0}), Error);
  }
}

TEST_CASE("equivalent condition sets of the two targets are disjoint") {
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    const Waveform a = octsep::testing::RandomWave(rng, 400), b = octsep::testing::RandomWave(rng, 400);
    const auto ann = Annotate({a, b}, {1.0, Uniform(rng, 0.2, 2.0)},
                              {Meta("A", UniformIndex(rng, 2) ? "harmonic" : "percussive"),
                               Meta("B", UniformIndex(rng, 2) ? "harmonic" : "percussive")},
                              {Uniform(rng, 0, 1), Uniform(rng, 0, 1)});
    const auto e0 = EquivalentConditions(ann, 0), e1 = EquivalentConditions(ann, 1);
    CHECK(e0.size() == e1.size());
    CHECK(e0.back().type == ConditionType::kText);
    for (const Condition &c : e0)
      for (const Condition &d : e1) CHECK_FALSE(c == d);
  }
}

TEST_CASE("discrete vocabulary indices") {
  CHECK(DiscreteIndex({ConditionType::kEnergy, "high"}) == 0);
  CHECK(DiscreteIndex({ConditionType::kEnergy, "low"}) == 1);
  CHECK(DiscreteIndex({ConditionType::kHarmonicity, "harmonic"}) == 2);
  CHECK(DiscreteIndex({ConditionType::kHarmonicity, "percussive"}) == 3);
  CHECK(DiscreteIndex({ConditionType::kOrder, "first"}) == 4);
  CHECK(DiscreteIndex({ConditionType::kOrder, "second"}) == 5);
  CHECK_THROWS_AS(DiscreteIndex({ConditionType::kOrder, "third"}), Error);
  CHECK_THROWS_AS(DiscreteIndex({ConditionType::kText, "Dog"}), Error);
  CHECK(ParseConditionType("harmonicity") == ConditionType::kHarmonicity);
  CHECK_THROWS_AS(ParseConditionType("loudness"), Error);
}

TEST_CASE("hashed text embedding") {
  const HashedTextEmbedder emb(16, 64, 9);
  SUBCASE("single token equals its bucket vector") {
    const auto v = emb.Embed("Guitar");
    CHECK(v == emb.BucketVector(emb.BucketOf("guitar")));
  }
  SUBCASE("mean of bucket vectors, renormalized") {
    const auto v = emb.Embed("Dog  bark");
    const auto &a = emb.BucketVector(emb.BucketOf("dog")), &b = emb.BucketVector(emb.BucketOf("bark"));
    std::vector<double> m(16);
    double norm = 0.0;
    for (int i = 0; i < 16; ++i) norm += (m[i] = 0.5 * (a[i] + b[i])) * m[i];
    for (int i = 0; i < 16; ++i) CHECK(v[i] == doctest::Approx(m[i] / std::sqrt(norm)).epsilon(1e-12));
  }
  SUBCASE("bucket index is fnv-1a modulo the bucket count") {
    CHECK(emb.BucketOf("organ") == static_cast<int>(Fnv1a64("organ") % 64));
  }
  SUBCASE("case folding and unit norm") {
    CHECK(emb.Embed("SYNTH Lead") == emb.Embed("synth lead"));
    for (const char *t : {"a", "violin-like tone", "x y z w"}) {
      double n = 0.0;
      for (double x : emb.Embed(t)) n += x * x;
      CHECK(n == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK_THROWS_AS(emb.Embed("   "), Error);
  }
  SUBCASE("seeded and deterministic") {
    CHECK(HashedTextEmbedder(16, 64, 9).Embed("rain") == emb.Embed("rain"));
    CHECK(HashedTextEmbedder(16, 64, 10).Embed("rain") != emb.Embed("rain"));
  }
}

TEST_CASE("token-table text embedding") {
  const auto dir = octsep::testing::ScratchDir("token_table");
  std::ofstream(dir / "t.txt") << "dog\t1 0 0\nbark\t0 2 0\n";
  const TokenTableEmbedder mean((dir / "t.txt").string(), TextPooling::kMean);
  CHECK(mean.dim() == 3);
  const auto v = mean.Embed("Dog bark unknown");
  CHECK(v[0] == doctest::Approx(1.0 / std::sqrt(5.0) * 1.0 / 1.0 * 1.0).epsilon(1e-12));
  CHECK(v[1] == doctest::Approx(2.0 / std::sqrt(5.0)).epsilon(1e-12));
  const TokenTableEmbedder first((dir / "t.txt").string(), TextPooling::kFirstToken);
  CHECK(first.Embed("bark dog") == std::vector<double>{0.0, 1.0, 0.0});
  TextEmbedderConfig cfg;
  cfg.backend = TextBackend::kExternal;
  cfg.table_path = (dir / "missing.txt").string();
  try {
    MakeTextEmbedder(cfg);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::kUnsupported);
    CHECK(std::string(e.what()).find("hashed") != std::string::npos);
  }
}

TEST_CASE("condition encoder") {
  auto text = std::make_shared<HashedTextEmbedder>(8, 32, 1);
  ConditionEncoder<double> enc(5, text);
  Rng rng(2);
  enc.Init(rng);
  const Condition high{ConditionType::kEnergy, "high"}, guitar{ConditionType::kText, "Guitar"};
  CHECK(enc.Encode(high).size() == 5);
  CHECK(enc.Encode(guitar).size() == 5);
  CHECK(enc.Encode(high) == enc.Encode(high));
  CHECK(enc.Encode(high) != enc.Encode({ConditionType::kEnergy, "low"}));
  CHECK(enc.Encode(guitar).allFinite());
  CHECK_THROWS_AS(enc.Encode({ConditionType::kEnergy, "loud"}), Error);

  // Gradients land on the one-hot column or the projection.
  enc.Visit("", [](const std::string &, nn::Param<double> &p) { p.ZeroGrad(); });
  enc.Backward(high, nn::Vec<double>::Ones(5));
  enc.Backward(guitar, nn::Vec<double>::Ones(5));
  enc.Visit("", [&](const std::string &name, nn::Param<double> &p) {
    if (name == "discrete") {
      CHECK(p.grad.col(0).sum() == 5.0);
      CHECK(p.grad.col(1).sum() == 0.0);
    }
    if (name == "text_proj.b") CHECK(p.grad.sum() == 5.0);
    if (name == "null") CHECK(p.grad.sum() == 0.0);
  });
}
