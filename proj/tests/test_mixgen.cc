#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"
#include "mixgen/corpus.h"
#include "mixgen/mixture.h"
#include "mixgen/synth_corpus.h"
#include "signal/wav_io.h"
#include "test_util.h"

using namespace octsep;
using octsep::testing::ScratchDir;

namespace {

// Synthetic corpus shared by every test case in this binary.
std::shared_ptr<const Corpus> SharedCorpus() {
  static std::shared_ptr<const Corpus> corpus = [] {
    const auto dir = ScratchDir("mixgen_corpus");
    return std::make_shared<const Corpus>(SynthCorpus(SynthCorpusSpec{}, dir.string()));
  }();
  return corpus;
}

std::shared_ptr<const ClipStore> SharedClips() {
  static auto clips = std::make_shared<const ClipStore>(SharedCorpus(), 8000);
  return clips;
}

std::string Slurp(const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const std::filesystem::path &p, const std::string &text) { std::ofstream(p) << text; }

std::string Row(const std::string &path, const std::string &cls, const std::string &sup, const std::string &harm) {
  return path + "\t" + cls + "\t" + sup + "\t" + harm + "\t1.5\t8000\n";
}

}  // namespace

TEST_CASE("manifest loading validates rows") {
  const auto dir = ScratchDir("manifest");
  SUBCASE("four valid rows") {
    WriteText(dir / "m.tsv", std::string(kManifestHeader) + "\n" + Row("a.wav", "Dog", "Animal", "percussive") +
                                 Row("b.wav", "Cat", "Animal", "harmonic") + Row("c.wav", "Dog", "Animal", "percussive") +
                                 Row("/abs/d.wav", "Guitar", "Music", "harmonic"));
    const Corpus c = LoadManifest((dir / "m.tsv").string());
    CHECK(c.entries().size() == 4);
    CHECK(c.classes() == std::vector<std::string>{"Cat", "Dog", "Guitar"});
    CHECK(c.ClipsOf(c.ClassIndex("Dog")) == std::vector<int>{0, 2});
    CHECK(c.ResolvePath(c.entries()[0]) == (dir / "a.wav").string());
    CHECK(c.ResolvePath(c.entries()[3]) == "/abs/d.wav");
  }
  SUBCASE("empty super-class names the row") {
    WriteText(dir / "m.tsv", "# c\n" + Row("a.wav", "Dog", "Animal", "percussive") + Row("b.wav", "Cat", "", "harmonic"));
    try {
      LoadManifest((dir / "m.tsv").string());
      FAIL("expected an error");
    } catch (const Error &e) {
      CHECK(e.code() == ErrorCode::kData);
      CHECK(std::string(e.what()).find(":3:") != std::string::npos);
    }
  }
  SUBCASE("other errors") {
    CHECK_THROWS_AS(LoadManifest((dir / "missing.tsv").string()), Error);
    WriteText(dir / "m.tsv", "a.wav\tDog\tAnimal\n");
    CHECK_THROWS_AS(LoadManifest((dir / "m.tsv").string()), Error);
    WriteText(dir / "m.tsv", Row("a.wav", "Dog", "Animal", ""));
    CHECK_THROWS_AS(LoadManifest((dir / "m.tsv").string()), Error);
    WriteText(dir / "m.tsv", Row("a.wav", "Dog", "Animal", "percussive") + Row("b.wav", "Dog", "Pet", "percussive"));
    CHECK_THROWS_AS(LoadManifest((dir / "m.tsv").string()), Error);
  }
}

TEST_CASE("synthetic corpus layout") {
  const Corpus &c = *SharedCorpus();
  CHECK(c.entries().size() == 200);
  CHECK(c.classes().size() == 8);
  CHECK(c.SuperClasses() == std::vector<std::string>{"Harmonic", "Percussive"});
  std::map<std::string, int> per_super;
  for (int k = 0; k < 8; ++k) {
    ++per_super[c.SuperClassOf(k)];
    CHECK(c.ClipsOf(k).size() == 25);
  }
  CHECK(per_super["Harmonic"] == 4);
  CHECK(per_super["Percussive"] == 4);
  for (const CorpusEntry &e : c.entries()) {
    CHECK(e.duration_s >= 1.5);
    CHECK(e.duration_s <= 4.0);
    CHECK((e.harmonicity == "harmonic") == (e.super_class == "Harmonic"));
  }
}

TEST_CASE("synthetic harmonic clips are less flat than every percussive clip") {
  const Corpus &c = *SharedCorpus();
  const auto clips = SharedClips();
  double max_harmonic = 0.0, min_percussive = 1.0;
  for (std::size_t i = 0; i < c.entries().size(); ++i) {
    const double f = SpectralFlatness(clips->Get(static_cast<int>(i))->wave);
    if (c.entries()[i].harmonicity == "harmonic")
      max_harmonic = std::max(max_harmonic, f);
    else
      min_percussive = std::min(min_percussive, f);
  }
  MESSAGE("max harmonic flatness " << max_harmonic << ", min percussive flatness " << min_percussive);
  CHECK(max_harmonic < min_percussive);
}

TEST_CASE("synthetic corpus regeneration is byte identical") {
  SynthCorpusSpec spec;
  spec.clips_per_class = 2;
  const auto a = ScratchDir("synth_a"), b = ScratchDir("synth_b");
  SynthCorpus(spec, a.string());
  SynthCorpus(spec, b.string());
  int files = 0;
  for (const auto &item : std::filesystem::recursive_directory_iterator(a)) {
    if (!item.is_regular_file()) continue;
    const auto rel = std::filesystem::relative(item.path(), a);
    CHECK(Slurp(item.path()) == Slurp(b / rel));
    ++files;
  }
  CHECK(files == 16 + 3);
}

TEST_CASE("class-tree scan reproduces the synthetic manifest") {
  const auto dir = ScratchDir("scan");
  SynthCorpusSpec spec;
  spec.clips_per_class = 2;
  const Corpus made = SynthCorpus(spec, dir.string());
  std::vector<CorpusEntry> scanned =
      ScanClassTree(dir.string(), (dir / "ontology.tsv").string(), (dir / "harmonicity.tsv").string());
  REQUIRE(scanned.size() == made.entries().size());
  std::set<std::string> a, b;
  for (const auto &e : scanned) a.insert(e.path + "|" + e.class_name + "|" + e.super_class + "|" + e.harmonicity);
  for (const auto &e : made.entries())
    b.insert(e.path + "|" + e.class_name + "|" + e.super_class + "|" + e.harmonicity);
  CHECK(a == b);
  WriteText(dir / "ontology.tsv", "Organ\tHarmonic\n");
  CHECK_THROWS_AS(ScanClassTree(dir.string(), (dir / "ontology.tsv").string(), (dir / "harmonicity.tsv").string()),
                  Error);
}

TEST_CASE("fsd50k adapter keeps single-label clips of known classes") {
  const auto dir = ScratchDir("fsd");
  std::filesystem::create_directories(dir / "FSD50K.ground_truth");
  std::filesystem::create_directories(dir / "FSD50K.dev_audio");
  Rng rng(3);
  for (const char *name : {"1", "2", "3"})
    WriteWav((dir / "FSD50K.dev_audio" / (std::string(name) + ".wav")).string(),
             octsep::testing::RandomWave(rng, 800, 44100, 0.1));
  WriteText(dir / "FSD50K.ground_truth" / "dev.csv",
            "fname,labels,mids,split\n1,Bark,/m/1,train\n2,\"Bark,Dog\",\"/m/1,/m/2\",train\n3,Guitar,/m/3,val\n");
  WriteText(dir / "ont.tsv", "Bark\tAnimal\nGuitar\tMusic\n");
  WriteText(dir / "harm.tsv", "Bark\tpercussive\nGuitar\tharmonic\n");
  const auto entries = ScanFsd50k(dir.string(), (dir / "ont.tsv").string(), (dir / "harm.tsv").string());
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].class_name == "Bark");
  CHECK(entries[1].class_name == "Guitar");
  CHECK(entries[1].sample_rate == 44100);
  CHECK(entries[1].duration_s == doctest::Approx(800.0 / 44100));
}

TEST_CASE("pair sampling honours the strategy on every draw") {
  const Corpus &c = *SharedCorpus();
  Rng rng(7);
  for (int i = 0; i < 1000; ++i) {
    const ClipPair d = SamplePair(c, PairStrategy::kDifferentSuperclass, rng);
    CHECK(c.entries()[d.entries[0]].super_class != c.entries()[d.entries[1]].super_class);
    const ClipPair s = SamplePair(c, PairStrategy::kSameSuperclass, rng);
    CHECK(c.entries()[s.entries[0]].super_class == c.entries()[s.entries[1]].super_class);
    CHECK(c.entries()[s.entries[0]].class_name != c.entries()[s.entries[1]].class_name);
  }
}

TEST_CASE("random pairing is uniform over the 28 class pairs") {
  const Corpus &c = *SharedCorpus();
  Rng rng(8);
  std::map<std::pair<std::string, std::string>, int> counts;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) {
    const ClipPair p = SamplePair(c, PairStrategy::kRandom, rng);
    std::string a = c.entries()[p.entries[0]].class_name, b = c.entries()[p.entries[1]].class_name;
    REQUIRE(a != b);
    if (b < a) std::swap(a, b);
    ++counts[{a, b}];
  }
  CHECK(counts.size() == 28);
  const double p = 1.0 / 28, mean = draws * p, sigma = std::sqrt(draws * p * (1 - p));
  for (const auto &[pair, n] : counts) CHECK(std::abs(n - mean) <= 3 * sigma);
}

TEST_CASE("unsatisfiable strategies are rejected") {
  std::vector<CorpusEntry> entries = {{"a.wav", "A", "S", "harmonic", 1.0, 8000},
                                      {"b.wav", "B", "S", "harmonic", 1.0, 8000}};
  const Corpus one_super(entries, "");
  Rng rng(1);
  CHECK_THROWS_AS(SamplePair(one_super, PairStrategy::kDifferentSuperclass, rng), Error);
  CHECK_NOTHROW(SamplePair(one_super, PairStrategy::kSameSuperclass, rng));
  entries[1].super_class = "T";
  const Corpus two_super(entries, "");
  CHECK_THROWS_AS(SamplePair(two_super, PairStrategy::kSameSuperclass, rng), Error);
  const Corpus single({entries[0]}, "");
  CHECK_THROWS_AS(SamplePair(single, PairStrategy::kRandom, rng), Error);
}

TEST_CASE("synthesized mixtures satisfy the sample invariants") {
  const auto clips = SharedClips();
  for (const char *name : {"hard", "easy"}) {
    const MixturePreset preset = NamedPreset(name);
    const DatasetStream stream(clips, preset, 1000, 99);
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const MixtureSample s = stream.Get(0, i);
      REQUIRE(s.mixture.size() == 40000);
      REQUIRE(s.sources[0].size() == 40000);
      double err = 0.0;
      for (std::size_t n = 0; n < s.mixture.size(); ++n)
        err = std::max(err, std::abs(s.mixture.samples[n] - s.sources[0].samples[n] - s.sources[1].samples[n]));
      CHECK(err <= 1e-6 * std::sqrt(Energy(s.mixture) / s.mixture.size()) * 10);
      CHECK(s.snr_db >= preset.snr_lo_db);
      CHECK(s.snr_db <= preset.snr_hi_db);
      CHECK(SnrDb(s.sources[0].span(), s.sources[1].span()) == doctest::Approx(s.snr_db).epsilon(1e-9));
      CHECK(s.overlap >= preset.min_overlap);
      CHECK(s.overlap <= 1.0);
      CHECK(s.annotation.energies[0] >= s.annotation.energies[1]);
      CHECK(s.annotation.IsValid(ConditionType::kText));
      CHECK(s.metadata[0].class_name != s.metadata[1].class_name);
    }
  }
}

TEST_CASE("mixture generation is a pure function of the seed") {
  const auto clips = SharedClips();
  const DatasetStream stream(clips, NamedPreset("hard"), 100, 1234);
  const MixtureSample a = stream.Get(3, 17), b = stream.Get(3, 17);
  CHECK(a.mixture.samples == b.mixture.samples);
  CHECK(a.sources[1].samples == b.sources[1].samples);
  CHECK(a.snr_db == b.snr_db);
  CHECK(stream.Get(4, 17).mixture.samples != a.mixture.samples);

  const ClipPair pair{{0, 30}};
  CHECK(Synthesize(*clips, pair, NamedPreset("hard"), 1234).mixture.samples ==
        Synthesize(*clips, pair, NamedPreset("hard"), 1234).mixture.samples);

  // Two workers visiting indices in opposite orders produce the same samples.
  std::map<std::size_t, std::vector<double>> forward, backward;
  for (std::size_t i = 0; i < 100; ++i) forward[i] = stream.Get(0, i).mixture.samples;
  for (std::size_t i = 100; i-- > 0;) backward[i] = stream.Get(0, i).mixture.samples;
  CHECK(forward == backward);
}

TEST_CASE("full-length fully active clips overlap completely") {
  const auto dir = ScratchDir("fullclips");
  Rng rng(5);
  WriteWav((dir / "a.wav").string(), octsep::testing::RandomWave(rng, 40000, 8000, 0.1));
  WriteWav((dir / "b.wav").string(), octsep::testing::RandomWave(rng, 48000, 8000, 0.1));
  auto corpus = std::make_shared<const Corpus>(
      std::vector<CorpusEntry>{{"a.wav", "A", "S", "percussive", 5.0, 8000},
                               {"b.wav", "B", "T", "percussive", 6.0, 8000}},
      dir.string());
  const ClipStore store(corpus, 8000);
  const MixtureSample s = Synthesize(store, ClipPair{{0, 1}}, NamedPreset("hard"), 42);
  CHECK(s.overlap == 1.0);
  CHECK(!s.annotation.IsValid(ConditionType::kHarmonicity));
}

TEST_CASE("presets") {
  const MixturePreset hard = NamedPreset("hard"), easy = NamedPreset("easy");
  CHECK(hard.snr_hi_db == 2.5);
  CHECK(hard.min_overlap == 0.8);
  CHECK(easy.snr_hi_db == 5.0);
  CHECK(easy.min_overlap == 0.6);
  CHECK(hard.num_samples() == 40000);
  CHECK(NamedSizes("paper").train == 20000);
  CHECK(NamedSizes("paper").validation == 3000);
  CHECK(NamedSizes("paper").test == 5000);
  CHECK(NamedSizes("desk").train == 2000);
  CHECK(NamedSizes("desk").test == 500);
  CHECK_THROWS_AS(NamedPreset("medium"), Error);
  MixturePreset bad = hard;
  bad.duration_s = 5.00001;
  CHECK_THROWS_AS(bad.Validate(), Error);
  CHECK(ParsePairStrategy("different-superclass") == PairStrategy::kDifferentSuperclass);
  CHECK_THROWS_AS(ParsePairStrategy("mixed"), Error);
}
