#include <chrono>
#include <cstdlib>
#include <cmath>
#include <map>
#include <string>

#include "doctest.h"
#include "gradcheck.h"
#include "refine/refiner.h"
#include "base/allocator.h"
#include "separator/separator.h"

using namespace octsep;
using namespace octsep::nn;
using octsep::testing::GradRelError;

namespace {

SeparatorConfig TinySeparator() {
  SeparatorConfig c;
  c.num_blocks = 2;
  c.channels = 4;
  c.hidden_channels = 6;
  c.enc_kernel = 4;
  c.enc_stride = 2;
  c.upsampling_depth = 3;
  c.condition_dim = 3;
  return c;
}

RefinerConfig TinyRefiner() {
  RefinerConfig c;
  c.channels = 4;
  c.enc_kernel = 4;
  c.enc_stride = 2;
  c.stages = 2;
  c.stage_stride = 2;
  c.heads = 2;
  c.mixture_dim = 6;
  c.hidden = 8;
  c.condition_dim = 3;
  return c;
}

template <typename T>
std::vector<T> RandomSignal(Rng &rng, std::size_t n) {
  std::vector<T> x(n);
  for (auto &v : x) v = static_cast<T>(Gaussian(rng));
  return x;
}

template <typename M>
void RandomizeAll(M &model, Rng &rng, double scale) {
  model.Visit("", [&](const std::string &, Param<double> &p) {
    p.value += scale * Mat<double>::NullaryExpr(p.value.rows(), p.value.cols(),
                                                [&] { return Gaussian(rng); });
  });
}

}  // namespace

TEST_CASE("separator parameter count agrees with the visited parameters") {
  for (const SeparatorConfig &config : {TinySeparator(), SeparatorConfig{}}) {
    Separator<float> sep(config);
    std::int64_t visited = 0;
    sep.Visit("", [&](const std::string &, Param<float> &p) { visited += p.size(); });
    CHECK(visited == ParamCount(config));
  }
  // Desk configuration: 64 channels, 128 hidden, 2 blocks, d_c 128.
  const std::int64_t C = 64, H = 128, K = 21, D = 4, dc = 128;
  const std::int64_t block = 2 * (C * dc + C) + H * C + H + 2 * H + H + D * 6 * H + 2 * H + H + C * H + C;
  CHECK(ParamCount(SeparatorConfig{}) == C * K + 2 * C + C * C + C + 2 * block + C + 2 * C * C + 2 * C + C * K);
}

TEST_CASE("separator outputs are mixture consistent and length preserving") {
  Rng rng(11);
  Separator<float> sep(TinySeparator());
  sep.Init(rng);
  for (std::size_t n : {std::size_t{7}, std::size_t{30}, std::size_t{101}}) {
    const std::vector<float> x = RandomSignal<float>(rng, n);
    Vec<float> c = Vec<float>::Random(3);
    const SeparatorOutput<float> y = sep.Forward(x, c, nullptr);
    REQUIRE(y.target.size() == n);
    REQUIRE(y.other.size() == n);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(y.target[i] + y.other[i] - x[i]) <= 1e-5f * (1 + std::abs(x[i])));
  }
}

TEST_CASE("separator is deterministic for a fixed seed") {
  auto run = [] {
    Rng rng(12);
    Separator<float> sep(TinySeparator());
    sep.Init(rng);
    const std::vector<float> x = RandomSignal<float>(rng, 50);
    return sep.Forward(x, Vec<float>::Ones(3), nullptr).target;
  };
  CHECK(run() == run());
}

TEST_CASE("separator responds to the condition only through film") {
  Rng rng(13);
  Separator<double> sep(TinySeparator());
  sep.Init(rng);
  const std::vector<double> x = RandomSignal<double>(rng, 40);
  // Identity film: the condition has no effect until film weights move.
  const auto a = sep.Forward(x, Vec<double>::Constant(3, 1.0), nullptr);
  const auto b = sep.Forward(x, Vec<double>::Constant(3, -2.0), nullptr);
  CHECK(a.target == b.target);
  sep.film(0).gamma.w.value(0, 0) = 0.5;
  const auto c = sep.Forward(x, Vec<double>::Constant(3, -2.0), nullptr);
  CHECK(a.target != c.target);
}

TEST_CASE("separator gradients match central differences") {
  Rng rng(14);
  Separator<double> sep(TinySeparator());
  sep.Init(rng);
  RandomizeAll(sep, rng, 0.3);
  const std::size_t n = 31;
  const std::vector<double> x = RandomSignal<double>(rng, n);
  const std::vector<double> wt = RandomSignal<double>(rng, n), wo = RandomSignal<double>(rng, n);
  Mat<double> cond = Mat<double>::Random(3, 1);
  auto loss = [&] {
    const auto y = sep.Forward(x, cond.col(0), nullptr);
    double s = 0;
    for (std::size_t i = 0; i < n; ++i) s += wt[i] * y.target[i] + wo[i] * y.other[i];
    return s;
  };
  Separator<double>::Cache cache;
  sep.Forward(x, cond.col(0), &cache);
  sep.Visit("", [](const std::string &, Param<double> &p) { p.ZeroGrad(); });
  const Mat<double> dc = sep.Backward(cache, wt, wo);
  CHECK(GradRelError(cond, dc, loss) <= 1e-4);
  int checked = 0;
  sep.Visit("", [&](const std::string &name, Param<double> &p) {
    const Mat<double> grad = p.grad;
    const double err = GradRelError(p.value, grad, loss);
    INFO(name);
    CHECK(err <= 1e-4);
    ++checked;
  });
  CHECK(checked > 20);
}

TEST_CASE("refiner pass-through initialization returns the condition exactly") {
  Rng rng(21);
  Refiner<float> ref(TinyRefiner());
  ref.Init(rng, RefinerInit::kPassThrough);
  for (int trial = 0; trial < 20; ++trial) {
    const std::vector<float> x = RandomSignal<float>(rng, 16 + 13 * trial);
    const Vec<float> c = Vec<float>::Random(3) * 5.0f;
    CHECK(ref.Refine(x, c) == c);
  }
  Refiner<float> desk(RefinerConfig{});
  desk.Init(rng, RefinerInit::kPassThrough);
  const Vec<float> c = Vec<float>::Random(128);
  CHECK(desk.Refine(RandomSignal<float>(rng, 8000), c) == c);
}

TEST_CASE("refiner mixture embedding is nearly invariant to trailing zero padding") {
  Rng rng(22);
  Refiner<double> ref(RefinerConfig{});
  ref.Init(rng, RefinerInit::kRandom);
  std::vector<double> x = RandomSignal<double>(rng, 16000);
  const Vec<double> a = ref.EncodeMixture(x, nullptr);
  x.resize(16000 + 160, 0.0);
  const Vec<double> b = ref.EncodeMixture(x, nullptr);
  // Attention pooling weights the zero-input frames as bias-only frames; a
  // 1% pad moves the embedding by a small relative amount.
  CHECK((a - b).norm() / a.norm() < 0.05);
}

TEST_CASE("refiner gradients match central differences") {
  Rng rng(23);
  Refiner<double> ref(TinyRefiner());
  ref.Init(rng, RefinerInit::kRandom);
  const std::size_t n = 16;
  Mat<double> xm = Mat<double>::Random(static_cast<Eigen::Index>(n), 1);
  Mat<double> cond = Mat<double>::Random(3, 1);
  const Mat<double> w = Mat<double>::Random(3, 1);
  auto x_span = [&] { return std::span<const double>(xm.data(), n); };
  auto loss = [&] { return (ref.Refine(x_span(), cond.col(0)).array() * w.col(0).array()).sum(); };

  ref.Visit("", [](const std::string &, Param<double> &p) { p.ZeroGrad(); });
  Refiner<double>::MixtureCache mc;
  Refiner<double>::RefineCache rc;
  const Vec<double> phi = ref.EncodeMixture(x_span(), &mc);
  ref.RefineEncoded(phi, cond.col(0), &rc);
  Vec<double> d_phi = Vec<double>::Zero(phi.size());
  const Mat<double> dc = ref.RefineBackward(rc, w.col(0), &d_phi);
  const std::vector<double> dx = ref.EncodeMixtureBackward(mc, d_phi, true);
  REQUIRE(dx.size() == n);

  CHECK(GradRelError(cond, dc, loss) <= 1e-4);
  CHECK(GradRelError(xm, Eigen::Map<const Mat<double>>(dx.data(), n, 1), loss) <= 1e-4);
  ref.Visit("", [&](const std::string &name, Param<double> &p) {
    const Mat<double> grad = p.grad;
    INFO(name);
    CHECK(GradRelError(p.value, grad, loss) <= 1e-4);
  });
}

TEST_CASE("desk separator forward and backward throughput" * doctest::skip(std::getenv("OCTSEP_TIMING") == nullptr)) {
  RetainHeapMemory();
  Rng rng(31);
  Separator<float> sep(SeparatorConfig{});
  sep.Init(rng);
  const std::vector<float> x = RandomSignal<float>(rng, 32000);
  const Vec<float> c = Vec<float>::Random(128);
  Separator<float>::Cache cache;
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < 10; ++i) sep.Forward(x, c, nullptr);
  const auto t1 = std::chrono::steady_clock::now();
  for (int i = 0; i < 10; ++i) {
    sep.Forward(x, c, &cache);
    sep.Backward(cache, x, x);
  }
  const auto t2 = std::chrono::steady_clock::now();
  MESSAGE("forward ms: " << std::chrono::duration<double, std::milli>(t1 - t0).count() / 10);
  MESSAGE("forward+backward ms: " << std::chrono::duration<double, std::milli>(t2 - t1).count() / 10);
}
