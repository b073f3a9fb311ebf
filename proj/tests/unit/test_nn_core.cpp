#include <numbers>

#include "doctest.h"
#include "drx/nn/gradcheck.hpp"
#include "drx/nn/layers.hpp"
#include "drx/nn/optim.hpp"
#include "drx/rng.hpp"

using namespace drx;
using namespace drx::nn;
using Map = FeatureMap<double>;

namespace {

Map random_map(int b, int h, int c, Rng& rng, double scale = 1.0) {
  Map x(b, h, c);
  std::normal_distribution<double> nd(0.0, scale);
  for (auto& v : x.values) v = nd(rng);
  return x;
}

// Naive same-padded convolution: y[b,i,k] = bias[k] + sum_p sum_c w[p,c,k] x[b, i+p-(P-1)/2, c].
Map naive_conv(const Map& x, const ConvLayer<double>& l) {
  const int P = l.width(), C = l.in_channels(), K = l.out_channels(), half = (P - 1) / 2;
  Map y(x.batch, x.length, K);
  for (int b = 0; b < x.batch; ++b)
    for (int i = 0; i < x.length; ++i)
      for (int k = 0; k < K; ++k) {
        double acc = l.bias.value[k];
        for (int p = 0; p < P; ++p) {
          const int j = i + p - half;
          if (j < 0 || j >= x.length) continue;
          for (int c = 0; c < C; ++c) acc += l.kernel.value[(p * C + c) * K + k] * x.at(b, j, c);
        }
        y.at(b, i, k) = acc;
      }
  return y;
}

double dot(const Map& a, const Map& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

std::pair<std::vector<double>, std::vector<double>> channel_stats(const Map& y) {
  std::vector<double> mean(y.channels, 0.0), var(y.channels, 0.0);
  const double n = static_cast<double>(y.batch) * y.length;
  for (int b = 0; b < y.batch; ++b)
    for (int i = 0; i < y.length; ++i)
      for (int c = 0; c < y.channels; ++c) mean[c] += y.at(b, i, c) / n;
  for (int b = 0; b < y.batch; ++b)
    for (int i = 0; i < y.length; ++i)
      for (int c = 0; c < y.channels; ++c) var[c] += std::pow(y.at(b, i, c) - mean[c], 2) / n;
  return {mean, var};
}

}  // namespace

TEST_CASE("conv1d: identity kernel and naive-loop oracle") {
  Rng rng(1);
  ConvLayer<double> id("id", 1, 3, 3);
  for (int c = 0; c < 3; ++c) id.kernel.value[c * 3 + c] = 1.0;
  const auto x = random_map(2, 9, 3, rng);
  CHECK(conv1d_forward(x, id).values == x.values);

  ConvLayer<double> l("c", 5, 2, 3);
  l.init(rng);
  for (auto& b : l.bias.value) b = std::normal_distribution<double>()(rng);
  const auto x7 = random_map(1, 7, 2, rng);
  const auto got = conv1d_forward(x7, l);
  const auto want = naive_conv(x7, l);
  for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got.values[i] - want.values[i]) < 1e-12);

  CHECK_THROWS_AS(conv1d_forward(random_map(1, 7, 3, rng), l), std::invalid_argument);
  CHECK_THROWS_AS(ConvLayer<double>("even", 4, 2, 2), std::invalid_argument);
}

TEST_CASE("conv1d: superposition with zero bias") {
  Rng rng(2);
  ConvLayer<double> l("c", 5, 3, 4);
  l.init(rng);
  const auto a = random_map(2, 12, 3, rng), b = random_map(2, 12, 3, rng);
  Map s = a;
  for (std::size_t i = 0; i < s.size(); ++i) s.values[i] = 2.0 * a.values[i] - 0.5 * b.values[i];
  const auto ya = conv1d_forward(a, l), yb = conv1d_forward(b, l), ys = conv1d_forward(s, l);
  for (std::size_t i = 0; i < ys.size(); ++i)
    CHECK(std::abs(ys.values[i] - (2.0 * ya.values[i] - 0.5 * yb.values[i])) < 1e-10);
}

TEST_CASE("conv1d backward: zero upstream and finite differences") {
  Rng rng(3);
  ConvLayer<double> l("c", 5, 2, 3);
  l.init(rng);
  const auto x = random_map(2, 8, 2, rng);
  const auto z = conv1d_backward(x, l, Map(2, 8, 3));
  for (auto v : z.grad_x.values) CHECK(v == 0.0);
  for (auto v : z.grad_kernel) CHECK(v == 0.0);
  for (auto v : z.grad_bias) CHECK(v == 0.0);
  CHECK_THROWS_AS(conv1d_backward(x, l, Map(2, 7, 3)), std::invalid_argument);

  const auto r = random_map(2, 8, 3, rng);
  std::vector<Param<double>*> ps{&l.kernel, &l.bias};
  const auto rep = grad_check(
      ps, [&] { return dot(conv1d_forward(x, l), r); },
      [&] {
        auto g = conv1d_backward(x, l, r);
        l.kernel.grad = g.grad_kernel;
        l.bias.grad = g.grad_bias;
      },
      1e-6, 9);
  CHECK(rep.pass);
  CHECK(rep.max_error() < 1e-6);

  // Input gradient by central differences.
  const auto g = conv1d_backward(x, l, r);
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    Map xp = x, xm = x;
    xp.values[i] += 1e-5;
    xm.values[i] -= 1e-5;
    const double num = (dot(conv1d_forward(xp, l), r) - dot(conv1d_forward(xm, l), r)) / 2e-5;
    worst = std::max(worst, std::abs(num - g.grad_x.values[i]) / std::max(1e-3, std::abs(num)));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("batchnorm: train statistics, affine postcondition, inference") {
  Rng rng(4);
  auto x = random_map(4, 50, 3, rng, 5.0);
  for (int b = 0; b < 4; ++b)
    for (int i = 0; i < 50; ++i) x.at(b, i, 1) += 7.0;
  BatchNormState<double> bn("bn", 3);
  auto y = batchnorm_forward(x, bn, Mode::train);
  auto [m, v] = channel_stats(y);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(m[c]) < 1e-6);
    CHECK(std::abs(v[c] - 1.0) < 1e-6);
  }
  bn.scale.value.assign(3, 2.0);
  bn.offset.value.assign(3, 3.0);
  y = batchnorm_forward(x, bn, Mode::train);
  std::tie(m, v) = channel_stats(y);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::abs(m[c] - 3.0) < 1e-5);
    CHECK(std::abs(std::sqrt(v[c]) - 2.0) < 1e-5);
  }

  BatchNormState<double> inf("bn", 2);
  inf.running_mean = {0.7, -1.2};
  inf.running_var = {2.0, 0.5};
  inf.offset.value = {0.25, -4.0};
  Map c(2, 6, 2);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 6; ++i) c.at(b, i, 0) = 0.7, c.at(b, i, 1) = -1.2;
  const auto before = inf.running_mean;
  const auto out = batchnorm_infer(c, inf);
  CHECK(inf.running_mean == before);
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < 6; ++i) {
      CHECK(std::abs(out.at(b, i, 0) - 0.25) < 1e-6);
      CHECK(std::abs(out.at(b, i, 1) + 4.0) < 1e-6);
    }
  CHECK(batchnorm_forward(c, inf, Mode::infer).values == out.values);
  BatchNormState<double> one("bn", 2);
  CHECK_THROWS_AS(batchnorm_forward(Map(1, 1, 2), one, Mode::train), std::invalid_argument);
}

TEST_CASE("batchnorm: running statistics EMA with unbiased variance") {
  Rng rng(5);
  const auto x = random_map(2, 10, 1, rng);
  BatchNormState<double> bn("bn", 1);
  batchnorm_forward(x, bn, Mode::train);
  auto [m, v] = channel_stats(x);
  CHECK(bn.running_mean[0] == doctest::Approx(0.1 * m[0]));
  CHECK(bn.running_var[0] == doctest::Approx(0.9 + 0.1 * v[0] * 20.0 / 19.0));
}

TEST_CASE("relu") {
  Map neg(1, 4, 2, -1.5), pos(1, 4, 2, 0.5);
  for (auto v : relu_forward(neg).values) CHECK(v == 0.0);
  CHECK(relu_forward(pos).values == pos.values);
  const auto g = relu_backward(neg, Map(1, 4, 2, 1.0));
  for (auto v : g.values) CHECK(v == 0.0);
}

TEST_CASE("maxpool 3/2: windows, constant, lengths, tie-breaking") {
  Map x(1, 4, 1);
  x.values = {1, 3, 2, 5};
  std::vector<int> arg;
  CHECK(maxpool_3s2_forward(x, &arg).values == std::vector<double>{3, 5});
  const auto g = maxpool_3s2_backward(Map(1, 2, 1, 1.0), arg, 4);
  CHECK(g.values == std::vector<double>{0, 1, 0, 1});

  CHECK(maxpool_3s2_forward(Map(2, 9, 3, 4.25)).values == std::vector<double>(2 * 5 * 3, 4.25));
  CHECK(maxpool_3s2_forward(Map(1, 448, 2)).length == 224);

  // Windows are centred on 2o: {0,1}, {1,2} for length 3. Every window ties.
  Map tie(1, 3, 1, 2.0);
  std::vector<int> targ;
  maxpool_3s2_forward(tie, &targ);
  CHECK(maxpool_3s2_backward(Map(1, 2, 1, 1.0), targ, 3).values == std::vector<double>{1, 1, 0});
}

TEST_CASE("dense concat and split") {
  Rng rng(6);
  const auto a = random_map(2, 5, 128, rng), b = random_map(2, 5, 128, rng), c = random_map(2, 5, 128, rng);
  CHECK(dense_concat(std::vector<Map>{a}).values == a.values);
  const auto cat = dense_concat(std::vector<Map>{a, b, c});
  CHECK(cat.channels == 384);
  const int widths[] = {128, 128, 128};
  const auto parts = split_channels(cat, widths);
  CHECK(parts[0].values == a.values);
  CHECK(parts[1].values == b.values);
  CHECK(parts[2].values == c.values);
  CHECK_THROWS_AS(dense_concat(std::vector<Map>{a, random_map(2, 6, 1, rng)}), std::invalid_argument);
}

TEST_CASE("global pool: dimension 2C for any length, constant input, shift invariance of the max half") {
  Rng rng(7);
  for (int h : {1, 2, 3, 17, 224, 1024}) CHECK(global_pool_forward(Map(1, h, 150)).channels == 300);
  const auto k = global_pool_forward(Map(2, 11, 3, -0.75));
  for (auto v : k.values) CHECK(v == -0.75);

  const auto x = random_map(1, 40, 4, rng);
  Map shifted(1, 40, 4);
  for (int i = 0; i < 40; ++i)
    for (int c = 0; c < 4; ++c) shifted.at(0, (i + 13) % 40, c) = x.at(0, i, c);
  const auto p = global_pool_forward(x), q = global_pool_forward(shifted);
  for (int c = 0; c < 4; ++c) CHECK(p.values[c] == q.values[c]);
}

TEST_CASE("global pool and maxpool backward by finite differences") {
  Rng rng(8);
  const auto x = random_map(2, 9, 3, rng);
  const auto r1 = random_map(2, 1, 6, rng);
  const auto r2 = random_map(2, 5, 3, rng);
  std::vector<int> a1, a2;
  global_pool_forward(x, &a1);
  maxpool_3s2_forward(x, &a2);
  const auto g1 = global_pool_backward(r1, a1, 9);
  const auto g2 = maxpool_3s2_backward(r2, a2, 9);
  for (std::size_t i = 0; i < x.size(); ++i) {
    Map xp = x, xm = x;
    xp.values[i] += 1e-6;
    xm.values[i] -= 1e-6;
    const double n1 = (dot(global_pool_forward(xp), r1) - dot(global_pool_forward(xm), r1)) / 2e-6;
    const double n2 = (dot(maxpool_3s2_forward(xp), r2) - dot(maxpool_3s2_forward(xm), r2)) / 2e-6;
    CHECK(std::abs(n1 - g1.values[i]) < 1e-6);
    CHECK(std::abs(n2 - g2.values[i]) < 1e-6);
  }
}

TEST_CASE("softmax heads: uniform, perfect, normalization, nonnegative loss") {
  HeadsLayer<double> h("heads", 6, 4);
  Map f(3, 1, 4, 0.3);
  std::vector<std::uint8_t> labels(18, 1);
  auto r = softmax_xent_heads(f, h, labels, false);
  CHECK(r.loss == doctest::Approx(6.0 * std::numbers::ln2).epsilon(1e-12));

  for (int m = 0; m < 6; ++m) h.bias.value[m * 2 + 1] = 200.0;  // class 1 certain
  r = softmax_xent_heads(f, h, labels, false);
  CHECK(r.loss >= 0.0);
  CHECK(r.loss < 1e-12);

  Rng rng(9);
  h.init(rng);
  const auto g = random_map(5, 1, 4, rng, 3.0);
  std::vector<std::uint8_t> lb(30);
  for (auto& l : lb) l = rng() & 1;
  r = softmax_xent_heads(g, h, lb, false);
  CHECK(r.loss >= 0.0);
  for (std::size_t i = 0; i < r.probabilities.size(); i += 2) CHECK(std::abs(r.probabilities[i] + r.probabilities[i + 1] - 1.0) < 1e-9);
  CHECK_THROWS_AS(softmax_xent_heads(g, h, std::span(lb).first(29), false), std::invalid_argument);
}

TEST_CASE("softmax heads gradient by finite differences") {
  Rng rng(10);
  HeadsLayer<double> h("heads", 4, 5);
  h.init(rng);
  const auto f = random_map(3, 1, 5, rng);
  std::vector<std::uint8_t> lb(12);
  for (auto& l : lb) l = rng() & 1;
  std::vector<Param<double>*> ps{&h.weight, &h.bias};
  const auto rep = grad_check(
      ps, [&] { return softmax_xent_heads(f, h, lb, false).loss; },
      [&] {
        h.weight.zero_grad();
        h.bias.zero_grad();
        softmax_xent_heads(f, h, lb, true);
      },
      1e-6, 2);
  CHECK(rep.pass);
  const auto r = softmax_xent_heads(f, h, lb, false);
  (void)r;
  HeadsLayer<double> h2 = h;
  const auto g = softmax_xent_heads(f, h2, lb, true).grad_features;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Map fp = f, fm = f;
    fp.values[i] += 1e-6;
    fm.values[i] -= 1e-6;
    const double num = (softmax_xent_heads(fp, h, lb, false).loss - softmax_xent_heads(fm, h, lb, false).loss) / 2e-6;
    CHECK(std::abs(num - g.values[i]) < 1e-6);
  }
}

TEST_CASE("SGD momentum: plain step, zero gradient, scalar recurrence") {
  Param<double> p("w", {1});
  p.value = {1.0};
  p.grad = {0.5};
  std::vector<Param<double>*> ps{&p};
  OptimizerState<double> plain{0.1, 0.0, {}};
  sgd_momentum_step<double>(ps, plain);
  CHECK(p.value[0] == doctest::Approx(0.95));

  Param<double> z("z", {3});
  z.value = {1.0, -2.0, 3.0};
  std::vector<Param<double>*> zs{&z};
  OptimizerState<double> st{0.1, 0.9, {}};
  sgd_momentum_step<double>(zs, st);
  CHECK(z.value == std::vector<double>{1.0, -2.0, 3.0});

  // f(w) = w^2 against v_{t+1} = mom*v_t - lr*f'(w_t), w_{t+1} = w_t + v_{t+1}.
  Param<double> w("w", {1});
  w.value = {2.0};
  std::vector<Param<double>*> ws{&w};
  OptimizerState<double> s{0.1, 0.9, {}};
  double ref = 2.0, vel = 0.0;
  for (int t = 0; t < 50; ++t) {
    w.grad = {2.0 * w.value[0]};
    sgd_momentum_step<double>(ws, s);
    vel = 0.9 * vel - 0.1 * 2.0 * ref;
    ref += vel;
    CHECK(w.value[0] == doctest::Approx(ref).epsilon(1e-12));
  }
  OptimizerState<double> bad{0.0, 0.9, {}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  OptimizerState<double> bad2{0.1, 1.0, {}};
  CHECK_THROWS_AS(bad2.validate(), std::invalid_argument);
}

TEST_CASE("stacked layers pass gradient checks in 64 bit") {
  Rng rng(11);
  BatchNormState<double> bn("bn", 3);
  for (auto& s : bn.scale.value) s = 1.0 + 0.3 * std::normal_distribution<double>()(rng);
  ConvLayer<double> conv("conv", 5, 3, 4);
  conv.init(rng);
  auto x = random_map(3, 10, 3, rng);
  const auto r = random_map(3, 5, 4, rng);
  std::vector<Param<double>*> ps{&bn.scale, &bn.offset, &conv.kernel, &conv.bias};
  struct Fwd {
    BatchNormCache<double> cache;
    Map y, p;
    std::vector<int> arg;
  };
  auto forward = [&](Fwd& f) {
    f.y = batchnorm_forward(x, bn, Mode::train, &f.cache);
    f.p = maxpool_3s2_forward(relu_forward(f.y), &f.arg);
    return conv1d_forward(f.p, conv);
  };
  // Keep normalized activations away from the ReLU kink.
  {
    Fwd f;
    forward(f);
    for (std::size_t i = 0; i < x.size(); ++i)
      if (std::abs(f.y.values[i]) < 0.05) x.values[i] += 0.2;
  }
  const auto rep = grad_check(
      ps,
      [&] {
        Fwd f;
        return dot(forward(f), r);
      },
      [&] {
        Fwd f;
        forward(f);
        auto cg = conv1d_backward(f.p, conv, r);
        conv.kernel.grad = cg.grad_kernel;
        conv.bias.grad = cg.grad_bias;
        auto g = relu_backward(f.y, maxpool_3s2_backward(cg.grad_x, f.arg, x.length));
        batchnorm_backward(g, bn, f.cache, bn.scale.grad, bn.offset.grad);
      },
      1e-4, 3);
  CHECK(rep.pass);
  CHECK(rep.max_error() < 1e-4);
}

TEST_CASE("bit-reproducible forward and backward in deterministic mode") {
  runtime_options().deterministic = true;
  Rng a(12), b(12);
  ConvLayer<float> la("c", 5, 8, 8), lb("c", 5, 8, 8);
  la.init(a);
  lb.init(b);
  CHECK(la.kernel.value == lb.kernel.value);
  FeatureMap<float> x(64, 30, 8);
  std::normal_distribution<float> nd;
  for (auto& v : x.values) v = nd(a);
  const auto r1 = conv1d_backward(x, la, conv1d_forward(x, la));
  const auto r2 = conv1d_backward(x, lb, conv1d_forward(x, lb));
  CHECK(r1.grad_kernel == r2.grad_kernel);
  CHECK(r1.grad_x.values == r2.grad_x.values);
}
