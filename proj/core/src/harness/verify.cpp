#include "drx/harness/verify.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "drx/channel/noise.hpp"
#include "drx/model/complexity.hpp"
#include "drx/nn/gradcheck.hpp"
#include "drx/phy/pulse.hpp"
#include "drx/rx/decoders.hpp"
#include "drx/rx/matched_filter.hpp"
#include "json.hpp"

namespace drx::harness {

namespace {

using nn::FeatureMap;

CheckResult make(const std::string& suite, const std::string& name, bool pass, double value, double threshold,
                 std::string detail = {}) {
  return {suite, name, pass, value, threshold, std::move(detail)};
}

// --- codecs -----------------------------------------------------------------

void codec_checks(std::vector<CheckResult>& out) {
  const auto code = phy::CodeSpec::hamming74();
  int corrected = 0;
  for (int v = 0; v < 16; ++v) {
    const std::vector<std::uint8_t> info{static_cast<std::uint8_t>(v >> 3 & 1), static_cast<std::uint8_t>(v >> 2 & 1),
                                         static_cast<std::uint8_t>(v >> 1 & 1), static_cast<std::uint8_t>(v & 1)};
    const auto cw = code.encode_block(info);
    for (int e = 0; e < 7; ++e) {
      auto word = cw;
      word[e] ^= 1;
      const auto dec = rx::hard_decode(code, phy::BitStream(word, phy::BitRole::coded));
      corrected += dec.bits == info;
    }
  }
  out.push_back(make("codecs", "hamming74_single_errors", corrected == 112, corrected, 112));

  for (auto kind : {phy::CodeKind::hamming74, phy::CodeKind::cyclic_7_3, phy::CodeKind::cyclic_15_5}) {
    const auto c = phy::CodeSpec::from_kind(kind);
    const auto book = phy::codebook(c);
    int dmin = c.n;
    for (std::size_t a = 0; a < book.size(); ++a)
      for (std::size_t b = a + 1; b < book.size(); ++b) {
        int d = 0;
        for (int i = 0; i < c.n; ++i) d += book[a][i] != book[b][i];
        dmin = std::min(dmin, d);
      }
    const int expected = kind == phy::CodeKind::hamming74 ? 3 : kind == phy::CodeKind::cyclic_7_3 ? 4 : 7;
    out.push_back(make("codecs", c.name() + "_min_distance", dmin == expected, dmin, expected));
  }

  // Soft ML against exhaustive search over all 2^16 BPSK codeword sequences.
  const auto mcs = phy::mcs_by_name("bpsk-hamming74", 16);
  const auto book = phy::codebook(mcs.code);
  Rng rng(42);
  std::normal_distribution<double> noise(0.0, 0.8);
  int agree = 0;
  const int trials = 50;
  for (int t = 0; t < trials; ++t) {
    const auto info = phy::generate_info_bits(16, rng());
    const auto coded = phy::channel_encode(mcs.code, info);
    rx::SoftSymbols y;
    for (auto b : coded.bits) y.values.emplace_back((b ? -1.0 : 1.0) + noise(rng), noise(rng));
    double best = INFINITY;
    std::uint32_t arg = 0;
    for (std::uint32_t v = 0; v < (1u << 16); ++v) {
      double d = 0.0;
      for (int blk = 0; blk < 4; ++blk) {
        const auto& cw = book[(v >> (12 - 4 * blk)) & 15];
        for (int i = 0; i < 7; ++i) d += std::norm(y.values[blk * 7 + i] - (cw[i] ? -1.0 : 1.0));
      }
      if (d < best) best = d, arg = v;
    }
    const auto ml = rx::soft_ml_decode(y, mcs);
    std::uint32_t got = 0;
    for (auto b : ml.bits) got = got << 1 | b;
    agree += got == arg;
  }
  out.push_back(make("codecs", "soft_ml_matches_exhaustive", agree == trials, agree, trials));
}

// --- gradients --------------------------------------------------------------

template <class Fill>
FeatureMap<double> random_map(int b, int h, int c, Rng& rng, Fill&& fill) {
  FeatureMap<double> x(b, h, c);
  for (auto& v : x.values) v = fill(rng);
  return x;
}

double weighted_sum(const FeatureMap<double>& y, const FeatureMap<double>& r) {
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += y.values[i] * r.values[i];
  return s;
}

void gradient_checks(std::vector<CheckResult>& out) {
  Rng rng(7);
  std::normal_distribution<double> nd;
  auto gauss = [&](Rng& g) { return nd(g); };

  {  // single conv
    nn::ConvLayer<double> conv("conv", 5, 3, 4);
    conv.init(rng);
    for (auto& b : conv.bias.value) b = nd(rng);
    const auto x = random_map(2, 11, 3, rng, gauss);
    const auto r = random_map(2, 11, 4, rng, gauss);
    std::vector<nn::Param<double>*> ps{&conv.kernel, &conv.bias};
    auto loss = [&] { return weighted_sum(nn::conv1d_forward(x, conv), r); };
    auto grads = [&] {
      auto g = nn::conv1d_backward(x, conv, r);
      conv.kernel.grad = g.grad_kernel;
      conv.bias.grad = g.grad_bias;
    };
    const auto rep = nn::grad_check(ps, loss, grads, 1e-6, 1);
    out.push_back(make("gradients", "conv1d", rep.pass, rep.max_error(), 1e-6));
  }
  {  // BN -> ReLU -> pool -> conv stack
    nn::BatchNormState<double> bn("bn", 3);
    for (auto& s : bn.scale.value) s = 1.0 + 0.3 * nd(rng);
    for (auto& o : bn.offset.value) o = 0.2 * nd(rng);
    nn::ConvLayer<double> conv("conv", 5, 3, 4);
    conv.init(rng);
    // Inputs kept away from the ReLU kink after normalization.
    auto x = random_map(3, 10, 3, rng, gauss);
    const auto r = random_map(3, 5, 4, rng, gauss);
    std::vector<nn::Param<double>*> ps{&bn.scale, &bn.offset, &conv.kernel, &conv.bias};
    auto forward = [&](nn::BatchNormCache<double>* cache, FeatureMap<double>* bn_out, FeatureMap<double>* pooled,
                       std::vector<int>* arg) {
      auto y = nn::batchnorm_forward(x, bn, nn::Mode::train, cache);
      if (bn_out) *bn_out = y;
      auto p = nn::maxpool_3s2_forward(nn::relu_forward(y), arg);
      if (pooled) *pooled = p;
      return nn::conv1d_forward(p, conv);
    };
    auto loss = [&] { return weighted_sum(forward(nullptr, nullptr, nullptr, nullptr), r); };
    auto grads = [&] {
      nn::BatchNormCache<double> cache;
      FeatureMap<double> y, p;
      std::vector<int> arg;
      forward(&cache, &y, &p, &arg);
      auto cg = nn::conv1d_backward(p, conv, r);
      conv.kernel.grad = cg.grad_kernel;
      conv.bias.grad = cg.grad_bias;
      auto g = nn::maxpool_3s2_backward(cg.grad_x, arg, x.length);
      g = nn::relu_backward(y, g);
      nn::batchnorm_backward(g, bn, cache, bn.scale.grad, bn.offset.grad);
    };
    const auto rep = nn::grad_check(ps, loss, grads, 1e-4, 2);
    out.push_back(make("gradients", "bn_relu_pool_conv", rep.pass, rep.max_error(), 1e-4));
  }
  {  // heads
    nn::HeadsLayer<double> heads("heads", 5, 6);
    heads.init(rng);
    const auto f = random_map(4, 1, 6, rng, gauss);
    std::vector<std::uint8_t> labels(20);
    for (auto& l : labels) l = rng() & 1;
    std::vector<nn::Param<double>*> ps{&heads.weight, &heads.bias};
    auto loss = [&] { return nn::softmax_xent_heads(f, heads, labels, false).loss; };
    auto grads = [&] { nn::softmax_xent_heads(f, heads, labels, true); };
    const auto rep = nn::grad_check(ps, loss, grads, 1e-6, 3);
    out.push_back(make("gradients", "softmax_xent_heads", rep.pass, rep.max_error(), 1e-6));
  }
  {  // full mini network
    model::DeepReceiver<double> net(model::DeepReceiverConfig::mini(8), 11);
    const auto x = random_map(3, 32, 2, rng, gauss);
    std::vector<std::uint8_t> labels(24);
    for (auto& l : labels) l = rng() & 1;
    const auto ps = net.parameters();
    auto loss = [&] { return net.train_loss(x, labels, false); };
    auto grads = [&] { net.train_loss(x, labels, true); };
    const auto rep = nn::grad_check(ps, loss, grads, 1e-4, 4, 40);
    out.push_back(make("gradients", "mini_deep_receiver", rep.pass, rep.max_error(), 1e-4));
  }
}

// --- complexity -------------------------------------------------------------

void complexity_checks(std::vector<CheckResult>& out) {
  for (int M : {16, 32}) {
    model::DeepReceiver<float> net(model::DeepReceiverConfig::reference(M), 1);
    const auto c = model::count_params(net);
    out.push_back(make("complexity", "heads_M" + std::to_string(M), c.heads == 602u * M, c.heads, 602.0 * M));
  }
  const auto ref = model::DeepReceiverConfig::reference(32);
  const auto c = model::count_params(ref);
  const double rel = std::abs(static_cast<double>(c.backbone) - model::kReferenceBackboneParams) /
                     model::kReferenceBackboneParams;
  out.push_back(make("complexity", "backbone_within_1pct", rel < 0.01, static_cast<double>(c.backbone),
                     static_cast<double>(model::kReferenceBackboneParams),
                     "relative residual " + std::to_string(rel)));
  for (int N : {224, 448}) {
    const auto m = model::max_feature_map(ref, N);
    out.push_back(make("complexity", "max_feature_map_N" + std::to_string(N), m == 192u * N, m, 192.0 * N));
  }
}

// --- calibration ------------------------------------------------------------

void calibration_checks(std::vector<CheckResult>& out) {
  const int symbols = 256, frames = 800, os = 8;
  const double ebn0_db = 4.0;
  std::size_t errors = 0, bits = 0;
  Rng rng(99);
  for (int f = 0; f < frames; ++f) {
    std::vector<std::complex<double>> s(symbols);
    std::vector<int> b(symbols);
    for (int i = 0; i < symbols; ++i) {
      b[i] = static_cast<int>(rng() & 1);
      s[i] = b[i] ? -1.0 : 1.0;
    }
    const double tau = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    phy::IqFrame frame;
    frame.samples = phy::shape_symbols(s, os, 0.5, tau);
    frame.oversampling = os;
    frame.timing_offset = tau;
    const auto rx = channel::apply_noise(frame, channel::NoiseSpec::awgn(), ebn0_db, symbols, rng());
    const auto y = phy::correlate_symbols(rx.samples, os, 0.5, tau);
    for (int i = 0; i < symbols; ++i) errors += (y[i].real() < 0) != (b[i] == 1);
    bits += symbols;
  }
  const double ber = static_cast<double>(errors) / static_cast<double>(bits);
  const double theory = 0.5 * std::erfc(std::sqrt(std::pow(10.0, ebn0_db / 10.0)));
  const double rel = std::abs(ber - theory) / theory;
  out.push_back(make("calibration", "bpsk_ber_4db", rel < 0.1, ber, theory, "relative error " + std::to_string(rel)));

  for (double rho : {1.0, 1.5, 2.0}) {
    phy::IqFrame zero;
    zero.samples.assign(50000, {0.0, 0.0});
    const double target = channel::noise_power_for(1.0, 1, 0.0);
    const auto n = channel::apply_noise(zero, channel::NoiseSpec::aggn(rho), 0.0, 1, 5 + static_cast<int>(rho * 10),
                                        1.0);
    const double err_db = std::abs(10.0 * std::log10(n.mean_power() / target));
    out.push_back(make("calibration", "aggn_power_rho" + std::to_string(rho).substr(0, 3), err_db < 0.1, err_db, 0.1));
  }
}

}  // namespace

VerifySuite parse_verify_suite(const std::string& name) {
  if (name == "codecs") return VerifySuite::codecs;
  if (name == "gradients") return VerifySuite::gradients;
  if (name == "complexity") return VerifySuite::complexity;
  if (name == "calibration") return VerifySuite::calibration;
  if (name == "all") return VerifySuite::all;
  throw std::invalid_argument("unknown verify suite '" + name + "'");
}

std::vector<CheckResult> run_verify(VerifySuite suite) {
  std::vector<CheckResult> out;
  const bool all = suite == VerifySuite::all;
  if (all || suite == VerifySuite::codecs) codec_checks(out);
  if (all || suite == VerifySuite::gradients) gradient_checks(out);
  if (all || suite == VerifySuite::complexity) complexity_checks(out);
  if (all || suite == VerifySuite::calibration) calibration_checks(out);
  return out;
}

std::string to_json_lines(const std::vector<CheckResult>& results) {
  std::string s;
  for (const auto& r : results) {
    nlohmann::json j{{"suite", r.suite}, {"check", r.name}, {"pass", r.pass}, {"value", r.value},
                     {"threshold", r.threshold}};
    if (!r.detail.empty()) j["detail"] = r.detail;
    s += j.dump() + "\n";
  }
  return s;
}

std::string parameter_report(int num_bits) {
  const auto cfg = model::DeepReceiverConfig::reference(num_bits);
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %-6s %6s %6s %10s %8s %10s\n", "layer", "kind", "in", "out", "weights",
                "biases", "total");
  os << line;
  for (const auto& r : model::parameter_table(cfg)) {
    std::snprintf(line, sizeof line, "%-22s %-6s %6d %6d %10zu %8zu %10zu\n", r.name.c_str(), r.kind.c_str(),
                  r.in_channels, r.out_channels, r.weights, r.biases, r.total());
    os << line;
  }
  const auto c = model::count_params(cfg);
  const long long residual = static_cast<long long>(model::kReferenceBackboneParams) - static_cast<long long>(c.backbone);
  os << "backbone " << c.backbone << ", heads " << c.heads << " (602 x " << num_bits << "), total " << c.total << '\n'
     << "reference backbone " << model::kReferenceBackboneParams << ", residual " << residual << " ("
     << 100.0 * static_cast<double>(residual) / model::kReferenceBackboneParams << "%)\n"
     << "BN running statistics (not trainable): " << [&] {
          std::size_t n = 0;
          for (const auto& r : model::parameter_table(cfg))
            if (r.kind == "bn") n += r.total();
          return n;
        }() << '\n';
  return os.str();
}

}  // namespace drx::harness
