#include "drx/model/complexity.hpp"

#include <algorithm>
#include <stdexcept>

namespace drx::model {

template <typename T>
ParamCounts count_params(const DeepReceiver<T>& model) {
  ParamCounts c;
  for (const auto* p : model.parameters()) {
    if (p->name.rfind("heads.", 0) == 0) c.heads += p->size();
    else c.backbone += p->size();
  }
  c.total = c.backbone + c.heads;
  return c;
}

template ParamCounts count_params(const DeepReceiver<float>&);
template ParamCounts count_params(const DeepReceiver<double>&);

namespace {

// Walks the layout calling `conv(name, cin, cout)` and `bn(name, c)` in
// network order; returns the channel count entering the final conv.
template <class ConvFn, class BnFn>
int walk_layers(const DeepReceiverConfig& cfg, ConvFn&& conv, BnFn&& bn) {
  int c = cfg.scaled(cfg.layout.front().widths[0]);
  conv("conv0", cfg.input_channels, c);
  int tn = 0, dn = 0;
  for (std::size_t i = 1; i + 1 < cfg.layout.size(); ++i) {
    const auto& b = cfg.layout[i];
    if (b.kind == BlockKind::transition) {
      const std::string name = "transition" + std::to_string(++tn);
      bn(name + ".bn", c);
      const int k = cfg.scaled(b.widths[0]);
      conv(name + ".conv", c, k);
      c = k;
    } else {
      const std::string block = "dense" + std::to_string(++dn);
      for (std::size_t j = 0; j < b.widths.size(); ++j) {
        const std::string name = block + ".unit" + std::to_string(j);
        bn(name + ".bn", c);
        const int k = cfg.scaled(b.widths[j]);
        conv(name + ".conv", c, k);
        c += k;
      }
    }
  }
  conv("conv_out", c, cfg.final_channels());
  return c;
}

}  // namespace

std::vector<LayerParamRow> parameter_table(const DeepReceiverConfig& config) {
  config.validate();
  const std::size_t P = config.kernel_width;
  std::vector<LayerParamRow> rows;
  walk_layers(
      config,
      [&](const std::string& name, int cin, int cout) {
        rows.push_back({name, "conv", cin, cout, P * cin * cout, static_cast<std::size_t>(cout)});
      },
      [&](const std::string& name, int c) {
        rows.push_back({name, "bn", c, c, static_cast<std::size_t>(c), static_cast<std::size_t>(c)});
      });
  const std::size_t F = config.feature_dim(), M = config.num_bits;
  rows.push_back({"heads", "heads", static_cast<int>(F), static_cast<int>(2 * M), M * 2 * F, M * 2});
  return rows;
}

ParamCounts count_params(const DeepReceiverConfig& config) {
  ParamCounts c;
  for (const auto& r : parameter_table(config)) (r.kind == "heads" ? c.heads : c.backbone) += r.total();
  c.total = c.backbone + c.heads;
  return c;
}

std::vector<FeatureShape> feature_shapes(const DeepReceiverConfig& config, int input_length, ConvPadding padding) {
  config.validate();
  if (input_length < 1) throw std::invalid_argument("input length must be >= 1");
  const int shrink = padding == ConvPadding::same ? 0 : config.kernel_width - 1;
  std::vector<FeatureShape> out;
  int h = input_length;
  auto push = [&](const std::string& name, int c) {
    if (h < 1) throw std::invalid_argument("input length " + std::to_string(input_length) + " too short at " + name);
    out.push_back({name, h, c});
  };
  push("input", config.input_channels);
  auto conv = [&](const std::string& name, int k) {
    h -= shrink;
    push(name, k);
  };

  int c = config.scaled(config.layout.front().widths[0]);
  conv("conv0", c);
  int tn = 0, dn = 0;
  for (std::size_t i = 1; i + 1 < config.layout.size(); ++i) {
    const auto& b = config.layout[i];
    if (b.kind == BlockKind::transition) {
      const std::string name = "transition" + std::to_string(++tn);
      push(name + ".bn", c);
      push(name + ".relu", c);
      h = (h + 1) / 2;
      push(name + ".pool", c);
      c = config.scaled(b.widths[0]);
      conv(name + ".conv", c);
    } else {
      const std::string block = "dense" + std::to_string(++dn);
      // Under valid padding the block's inputs would not align; the concat
      // is then taken at the shortest length.
      for (std::size_t j = 0; j < b.widths.size(); ++j) {
        const std::string name = block + ".unit" + std::to_string(j);
        if (j > 0) push(name + ".concat", c);
        push(name + ".bn", c);
        push(name + ".relu", c);
        const int k = config.scaled(b.widths[j]);
        conv(name + ".conv", k);
        c += k;
      }
      push(block + ".concat", c);
    }
  }
  conv("conv_out", config.final_channels());
  out.push_back({"global_pool", 1, config.feature_dim()});
  return out;
}

std::size_t max_feature_map(const DeepReceiverConfig& config, int input_length, ConvPadding padding) {
  std::size_t m = 0;
  for (const auto& s : feature_shapes(config, input_length, padding)) m = std::max(m, s.size());
  return m;
}

OperationCount operation_count(const DeepReceiverConfig& config, int input_length) {
  OperationCount ops;
  const auto shapes = feature_shapes(config, input_length);
  const std::uint64_t P = config.kernel_width;
  // Each conv reads the tensor listed just before it.
  for (std::size_t i = 1; i < shapes.size(); ++i) {
    const auto& s = shapes[i];
    const auto& prev = shapes[i - 1];
    const auto ends_with = [&](const char* suffix) {
      const std::string_view n = s.name, x = suffix;
      return n.size() >= x.size() && n.substr(n.size() - x.size()) == x;
    };
    if (ends_with("conv") || s.name == "conv0" || s.name == "conv_out") {
      ops.conv += static_cast<std::uint64_t>(prev.length) * prev.channels * P * s.channels;
    } else if (ends_with(".bn") || ends_with(".relu")) {
      ops.norm_relu += s.size();
    } else if (ends_with(".pool")) {
      ops.pooling += static_cast<std::uint64_t>(prev.length) * prev.channels * 3 / 2;
    } else if (s.name == "global_pool") {
      ops.pooling += 2ULL * prev.size();
    }
  }
  ops.heads = 2ULL * config.num_bits * config.feature_dim();
  return ops;
}

std::size_t storage_elements(const DeepReceiverConfig& config, int input_length) {
  return count_params(config).total + 2 * max_feature_map(config, input_length);
}

}  // namespace drx::model
