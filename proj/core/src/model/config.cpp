#include "drx/model/config.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace drx::model {

std::string WidthScale::text() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

WidthScale WidthScale::parse(const std::string& text) {
  WidthScale s;
  try {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
      std::size_t used = 0;
      s.num = std::stoi(text.substr(0, slash), &used);
      if (used != slash) throw std::invalid_argument("");
      const std::string tail = text.substr(slash + 1);
      s.den = std::stoi(tail, &used);
      if (used != tail.size()) throw std::invalid_argument("");
    } else {
      std::size_t used = 0;
      const double v = std::stod(text, &used);
      if (used != text.size()) throw std::invalid_argument("");
      // Decimal scales are taken as multiples of 1/64.
      s.num = static_cast<int>(std::lround(v * 64.0));
      s.den = 64;
    }
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid width scale '" + text + "'");
  }
  if (s.num <= 0 || s.den <= 0) throw std::invalid_argument("width scale must be positive");
  const int g = std::gcd(s.num, s.den);
  s.num /= g;
  s.den /= g;
  return s;
}

std::vector<BlockSpec> DeepReceiverConfig::reference_layout() {
  return {
      {BlockKind::conv, {64}},
      {BlockKind::transition, {128}},
      {BlockKind::dense, {128, 128}},
      {BlockKind::transition, {64}},
      {BlockKind::dense, {64, 64, 64}},
      {BlockKind::transition, {64}},
      {BlockKind::dense, {64, 64, 64, 64}},
      {BlockKind::transition, {64}},
      {BlockKind::dense, {64, 64, 64}},
      {BlockKind::conv, {150}},
  };
}

DeepReceiverConfig DeepReceiverConfig::reference(int num_bits) {
  DeepReceiverConfig c;
  c.num_bits = num_bits;
  c.validate();
  return c;
}

DeepReceiverConfig DeepReceiverConfig::mini(int num_bits) {
  DeepReceiverConfig c;
  c.num_bits = num_bits;
  c.width_scale = {1, 8};
  c.validate();
  return c;
}

int DeepReceiverConfig::scaled(int width) const {
  if (width_scale.is_unit()) return width;
  const long long up = (static_cast<long long>(width) * width_scale.num + width_scale.den - 1) / width_scale.den;
  return static_cast<int>(std::max(4LL, (up + 3) / 4 * 4));
}

int DeepReceiverConfig::final_channels() const {
  if (layout.empty()) throw std::invalid_argument("empty layout");
  return scaled(layout.back().widths.at(0));
}

int DeepReceiverConfig::transitions() const {
  int t = 0;
  for (const auto& b : layout) t += b.kind == BlockKind::transition;
  return t;
}

void DeepReceiverConfig::validate() const {
  if (input_channels < 1) throw std::invalid_argument("input_channels must be >= 1");
  if (num_bits < 1) throw std::invalid_argument("num_bits must be >= 1");
  if (kernel_width < 1 || kernel_width % 2 == 0) throw std::invalid_argument("kernel_width must be odd");
  if (width_scale.num <= 0 || width_scale.den <= 0) throw std::invalid_argument("width scale must be positive");
  if (layout.size() < 2) throw std::invalid_argument("layout needs at least a stem and a final conv");
  if (layout.front().kind != BlockKind::conv || layout.back().kind != BlockKind::conv)
    throw std::invalid_argument("layout must start and end with a conv");
  if (transitions() > 20) throw std::invalid_argument("too many transition blocks");
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& b = layout[i];
    if (b.widths.empty()) throw std::invalid_argument("layout block without widths");
    if (b.kind != BlockKind::dense && b.widths.size() != 1)
      throw std::invalid_argument("conv/transition blocks take exactly one width");
    if (b.kind == BlockKind::conv && i != 0 && i + 1 != layout.size())
      throw std::invalid_argument("plain conv only allowed first and last");
    for (int w : b.widths)
      if (w < 1) throw std::invalid_argument("layout widths must be >= 1");
  }
}

std::string DeepReceiverConfig::layout_text() const {
  std::ostringstream os;
  for (std::size_t i = 0; i < layout.size(); ++i) {
    const auto& b = layout[i];
    if (i) os << ';';
    os << (b.kind == BlockKind::conv ? "conv" : b.kind == BlockKind::transition ? "transition" : "dense") << ':';
    for (std::size_t j = 0; j < b.widths.size(); ++j) os << (j ? "," : "") << b.widths[j];
  }
  return os.str();
}

std::vector<BlockSpec> DeepReceiverConfig::parse_layout(const std::string& text) {
  std::vector<BlockSpec> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ';')) {
    const auto colon = item.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("bad layout item '" + item + "'");
    BlockSpec b;
    const std::string kind = item.substr(0, colon);
    if (kind == "conv") b.kind = BlockKind::conv;
    else if (kind == "transition") b.kind = BlockKind::transition;
    else if (kind == "dense") b.kind = BlockKind::dense;
    else throw std::invalid_argument("unknown layout block '" + kind + "'");
    std::stringstream ws(item.substr(colon + 1));
    std::string w;
    while (std::getline(ws, w, ',')) {
      try {
        b.widths.push_back(std::stoi(w));
      } catch (const std::exception&) {
        throw std::invalid_argument("bad layout width '" + w + "'");
      }
    }
    out.push_back(std::move(b));
  }
  return out;
}

std::string DeepReceiverConfig::to_text() const {
  std::ostringstream os;
  os << "input_channels=" << input_channels << '\n'
     << "width_scale=" << width_scale.text() << '\n'
     << "num_bits=" << num_bits << '\n'
     << "kernel_width=" << kernel_width << '\n'
     << "layout=" << layout_text() << '\n';
  return os.str();
}

DeepReceiverConfig DeepReceiverConfig::from_text(const std::string& text) {
  DeepReceiverConfig c;
  std::stringstream ss(text);
  std::string line;
  auto to_int = [](const std::string& key, const std::string& v) {
    try {
      std::size_t used = 0;
      const int x = std::stoi(v, &used);
      if (used != v.size()) throw std::invalid_argument("");
      return x;
    } catch (const std::exception&) {
      throw std::invalid_argument("bad integer for " + key + ": '" + v + "'");
    }
  };
  while (std::getline(ss, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line without '=': " + line);
    const std::string key = line.substr(0, eq), value = line.substr(eq + 1);
    if (key == "input_channels") c.input_channels = to_int(key, value);
    else if (key == "width_scale") c.width_scale = WidthScale::parse(value);
    else if (key == "num_bits") c.num_bits = to_int(key, value);
    else if (key == "kernel_width") c.kernel_width = to_int(key, value);
    else if (key == "layout") c.layout = parse_layout(value);
  }
  c.validate();
  return c;
}

}  // namespace drx::model
