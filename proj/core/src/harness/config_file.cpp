#include "drx/harness/config_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "drx/errors.hpp"

namespace drx::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects a number, got '" + v + "'");
  }
}

}  // namespace

ConfigMap parse_config(const std::string& text) {
  ConfigMap c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    if (key.empty()) throw std::invalid_argument("config line " + std::to_string(lineno) + ": empty key");
    c[key] = trim(line.substr(eq + 1));
  }
  return c;
}

ConfigMap load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_override(ConfigMap& config, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override '" + assignment + "' is not key=value");
  const auto key = trim(assignment.substr(0, eq));
  if (key.empty()) throw std::invalid_argument("override '" + assignment + "' has an empty key");
  config[key] = trim(assignment.substr(eq + 1));
}

std::string config_to_text(const ConfigMap& config) {
  std::ostringstream os;
  for (const auto& [k, v] : config) os << k << " = " << v << '\n';
  return os.str();
}

double get_double(const ConfigMap& c, const std::string& key, double fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : to_double(key, it->second);
}

long long get_int(const ConfigMap& c, const std::string& key, long long fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    std::size_t used = 0;
    const long long x = std::stoll(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument("");
    return x;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: '" + key + "' expects an integer, got '" + it->second + "'");
  }
}

bool get_bool(const ConfigMap& c, const std::string& key, bool fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  const auto& v = it->second;
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw std::invalid_argument("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::string get_string(const ConfigMap& c, const std::string& key, const std::string& fallback) {
  const auto it = c.find(key);
  return it == c.end() ? fallback : it->second;
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  if (std::count(text.begin(), text.end(), ':') == 2) {
    const auto a = text.find(':'), b = text.find(':', a + 1);
    const double lo = to_double(text, trim(text.substr(0, a)));
    const double step = to_double(text, trim(text.substr(a + 1, b - a - 1)));
    const double hi = to_double(text, trim(text.substr(b + 1)));
    if (!(step > 0.0) || hi < lo) throw std::invalid_argument("range '" + text + "' needs lo <= hi and step > 0");
    const auto n = static_cast<long long>(std::floor((hi - lo) / step + 1e-9));
    for (long long i = 0; i <= n; ++i) out.push_back(lo + static_cast<double>(i) * step);
    return out;
  }
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_double(text, item));
  }
  if (out.empty()) throw std::invalid_argument("empty number list");
  return out;
}

std::vector<double> get_list(const ConfigMap& c, const std::string& key, const std::vector<double>& fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  try {
    return parse_number_list(it->second);
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument("config: '" + key + "': " + e.what());
  }
}

std::vector<std::string> get_words(const ConfigMap& c, const std::string& key, const std::vector<std::string>& fallback) {
  const auto it = c.find(key);
  if (it == c.end()) return fallback;
  std::vector<std::string> out;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  if (out.empty()) throw std::invalid_argument("config: '" + key + "' is empty");
  return out;
}

}  // namespace drx::harness
