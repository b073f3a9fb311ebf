#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace drx::harness {

/// Flat `section.key = value` settings. Lines starting with '#' are comments.
using ConfigMap = std::map<std::string, std::string>;

ConfigMap parse_config(const std::string& text);
ConfigMap load_config(const std::filesystem::path& path);

/// Applies one "key=value" override; later writes win.
void apply_override(ConfigMap& config, const std::string& assignment);

std::string config_to_text(const ConfigMap& config);

/// Typed accessors; throw std::invalid_argument naming the key on bad values.
double get_double(const ConfigMap& c, const std::string& key, double fallback);
long long get_int(const ConfigMap& c, const std::string& key, long long fallback);
bool get_bool(const ConfigMap& c, const std::string& key, bool fallback);
std::string get_string(const ConfigMap& c, const std::string& key, const std::string& fallback);
/// Comma-separated numbers, or a range "lo:step:hi" (inclusive).
std::vector<double> get_list(const ConfigMap& c, const std::string& key, const std::vector<double>& fallback);
std::vector<std::string> get_words(const ConfigMap& c, const std::string& key, const std::vector<std::string>& fallback);

std::vector<double> parse_number_list(const std::string& text);

}  // namespace drx::harness
