#include "run_config.hpp"

#include <cstdio>
#include <fstream>

#include <spectral_forge/csv.hpp>
#include <spectral_forge/errors.hpp>

namespace spectral_forge::cli {

std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void RunConfig::set(const std::string& key, double value) {
  values_[key] = csv::format_double(value);
}

void RunConfig::set(const std::string& key, const std::vector<double>& values) {
  std::string s = "[";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ", ";
    s += csv::format_double(values[i]);
  }
  values_[key] = s + "]";
}

std::string RunConfig::canonical() const {
  std::string s = "command=" + command_ + "\n";
  for (const auto& [k, v] : values_) s += k + "=" + v + "\n";
  return s;
}

std::string RunConfig::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(canonical())));
  return buf;
}

std::string RunConfig::to_config_file() const {
  std::string s = "# config_hash=" + hash() + "\n[" + command_ + "]\n";
  for (const auto& [k, v] : values_) {
    const bool bare = !v.empty() && (v.front() == '[' || v == "true" || v == "false" ||
                                     v.find_first_not_of("0123456789+-.eE") == std::string::npos);
    s += k + "=" + (bare ? v : "\"" + v + "\"") + "\n";
  }
  return s;
}

std::map<std::string, std::string> RunConfig::metadata() const {
  return {{"command", command_}, {"config_hash", hash()}};
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path.string());
  out << text;
  if (!out) throw ValidationError("failed writing " + path.string());
}

}  // namespace spectral_forge::cli
