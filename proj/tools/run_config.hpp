#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

// Resolved parameters of one CLI run: what gets hashed, written next to the
// outputs and stamped into every file header.
namespace spectral_forge::cli {

std::uint64_t fnv1a64(std::string_view data);

class RunConfig {
 public:
  explicit RunConfig(std::string command) : command_(std::move(command)) {}

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  void set(const std::string& key, const char* value) { values_[key] = value; }
  void set(const std::string& key, double value);
  void set(const std::string& key, std::uint64_t value) { values_[key] = std::to_string(value); }
  void set(const std::string& key, bool value) { values_[key] = value ? "true" : "false"; }
  void set(const std::string& key, const std::vector<double>& values);

  const std::string& command() const noexcept { return command_; }
  const std::map<std::string, std::string>& values() const noexcept { return values_; }

  // "key=value" lines in key order, prefixed by the command.
  std::string canonical() const;
  // 16 hex digits of FNV-1a over canonical().
  std::string hash() const;
  // TOML-style section loadable again through --config.
  std::string to_config_file() const;
  // Metadata stamped into CSV/JSON outputs.
  std::map<std::string, std::string> metadata() const;

 private:
  std::string command_;
  std::map<std::string, std::string> values_;
};

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace spectral_forge::cli
