#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace rroa {
namespace cli {

/// What a subcommand read, how it was configured and what it wrote. Saved as
/// manifest.json in the output directory.
class RunManifest {
 public:
  RunManifest(std::string subcommand, std::vector<std::string> args,
              std::uint64_t seed);

  /// Records an input file with the FNV-1a hash of its contents.
  void AddInput(const std::filesystem::path& path);
  /// Records an output file; its hash is taken when the manifest is written.
  void AddOutput(const std::filesystem::path& path);
  void AddStageSeed(const std::string& stage, std::uint64_t seed);
  void AddTiming(const std::string& stage, double seconds);
  nlohmann::ordered_json& config() { return config_; }
  void set_exit_code(int code) { exit_code_ = code; }

  const std::vector<std::filesystem::path>& outputs() const { return outputs_; }

  nlohmann::ordered_json ToJson() const;
  void Write(const std::filesystem::path& path) const;

 private:
  std::string subcommand_;
  std::vector<std::string> args_;
  std::uint64_t seed_;
  std::vector<std::pair<std::string, std::string>> inputs_;
  std::vector<std::filesystem::path> outputs_;
  std::vector<std::pair<std::string, std::uint64_t>> stage_seeds_;
  std::vector<std::pair<std::string, double>> timings_;
  nlohmann::ordered_json config_ = nlohmann::ordered_json::object();
  int exit_code_{0};
};

/// FNV-1a of a file's bytes as 16 hex digits. Throws if unreadable.
std::string HashFile(const std::filesystem::path& path);

}  // namespace cli
}  // namespace rroa
