#include "rroa/cli/run_manifest.h"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rroa/model/system_model.h"

namespace rroa {
namespace cli {

using Json = nlohmann::ordered_json;

std::string HashFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return model::Fnv1aHex(ss.str());
}

RunManifest::RunManifest(std::string subcommand, std::vector<std::string> args,
                         std::uint64_t seed)
    : subcommand_(std::move(subcommand)), args_(std::move(args)), seed_(seed) {}

void RunManifest::AddInput(const std::filesystem::path& path) {
  inputs_.emplace_back(path.string(), HashFile(path));
}

void RunManifest::AddOutput(const std::filesystem::path& path) {
  outputs_.push_back(path);
}

void RunManifest::AddStageSeed(const std::string& stage, std::uint64_t seed) {
  stage_seeds_.emplace_back(stage, seed);
}

void RunManifest::AddTiming(const std::string& stage, double seconds) {
  timings_.emplace_back(stage, seconds);
}

Json RunManifest::ToJson() const {
  Json j;
  j["subcommand"] = subcommand_;
  j["args"] = args_;
  Json in = Json::array();
  for (const auto& [p, h] : inputs_) in.push_back({{"path", p}, {"fnv1a", h}});
  j["inputs"] = in;
  j["config"] = config_;
  j["seed"] = seed_;
  Json seeds = Json::object();
  for (const auto& [s, v] : stage_seeds_) seeds[s] = v;
  j["stage_seeds"] = seeds;
  Json out = Json::array();
  for (const auto& p : outputs_) {
    Json o = {{"path", p.filename().string()}};
    if (std::filesystem::exists(p)) o["fnv1a"] = HashFile(p);
    out.push_back(o);
  }
  j["outputs"] = out;
  Json t = Json::object();
  for (const auto& [s, v] : timings_) t[s] = v;
  j["timings_seconds"] = t;
  j["exit_code"] = exit_code_;
  return j;
}

void RunManifest::Write(const std::filesystem::path& path) const {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << ToJson().dump(2) << "\n";
}

}  // namespace cli
}  // namespace rroa
