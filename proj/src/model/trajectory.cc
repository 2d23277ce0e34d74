#include "rroa/model/trajectory.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rroa {
namespace model {

std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint64_t StageSeed(std::uint64_t master, const std::string& stage) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : stage) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return Mix64(master ^ h);
}

Policy Policy::Sequence(std::vector<std::vector<double>> sequence) {
  if (sequence.empty()) throw std::invalid_argument("Policy: empty sequence");
  Policy p;
  p.kind_ = Kind::kSequence;
  p.values_ = std::move(sequence);
  return p;
}

Policy Policy::Constant(std::vector<double> d) {
  Policy p;
  p.kind_ = Kind::kConstant;
  p.values_.push_back(std::move(d));
  return p;
}

Policy Policy::Random(std::vector<std::vector<double>> grid, std::uint64_t seed) {
  if (grid.empty()) throw std::invalid_argument("Policy: empty disturbance grid");
  Policy p;
  p.kind_ = Kind::kRandom;
  p.values_ = std::move(grid);
  p.seed_ = seed;
  return p;
}

Policy Policy::GridCycle(std::vector<std::vector<double>> grid, std::size_t start) {
  if (grid.empty()) throw std::invalid_argument("Policy: empty disturbance grid");
  Policy p;
  p.kind_ = Kind::kGridCycle;
  p.values_ = std::move(grid);
  p.offset_ = start;
  return p;
}

const std::vector<double>& Policy::operator()(std::size_t k) const {
  const std::size_t j = k + offset_;
  switch (kind_) {
    case Kind::kConstant:
      return values_[0];
    case Kind::kSequence:
      return values_[std::min(j, values_.size() - 1)];
    case Kind::kRandom:
      return values_[Mix64(seed_ ^ Mix64(j)) % values_.size()];
    case Kind::kGridCycle:
      return values_[j % values_.size()];
  }
  return values_[0];
}

Policy Policy::Shift(std::size_t k) const {
  Policy p = *this;
  p.offset_ += k;
  return p;
}

Trajectory Simulate(const SystemModel& model, std::vector<double> x0,
                    const Policy& policy, int K, const SimulateOptions& options) {
  if (static_cast<int>(x0.size()) != model.n) {
    throw std::invalid_argument("Simulate: initial state has wrong size");
  }
  if (K < 0) throw std::invalid_argument("Simulate: K must be >= 0");
  Trajectory t;
  t.policy = policy;
  t.states.reserve(options.stop_at_event ? 16 : K + 1);
  std::vector<double> x = std::move(x0);
  for (int k = 0;; ++k) {
    bool finite = true;
    for (double v : x) finite &= std::isfinite(v);
    if (!finite) {
      t.overflow = true;
      break;
    }
    t.states.push_back(x);
    if (!t.exit_index && !model.InX(x)) t.exit_index = k;
    if (!t.hit_index && model.InXinf(x)) t.hit_index = k;
    if (options.stop_at_event && (t.exit_index || t.hit_index)) break;
    if (k == K) break;
    x = model.Step(x, policy(k));
  }
  return t;
}

std::optional<int> HittingTime(const SystemModel& model, std::vector<double> x0,
                               const Policy& policy, int K) {
  std::vector<double> x = std::move(x0);
  for (int k = 0; k <= K; ++k) {
    bool finite = true;
    for (double v : x) finite &= std::isfinite(v);
    if (!finite) return std::nullopt;
    if (model.InXinf(x)) return k;
    if (k < K) x = model.Step(x, policy(k));
  }
  return std::nullopt;
}

}  // namespace model
}  // namespace rroa
