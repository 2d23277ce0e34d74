#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rroa/model/system_model.h"

namespace rroa {
namespace model {

/// Deterministic map from step index k to a disturbance d(k) ∈ D.
class Policy {
 public:
  enum class Kind { kSequence, kConstant, kRandom, kGridCycle };

  /// d(k) = sequence[min(k, size−1)]: the last value is held.
  static Policy Sequence(std::vector<std::vector<double>> sequence);
  static Policy Constant(std::vector<double> d);
  /// d(k) drawn uniformly from `grid`, by hashing (seed, k); random access
  /// and replay need no state.
  static Policy Random(std::vector<std::vector<double>> grid, std::uint64_t seed);
  /// d(k) = grid[(start + k) mod |grid|].
  static Policy GridCycle(std::vector<std::vector<double>> grid, std::size_t start = 0);

  const std::vector<double>& operator()(std::size_t k) const;
  Kind kind() const { return kind_; }
  std::uint64_t seed() const { return seed_; }
  /// The same policy shifted by `k` steps: Shift(k)(j) == (*this)(k + j).
  Policy Shift(std::size_t k) const;

 private:
  Kind kind_{Kind::kConstant};
  std::vector<std::vector<double>> values_;
  std::uint64_t seed_{0};
  std::size_t offset_{0};
};

/// x(0..K) of x(k+1) = f(x(k), π(k)), with the events met on the way.
struct Trajectory {
  std::vector<std::vector<double>> states;
  Policy policy;
  /// First index with h∞(x) < 1 − 1e-12.
  std::optional<int> hit_index;
  /// First index with x ∉ X.
  std::optional<int> exit_index;
  /// A state became non-finite; the trajectory stops there.
  bool overflow{false};
};

struct SimulateOptions {
  /// Stop at the first X exit or X∞ entry instead of running to K.
  bool stop_at_event{false};
};

Trajectory Simulate(const SystemModel& model, std::vector<double> x0,
                    const Policy& policy, int K, const SimulateOptions& options = {});

/// Least k ≤ K with x(k) ∈ X∞, or nullopt.
std::optional<int> HittingTime(const SystemModel& model, std::vector<double> x0,
                               const Policy& policy, int K);

/// splitmix64 finaliser; used to derive independent seeds.
std::uint64_t Mix64(std::uint64_t x);
/// Seed for a named stage, derived from a master seed.
std::uint64_t StageSeed(std::uint64_t master, const std::string& stage);

}  // namespace model
}  // namespace rroa
