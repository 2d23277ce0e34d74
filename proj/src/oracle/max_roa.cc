#include "rroa/oracle/max_roa.h"

#include <cmath>
#include <string>

#include "rroa/model/trajectory.h"
#include "rroa/util/parallel.h"

namespace rroa {
namespace oracle {

using model::Policy;
using model::SystemModel;

namespace {

bool Finite(const std::vector<double>& x) {
  for (double c : x) {
    if (!std::isfinite(c)) return false;
  }
  return true;
}

// Same event order as Simulate: a state counts as a hit before it can count
// as an exit.
Verdict PolicyRun(const SystemModel& model, const Policy& policy,
                  std::vector<double> x, int horizon) {
  for (int k = 0;; ++k) {
    if (!Finite(x)) return Verdict::kExit;
    if (model.InXinf(x)) return Verdict::kHit;
    if (!model.InX(x)) return Verdict::kExit;
    if (k == horizon) return Verdict::kTimeout;
    x = model.Step(x, policy(k));
  }
}

}  // namespace

Verdict GreedyRun(const SystemModel& model, const GridField& v,
                  const std::vector<std::vector<double>>& dgrid,
                  std::vector<double> x, int horizon) {
  for (int k = 0;; ++k) {
    if (!Finite(x)) return Verdict::kExit;
    if (model.InXinf(x)) return Verdict::kHit;
    if (!model.InX(x)) return Verdict::kExit;
    if (k == horizon) return Verdict::kTimeout;
    std::vector<double> next;
    double worst = -1.0;
    for (const auto& d : dgrid) {
      auto y = model.Step(x, d);
      const double val = Finite(y) ? v.Interpolate(y) : 2.0;
      // Ties keep the first grid point, so the run is deterministic.
      if (val > worst) {
        worst = val;
        next = std::move(y);
      }
    }
    x = std::move(next);
  }
}

void GridMaxRoa(const SystemModel& model, const GridField& v,
                const MaxRoaSettings& settings, GridField& mask) {
  const auto dgrid = model.DisturbanceGrid(settings.disturbance_nodes);
  const std::uint64_t stage = model::StageSeed(settings.seed, "grid_max_roa");
  std::vector<Policy> policies;
  for (int p = 0; p < settings.policies; ++p) {
    policies.push_back(Policy::Random(dgrid, model::Mix64(stage + p)));
  }
  util::ParallelFor(mask.size(), settings.threads, [&](std::size_t i) {
    const auto x0 = mask.Point(i);
    bool member = model.InX(x0) &&
                  GreedyRun(model, v, dgrid, x0, settings.horizon) == Verdict::kHit;
    for (std::size_t p = 0; member && p < policies.size(); ++p) {
      member = PolicyRun(model, policies[p], x0, settings.horizon) == Verdict::kHit;
    }
    mask.values[i] = member ? 1.0 : 0.0;
  });
}

}  // namespace oracle
}  // namespace rroa
