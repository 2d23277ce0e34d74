#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>

#include <gtest/gtest.h>

#include "rroa/model/system_model.h"
#include "rroa/model/trajectory.h"
#include "rroa/oracle/grid_field.h"
#include "rroa/oracle/max_roa.h"
#include "rroa/oracle/value_iteration.h"

namespace rroa {
namespace oracle {
namespace {

using model::LoadModelFile;
using model::Policy;
using model::SystemModel;
using poly::Polynomial;

const std::string kModels = RROA_MODELS_DIR;

const SystemModel& PredatorPrey() {
  static const SystemModel m = LoadModelFile(kModels + "/predator_prey.toy");
  return m;
}

// A coarse field shared by the tests below; 41 nodes keep them quick.
const ViResult& CoarseField() {
  static const ViResult r = [] {
    ViSettings s;
    s.state_nodes = 41;
    return ValueIteration(PredatorPrey(), s);
  }();
  return r;
}

std::size_t Centre(const GridField& g) {
  std::vector<int> idx(g.dims());
  for (int a = 0; a < g.dims(); ++a) idx[a] = g.axes[a].nodes / 2;
  return g.Flat(idx);
}

TEST(ValueIterationTest, Converges) {
  const auto& r = CoarseField();
  EXPECT_TRUE(r.converged);
  EXPECT_LT(r.deltas.back(), 1e-6);
  EXPECT_EQ(r.v.size(), 41u * 41u);
}

TEST(ValueIterationTest, ZeroAtOrigin) {
  const auto& r = CoarseField();
  const auto x = r.v.Point(Centre(r.v));
  EXPECT_NEAR(x[0], 0.0, 1e-12);
  EXPECT_NEAR(x[1], 0.0, 1e-12);
  EXPECT_EQ(r.v.values[Centre(r.v)], 0.0);
}

TEST(ValueIterationTest, OneOutsideX) {
  const auto& r = CoarseField();
  std::size_t outside = 0;
  for (std::size_t i = 0; i < r.v.size(); ++i) {
    const auto x = r.v.Point(i);
    if (PredatorPrey().InX(x)) continue;
    ++outside;
    EXPECT_EQ(r.v.values[i], 1.0);
  }
  EXPECT_GT(outside, 0u);
}

TEST(ValueIterationTest, ValuesInUnitInterval) {
  for (double v : CoarseField().v.values) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(ValueIterationTest, SweepsAreMonotone) {
  // max_decrease records the largest drop of any node in any sweep.
  EXPECT_LE(CoarseField().max_decrease, 1e-15);
}

TEST(ValueIterationTest, MonotoneFromFirstSweepByHand) {
  // Two sweeps by hand capped at one and two iterations must be ordered.
  ViSettings s;
  s.state_nodes = 21;
  s.max_iterations = 1;
  const auto one = ValueIteration(PredatorPrey(), s);
  s.max_iterations = 2;
  const auto two = ValueIteration(PredatorPrey(), s);
  EXPECT_FALSE(one.converged);
  for (std::size_t i = 0; i < one.v.size(); ++i) {
    EXPECT_GE(two.v.values[i], one.v.values[i]);
  }
}

TEST(ValueIterationTest, BellmanResidual) {
  const auto& r = CoarseField();
  const auto rep = BellmanResidual(PredatorPrey(), r.v, 11);
  EXPECT_GT(rep.nodes_checked, 0u);
  // The node-wise update is what the iteration solves, so only the stopping
  // threshold remains; the midpoint residual is the interpolation slack.
  EXPECT_LE(rep.node_residual, 2e-6);
  EXPECT_TRUE(std::isfinite(rep.midpoint_residual));
}

TEST(ValueIterationTest, ThreadsDoNotChangeResult) {
  ViSettings s;
  s.state_nodes = 21;
  const auto a = ValueIteration(PredatorPrey(), s);
  s.threads = 3;
  const auto b = ValueIteration(PredatorPrey(), s);
  EXPECT_EQ(a.v.values, b.v.values);
  EXPECT_EQ(a.iterations, b.iterations);
}

TEST(ValueIterationTest, RejectsBadSettings) {
  ViSettings s;
  s.threshold = 0.0;
  EXPECT_THROW(ValueIteration(PredatorPrey(), s), std::invalid_argument);
  s = ViSettings{};
  s.disturbance_nodes = 0;
  EXPECT_THROW(ValueIteration(PredatorPrey(), s), std::invalid_argument);
}

TEST(ValueIterationTest, ConvergenceLog) {
  ViSettings s;
  s.state_nodes = 11;
  const auto r = ValueIteration(PredatorPrey(), s);
  const auto path = std::filesystem::temp_directory_path() / "rroa_vi_log.csv";
  WriteConvergenceLog(r, path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iteration,delta");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.iterations);
  std::filesystem::remove(path);
}

TEST(CompareUpperTest, ConstantOneDominates) {
  const auto rep = CompareUpper(Polynomial::Constant(2, 1.0), CoarseField().v,
                                PredatorPrey().R2);
  EXPECT_LE(rep.max_excess, 0.0);
  EXPECT_GT(rep.nodes_checked, 0u);
}

TEST(CompareUpperTest, ConstantZeroExcessIsOne) {
  const auto rep = CompareUpper(Polynomial::Constant(2, 0.0), CoarseField().v,
                                PredatorPrey().R2);
  EXPECT_EQ(rep.max_excess, 1.0);
  ASSERT_EQ(rep.location.size(), 2u);
  EXPECT_FALSE(PredatorPrey().InX(rep.location));
}

TEST(CompareUpperTest, SkipsNodesOutsideBall) {
  const auto& v = CoarseField().v;
  const auto all = CompareUpper(Polynomial::Constant(2, 0.0), v, 1e9);
  const auto ball = CompareUpper(Polynomial::Constant(2, 0.0), v, PredatorPrey().R2);
  EXPECT_EQ(all.nodes_checked, v.size());
  EXPECT_LT(ball.nodes_checked, v.size());
  const auto inner = CompareUpper(Polynomial::Constant(2, 0.0), v, 1e9, true);
  EXPECT_EQ(inner.nodes_checked, 39u * 39u);
}

GridField Mask(int disturbance_nodes, int policies = 10) {
  MaxRoaSettings s;
  s.disturbance_nodes = disturbance_nodes;
  s.policies = policies;
  GridField mask = StateBox(PredatorPrey(), 41);
  GridMaxRoa(PredatorPrey(), CoarseField().v, s, mask);
  return mask;
}

const GridField& Mask11() {
  static const GridField m = Mask(11);
  return m;
}

TEST(GridMaxRoaTest, InsideXContainsSeed) {
  const auto& mask = Mask11();
  std::size_t members = 0, seeds = 0;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const auto x = mask.Point(i);
    if (mask.values[i] > 0.5) {
      ++members;
      EXPECT_TRUE(PredatorPrey().InX(x));
    }
    if (PredatorPrey().InXinf(x)) {
      ++seeds;
      EXPECT_EQ(mask.values[i], 1.0);
    }
    if (!PredatorPrey().InX(x)) {
      EXPECT_EQ(mask.values[i], 0.0);
    }
  }
  EXPECT_GT(seeds, 0u);
  EXPECT_GT(members, seeds);
}

TEST(GridMaxRoaTest, FinerDisturbanceGridNeverGrows) {
  const auto fine = Mask(21);
  EXPECT_EQ(CountViolations(fine, Mask11()), 0u);
}

TEST(GridMaxRoaTest, LowValueNodesAreMembers) {
  const auto& v = CoarseField().v;
  const auto& mask = Mask11();
  std::size_t low = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v.values[i] >= 0.95) continue;
    ++low;
    EXPECT_EQ(mask.values[i], 1.0) << "node " << i;
  }
  EXPECT_GT(low, 0u);
}

TEST(GridMaxRoaTest, SliceShape) {
  GridField slice = GridField::Slice({0.0, 0.0}, 0, 1, -1.0, 1.0, 11);
  MaxRoaSettings s;
  s.policies = 5;
  GridMaxRoa(PredatorPrey(), CoarseField().v, s, slice);
  EXPECT_EQ(slice.values[Centre(slice)], 1.0);
}

TEST(GridMaxRoaTest, GreedyExitsFromOutsideX) {
  const auto dgrid = PredatorPrey().DisturbanceGrid(11);
  EXPECT_EQ(GreedyRun(PredatorPrey(), CoarseField().v, dgrid, {1.1, 0.0}, 200),
            Verdict::kExit);
  EXPECT_EQ(GreedyRun(PredatorPrey(), CoarseField().v, dgrid, {0.0, 0.0}, 0),
            Verdict::kHit);
}

TEST(HittingTimeTest, SeedAndOrigin) {
  const Policy zero = Policy::Constant({0.0});
  EXPECT_EQ(model::HittingTime(PredatorPrey(), {0.0, 0.0}, zero, 0), 0);
  EXPECT_EQ(model::HittingTime(PredatorPrey(), {0.05, 0.05}, zero, 10), 0);
}

TEST(HittingTimeTest, FixtureFromDirectSimulation) {
  // (0.2, 0.1) ↦ (0.08, −0.03) under d = 0, and 100·0.0073 < 1.
  const Policy zero = Policy::Constant({0.0});
  EXPECT_EQ(model::HittingTime(PredatorPrey(), {0.2, 0.1}, zero, 200), 1);
  EXPECT_EQ(model::HittingTime(PredatorPrey(), {0.2, 0.1}, zero, 0), std::nullopt);
}

}  // namespace
}  // namespace oracle
}  // namespace rroa
