#include <cmath>
#include <random>
#include <string>

#include <gtest/gtest.h>

#include "rroa/model/assumptions.h"
#include "rroa/model/system_model.h"
#include "rroa/model/trajectory.h"

namespace rroa {
namespace model {
namespace {

using poly::Polynomial;

const std::string kModels = RROA_MODELS_DIR;

SystemModel PredatorPrey() { return LoadModelFile(kModels + "/predator_prey.toy"); }
SystemModel LotkaVolterra() { return LoadModelFile(kModels + "/lotka_volterra3.toy"); }

std::string Replace(std::string text, const std::string& from,
                    const std::string& to) {
  const auto pos = text.find(from);
  EXPECT_NE(pos, std::string::npos) << from;
  return text.replace(pos, from.size(), to);
}

const char* kMinimal = R"([system]
n = 1
m = 1
f1 = 0.5*x1 + d1*x1

[disturbance]
h1 = d1^2 - 0.01

[constraint]
h1 = x1^2

[seed]
h = 100*x1^2

[bound]
R2 = 1.6

[cost]
g = x1^2
)";

TEST(LoadModelTest, PredatorPrey) {
  const SystemModel m = PredatorPrey();
  EXPECT_EQ(m.n, 2);
  EXPECT_EQ(m.m, 1);
  EXPECT_EQ(m.R2, 1.6);
  const Polynomial x = Polynomial::Variable(3, 0), y = Polynomial::Variable(3, 1),
                   d = Polynomial::Variable(3, 2);
  EXPECT_EQ(m.f[0], 0.5 * x - x * y);
  EXPECT_EQ(m.f[1], -0.5 * y + d * x * y + x * y);
  EXPECT_EQ(m.solver.degrees, (std::vector<int>{6, 10}));
  EXPECT_EQ(m.solver.mult_degree.at(10), 12);
  EXPECT_EQ(m.source_hash.size(), 16u);
}

TEST(LoadModelTest, LotkaVolterra) {
  const SystemModel m = LotkaVolterra();
  EXPECT_EQ(m.n, 3);
  EXPECT_EQ(m.m, 1);
  // Linear parts e_i = 0.5.
  for (int i = 0; i < 3; ++i) {
    EXPECT_EQ(m.f[i].coefficient(poly::Monomial::Variable(4, i)), 0.5);
  }
  const Polynomial x = Polynomial::Variable(4, 0), d = Polynomial::Variable(4, 3);
  EXPECT_EQ(m.f[0].coefficient((x * x * d).terms().begin()->first), 1.0);
}

TEST(LoadModelTest, ParseErrorsCarryPosition) {
  try {
    LoadModel(Replace(kMinimal, "f1 = 0.5*x1 + d1*x1", "f1 = 0.5*x1 + q*x1"));
    FAIL();
  } catch (const ModelParseError& e) {
    EXPECT_EQ(e.line(), 4);
    EXPECT_EQ(e.column(), 15);
  }
  try {
    LoadModel(Replace(kMinimal, "[bound]", "[bounds]"));
    FAIL();
  } catch (const ModelParseError& e) {
    EXPECT_EQ(e.line(), 15);
  }
  EXPECT_THROW(LoadModel(Replace(kMinimal, "R2 = 1.6", "R2 = big")), ModelParseError);
  EXPECT_THROW(LoadModel(Replace(kMinimal, "R2 = 1.6", "R2")), ModelParseError);
  EXPECT_THROW(LoadModel(Replace(kMinimal, "[cost]\ng = x1^2\n", "")), ModelParseError);
}

TEST(LoadModelTest, InvariantViolations) {
  auto check = [](const std::string& text, const std::string& name) {
    try {
      LoadModel(text);
      ADD_FAILURE() << "expected " << name;
    } catch (const ModelValidationError& e) {
      EXPECT_EQ(e.check(), name) << e.what();
    }
  };
  check(Replace(kMinimal, "f1 = 0.5*x1 + d1*x1", "f1 = 0.5*x1 + d1"), "equilibrium");
  check(Replace(kMinimal, "g = x1^2", "g = x1^2 + 0.1"), "cost-zero");
  check(Replace(kMinimal, "g = x1^2", "g = x1^3"), "cost-positive");
  check(Replace(kMinimal, "h1 = x1^2\n", "h1 = x1^2 + 0.5\n"), "constraint-origin");
  check(Replace(kMinimal, "h = 100*x1^2", "h = 100*x1^2 + 1"), "seed-origin");
  check(Replace(kMinimal, "R2 = 1.6", "R2 = -1"), "bound");
  check(Replace(kMinimal, "h1 = d1^2 - 0.01", "h1 = d1^3 - 0.01"),
        "disturbance-bounded");
}

TEST(StepTest, PredatorPreyHandEvaluation) {
  const SystemModel m = PredatorPrey();
  const std::vector<double> zero{0.0, 0.0};
  for (double d : {-0.1, 0.0, 0.1}) {
    EXPECT_EQ(m.Step(zero, std::vector<double>{d}), zero);
  }
  const std::vector<double> x{0.2, 0.1};
  auto a = m.Step(x, std::vector<double>{0.0});
  EXPECT_NEAR(a[0], 0.08, 1e-15);
  EXPECT_NEAR(a[1], -0.03, 1e-15);
  a = m.Step(x, std::vector<double>{0.1});
  EXPECT_NEAR(a[0], 0.08, 1e-15);
  EXPECT_NEAR(a[1], -0.028, 1e-15);
  EXPECT_THROW(m.Step(std::vector<double>{0.1}, std::vector<double>{0.0}),
               std::invalid_argument);
}

TEST(DisturbanceTest, GridAndCorners) {
  const SystemModel m = PredatorPrey();
  const auto grid = m.DisturbanceGrid(11);
  ASSERT_EQ(grid.size(), 11u);
  EXPECT_DOUBLE_EQ(grid.front()[0], -0.1);
  EXPECT_DOUBLE_EQ(grid.back()[0], 0.1);
  for (const auto& d : grid) EXPECT_TRUE(m.InD(d));
  EXPECT_EQ(m.DisturbanceCorners().size(), 2u);
}

TEST(PolicyTest, EmittedDisturbancesStayInD) {
  const SystemModel m = PredatorPrey();
  const auto grid = m.DisturbanceGrid(11);
  for (const Policy& p : {Policy::Random(grid, 1), Policy::GridCycle(grid, 3),
                          Policy::Constant(grid.back()),
                          Policy::Sequence({grid[0], grid[5]})}) {
    for (std::size_t k = 0; k < 500; ++k) EXPECT_TRUE(m.InD(p(k), 1e-12));
  }
  const Policy r = Policy::Random(grid, 9);
  EXPECT_EQ(r.Shift(7)(3), r(10));
}

TEST(SimulateTest, ZeroStateStaysZero) {
  const SystemModel m = PredatorPrey();
  const auto grid = m.DisturbanceGrid(11);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Trajectory t = Simulate(m, {0.0, 0.0}, Policy::Random(grid, seed), 30);
    ASSERT_EQ(t.states.size(), 31u);
    for (const auto& x : t.states) EXPECT_EQ(x, (std::vector<double>{0.0, 0.0}));
    EXPECT_EQ(t.hit_index, 0);
    EXPECT_FALSE(t.exit_index.has_value());
  }
}

TEST(SimulateTest, ReplayFromAnyStepReproducesSuffix) {
  const SystemModel m = PredatorPrey();
  const Policy p = Policy::Random(m.DisturbanceGrid(11), 17);
  const Trajectory t = Simulate(m, {0.7, -0.5}, p, 40);
  for (int k = 0; k < 40; k += 7) {
    const Trajectory s = Simulate(m, t.states[k], p.Shift(k), 40 - k);
    for (std::size_t j = 0; j < s.states.size(); ++j) {
      EXPECT_EQ(s.states[j], t.states[k + j]);
    }
  }
}

TEST(SimulateTest, EventsAndHittingTime) {
  const SystemModel m = PredatorPrey();
  const Policy zero = Policy::Constant({0.0});
  EXPECT_EQ(Simulate(m, {0.05, 0.0}, zero, 10).hit_index, 0);
  EXPECT_EQ(HittingTime(m, {0.0, 0.0}, zero, 0), 0);
  EXPECT_EQ(HittingTime(m, {0.05, 0.0}, zero, 5), 0);
  // (0.2, 0.1) → (0.08, −0.03) → h∞ = 100·0.0073 = 0.73 < 1: hits at step 1.
  EXPECT_EQ(HittingTime(m, {0.2, 0.1}, zero, 200), 1);
  // Far outside X: exits at index 0.
  const Trajectory out = Simulate(m, {1.1, 0.0}, zero, 10);
  EXPECT_EQ(out.exit_index, 0);
  // A state inside X whose orbit leaves X under a random policy.
  const Trajectory esc =
      Simulate(m, {-0.6, -0.79}, Policy::Random(m.DisturbanceGrid(11), 3), 50);
  EXPECT_TRUE(esc.exit_index.has_value());
  EXPECT_GT(*esc.exit_index, 0);
}

TEST(StabilityTest, JacobianSpectralRadius) {
  const auto r1 = CheckExponentialStability(PredatorPrey());
  EXPECT_TRUE(r1.pass);
  EXPECT_EQ(r1.spectral_radii.size(), 21u);
  EXPECT_NEAR(r1.max_radius, 0.5, 1e-12);
  const auto r2 = CheckExponentialStability(LotkaVolterra());
  EXPECT_TRUE(r2.pass);
  EXPECT_NEAR(r2.max_radius, 0.5, 1e-12);
  EXPECT_FALSE(r1.note.empty());
  SystemModel bad = PredatorPrey();
  bad.f[0] = 1.5 * Polynomial::Variable(3, 0);
  const auto r3 = CheckExponentialStability(bad);
  EXPECT_FALSE(r3.pass);
  EXPECT_NEAR(r3.max_radius, 1.5, 1e-12);
}

TEST(ArchimedeanTest, Detection) {
  const auto r = CheckArchimedeanD(PredatorPrey());
  EXPECT_TRUE(r.found);
  EXPECT_NEAR(r.R_D, 0.01, 1e-15);

  const SystemModel box = LoadModel(
      Replace(kMinimal, "h1 = d1^2 - 0.01", "h1 = d1 - 1\nh2 = -d1 - 1"));
  const auto rb = CheckArchimedeanD(box);
  EXPECT_FALSE(rb.found);
  EXPECT_NEAR(rb.suggested_R_D, 1.0, 1e-15);

  const std::string two = Replace(
      Replace(kMinimal, "m = 1", "m = 2"), "h1 = d1^2 - 0.01",
      "h1 = d1 - 1\nh2 = d1^2 + d2^2 - 4");
  const SystemModel m2 = LoadModel(two);
  const auto r2 = CheckArchimedeanD(m2);
  EXPECT_TRUE(r2.found);
  EXPECT_EQ(r2.R_D, 4.0);
  // Reordering the constraint list does not change the answer.
  SystemModel swapped = m2;
  std::swap(swapped.D.constraints[0], swapped.D.constraints[1]);
  const auto r3 = CheckArchimedeanD(swapped);
  EXPECT_EQ(r3.found, r2.found);
  EXPECT_EQ(r3.R_D, r2.R_D);
}

TEST(ReachBoundTest, PredatorPrey) {
  const SystemModel m = PredatorPrey();
  const auto r = CheckReachBound(m, DefaultCheckSettings(m));
  EXPECT_EQ(r.status, CheckStatus::kPass);
  for (const auto& p : r.parts) {
    EXPECT_EQ(p.status, CheckStatus::kPass) << p.name << ": " << p.message;
  }
  SystemModel small = m;
  small.R2 = 0.01;
  const auto rs = CheckReachBound(small, DefaultCheckSettings(small));
  EXPECT_NE(rs.status, CheckStatus::kPass);
}

TEST(SeedLyapunovTest, PredatorPrey) {
  const SystemModel m = PredatorPrey();
  const auto r = CheckSeedLyapunov(m, DefaultCheckSettings(m));
  for (const auto& p : r.parts) {
    EXPECT_EQ(p.status, CheckStatus::kPass)
        << p.name << ": " << sos::ToString(p.solver_status) << " " << p.message;
  }
  EXPECT_EQ(r.status, CheckStatus::kPass);
  SystemModel unstable = m;
  unstable.f[0] = 2.0 * Polynomial::Variable(3, 0);
  unstable.f[1] = 2.0 * Polynomial::Variable(3, 1);
  const auto ru = CheckSeedLyapunov(unstable, DefaultCheckSettings(unstable));
  EXPECT_NE(ru.status, CheckStatus::kPass);
  EXPECT_NE(ru.parts[0].status, CheckStatus::kPass);
}

}  // namespace
}  // namespace model
}  // namespace rroa
