#include <gtest/gtest.h>

#include "nessdmrg/dmrg.hpp"
#include "nessdmrg/exact.hpp"
#include "support/oracles.hpp"

using namespace nessdmrg;

namespace {

SweepSchedule small_schedule(std::size_t max_bond) {
  SweepSchedule s;
  s.warmup_bond = 2;
  s.max_bond = max_bond;
  s.bond_increment = 4;
  s.max_sweeps = 40;
  s.local_solver_iters = 10;
  return s;
}

}  // namespace

TEST(Schedule, Validates) {
  SweepSchedule s;
  EXPECT_NO_THROW(s.validate());
  s.max_bond = 1;
  EXPECT_THROW(s.validate(), DomainError);
  s = SweepSchedule{};
  s.ramp_threshold = 1.5;
  EXPECT_THROW(s.validate(), DomainError);
  s = SweepSchedule{};
  s.local_solver_iters = 0;
  EXPECT_THROW(s.validate(), DomainError);
}

TEST(Sweep, VariationalOnTwoSites) {
  const auto ops = build_superoperators(ModelParams::uniform(2, 1.0, 1.0, 1.0, 0.0), Ordering::RLN);
  const auto start = random_mps({2, 2, 2, 2}, 2, 81);
  const double e0 = rayleigh_quotient(ops.target, start);
  SweepSchedule s;
  s.max_bond = 2;
  const auto [e1, next] = dmrg_sweep(start, ops.target, s);
  EXPECT_LE(e1, e0 + 1e-12);
  EXPECT_NEAR(e1, rayleigh_quotient(ops.target, next), 1e-10 * std::max(1.0, e1));
}

TEST(Sweep, ReachesExactNullVectorAtFullBond) {
  const auto p = ModelParams::uniform(4, 1.0, 1.0, 1.0, 0.0);
  for (auto kind : {Ordering::RLN, Ordering::RNLN}) {
    const auto ops = build_superoperators(p, kind);
    SweepEngine engine(ops.target, make_ivec(ops.scheme));
    double e = 1.0;
    for (int k = 0; k < 10 && e > 1e-10; ++k) e = engine.sweep(16, 1e-14, 10).energy;
    EXPECT_LE(e, 1e-10) << to_string(kind);
    EXPECT_GE(e, -1e-10);
  }
}

TEST(Sweep, WarmupEnergyTrendsDown) {
  const auto ops = build_superoperators(ModelParams::uniform(10, 1.0, 1.0, 1.0, 0.0), Ordering::RLN);
  SweepEngine engine(ops.target, make_ivec(ops.scheme));
  std::vector<double> e{engine.energy()};
  for (int k = 0; k < 6; ++k) e.push_back(engine.sweep(2, 1e-12, 6).energy);
  EXPECT_LT(e.back(), e.front());
  for (std::size_t k = 2; k < e.size(); ++k) EXPECT_LE(e[k], e[k - 1]);
}

TEST(WarmUp, ConvergedStateStopsAfterOneSweep) {
  const auto p = ModelParams::uniform(3, 1.0, 1.0, 1.0, 0.0);
  const auto ops = build_superoperators(p, Ordering::RLN);
  const Eigen::VectorXcd chain =
      oracle::chain_to_vec(Ordering::RLN, 3).transpose() * vectorize(dense_ness(p).rho);
  const auto exact = oracle::mps_from_dense(chain, 6);
  SweepSchedule s;
  s.warmup_bond = 8;
  s.max_bond = 8;
  s.energy_floor = 1e-10;
  const auto [state, used] = warm_up(exact, ops.target, s);
  EXPECT_EQ(used, 1u);
  EXPECT_LE(rayleigh_quotient(ops.target, state), 1e-10);
}

TEST(WarmUp, EquilibriumIsReachedAtBondTwo) {
  const auto ops = build_superoperators(ModelParams::uniform(6, 0.5, 1.0, 0.3, 0.3), Ordering::RLN);
  SweepSchedule s;
  s.warmup_threshold = 1e-9;
  s.warmup_max_sweeps = 1000;
  const auto [state, used] = warm_up(make_ivec(ops.scheme), ops.target, s);
  EXPECT_LE(rayleigh_quotient(ops.target, state), 1e-8);
  EXPECT_LE(state.max_bond(), 2u);
  EXPECT_GE(used, 1u);
}

TEST(SolveNess, MatchesOracleAtFourSites) {
  const auto p = ModelParams::uniform(4, 1.0, 0.5, 1.0, 0.0);
  const auto exact = dense_observables(dense_ness(p), p);
  for (auto kind : {Ordering::RLN, Ordering::RNLN}) {
    auto s = small_schedule(16);
    s.max_sweeps = 300;
    s.energy_floor = 1e-14;
    const auto r = solve_ness(p, kind, s);
    ASSERT_TRUE(r.converged) << r.reason;
    for (std::size_t b = 0; b < 3; ++b) {
      EXPECT_NEAR(r.current_profile[b], exact.current[b], 1e-4 * std::abs(exact.current[b]));
    }
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_NEAR(r.magnetization_profile[i], exact.magnetization[i], 1e-4);
    }
    EXPECT_LT(r.imag_residual, 1e-6);
  }
}

TEST(SolveNess, EquilibriumProfiles) {
  auto s = small_schedule(8);
  s.energy_floor = 1e-14;
  s.max_sweeps = 400;
  const auto r = solve_ness(ModelParams::uniform(8, 1.0, 1.0, 0.2, 0.2), Ordering::RLN, s);
  ASSERT_TRUE(r.converged) << r.reason;
  for (double j : r.current_profile) EXPECT_LE(std::abs(j), 1e-8);
  for (double m : r.magnetization_profile) EXPECT_NEAR(m, 0.6, 1e-6);
}

TEST(SolveNess, HistoryIsConsistent) {
  const auto r = solve_ness(ModelParams::uniform(4, 1.0, 1.0, 1.0, 0.0), Ordering::RLN, small_schedule(16));
  ASSERT_FALSE(r.history.empty());
  EXPECT_EQ(r.energy_history().size(), r.history.size());
  for (std::size_t k = 0; k < r.history.size(); ++k) {
    EXPECT_EQ(r.history[k].sweep, k + 1);
    EXPECT_LE(r.history[k].max_bond, r.history[k].bond_cap);
    EXPECT_EQ(r.history[k].warmup, k < r.warmup_sweeps);
  }
  EXPECT_DOUBLE_EQ(r.final_energy, r.history.back().energy);
  const auto bonds = r.bond_history();
  for (std::size_t k = 1; k < bonds.size(); ++k) EXPECT_GE(r.history[k].bond_cap, r.history[k - 1].bond_cap);
}

TEST(SolveNess, InvariantUnderRateRescaling) {
  // Scaling H and all rates by c scales L by c and leaves the steady state alone.
  auto p = ModelParams::uniform(4, 0.5, 1.0, 0.9, 0.1);
  auto q = p;
  for (auto& j : q.j) j *= 2.0;
  q.gamma1 *= 2.0;
  q.gammaN *= 2.0;
  const auto a = solve_ness(p, Ordering::RLN, small_schedule(16));
  const auto b = solve_ness(q, Ordering::RLN, small_schedule(16));
  ASSERT_TRUE(a.converged && b.converged);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_NEAR(a.magnetization_profile[i], b.magnetization_profile[i], 1e-5);
  }
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(2.0 * a.current_profile[k], b.current_profile[k], 1e-4 * std::abs(b.current_profile[k]));
  }
}

TEST(SolveNess, Deterministic) {
  const auto p = ModelParams::uniform(5, 1.0, 1.0, 1.0, 0.0);
  const auto a = solve_ness(p, Ordering::RLN, small_schedule(12));
  const auto b = solve_ness(p, Ordering::RLN, small_schedule(12));
  EXPECT_EQ(a.energy_history(), b.energy_history());
  EXPECT_EQ(a.current_profile, b.current_profile);
}

TEST(SolveNess, CallbackSeesEverySweep) {
  std::size_t seen = 0;
  const auto r = solve_ness(ModelParams::uniform(3, 1.0, 1.0, 1.0, 0.0), Ordering::RLN, small_schedule(8),
                            [&](const SweepRecord&) { ++seen; });
  EXPECT_EQ(seen, r.history.size());
}
