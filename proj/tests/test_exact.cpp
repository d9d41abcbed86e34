#include <gtest/gtest.h>

#include <filesystem>

#include "nessdmrg/exact.hpp"
#include "support/oracles.hpp"

using namespace nessdmrg;

TEST(Exact, SparseLiouvillianMatchesKron) {
  auto p = ModelParams::uniform(3, 0.4, 0.7, 0.9, 0.2, 0.1);
  p.gammaN = 1.1;
  EXPECT_LT((Eigen::MatrixXcd(sparse_liouvillian(p)) - oracle::liouvillian(p)).norm(), 1e-12);
  EXPECT_LT((Eigen::MatrixXcd(sparse_hamiltonian(p)) - oracle::hamiltonian(p)).norm(), 1e-12);
  EXPECT_LT((Eigen::MatrixXcd(sparse_current(p, 2)) - oracle::current(p, 2)).norm(), 1e-12);
}

TEST(Exact, SizeGuards) {
  EXPECT_THROW(dense_liouvillian(ModelParams::uniform(7, 1.0, 1.0, 1.0, 0.0)), DomainError);
  EXPECT_THROW(sparse_liouvillian(ModelParams::uniform(8, 1.0, 1.0, 1.0, 0.0)), DomainError);
}

TEST(Exact, EquilibriumProductState) {
  const double f = 0.35;
  const auto p = ModelParams::uniform(3, 1.0, 0.8, f, f);
  const auto ness = dense_ness(p);
  Eigen::MatrixXcd local = Eigen::MatrixXcd::Zero(2, 2);
  local(0, 0) = 1.0 - f;
  local(1, 1) = f;
  EXPECT_LT((ness.rho - oracle::kron_all({local, local, local})).norm(), 1e-10);
  const auto obs = dense_observables(ness, p);
  for (double j : obs.current) EXPECT_LT(std::abs(j), 1e-12);
  for (double m : obs.magnetization) EXPECT_NEAR(m, 1.0 - 2.0 * f, 1e-10);
}

TEST(Exact, NessIsPhysicalAndUnique) {
  for (std::size_t n = 2; n <= 4; ++n) {
    const auto p = ModelParams::uniform(n, 1.0, 1.0, 1.0, 0.0);
    const auto ness = dense_ness(p);
    EXPECT_LE(ness.residual, 1e-10);
    EXPECT_NEAR(std::abs(ness.rho.trace() - 1.0), 0.0, 1e-10);
    EXPECT_LT((ness.rho - ness.rho.adjoint()).norm(), 1e-10);
    EXPECT_GE(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(ness.rho).eigenvalues()[0], -1e-8);
    ASSERT_TRUE(ness.multiplicity.has_value());
    EXPECT_EQ(*ness.multiplicity, 1);
    ASSERT_TRUE(ness.gap.has_value());
    EXPECT_GT(*ness.gap, 0.0);
    for (auto x : ness.spectrum) EXPECT_LE(x.real(), 1e-12);
  }
}

TEST(Exact, CurrentIsConservedAcrossBonds) {
  for (std::size_t n : {3u, 4u, 5u}) {
    const auto p = ModelParams::uniform(n, 0.5, 0.5, 1.0, 0.0);
    const auto obs = dense_observables(dense_ness(p), p);
    for (double j : obs.current) EXPECT_NEAR(j, obs.current[0], 1e-10);
  }
}

TEST(Exact, DegenerateNullSpaceIsReported) {
  // A bath on site 1 alone leaves site 2 free, so every state of site 2 is stationary.
  const Eigen::MatrixXcd l = oracle::dissipator(oracle::embed(oracle::pauli('-'), 1, 2));
  EXPECT_THROW(dense_ness(l), NumericalError);
}

TEST(Exact, HilbertSchmidtIdentity) {
  std::mt19937_64 rng(91);
  for (int t = 0; t < 20; ++t) {
    const Eigen::MatrixXcd a = oracle::random_matrix(4, 4, rng);
    const Eigen::MatrixXcd b = oracle::random_matrix(4, 4, rng);
    EXPECT_LT(std::abs(vectorize(a).dot(vectorize(b)) - (a.adjoint() * b).trace()), 1e-12);
  }
}

TEST(Exact, TargetHasSingleZeroMode) {
  const auto p = ModelParams::uniform(3, 1.0, 1.0, 1.0, 0.0);
  const Eigen::MatrixXcd l = dense_liouvillian(p);
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(l.adjoint() * l).eigenvalues();
  EXPECT_NEAR(ev[0], 0.0, 1e-10);
  EXPECT_GT(ev[1], 0.0);
}

TEST(Exact, FixturesMatchFreshOracle) {
  const auto fixtures = read_fixtures(NESSDMRG_FIXTURES);
  ASSERT_FALSE(fixtures.empty());
  for (const auto& fx : fixtures) {
    if (fx.params.n_sites > 5) continue;
    const auto obs = dense_observables(dense_ness(fx.params), fx.params);
    ASSERT_EQ(obs.current.size(), fx.current.size()) << fx.name;
    for (std::size_t k = 0; k < obs.current.size(); ++k) EXPECT_NEAR(obs.current[k], fx.current[k], 1e-10) << fx.name;
    for (std::size_t k = 0; k < obs.magnetization.size(); ++k) {
      EXPECT_NEAR(obs.magnetization[k], fx.magnetization[k], 1e-10) << fx.name;
    }
    EXPECT_LE(fx.residual, 1e-10) << fx.name;
    EXPECT_FALSE(fx.generator.empty());
  }
}

TEST(Exact, FixtureRoundTrip) {
  const auto path = std::filesystem::temp_directory_path() / "nessdmrg_fixture_roundtrip.json";
  const auto fx = make_fixture("N2", ModelParams::uniform(2, 1.0, 1.0, 1.0, 0.0));
  write_fixtures(path.string(), {fx});
  const auto back = read_fixtures(path.string());
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].name, "N2");
  EXPECT_EQ(back[0].current, fx.current);
  EXPECT_EQ(back[0].params.n_sites, 2u);
  std::filesystem::remove(path);
}
