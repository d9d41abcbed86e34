#include <gtest/gtest.h>

#include "nessdmrg/superspace.hpp"
#include "support/oracles.hpp"

using namespace nessdmrg;

namespace {

const std::vector<Ordering> kOrderings{Ordering::RLN, Ordering::RNLN};

}  // namespace

TEST(Vectorize, StacksColumns) {
  Eigen::MatrixXcd m(2, 2);
  m << 1.0, 2.0, 3.0, 4.0;
  const Eigen::VectorXcd v = vectorize(m);
  EXPECT_EQ(v, (Eigen::VectorXcd(4) << 1.0, 3.0, 2.0, 4.0).finished());
  EXPECT_EQ(vectorize(Eigen::MatrixXcd::Identity(2, 2)),
            (Eigen::VectorXcd(4) << 1.0, 0.0, 0.0, 1.0).finished());
  EXPECT_EQ(unvectorize((Eigen::VectorXcd(4) << 1.0, 0.0, 0.0, 1.0).finished(), 2),
            Eigen::MatrixXcd::Identity(2, 2));
  EXPECT_THROW(unvectorize(Eigen::VectorXcd::Zero(5), 2), ShapeError);
}

TEST(Vectorize, RoundTrip) {
  std::mt19937_64 rng(51);
  const Eigen::MatrixXcd m = oracle::random_matrix(4, 4, rng);
  EXPECT_EQ(unvectorize(vectorize(m), 4), m);
}

TEST(Vectorize, SandwichAndHilbertSchmidtIdentities) {
  std::mt19937_64 rng(52);
  for (int trial = 0; trial < 60; ++trial) {
    const Eigen::Index d = Eigen::Index{1} << (1 + trial % 3);
    const Eigen::MatrixXcd a = oracle::random_matrix(d, d, rng);
    const Eigen::MatrixXcd rho = oracle::random_matrix(d, d, rng);
    const Eigen::MatrixXcd b = oracle::random_matrix(d, d, rng);
    const Eigen::VectorXcd lhs = vectorize(a * rho * b);
    const Eigen::VectorXcd rhs = oracle::kron(b.transpose(), a) * vectorize(rho);
    EXPECT_LT((lhs - rhs).norm(), 1e-12 * lhs.norm());
    const cplx hs = vectorize(a).dot(vectorize(b));
    EXPECT_LT(std::abs(hs - (a.adjoint() * b).trace()), 1e-12 * std::abs(hs) + 1e-12);
  }
}

TEST(Ordering, ParsesNames) {
  EXPECT_EQ(parse_ordering("RLN"), Ordering::RLN);
  EXPECT_EQ(parse_ordering("rnln"), Ordering::RNLN);
  EXPECT_THROW(parse_ordering("lrn"), DomainError);
  EXPECT_EQ(to_string(Ordering::RNLN), "rnln");
}

TEST(Ordering, SiteMaps) {
  const OrderingScheme rln(Ordering::RLN, 4), rnln(Ordering::RNLN, 4);
  EXPECT_EQ(rln.primed_site(3), 5u);
  EXPECT_EQ(rln.unprimed_site(3), 6u);
  EXPECT_EQ(rnln.primed_site(3), 3u);
  EXPECT_EQ(rnln.unprimed_site(3), 7u);
  EXPECT_THROW(rln.primed_site(5), DomainError);
  for (auto kind : kOrderings) {
    const OrderingScheme s(kind, 3);
    const Eigen::MatrixXcd p = oracle::chain_to_vec(kind, 3);
    std::mt19937_64 rng(53);
    const Eigen::VectorXcd v = oracle::random_matrix(64, 1, rng);
    EXPECT_LT((to_vec_order(v, s) - p * v).norm(), 1e-15);
  }
}

TEST(SideOps, MapToExpectedLegs) {
  const OrderingScheme rln(Ordering::RLN, 3);
  const auto sx = map_side_op({1, "Sx", Side::L}, rln);
  EXPECT_EQ(sx.site, 2u);
  EXPECT_LT((sx.matrix - 0.5 * oracle::pauli('x')).norm(), 1e-15);
  const auto sm = map_side_op({1, "S-", Side::R}, rln);
  EXPECT_EQ(sm.site, 1u);
  EXPECT_LT((sm.matrix - oracle::pauli('-').transpose()).norm(), 1e-15);
  EXPECT_THROW(map_side_op({4, "Sx", Side::L}, rln), DomainError);
  EXPECT_THROW(superspace_term(1.0, {{1, "Sx", Side::L}, {1, "Sz", Side::L}}, rln), DomainError);
}

TEST(SideOps, JumpTermMatchesKron) {
  for (auto kind : kOrderings) {
    const OrderingScheme s(kind, 2);
    auto b = superspace_builder(s);
    b.add_term(superspace_term(1.0, {{1, "S-", Side::L}, {1, "S+", Side::R}}, s));
    const Eigen::MatrixXcd chain = to_dense(compile_mpo(b));
    const Eigen::MatrixXcd sm = oracle::embed(oracle::pauli('-'), 1, 2);
    const Eigen::MatrixXcd expected = oracle::kron(sm.adjoint().transpose(), sm);
    const Eigen::MatrixXcd p = oracle::chain_to_vec(kind, 2);
    EXPECT_LT((p * chain * p.transpose() - expected).norm(), 1e-14) << to_string(kind);
    EXPECT_LT((to_vec_order(chain, s) - expected).norm(), 1e-14) << to_string(kind);
  }
}

TEST(Ivec, SingleSiteIsIdentity) {
  for (auto kind : kOrderings) {
    const auto ivec = make_ivec(OrderingScheme(kind, 1));
    EXPECT_EQ(to_dense(ivec), (Eigen::VectorXcd(4) << 1.0, 0.0, 0.0, 1.0).finished());
  }
}

TEST(Ivec, NormAndTraceFunctional) {
  std::mt19937_64 rng(54);
  for (auto kind : kOrderings) {
    for (std::size_t n = 1; n <= 3; ++n) {
      const OrderingScheme s(kind, n);
      const auto ivec = make_ivec(s);
      EXPECT_NEAR(inner(ivec, ivec).real(), std::pow(2.0, n), 1e-12);
      EXPECT_LT((to_vec_order(to_dense(ivec), s) - vectorize(Eigen::MatrixXcd::Identity(1 << n, 1 << n))).norm(), 1e-14);
      const Eigen::MatrixXcd rho = oracle::random_density(1 << n, rng);
      const Eigen::VectorXcd chain = oracle::chain_to_vec(kind, n).transpose() * vectorize(rho);
      const auto rho_mps = oracle::mps_from_dense(chain, 2 * n);
      EXPECT_LT(std::abs(inner(ivec, rho_mps) - rho.trace()), 1e-12);
    }
  }
}

TEST(Ivec, BondStructure) {
  const auto rln = make_ivec(OrderingScheme(Ordering::RLN, 5));
  for (std::size_t k = 0; k + 1 < 10; ++k) EXPECT_EQ(rln.bond_dim(k), k % 2 == 0 ? 2u : 1u);
  const auto rnln = make_ivec(OrderingScheme(Ordering::RNLN, 4));
  for (std::size_t k = 0; k + 1 < 8; ++k) {
    EXPECT_EQ(rnln.bond_dim(k), std::size_t{1} << std::min(k + 1, 7 - k));
  }
}
