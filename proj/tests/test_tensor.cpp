#include <gtest/gtest.h>

#include <random>

#include "nessdmrg/tensor.hpp"

using namespace nessdmrg;

namespace {

LabeledTensor random_tensor(std::vector<std::string> labels, std::vector<std::size_t> dims,
                            std::mt19937_64& rng) {
  LabeledTensor t(std::move(labels), std::move(dims));
  std::normal_distribution<double> g;
  for (auto& x : t.data()) x = cplx(g(rng), g(rng));
  return t;
}

LabeledTensor pauli(char which, const std::string& a, const std::string& b) {
  const cplx i(0.0, 1.0);
  switch (which) {
    case 'x':
      return LabeledTensor({a, b}, {2, 2}, {0.0, 1.0, 1.0, 0.0});
    case 'y':
      return LabeledTensor({a, b}, {2, 2}, {0.0, -i, i, 0.0});
    default:
      return LabeledTensor({a, b}, {2, 2}, {1.0, 0.0, 0.0, -1.0});
  }
}

double max_diff(const LabeledTensor& a, const LabeledTensor& b) {
  EXPECT_EQ(a.dims(), b.dims());
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

// Generic elementwise contraction over flat multi-indices.
LabeledTensor naive_contract(const LabeledTensor& a, const LabeledTensor& b,
                             const std::vector<LabelPair>& pairs) {
  std::vector<bool> a_contracted(a.rank(), false), b_contracted(b.rank(), false);
  std::vector<std::pair<std::size_t, std::size_t>> idx;
  for (const auto& [la, lb] : pairs) {
    idx.emplace_back(a.index_of(la), b.index_of(lb));
    a_contracted[a.index_of(la)] = true;
    b_contracted[b.index_of(lb)] = true;
  }
  std::vector<std::string> labels;
  std::vector<std::size_t> dims;
  std::vector<std::size_t> a_free, b_free;
  for (std::size_t k = 0; k < a.rank(); ++k) {
    if (!a_contracted[k]) {
      labels.push_back(a.labels()[k]);
      dims.push_back(a.dims()[k]);
      a_free.push_back(k);
    }
  }
  for (std::size_t k = 0; k < b.rank(); ++k) {
    if (!b_contracted[k]) {
      labels.push_back(b.labels()[k]);
      dims.push_back(b.dims()[k]);
      b_free.push_back(k);
    }
  }
  LabeledTensor out(labels, dims);
  auto strides = [](const std::vector<std::size_t>& d) {
    std::vector<std::size_t> s(d.size(), 1);
    for (std::size_t k = d.size(); k-- > 1;) s[k - 1] = s[k] * d[k];
    return s;
  };
  const auto sa = strides(a.dims()), sb = strides(b.dims()), so = strides(dims);
  std::vector<std::size_t> sum_dims;
  for (const auto& [ia, ib] : idx) sum_dims.push_back(a.dims()[ia]);
  std::size_t sum_size = 1;
  for (auto d : sum_dims) sum_size *= d;
  for (std::size_t o = 0; o < out.size(); ++o) {
    std::vector<std::size_t> oi(dims.size());
    for (std::size_t k = 0; k < dims.size(); ++k) oi[k] = (o / so[k]) % dims[k];
    cplx acc = 0.0;
    for (std::size_t s = 0; s < sum_size; ++s) {
      std::size_t fa = 0, fb = 0, rem = s;
      for (std::size_t k = idx.size(); k-- > 0;) {
        const std::size_t v = rem % sum_dims[k];
        rem /= sum_dims[k];
        fa += v * sa[idx[k].first];
        fb += v * sb[idx[k].second];
      }
      for (std::size_t k = 0; k < a_free.size(); ++k) fa += oi[k] * sa[a_free[k]];
      for (std::size_t k = 0; k < b_free.size(); ++k) fb += oi[a_free.size() + k] * sb[b_free[k]];
      acc += a.data()[fa] * b.data()[fb];
    }
    out.data()[o] = acc;
  }
  return out;
}

}  // namespace

TEST(LabeledTensor, RejectsInconsistentConstruction) {
  EXPECT_THROW(LabeledTensor({"a", "a"}, {2, 2}), LabelError);
  EXPECT_THROW(LabeledTensor({"a", "b"}, {2, 2}, std::vector<cplx>(3)), ShapeError);
  EXPECT_THROW(LabeledTensor({"a"}, {0}), ShapeError);
}

TEST(LabeledTensor, PermuteAndRelabelKeepEntries) {
  std::mt19937_64 rng(1);
  const auto t = random_tensor({"a", "b", "c"}, {2, 3, 4}, rng);
  const auto p = t.permuted({"c", "a", "b"});
  EXPECT_EQ(p.dims(), (std::vector<std::size_t>{4, 2, 3}));
  EXPECT_EQ(p.at({3, 1, 2}), t.at({1, 2, 3}));
  const auto r = t.relabeled("b", "z");
  EXPECT_TRUE(r.has_label("z"));
  EXPECT_FALSE(r.has_label("b"));
  EXPECT_THROW(t.relabeled("b", "a"), LabelError);
}

TEST(Contract, IdentityActsTrivially) {
  const LabeledTensor id({"i", "j"}, {2, 2}, {1.0, 0.0, 0.0, 1.0});
  const LabeledTensor v({"j"}, {2}, {cplx(0.3, 1.0), cplx(-2.0, 0.5)});
  const auto out = contract(id, v, {{"j", "j"}});
  EXPECT_EQ(out.labels(), std::vector<std::string>{"i"});
  EXPECT_LT(max_diff(out, v.relabeled("j", "i")), 1e-15);
}

TEST(Contract, PauliProductIsISigmaZ) {
  const auto out = contract(pauli('x', "i", "j"), pauli('y', "j", "k"), {{"j", "j"}});
  const auto expected = cplx(0.0, 1.0) * pauli('z', "i", "k");
  EXPECT_LT(max_diff(out, expected), 1e-15);
}

TEST(Contract, MatchesTripleLoop) {
  std::mt19937_64 rng(2);
  const auto a = random_tensor({"i", "j", "k"}, {3, 4, 5}, rng);
  const auto b = random_tensor({"k", "l"}, {5, 2}, rng);
  const auto out = contract(a, b, {{"k", "k"}});
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      for (std::size_t l = 0; l < 2; ++l) {
        cplx acc = 0.0;
        for (std::size_t k = 0; k < 5; ++k) acc += a.at({i, j, k}) * b.at({k, l});
        EXPECT_LT(std::abs(out.at({i, j, l}) - acc), 1e-12);
      }
    }
  }
}

TEST(Contract, AgreesWithNaiveSummationOnRandomShapes) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<std::size_t> extent(1, 4);
  for (int trial = 0; trial < 40; ++trial) {
    // a: labels a0..a2, b: labels b0..b2; contract a random number of pairs
    const std::size_t ra = 1 + trial % 3, rb = 1 + (trial / 3) % 3;
    std::vector<std::string> la, lb;
    std::vector<std::size_t> da, db;
    for (std::size_t k = 0; k < ra; ++k) {
      la.push_back("a" + std::to_string(k));
      da.push_back(extent(rng));
    }
    for (std::size_t k = 0; k < rb; ++k) {
      lb.push_back("b" + std::to_string(k));
      db.push_back(extent(rng));
    }
    const std::size_t npairs = std::min(ra, rb) == 0 ? 0 : trial % (std::min(ra, rb) + 1);
    std::vector<LabelPair> pairs;
    for (std::size_t k = 0; k < npairs; ++k) {
      db[rb - 1 - k] = da[k];
      pairs.push_back({la[k], lb[rb - 1 - k]});
    }
    const auto a = random_tensor(la, da, rng);
    const auto b = random_tensor(lb, db, rng);
    const auto fast = contract(a, b, pairs);
    const auto slow = naive_contract(a, b, pairs);
    EXPECT_EQ(fast.labels(), slow.labels());
    EXPECT_LT(max_diff(fast, slow), 1e-12);
  }
}

TEST(Contract, EmptyPairsGiveOuterProduct) {
  const LabeledTensor u({"i"}, {2}, {1.0, 2.0});
  const LabeledTensor w({"j"}, {3}, {3.0, 4.0, 5.0});
  const auto out = contract(u, w, std::vector<LabelPair>{});
  EXPECT_EQ(out.at({1, 2}), cplx(10.0));
}

TEST(Contract, IsBilinear) {
  std::mt19937_64 rng(4);
  const auto a = random_tensor({"i", "j"}, {3, 4}, rng);
  const auto a2 = random_tensor({"i", "j"}, {3, 4}, rng);
  const auto b = random_tensor({"j", "k"}, {4, 2}, rng);
  const cplx alpha(0.5, -1.2), beta(2.0, 0.3);
  const auto lhs = contract(alpha * a + beta * a2, b, {{"j", "j"}});
  const auto rhs = alpha * contract(a, b, {{"j", "j"}}) + beta * contract(a2, b, {{"j", "j"}});
  EXPECT_LT(max_diff(lhs, rhs), 1e-12);
}

TEST(Contract, ReportsBadInput) {
  std::mt19937_64 rng(5);
  const auto a = random_tensor({"i", "j"}, {3, 4}, rng);
  const auto b = random_tensor({"j", "k"}, {5, 2}, rng);
  const auto c = random_tensor({"i", "m"}, {3, 4}, rng);
  EXPECT_THROW(contract(a, b, {{"j", "j"}}), ShapeError);
  EXPECT_THROW(contract(a, b, {{"q", "j"}}), LabelError);
  EXPECT_THROW(contract(a, c, {{"j", "m"}}), LabelError);  // both keep "i"
}

TEST(Svd, RankOneOuterProduct) {
  const LabeledTensor t({"i", "j"}, {2, 3}, {1.0, 2.0, 3.0, 2.0, 4.0, 6.0});
  const auto svd = svd_truncate(t, {"i"}, 10, 0.0);
  ASSERT_EQ(svd.s.size(), 1u);
  EXPECT_NEAR(svd.s[0], std::sqrt(5.0) * std::sqrt(14.0), 1e-12);
  EXPECT_EQ(svd.discarded_weight, 0.0);
}

TEST(Svd, IdentityHasUnitSingularValues) {
  LabeledTensor t({"i", "j"}, {4, 4});
  for (std::size_t k = 0; k < 4; ++k) t.at({k, k}) = 1.0;
  const auto svd = svd_truncate(t, {"i"}, 4, 0.0);
  ASSERT_EQ(svd.s.size(), 4u);
  for (double s : svd.s) EXPECT_NEAR(s, 1.0, 1e-14);
}

TEST(Svd, TruncationErrorMatchesDroppedWeight) {
  std::mt19937_64 rng(6);
  const auto t = random_tensor({"i", "j"}, {8, 8}, rng);
  const auto full = svd_truncate(t, {"i"}, 8, 0.0);
  const auto cut = svd_truncate(t, {"i"}, 3, 0.0);
  ASSERT_EQ(cut.s.size(), 3u);
  double dropped = 0.0, total = 0.0;
  for (std::size_t k = 0; k < full.s.size(); ++k) {
    total += full.s[k] * full.s[k];
    if (k >= 3) dropped += full.s[k] * full.s[k];
  }
  const auto approx = reconstruct(cut);
  const double err = (t - approx).norm();
  EXPECT_NEAR(err * err, dropped, 1e-10 * total);
  EXPECT_NEAR(cut.discarded_weight, dropped / total, 1e-12);
}

TEST(Svd, FullRankReconstructsAndFactorsAreIsometries) {
  std::mt19937_64 rng(7);
  const auto t = random_tensor({"a", "b", "c"}, {3, 4, 5}, rng);
  const auto svd = svd_truncate(t, {"a", "c"}, 100, 0.0);
  EXPECT_LT((reconstruct(svd).permuted(t.labels()) - t).norm() / t.norm(), 1e-12);
  for (std::size_t k = 1; k < svd.s.size(); ++k) EXPECT_GE(svd.s[k - 1], svd.s[k]);
  const auto uu = contract(svd.u.conj().relabeled("bond", "b2"), svd.u, {{"a", "a"}, {"c", "c"}});
  const auto vv = contract(svd.v.conj().relabeled("bond", "b2"), svd.v, {{"b", "b"}});
  for (std::size_t i = 0; i < svd.s.size(); ++i) {
    for (std::size_t j = 0; j < svd.s.size(); ++j) {
      EXPECT_NEAR(std::abs(uu.at({i, j}) - (i == j ? 1.0 : 0.0)), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(vv.at({i, j}) - (i == j ? 1.0 : 0.0)), 0.0, 1e-12);
    }
  }
}

TEST(Svd, CutoffDropsSmallTail) {
  LabeledTensor t({"i", "j"}, {3, 3});
  t.at({0, 0}) = 1.0;
  t.at({1, 1}) = 1e-4;
  t.at({2, 2}) = 1e-5;
  const auto svd = svd_truncate(t, {"i"}, 3, 1e-7);
  EXPECT_EQ(svd.s.size(), 1u);
  EXPECT_NEAR(svd.discarded_weight, (1e-8 + 1e-10) / (1.0 + 1e-8 + 1e-10), 1e-15);
}

TEST(Svd, RejectsBadArguments) {
  std::mt19937_64 rng(8);
  const auto t = random_tensor({"i", "j"}, {2, 2}, rng);
  EXPECT_THROW(svd_truncate(t, {}, 2, 0.0), DomainError);
  EXPECT_THROW(svd_truncate(t, {"i", "j"}, 2, 0.0), DomainError);
  EXPECT_THROW(svd_truncate(t, {"i"}, 0, 0.0), DomainError);
}

TEST(Qr, SplitsIntoIsometryTimesTriangle) {
  std::mt19937_64 rng(9);
  const auto t = random_tensor({"l", "p", "r"}, {3, 2, 5}, rng);
  const auto [q, r] = qr_split(t, {"l", "p"});
  const auto back = contract(q, r, {{"bond", "bond"}});
  EXPECT_LT((back - t).norm(), 1e-12);
  const auto qq = contract(q.conj().relabeled("bond", "b2"), q, {{"l", "l"}, {"p", "p"}});
  for (std::size_t i = 0; i < qq.dims()[0]; ++i) {
    EXPECT_NEAR(std::abs(qq.at({i, i}) - 1.0), 0.0, 1e-12);
  }
}
