#include "nessdmrg/mpo.hpp"

#include <algorithm>
#include <random>
#include <string>

namespace nessdmrg {

namespace {

const std::vector<std::string> kOpLabels{"l", "out", "in", "r"};

// Fuses (l1, l2, out, in, r1, r2) into a single rank-4 site tensor.
LabeledTensor fuse_pair(const LabeledTensor& t) {
  const LabeledTensor p = t.permuted({"l1", "l2", "out", "in", "r1", "r2"});
  std::vector<std::size_t> dims{p.dim("l1") * p.dim("l2"), p.dim("out"), p.dim("in"),
                                p.dim("r1") * p.dim("r2")};
  return LabeledTensor(kOpLabels, std::move(dims),
                       std::vector<cplx>(p.data().begin(), p.data().end()));
}

}  // namespace

MatrixProductOperator::MatrixProductOperator(std::vector<LabeledTensor> tensors)
    : tensors_(std::move(tensors)) {
  for (auto& t : tensors_) t = t.permuted(kOpLabels);
  validate();
}

void MatrixProductOperator::validate() const {
  if (tensors_.empty()) throw ShapeError("matrix product operator needs at least one site");
  if (tensors_.front().dim("l") != 1 || tensors_.back().dim("r") != 1) {
    throw ShapeError("boundary bonds of a matrix product operator must have extent 1");
  }
  for (std::size_t k = 0; k < tensors_.size(); ++k) {
    if (tensors_[k].dim("out") != tensors_[k].dim("in")) {
      throw ShapeError("operator site " + std::to_string(k + 1) + " is not square");
    }
    if (k + 1 < tensors_.size() && tensors_[k].dim("r") != tensors_[k + 1].dim("l")) {
      throw ShapeError("operator bond mismatch after site " + std::to_string(k + 1));
    }
  }
}

std::vector<std::size_t> MatrixProductOperator::phys_dims() const {
  std::vector<std::size_t> out;
  for (const auto& t : tensors_) out.push_back(t.dim("out"));
  return out;
}

std::size_t MatrixProductOperator::max_bond() const {
  std::size_t m = 1;
  for (const auto& t : tensors_) m = std::max(m, t.dim("r"));
  return m;
}

bool MatrixProductOperator::acts_on(std::size_t k, double tol) const {
  const LabeledTensor& w = tensors_.at(k);
  const std::size_t dl = w.dim("l"), d = w.dim("out"), dr = w.dim("r");
  for (std::size_t a = 0; a < dl; ++a) {
    for (std::size_t b = 0; b < dr; ++b) {
      const cplx diag = w.at({a, 0, 0, b});
      for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
          const cplx expect = i == j ? diag : cplx(0.0);
          if (std::abs(w.at({a, i, j, b}) - expect) > tol) return true;
        }
      }
    }
  }
  return false;
}

MatrixProductOperator identity_mpo(const std::vector<std::size_t>& phys_dims) {
  std::vector<LabeledTensor> tensors;
  for (auto d : phys_dims) {
    LabeledTensor t(kOpLabels, {1, d, d, 1});
    for (std::size_t i = 0; i < d; ++i) t.at({0, i, i, 0}) = 1.0;
    tensors.push_back(std::move(t));
  }
  return MatrixProductOperator(std::move(tensors));
}

MatrixProductOperator local_mpo(const std::vector<std::size_t>& phys_dims, std::size_t site,
                                const Eigen::MatrixXcd& op) {
  if (site < 1 || site > phys_dims.size()) throw DomainError("local operator site out of range");
  std::vector<LabeledTensor> tensors = identity_mpo(phys_dims).tensors();
  const std::size_t d = phys_dims[site - 1];
  if (static_cast<std::size_t>(op.rows()) != d || static_cast<std::size_t>(op.cols()) != d) {
    throw ShapeError("local operator does not match the physical dimension");
  }
  LabeledTensor& t = tensors[site - 1];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      t.at({0, i, j, 0}) = op(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return MatrixProductOperator(std::move(tensors));
}

MatrixProductOperator random_mpo(const std::vector<std::size_t>& phys_dims, std::size_t bond,
                                 std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<LabeledTensor> tensors;
  const std::size_t n = phys_dims.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t dl = k == 0 ? 1 : bond;
    const std::size_t dr = k + 1 == n ? 1 : bond;
    LabeledTensor t(kOpLabels, {dl, phys_dims[k], phys_dims[k], dr});
    for (auto& x : t.data()) x = cplx(gauss(rng), gauss(rng));
    tensors.push_back(std::move(t));
  }
  return MatrixProductOperator(std::move(tensors));
}

MatrixProductOperator mpo_dagger(const MatrixProductOperator& a) {
  std::vector<LabeledTensor> tensors;
  for (const auto& t : a.tensors()) {
    tensors.push_back(t.conj().relabeled({"l", "in", "out", "r"}));
  }
  return MatrixProductOperator(std::move(tensors));
}

MatrixProductOperator operator*(cplx s, MatrixProductOperator a) {
  std::vector<LabeledTensor> tensors = a.tensors();
  tensors.front() *= s;
  return MatrixProductOperator(std::move(tensors));
}

MpoProduct mpo_product(const MatrixProductOperator& a, const MatrixProductOperator& b,
                       double cutoff) {
  if (a.length() != b.length() || a.phys_dims() != b.phys_dims()) {
    throw ShapeError("operator product of mismatched chains");
  }
  std::vector<LabeledTensor> tensors;
  for (std::size_t k = 0; k < a.length(); ++k) {
    const auto wa = a.tensors()[k].relabeled({"l1", "out", "mid", "r1"});
    const auto wb = b.tensors()[k].relabeled({"l2", "mid", "in", "r2"});
    tensors.push_back(fuse_pair(contract(wa, wb, {{"mid", "mid"}})));
  }
  MatrixProductOperator exact(std::move(tensors));
  if (cutoff <= 0.0) return {std::move(exact), 0.0};
  return compress(exact, cutoff);
}

MpoProduct compress(const MatrixProductOperator& a, double cutoff) {
  const std::size_t n = a.length();
  std::vector<LabeledTensor> t = a.tensors();
  for (std::size_t k = 0; k + 1 < n; ++k) {
    auto [q, r] = qr_split(t[k], {"l", "out", "in"});
    t[k] = q.relabeled("bond", "r");
    t[k + 1] = contract(r, t[k + 1], {{"r", "l"}}).relabeled("bond", "l");
  }
  double discarded = 0.0;
  for (std::size_t k = n - 1; k > 0; --k) {
    SvdResult svd = svd_truncate(t[k], {"l"}, t[k].dim("l"), cutoff);
    discarded += svd.discarded_weight;
    LabeledTensor us = svd.u;
    const std::size_t bond = svd.s.size();
    auto data = us.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= svd.s[i % bond];
    t[k] = svd.v.relabeled("bond", "l");
    t[k - 1] = contract(t[k - 1], us, {{"r", "l"}}).relabeled("bond", "r");
  }
  return {MatrixProductOperator(std::move(t)), discarded};
}

cplx overlap3(const MatrixProductState& bra, const MatrixProductOperator& op,
              const MatrixProductState& ket) {
  if (bra.length() != op.length() || ket.length() != op.length() ||
      bra.phys_dims() != op.phys_dims() || ket.phys_dims() != op.phys_dims()) {
    throw ShapeError("overlap of mismatched state and operator chains");
  }
  LabeledTensor env({"a", "w", "b"}, {1, 1, 1}, {cplx(1.0)});
  for (std::size_t k = 0; k < op.length(); ++k) {
    LabeledTensor x =
        contract(env, ket.tensors()[k], {{"b", "l"}}).relabeled({"a", "w", "pin", "rb"});
    LabeledTensor y = contract(x, op.tensors()[k], {{"w", "l"}, {"pin", "in"}})
                          .relabeled({"a", "rb", "out", "rw"});
    env = contract(bra.tensors()[k].conj(), y, {{"l", "a"}, {"p", "out"}})
              .relabeled({"a", "b", "w"})
              .permuted({"a", "w", "b"});
  }
  return env.data()[0];
}

MatrixProductState apply(const MatrixProductOperator& op, const MatrixProductState& ket) {
  if (ket.length() != op.length() || ket.phys_dims() != op.phys_dims()) {
    throw ShapeError("operator and state chains do not match");
  }
  std::vector<LabeledTensor> tensors;
  for (std::size_t k = 0; k < op.length(); ++k) {
    const auto w = op.tensors()[k].relabeled({"l1", "p", "in", "r1"});
    const auto s = ket.tensors()[k].relabeled({"l2", "in", "r2"});
    const LabeledTensor c = contract(w, s, {{"in", "in"}}).permuted({"l1", "l2", "p", "r1", "r2"});
    std::vector<std::size_t> dims{c.dim("l1") * c.dim("l2"), c.dim("p"),
                                  c.dim("r1") * c.dim("r2")};
    tensors.emplace_back(std::vector<std::string>{"l", "p", "r"}, std::move(dims),
                         std::vector<cplx>(c.data().begin(), c.data().end()));
  }
  return MatrixProductState(std::move(tensors));
}

Eigen::MatrixXcd to_dense(const MatrixProductOperator& op) {
  const std::size_t n = op.length();
  LabeledTensor acc = op.tensors()[0].relabeled({"l", "o0", "i0", "r"});
  for (std::size_t k = 1; k < n; ++k) {
    const auto site = op.tensors()[k].relabeled(
        {"l", "o" + std::to_string(k), "i" + std::to_string(k), "rr"});
    acc = contract(acc, site, {{"r", "l"}}).relabeled("rr", "r");
  }
  std::vector<std::string> order{"l"};
  for (std::size_t k = 0; k < n; ++k) order.push_back("o" + std::to_string(k));
  for (std::size_t k = 0; k < n; ++k) order.push_back("i" + std::to_string(k));
  order.push_back("r");
  acc = acc.permuted(order);

  std::size_t dim = 1;
  for (auto d : op.phys_dims()) dim *= d;
  const auto rows = static_cast<Eigen::Index>(dim);
  using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  return Eigen::Map<const RowMatrix>(acc.data().data(), rows, rows);
}

}  // namespace nessdmrg
