#include "nessdmrg/mps.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace nessdmrg {

namespace {

const std::vector<std::string> kSiteLabels{"l", "p", "r"};

LabeledTensor as_site(const LabeledTensor& t) { return t.permuted(kSiteLabels); }

}  // namespace

MatrixProductState::MatrixProductState(std::vector<LabeledTensor> tensors,
                                       std::optional<std::size_t> ortho_center)
    : tensors_(std::move(tensors)), ortho_center_(ortho_center) {
  for (auto& t : tensors_) t = as_site(t);
  validate();
}

void MatrixProductState::validate() const {
  if (tensors_.empty()) throw ShapeError("matrix product state needs at least one site");
  if (tensors_.front().dim("l") != 1 || tensors_.back().dim("r") != 1) {
    throw ShapeError("boundary bonds of a matrix product state must have extent 1");
  }
  for (std::size_t k = 0; k + 1 < tensors_.size(); ++k) {
    if (tensors_[k].dim("r") != tensors_[k + 1].dim("l")) {
      throw ShapeError("bond mismatch between sites " + std::to_string(k + 1) + " and " +
                       std::to_string(k + 2));
    }
  }
  if (ortho_center_ && (*ortho_center_ < 1 || *ortho_center_ > tensors_.size())) {
    throw DomainError("orthogonality center out of range");
  }
}

std::vector<std::size_t> MatrixProductState::phys_dims() const {
  std::vector<std::size_t> out;
  for (const auto& t : tensors_) out.push_back(t.dim("p"));
  return out;
}

std::size_t MatrixProductState::max_bond() const {
  std::size_t m = 1;
  for (const auto& t : tensors_) m = std::max(m, t.dim("r"));
  return m;
}

void MatrixProductState::set_tensor(std::size_t k, LabeledTensor t,
                                    std::optional<std::size_t> ortho_center) {
  t = as_site(t);
  const std::size_t left = k == 0 ? 1 : tensors_[k - 1].dim("r");
  const std::size_t right = k + 1 == tensors_.size() ? 1 : tensors_[k + 1].dim("l");
  if (t.dim("l") != left || t.dim("r") != right) {
    throw ShapeError("replacement tensor does not fit its neighbours at site " +
                     std::to_string(k + 1));
  }
  tensors_[k] = std::move(t);
  ortho_center_ = ortho_center;
}

void MatrixProductState::set_pair(std::size_t k, LabeledTensor a, LabeledTensor b,
                                  std::optional<std::size_t> ortho_center) {
  a = as_site(a);
  b = as_site(b);
  const std::size_t left = k == 0 ? 1 : tensors_[k - 1].dim("r");
  const std::size_t right = k + 2 == tensors_.size() ? 1 : tensors_[k + 2].dim("l");
  if (a.dim("l") != left || b.dim("r") != right || a.dim("r") != b.dim("l")) {
    throw ShapeError("replacement pair does not fit at sites " + std::to_string(k + 1) + "-" +
                     std::to_string(k + 2));
  }
  tensors_[k] = std::move(a);
  tensors_[k + 1] = std::move(b);
  ortho_center_ = ortho_center;
}

MatrixProductState& MatrixProductState::operator*=(cplx s) {
  const std::size_t k = ortho_center_ ? *ortho_center_ - 1 : 0;
  tensors_[k] *= s;
  return *this;
}

MatrixProductState operator*(cplx s, MatrixProductState psi) { return psi *= s; }

MatrixProductState product_state(const std::vector<std::vector<cplx>>& local) {
  std::vector<LabeledTensor> tensors;
  for (const auto& v : local) {
    tensors.emplace_back(kSiteLabels, std::vector<std::size_t>{1, v.size(), 1}, v);
  }
  return MatrixProductState(std::move(tensors));
}

MatrixProductState random_mps(const std::vector<std::size_t>& phys_dims, std::size_t bond,
                              std::uint64_t seed) {
  const std::size_t n = phys_dims.size();
  // exact bond limit from both ends
  std::vector<std::size_t> bonds(n + 1, 1);
  for (std::size_t k = 1; k < n; ++k) {
    double left = 1.0, right = 1.0;
    for (std::size_t j = 0; j < k; ++j) left *= static_cast<double>(phys_dims[j]);
    for (std::size_t j = k; j < n; ++j) right *= static_cast<double>(phys_dims[j]);
    bonds[k] = static_cast<std::size_t>(std::min({static_cast<double>(bond), left, right}));
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<LabeledTensor> tensors;
  for (std::size_t k = 0; k < n; ++k) {
    LabeledTensor t(kSiteLabels, {bonds[k], phys_dims[k], bonds[k + 1]});
    for (auto& x : t.data()) x = cplx(gauss(rng), gauss(rng));
    tensors.push_back(std::move(t));
  }
  return MatrixProductState(std::move(tensors));
}

MatrixProductState canonicalize(const MatrixProductState& psi, std::size_t center) {
  const std::size_t n = psi.length();
  if (center < 1 || center > n) {
    throw DomainError("canonicalization center " + std::to_string(center) + " outside [1, " +
                      std::to_string(n) + "]");
  }
  std::vector<LabeledTensor> t = psi.tensors();
  const std::size_t c = center - 1;
  for (std::size_t k = 0; k < c; ++k) {
    auto [q, r] = qr_split(t[k], {"l", "p"});
    t[k] = q.relabeled("bond", "r");
    t[k + 1] = contract(r, t[k + 1], {{"r", "l"}}).relabeled("bond", "l");
  }
  for (std::size_t k = n - 1; k > c; --k) {
    auto [q, r] = qr_split(t[k], {"p", "r"});
    t[k] = q.relabeled("bond", "l");
    t[k - 1] = contract(t[k - 1], r, {{"r", "l"}}).relabeled("bond", "r");
  }
  return MatrixProductState(std::move(t), center);
}

MatrixProductState truncate(const MatrixProductState& psi, std::size_t max_bond, double cutoff) {
  const std::size_t n = psi.length();
  std::vector<LabeledTensor> t = canonicalize(psi, n).tensors();
  for (std::size_t k = n - 1; k > 0; --k) {
    SvdResult svd = svd_truncate(t[k], {"l"}, max_bond, cutoff);
    LabeledTensor us = svd.u;
    const std::size_t bond = svd.s.size();
    auto data = us.data();
    for (std::size_t i = 0; i < data.size(); ++i) data[i] *= svd.s[i % bond];
    t[k] = svd.v.relabeled("bond", "l");
    t[k - 1] = contract(t[k - 1], us, {{"r", "l"}}).relabeled("bond", "r");
  }
  return MatrixProductState(std::move(t), std::size_t{1});
}

cplx inner(const MatrixProductState& a, const MatrixProductState& b) {
  if (a.length() != b.length() || a.phys_dims() != b.phys_dims()) {
    throw ShapeError("inner product of states with different shapes");
  }
  LabeledTensor env({"a", "b"}, {1, 1}, {cplx(1.0)});
  for (std::size_t k = 0; k < a.length(); ++k) {
    LabeledTensor x = contract(env, b.tensors()[k], {{"b", "l"}}).relabeled({"a", "p", "rb"});
    env = contract(a.tensors()[k].conj(), x, {{"l", "a"}, {"p", "p"}}).relabeled({"a", "b"});
  }
  return env.data()[0];
}

double norm(const MatrixProductState& psi) { return std::sqrt(std::abs(inner(psi, psi))); }

Eigen::VectorXcd to_dense(const MatrixProductState& psi) {
  LabeledTensor acc = psi.tensors()[0].relabeled({"l", "p0", "r"});
  for (std::size_t k = 1; k < psi.length(); ++k) {
    const auto site = psi.tensors()[k].relabeled({"l", "p" + std::to_string(k), "rr"});
    acc = contract(acc, site, {{"r", "l"}}).relabeled("rr", "r");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(acc.size()));
  std::copy(acc.data().begin(), acc.data().end(), v.data());
  return v;
}

bool is_left_isometry(const LabeledTensor& t, double tol) {
  const LabeledTensor g =
      contract(t.conj().relabeled("r", "r0"), t, {{"l", "l"}, {"p", "p"}});
  const std::size_t d = g.dims()[0];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(g.at({i, j}) - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

bool is_right_isometry(const LabeledTensor& t, double tol) {
  const LabeledTensor g =
      contract(t.conj().relabeled("l", "l0"), t, {{"p", "p"}, {"r", "r"}});
  const std::size_t d = g.dims()[0];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      if (std::abs(g.at({i, j}) - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  }
  return true;
}

}  // namespace nessdmrg
