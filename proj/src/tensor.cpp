#include "nessdmrg/tensor.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_set>

#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

namespace nessdmrg {

namespace {

using RowMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct DenseSvd {
  std::vector<double> s;
  RowMatrix u;   // rows x k
  RowMatrix vh;  // k x cols
};

// Thin SVD of a row-major matrix; divide and conquer with a QR-iteration fallback.
DenseSvd thin_svd(const cplx* data, std::size_t rows, std::size_t cols) {
  const auto m = static_cast<lapack_int>(rows);
  const auto n = static_cast<lapack_int>(cols);
  const lapack_int k = std::min(m, n);
  DenseSvd out;
  out.s.resize(static_cast<std::size_t>(k));
  out.u.resize(m, k);
  out.vh.resize(k, n);
  RowMatrix a = Eigen::Map<const RowMatrix>(data, m, n);
  lapack_int info = LAPACKE_zgesdd(LAPACK_ROW_MAJOR, 'S', m, n, a.data(), n, out.s.data(),
                                   out.u.data(), k, out.vh.data(), n);
  if (info > 0) {
    a = Eigen::Map<const RowMatrix>(data, m, n);
    std::vector<double> superb(static_cast<std::size_t>(std::max<lapack_int>(1, k - 1)));
    info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'S', 'S', m, n, a.data(), n, out.s.data(),
                          out.u.data(), k, out.vh.data(), n, superb.data());
  }
  if (info != 0) throw NumericalError("SVD did not converge (LAPACK info " + std::to_string(info) + ")");
  return out;
}

std::size_t product(const std::vector<std::size_t>& dims) {
  return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

void check_unique(const std::vector<std::string>& labels) {
  std::unordered_set<std::string> seen;
  for (const auto& l : labels) {
    if (!seen.insert(l).second) throw LabelError("duplicate label '" + l + "'");
  }
}

std::string join(const std::vector<std::string>& labels) {
  std::string out = "(";
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i) out += ",";
    out += labels[i];
  }
  return out + ")";
}

// out index k takes input index perm[k].
std::vector<cplx> permute_data(std::span<const cplx> in, const std::vector<std::size_t>& dims,
                               const std::vector<std::size_t>& perm) {
  const std::size_t rank = dims.size();
  std::vector<cplx> out(in.size());
  if (in.empty()) return out;
  if (rank == 0) {
    out[0] = in[0];
    return out;
  }

  std::vector<std::size_t> in_stride(rank, 1);
  for (std::size_t k = rank - 1; k > 0; --k) in_stride[k - 1] = in_stride[k] * dims[k];

  std::vector<std::size_t> out_dims(rank), stride(rank);
  for (std::size_t k = 0; k < rank; ++k) {
    out_dims[k] = dims[perm[k]];
    stride[k] = in_stride[perm[k]];
  }

  const std::size_t inner = out_dims[rank - 1];
  const std::size_t inner_stride = stride[rank - 1];
  std::vector<std::size_t> counter(rank, 0);
  std::size_t offset = 0;
  for (std::size_t pos = 0; pos < out.size(); pos += inner) {
    const cplx* src = in.data() + offset;
    cplx* dst = out.data() + pos;
    for (std::size_t j = 0; j < inner; ++j) dst[j] = src[j * inner_stride];

    // odometer over all but the innermost output index
    for (std::size_t k = rank - 1; k-- > 0;) {
      ++counter[k];
      offset += stride[k];
      if (counter[k] < out_dims[k]) break;
      offset -= stride[k] * out_dims[k];
      counter[k] = 0;
    }
  }
  return out;
}

bool is_identity(const std::vector<std::size_t>& perm) {
  for (std::size_t k = 0; k < perm.size(); ++k) {
    if (perm[k] != k) return false;
  }
  return true;
}

}  // namespace

LabeledTensor::LabeledTensor(std::vector<std::string> labels, std::vector<std::size_t> dims)
    : LabeledTensor(std::move(labels), dims, std::vector<cplx>(product(dims))) {}

LabeledTensor::LabeledTensor(std::vector<std::string> labels, std::vector<std::size_t> dims,
                             std::vector<cplx> data)
    : labels_(std::move(labels)), dims_(std::move(dims)), data_(std::move(data)) {
  if (labels_.size() != dims_.size()) {
    throw ShapeError("label count " + std::to_string(labels_.size()) + " != dim count " +
                     std::to_string(dims_.size()));
  }
  check_unique(labels_);
  for (auto d : dims_) {
    if (d == 0) throw ShapeError("tensor extents must be positive");
  }
  if (product(dims_) != data_.size()) {
    throw ShapeError("data length " + std::to_string(data_.size()) +
                     " does not match extents of " + join(labels_));
  }
}

bool LabeledTensor::has_label(const std::string& label) const {
  return std::find(labels_.begin(), labels_.end(), label) != labels_.end();
}

std::size_t LabeledTensor::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw LabelError("no label '" + label + "' in " + join(labels_));
  return static_cast<std::size_t>(it - labels_.begin());
}

std::size_t LabeledTensor::dim(const std::string& label) const { return dims_[index_of(label)]; }

std::size_t LabeledTensor::flat_index(std::initializer_list<std::size_t> idx) const {
  if (idx.size() != rank()) throw ShapeError("index arity mismatch");
  std::size_t flat = 0;
  std::size_t k = 0;
  for (auto i : idx) {
    if (i >= dims_[k]) throw ShapeError("index out of range");
    flat = flat * dims_[k] + i;
    ++k;
  }
  return flat;
}

cplx& LabeledTensor::at(std::initializer_list<std::size_t> idx) { return data_[flat_index(idx)]; }

cplx LabeledTensor::at(std::initializer_list<std::size_t> idx) const {
  return data_[flat_index(idx)];
}

LabeledTensor LabeledTensor::relabeled(std::vector<std::string> names) const {
  if (names.size() != labels_.size()) throw ShapeError("relabel arity mismatch");
  return LabeledTensor(std::move(names), dims_, data_);
}

LabeledTensor LabeledTensor::relabeled(const std::string& from, const std::string& to) const {
  auto names = labels_;
  names[index_of(from)] = to;
  return relabeled(std::move(names));
}

LabeledTensor LabeledTensor::permuted(const std::vector<std::string>& order) const {
  if (order.size() != rank()) {
    throw LabelError("permutation " + join(order) + " does not cover " + join(labels_));
  }
  std::vector<std::size_t> perm(order.size());
  std::vector<std::size_t> new_dims(order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    perm[k] = index_of(order[k]);
    new_dims[k] = dims_[perm[k]];
  }
  check_unique(order);
  if (is_identity(perm)) return *this;
  return LabeledTensor(order, std::move(new_dims), permute_data(data_, dims_, perm));
}

LabeledTensor LabeledTensor::conj() const {
  LabeledTensor out = *this;
  for (auto& x : out.data_) x = std::conj(x);
  return out;
}

double LabeledTensor::norm() const {
  double acc = 0.0;
  for (const auto& x : data_) acc += std::norm(x);
  return std::sqrt(acc);
}

LabeledTensor& LabeledTensor::operator*=(cplx s) {
  for (auto& x : data_) x *= s;
  return *this;
}

LabeledTensor& LabeledTensor::operator+=(const LabeledTensor& other) {
  const LabeledTensor aligned = other.permuted(labels_);
  if (aligned.dims_ != dims_) throw ShapeError("extent mismatch in tensor sum");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += aligned.data_[i];
  return *this;
}

LabeledTensor& LabeledTensor::operator-=(const LabeledTensor& other) {
  const LabeledTensor aligned = other.permuted(labels_);
  if (aligned.dims_ != dims_) throw ShapeError("extent mismatch in tensor difference");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= aligned.data_[i];
  return *this;
}

LabeledTensor operator*(cplx s, LabeledTensor t) { return t *= s; }
LabeledTensor operator+(LabeledTensor a, const LabeledTensor& b) { return a += b; }
LabeledTensor operator-(LabeledTensor a, const LabeledTensor& b) { return a -= b; }

LabeledTensor contract(const LabeledTensor& a, const LabeledTensor& b,
                       std::initializer_list<LabelPair> pairs) {
  return contract(a, b, std::span<const LabelPair>(pairs.begin(), pairs.size()));
}

LabeledTensor contract(const LabeledTensor& a, const LabeledTensor& b,
                       std::span<const LabelPair> pairs) {
  std::vector<std::size_t> a_con, b_con;
  for (const auto& [la, lb] : pairs) {
    const auto ia = a.index_of(la);
    const auto ib = b.index_of(lb);
    if (a.dims()[ia] != b.dims()[ib]) {
      throw ShapeError("cannot contract '" + la + "' (" + std::to_string(a.dims()[ia]) +
                       ") with '" + lb + "' (" + std::to_string(b.dims()[ib]) + ")");
    }
    if (std::find(a_con.begin(), a_con.end(), ia) != a_con.end() ||
        std::find(b_con.begin(), b_con.end(), ib) != b_con.end()) {
      throw LabelError("label contracted twice in pair list");
    }
    a_con.push_back(ia);
    b_con.push_back(ib);
  }

  std::vector<std::size_t> a_perm, b_perm;
  std::vector<std::string> out_labels;
  std::vector<std::size_t> out_dims;
  std::size_t rows = 1, cols = 1, inner = 1;
  for (std::size_t k = 0; k < a.rank(); ++k) {
    if (std::find(a_con.begin(), a_con.end(), k) != a_con.end()) continue;
    a_perm.push_back(k);
    out_labels.push_back(a.labels()[k]);
    out_dims.push_back(a.dims()[k]);
    rows *= a.dims()[k];
  }
  for (auto k : a_con) {
    a_perm.push_back(k);
    inner *= a.dims()[k];
  }
  b_perm = b_con;
  for (std::size_t k = 0; k < b.rank(); ++k) {
    if (std::find(b_con.begin(), b_con.end(), k) != b_con.end()) continue;
    b_perm.push_back(k);
    out_labels.push_back(b.labels()[k]);
    out_dims.push_back(b.dims()[k]);
    cols *= b.dims()[k];
  }
  check_unique(out_labels);

  std::vector<cplx> a_buf, b_buf;
  std::span<const cplx> a_data = a.data();
  std::span<const cplx> b_data = b.data();
  if (!is_identity(a_perm)) {
    a_buf = permute_data(a.data(), a.dims(), a_perm);
    a_data = a_buf;
  }
  if (!is_identity(b_perm)) {
    b_buf = permute_data(b.data(), b.dims(), b_perm);
    b_data = b_buf;
  }

  std::vector<cplx> out(rows * cols);
  Eigen::Map<const RowMatrix> am(a_data.data(), static_cast<Eigen::Index>(rows),
                                 static_cast<Eigen::Index>(inner));
  Eigen::Map<const RowMatrix> bm(b_data.data(), static_cast<Eigen::Index>(inner),
                                 static_cast<Eigen::Index>(cols));
  Eigen::Map<RowMatrix> cm(out.data(), static_cast<Eigen::Index>(rows),
                           static_cast<Eigen::Index>(cols));
  cm.noalias() = am * bm;
  return LabeledTensor(std::move(out_labels), std::move(out_dims), std::move(out));
}

SvdResult svd_truncate(const LabeledTensor& t, const std::vector<std::string>& row_labels,
                       std::size_t max_rank, double cutoff, const std::string& bond_label) {
  if (row_labels.empty() || row_labels.size() >= t.rank()) {
    throw DomainError("svd row labels must be a nonempty proper subset of " + join(t.labels()));
  }
  if (max_rank < 1) throw DomainError("svd max_rank must be at least 1");
  if (cutoff < 0.0) throw DomainError("svd cutoff must be non-negative");

  std::vector<std::string> col_labels;
  for (const auto& l : t.labels()) {
    if (std::find(row_labels.begin(), row_labels.end(), l) == row_labels.end()) {
      col_labels.push_back(l);
    }
  }
  if (row_labels.size() + col_labels.size() != t.rank()) {
    throw LabelError("svd row labels " + join(row_labels) + " not all present in " +
                     join(t.labels()));
  }
  std::vector<std::string> order = row_labels;
  order.insert(order.end(), col_labels.begin(), col_labels.end());
  const LabeledTensor m = t.permuted(order);

  std::vector<std::size_t> row_dims, col_dims;
  std::size_t rows = 1, cols = 1;
  for (const auto& l : row_labels) {
    row_dims.push_back(m.dim(l));
    rows *= row_dims.back();
  }
  for (const auto& l : col_labels) {
    col_dims.push_back(m.dim(l));
    cols *= col_dims.back();
  }

  for (const cplx& x : m.data()) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag())) {
      throw NumericalError("non-finite entry in SVD input");
    }
  }
  const DenseSvd svd = thin_svd(m.data().data(), rows, cols);
  const std::vector<double>& sv = svd.s;
  const std::size_t full = sv.size();

  double total = 0.0;
  for (std::size_t k = 0; k < full; ++k) total += sv[k] * sv[k];
  const double smax = full ? sv[0] : 0.0;

  std::size_t keep = 0;
  while (keep < full && sv[keep] > 1e-14 * smax) ++keep;
  const std::size_t numerical_rank = keep;
  if (total > 0.0) {
    double tail = 0.0;
    for (std::size_t k = keep; k < full; ++k) tail += sv[k] * sv[k];
    while (keep > 1 && (tail + sv[keep - 1] * sv[keep - 1]) / total < cutoff) {
      tail += sv[keep - 1] * sv[keep - 1];
      --keep;
    }
  }
  keep = std::max<std::size_t>(1, std::min(keep, max_rank));

  SvdResult out;
  double dropped = 0.0;
  for (std::size_t k = keep; k < numerical_rank; ++k) dropped += sv[k] * sv[k];
  out.discarded_weight = total > 0.0 ? std::clamp(dropped / total, 0.0, 1.0) : 0.0;
  out.s.assign(sv.data(), sv.data() + keep);

  const auto k_idx = static_cast<Eigen::Index>(keep);
  RowMatrix u = svd.u.leftCols(k_idx);
  RowMatrix vh = svd.vh.topRows(k_idx);

  auto u_labels = row_labels;
  u_labels.push_back(bond_label);
  auto u_dims = row_dims;
  u_dims.push_back(keep);
  std::vector<std::string> v_labels{bond_label};
  v_labels.insert(v_labels.end(), col_labels.begin(), col_labels.end());
  std::vector<std::size_t> v_dims{keep};
  v_dims.insert(v_dims.end(), col_dims.begin(), col_dims.end());

  out.u = LabeledTensor(std::move(u_labels), std::move(u_dims),
                        std::vector<cplx>(u.data(), u.data() + u.size()));
  out.v = LabeledTensor(std::move(v_labels), std::move(v_dims),
                        std::vector<cplx>(vh.data(), vh.data() + vh.size()));
  return out;
}

std::pair<LabeledTensor, LabeledTensor> qr_split(const LabeledTensor& t,
                                                 const std::vector<std::string>& row_labels,
                                                 const std::string& bond_label) {
  if (row_labels.empty() || row_labels.size() >= t.rank()) {
    throw DomainError("qr row labels must be a nonempty proper subset of " + join(t.labels()));
  }
  std::vector<std::string> col_labels;
  for (const auto& l : t.labels()) {
    if (std::find(row_labels.begin(), row_labels.end(), l) == row_labels.end()) {
      col_labels.push_back(l);
    }
  }
  std::vector<std::string> order = row_labels;
  order.insert(order.end(), col_labels.begin(), col_labels.end());
  const LabeledTensor m = t.permuted(order);

  std::vector<std::size_t> row_dims, col_dims;
  std::size_t rows = 1, cols = 1;
  for (const auto& l : row_labels) {
    row_dims.push_back(m.dim(l));
    rows *= row_dims.back();
  }
  for (const auto& l : col_labels) {
    col_dims.push_back(m.dim(l));
    cols *= col_dims.back();
  }
  const auto r_rows = static_cast<Eigen::Index>(rows);
  const auto r_cols = static_cast<Eigen::Index>(cols);
  const Eigen::Index k = std::min(r_rows, r_cols);

  Eigen::Map<const RowMatrix> mat(m.data().data(), r_rows, r_cols);
  const Eigen::MatrixXcd dense = mat;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(dense);
  RowMatrix q = qr.householderQ() * Eigen::MatrixXcd::Identity(r_rows, k);
  const Eigen::MatrixXcd top = qr.matrixQR().topRows(k);
  RowMatrix r = top.template triangularView<Eigen::Upper>();

  auto q_labels = row_labels;
  q_labels.push_back(bond_label);
  auto q_dims = row_dims;
  q_dims.push_back(static_cast<std::size_t>(k));
  std::vector<std::string> r_labels{bond_label};
  r_labels.insert(r_labels.end(), col_labels.begin(), col_labels.end());
  std::vector<std::size_t> r_dims{static_cast<std::size_t>(k)};
  r_dims.insert(r_dims.end(), col_dims.begin(), col_dims.end());

  return {LabeledTensor(std::move(q_labels), std::move(q_dims),
                        std::vector<cplx>(q.data(), q.data() + q.size())),
          LabeledTensor(std::move(r_labels), std::move(r_dims),
                        std::vector<cplx>(r.data(), r.data() + r.size()))};
}

LabeledTensor reconstruct(const SvdResult& svd, const std::string& bond_label) {
  auto order = svd.u.labels();
  std::erase(order, bond_label);
  order.push_back(bond_label);
  LabeledTensor us = svd.u.permuted(order);
  const std::size_t bond = svd.s.size();
  auto data = us.data();
  for (std::size_t i = 0; i < data.size(); ++i) data[i] *= svd.s[i % bond];
  return contract(us, svd.v, {{bond_label, bond_label}});
}

}  // namespace nessdmrg
