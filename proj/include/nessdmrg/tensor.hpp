#pragma once

#include <complex>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nessdmrg/errors.hpp"

namespace nessdmrg {

using cplx = std::complex<double>;

/// Dense complex tensor whose indices are addressed by name.
///
/// Storage is row-major over the label order: the last label varies fastest.
/// Tensors are plain values; every operation returns a new tensor.
class LabeledTensor {
 public:
  LabeledTensor() = default;
  LabeledTensor(std::vector<std::string> labels, std::vector<std::size_t> dims);
  LabeledTensor(std::vector<std::string> labels, std::vector<std::size_t> dims,
                std::vector<cplx> data);

  const std::vector<std::string>& labels() const { return labels_; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  std::span<const cplx> data() const { return data_; }
  std::span<cplx> data() { return data_; }

  std::size_t rank() const { return labels_.size(); }
  std::size_t size() const { return data_.size(); }
  bool has_label(const std::string& label) const;
  std::size_t index_of(const std::string& label) const;
  std::size_t dim(const std::string& label) const;

  cplx& at(std::initializer_list<std::size_t> idx);
  cplx at(std::initializer_list<std::size_t> idx) const;

  /// Same data under new names; `names` must have one entry per index.
  LabeledTensor relabeled(std::vector<std::string> names) const;
  LabeledTensor relabeled(const std::string& from, const std::string& to) const;

  /// Reorders storage so that labels appear in `order`.
  LabeledTensor permuted(const std::vector<std::string>& order) const;

  LabeledTensor conj() const;
  double norm() const;

  LabeledTensor& operator*=(cplx s);
  LabeledTensor& operator+=(const LabeledTensor& other);
  LabeledTensor& operator-=(const LabeledTensor& other);

 private:
  std::size_t flat_index(std::initializer_list<std::size_t> idx) const;

  std::vector<std::string> labels_;
  std::vector<std::size_t> dims_;
  std::vector<cplx> data_;
};

LabeledTensor operator*(cplx s, LabeledTensor t);
LabeledTensor operator+(LabeledTensor a, const LabeledTensor& b);
LabeledTensor operator-(LabeledTensor a, const LabeledTensor& b);

using LabelPair = std::pair<std::string, std::string>;

/// Sums over each (label in a, label in b) pair. The result carries the
/// uncontracted labels of `a` followed by those of `b`, in their original
/// order. No pairs gives the outer product.
LabeledTensor contract(const LabeledTensor& a, const LabeledTensor& b,
                       std::span<const LabelPair> pairs);
LabeledTensor contract(const LabeledTensor& a, const LabeledTensor& b,
                       std::initializer_list<LabelPair> pairs);

/// Truncated SVD of `t` viewed as a matrix (row_labels) x (remaining labels).
struct SvdResult {
  LabeledTensor u;  // row labels..., bond
  std::vector<double> s;
  LabeledTensor v;  // bond, column labels...
  double discarded_weight = 0.0;
};

/// Singular values below 1e-14 * s_max are always dropped and do not count
/// towards discarded_weight. Beyond that the smallest values are dropped
/// while their cumulative squared weight, relative to the total, stays below
/// `cutoff`; at most `max_rank` are kept.
SvdResult svd_truncate(const LabeledTensor& t,
                       const std::vector<std::string>& row_labels,
                       std::size_t max_rank, double cutoff,
                       const std::string& bond_label = "bond");

/// Thin QR of `t` as (row_labels) x (rest): q carries the row labels plus
/// `bond_label` and is an isometry; r carries `bond_label` plus the rest.
std::pair<LabeledTensor, LabeledTensor> qr_split(const LabeledTensor& t,
                                                 const std::vector<std::string>& row_labels,
                                                 const std::string& bond_label = "bond");

/// u * diag(s) * v, the reconstruction carried by an SvdResult.
LabeledTensor reconstruct(const SvdResult& svd, const std::string& bond_label = "bond");

}  // namespace nessdmrg
