#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

#include "nessdmrg/tensor.hpp"

namespace nessdmrg {

/// Open-boundary matrix product state.
///
/// Each site tensor carries labels ("l", "p", "r"). Site numbers in the public
/// API (canonicalization centers, operator strings) are 1-based; `tensors()`
/// is an ordinary 0-based vector.
class MatrixProductState {
 public:
  MatrixProductState() = default;
  explicit MatrixProductState(std::vector<LabeledTensor> tensors,
                              std::optional<std::size_t> ortho_center = std::nullopt);

  std::size_t length() const { return tensors_.size(); }
  const std::vector<LabeledTensor>& tensors() const { return tensors_; }
  std::optional<std::size_t> ortho_center() const { return ortho_center_; }

  std::size_t phys_dim(std::size_t k) const { return tensors_[k].dim("p"); }
  std::vector<std::size_t> phys_dims() const;
  /// Extent of the bond between tensors k and k+1 (0-based).
  std::size_t bond_dim(std::size_t k) const { return tensors_[k].dim("r"); }
  std::size_t max_bond() const;

  /// Replaces tensor k; shape is rechecked against its neighbours.
  void set_tensor(std::size_t k, LabeledTensor t, std::optional<std::size_t> ortho_center);
  /// Replaces tensors k and k+1 together, so the bond between them may change.
  void set_pair(std::size_t k, LabeledTensor a, LabeledTensor b,
                std::optional<std::size_t> ortho_center);
  void set_ortho_center(std::optional<std::size_t> c) { ortho_center_ = c; }

  MatrixProductState& operator*=(cplx s);

 private:
  void validate() const;

  std::vector<LabeledTensor> tensors_;
  std::optional<std::size_t> ortho_center_;
};

MatrixProductState operator*(cplx s, MatrixProductState psi);

/// Product state from per-site amplitude vectors.
MatrixProductState product_state(const std::vector<std::vector<cplx>>& local);

/// Gaussian random entries, bonds capped at `bond` (and by the exact limit).
MatrixProductState random_mps(const std::vector<std::size_t>& phys_dims, std::size_t bond,
                              std::uint64_t seed);

/// Moves the orthogonality center to site `center` (1-based) by QR sweeps.
MatrixProductState canonicalize(const MatrixProductState& psi, std::size_t center);

/// SVD compression to at most `max_bond`, leaving the center on site 1.
MatrixProductState truncate(const MatrixProductState& psi, std::size_t max_bond, double cutoff);

/// conj(a) . b
cplx inner(const MatrixProductState& a, const MatrixProductState& b);
double norm(const MatrixProductState& psi);

/// Dense amplitude vector; site 1 is the most significant digit.
Eigen::VectorXcd to_dense(const MatrixProductState& psi);

/// True when tensor k (0-based) is a left (or right) isometry to `tol`.
bool is_left_isometry(const LabeledTensor& t, double tol);
bool is_right_isometry(const LabeledTensor& t, double tol);

}  // namespace nessdmrg
