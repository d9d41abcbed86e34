#pragma once

#include <Eigen/Dense>
#include <vector>

#include "nessdmrg/mps.hpp"
#include "nessdmrg/tensor.hpp"

namespace nessdmrg {

/// Chain of rank-4 tensors labelled ("l", "out", "in", "r").
class MatrixProductOperator {
 public:
  MatrixProductOperator() = default;
  explicit MatrixProductOperator(std::vector<LabeledTensor> tensors);

  std::size_t length() const { return tensors_.size(); }
  const std::vector<LabeledTensor>& tensors() const { return tensors_; }
  std::size_t phys_dim(std::size_t k) const { return tensors_[k].dim("out"); }
  std::vector<std::size_t> phys_dims() const;
  std::size_t bond_dim(std::size_t k) const { return tensors_[k].dim("r"); }
  std::size_t max_bond() const;

  /// True when tensor k differs from (a multiple of) the identity on a
  /// bond-1 link, i.e. the operator acts nontrivially there.
  bool acts_on(std::size_t k, double tol = 1e-14) const;

 private:
  void validate() const;

  std::vector<LabeledTensor> tensors_;
};

MatrixProductOperator identity_mpo(const std::vector<std::size_t>& phys_dims);

/// Single-site operator `op` at site `site` (1-based), identity elsewhere.
MatrixProductOperator local_mpo(const std::vector<std::size_t>& phys_dims, std::size_t site,
                                const Eigen::MatrixXcd& op);

/// Random Gaussian MPO, for tests.
MatrixProductOperator random_mpo(const std::vector<std::size_t>& phys_dims, std::size_t bond,
                                 std::uint64_t seed);

MatrixProductOperator mpo_dagger(const MatrixProductOperator& a);

struct MpoProduct {
  MatrixProductOperator op;
  double discarded_weight = 0.0;
};

/// a * b (b acts first). A positive cutoff compresses the result by SVD
/// sweeps; zero leaves the exact product with multiplied bonds.
MpoProduct mpo_product(const MatrixProductOperator& a, const MatrixProductOperator& b,
                       double cutoff);

/// SVD compression of an operator at relative squared-weight `cutoff`.
MpoProduct compress(const MatrixProductOperator& a, double cutoff);

MatrixProductOperator operator*(cplx s, MatrixProductOperator a);

/// conj(bra) . (op ket), contracted exactly.
cplx overlap3(const MatrixProductState& bra, const MatrixProductOperator& op,
              const MatrixProductState& ket);

/// op applied to ket without truncation; bonds multiply.
MatrixProductState apply(const MatrixProductOperator& op, const MatrixProductState& ket);

/// Dense matrix; row = "out" multi-index with site 1 most significant.
Eigen::MatrixXcd to_dense(const MatrixProductOperator& op);

}  // namespace nessdmrg
