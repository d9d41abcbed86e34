#pragma once

#include <vector>

#include "nessdmrg/mpo.hpp"
#include "nessdmrg/superspace.hpp"

namespace nessdmrg {

/// Couplings of the boundary-driven XXZ chain
///
///   H = sum_i J_i (sx sx + sy sy + Delta_i sz sz)_{i,i+1} + sum_i h_i sz_i
///
/// with baths on sites 1 and N: D_k = gamma_k f_k D[s-_k] + gamma_k (1 - f_k) D[s+_k].
struct ModelParams {
  std::size_t n_sites = 2;
  std::vector<double> j;      // N-1 bonds
  std::vector<double> delta;  // N-1 bonds
  std::vector<double> h;      // N sites
  double gamma1 = 1.0;
  double gammaN = 1.0;
  double f1 = 1.0;
  double fN = 0.0;

  /// Homogeneous chain with J_i = 1.
  static ModelParams uniform(std::size_t n, double delta, double gamma, double f1, double fN,
                             double h = 0.0);

  /// Throws DomainError on any violated invariant.
  void validate() const;
};

/// Everything the solver needs, built once per model and ordering.
struct SuperOperatorSet {
  OrderingScheme scheme;
  MatrixProductOperator liouvillian;
  MatrixProductOperator target;  // L^dagger L
  double target_discarded_weight = 0.0;
  std::vector<MatrixProductOperator> current_ops;        // bonds 1..N-1
  std::vector<MatrixProductOperator> magnetization_ops;  // sites 1..N
};

/// -i(I (x) H - H^T (x) I) + D_1 + D_N laid out according to `scheme`.
MatrixProductOperator build_liouvillian(const ModelParams& params, const OrderingScheme& scheme);

/// Bath terms only, for one boundary site (1 or N); used for structure checks.
MatrixProductOperator build_dissipator(const ModelParams& params, const OrderingScheme& scheme,
                                       std::size_t site);

/// L^dagger L, compressed at relative weight 1e-14.
MpoProduct build_target(const MatrixProductOperator& liouvillian);

/// Left multiplication by 2 J_i (sx_i sy_{i+1} - sy_i sx_{i+1}), bond i in [1, N-1].
MatrixProductOperator build_current_mpo(const ModelParams& params, const OrderingScheme& scheme,
                                        std::size_t bond);

/// Left multiplication by sz_i, site i in [1, N].
MatrixProductOperator build_magnetization_mpo(const OrderingScheme& scheme, std::size_t site);

SuperOperatorSet build_superoperators(const ModelParams& params, Ordering ordering);

}  // namespace nessdmrg
