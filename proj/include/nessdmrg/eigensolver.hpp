#pragma once

#include <Eigen/Dense>
#include <functional>

namespace nessdmrg {

using LinearMap = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

struct EigenPair {
  double value = 0.0;
  Eigen::VectorXcd vector;
  int matvecs = 0;
};

/// Lowest eigenpair of a Hermitian map by Lanczos with full
/// reorthogonalization, starting from `guess`. At most `iters` Krylov
/// vectors are built; the iteration stops early on an invariant subspace.
/// The returned vector is normalized and its Rayleigh quotient never exceeds
/// that of the guess.
EigenPair local_eigensolve(const LinearMap& apply, const Eigen::VectorXcd& guess, int iters);

}  // namespace nessdmrg
