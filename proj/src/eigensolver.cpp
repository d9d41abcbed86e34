#include "nessdmrg/eigensolver.hpp"

#include <cmath>
#include <vector>

#include "nessdmrg/errors.hpp"

namespace nessdmrg {

EigenPair local_eigensolve(const LinearMap& apply, const Eigen::VectorXcd& guess, int iters) {
  if (iters < 1) throw DomainError("local solver needs at least one iteration");
  const double g = guess.norm();
  if (!std::isfinite(g)) throw NumericalError("non-finite local solver guess");
  if (g == 0.0) throw NumericalError("zero local solver guess");

  const Eigen::Index dim = guess.size();
  const int max_k = static_cast<int>(std::min<Eigen::Index>(iters, dim));
  std::vector<Eigen::VectorXcd> basis;
  std::vector<double> alpha, beta;
  basis.push_back(guess / g);

  double scale = 0.0;
  int matvecs = 0;
  for (int k = 0; k < max_k; ++k) {
    Eigen::VectorXcd w = apply(basis[k]);
    ++matvecs;
    if (!w.allFinite()) throw NumericalError("non-finite value in local matrix-vector product");
    const double a = basis[k].dot(w).real();
    alpha.push_back(a);
    // two passes of classical Gram-Schmidt against the whole basis
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& v : basis) w -= v * v.dot(w);
    }
    const double b = w.norm();
    scale = std::max(scale, std::abs(a) + b + (beta.empty() ? 0.0 : beta.back()));
    if (k + 1 == max_k || b <= 1e-13 * scale) break;
    beta.push_back(b);
    basis.push_back(w / b);
  }

  const Eigen::Index m = static_cast<Eigen::Index>(alpha.size());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    t(i, i) = alpha[static_cast<std::size_t>(i)];
    if (i + 1 < m) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
  const Eigen::VectorXd y = es.eigenvectors().col(0);

  Eigen::VectorXcd x = Eigen::VectorXcd::Zero(dim);
  for (Eigen::Index i = 0; i < m; ++i) x += y[i] * basis[static_cast<std::size_t>(i)];
  x.normalize();
  return {es.eigenvalues()[0], std::move(x), matvecs};
}

}  // namespace nessdmrg
