#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <optional>
#include <string>
#include <vector>

#include "nessdmrg/liouvillian.hpp"

namespace nessdmrg {

using SparseMatrixXcd = Eigen::SparseMatrix<cplx>;

/// Pauli matrix ('x', 'y', 'z', '+', '-') embedded at 1-based site `site` of an
/// n-site chain; site 1 is the most significant tensor factor.
SparseMatrixXcd embed_pauli(char which, std::size_t site, std::size_t n);

/// Physical-space Hamiltonian, 2^N x 2^N.
SparseMatrixXcd sparse_hamiltonian(const ModelParams& params);

/// Column-stacking Liouvillian, 4^N x 4^N. Allowed for N <= 7.
SparseMatrixXcd sparse_liouvillian(const ModelParams& params);

/// Dense version of the above. Allowed for N <= 6.
Eigen::MatrixXcd dense_liouvillian(const ModelParams& params);

/// 2 J_i (sx_i sy_{i+1} - sy_i sx_{i+1}) in physical space.
SparseMatrixXcd sparse_current(const ModelParams& params, std::size_t bond);

struct DenseNess {
  Eigen::MatrixXcd rho;
  double residual = 0.0;           // || L vec(rho) ||
  Eigen::VectorXcd spectrum;       // empty above the full-spectrum size limit
  std::optional<double> gap;       // -max Re(lambda) over nonzero eigenvalues
  std::optional<int> multiplicity;  // eigenvalues with |lambda| <= 1e-10
};

/// Unit-trace null vector of L. The full spectrum is computed for N <= 4;
/// larger chains use a bordered sparse LU solve. Throws NumericalError when
/// the null space is degenerate.
DenseNess dense_ness(const Eigen::MatrixXcd& l);
DenseNess dense_ness(const SparseMatrixXcd& l);
DenseNess dense_ness(const ModelParams& params);

struct DenseObservables {
  std::vector<double> current;        // N-1 bonds
  std::vector<double> magnetization;  // N sites
  double max_imag = 0.0;
};

/// tr(J_i rho) and tr(sz_i rho). Throws NumericalError when an imaginary part
/// exceeds 1e-10.
DenseObservables dense_observables(const DenseNess& ness, const ModelParams& params);

/// Regression record produced by the oracle.
struct OracleFixture {
  std::string name;
  ModelParams params;
  double residual = 0.0;
  std::vector<double> current;
  std::vector<double> magnetization;
  std::string generator;
};

OracleFixture make_fixture(const std::string& name, const ModelParams& params);
void write_fixtures(const std::string& path, const std::vector<OracleFixture>& fixtures);
std::vector<OracleFixture> read_fixtures(const std::string& path);

}  // namespace nessdmrg
