#include "nessdmrg/exact.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <unsupported/Eigen/KroneckerProduct>

#include "json.hpp"

namespace nessdmrg {

namespace {

constexpr std::size_t kSparseLimit = 7;
constexpr std::size_t kDenseLimit = 6;
constexpr std::size_t kSpectrumLimit = 4;
constexpr double kNullTol = 1e-10;
constexpr const char* kGenerator = "nessdmrg exact oracle v1 (bordered sparse LU)";

SparseMatrixXcd sparse_identity(Eigen::Index d) {
  SparseMatrixXcd id(d, d);
  id.setIdentity();
  return id;
}

SparseMatrixXcd pauli(char which) {
  SparseMatrixXcd m(2, 2);
  const cplx i(0.0, 1.0);
  switch (which) {
    case 'x':
      m.insert(0, 1) = 1.0;
      m.insert(1, 0) = 1.0;
      break;
    case 'y':
      m.insert(0, 1) = -i;
      m.insert(1, 0) = i;
      break;
    case 'z':
      m.insert(0, 0) = 1.0;
      m.insert(1, 1) = -1.0;
      break;
    case '+':
      m.insert(0, 1) = 1.0;
      break;
    case '-':
      m.insert(1, 0) = 1.0;
      break;
    default:
      throw DomainError(std::string("unknown Pauli operator '") + which + "'");
  }
  return m;
}

void check_size(const ModelParams& params, std::size_t limit) {
  params.validate();
  if (params.n_sites > limit) {
    throw DomainError("dense oracle limited to N <= " + std::to_string(limit) + ", got N = " +
                      std::to_string(params.n_sites));
  }
}

// conj(L) (x) L - 1/2 (I (x) L^+L + (L^+L)^T (x) I)
SparseMatrixXcd dissipator(const SparseMatrixXcd& jump, double rate) {
  const Eigen::Index d = jump.rows();
  const SparseMatrixXcd id = sparse_identity(d);
  const SparseMatrixXcd number = SparseMatrixXcd(jump.adjoint()) * jump;
  const SparseMatrixXcd number_t = number.transpose();
  SparseMatrixXcd out = Eigen::kroneckerProduct(SparseMatrixXcd(jump.conjugate()), jump);
  out -= 0.5 * SparseMatrixXcd(Eigen::kroneckerProduct(id, number));
  out -= 0.5 * SparseMatrixXcd(Eigen::kroneckerProduct(number_t, id));
  return rate * out;
}

DenseNess finish(const Eigen::VectorXcd& null_vec, double residual) {
  DenseNess out;
  const auto dim = static_cast<std::size_t>(std::llround(std::sqrt(double(null_vec.size()))));
  Eigen::MatrixXcd rho = unvectorize(null_vec, dim);
  const cplx trace = rho.trace();
  if (std::abs(trace) < 1e-14) throw NumericalError("null vector has vanishing trace");
  out.rho = rho / trace;
  out.residual = residual / std::abs(trace);
  return out;
}

// Replaces the (0,0) row with the trace functional and solves for e_0.
Eigen::VectorXcd bordered_solve(SparseMatrixXcd l) {
  const Eigen::Index n = l.rows();
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(n))));
  l.prune([](Eigen::Index row, Eigen::Index, const cplx&) { return row != 0; });
  for (Eigen::Index k = 0; k < d; ++k) l.coeffRef(0, k * d + k) = 1.0;
  l.makeCompressed();
  Eigen::SparseLU<SparseMatrixXcd> lu;
  lu.compute(l);
  if (lu.info() != Eigen::Success) {
    throw NumericalError("steady state is not unique: bordered Liouvillian is singular");
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs[0] = 1.0;
  Eigen::VectorXcd x = lu.solve(rhs);
  if (lu.info() != Eigen::Success || !x.allFinite()) {
    throw NumericalError("bordered steady-state solve failed");
  }
  return x;
}

void check_square(Eigen::Index rows, Eigen::Index cols) {
  if (rows != cols) throw ShapeError("Liouvillian must be square");
  const auto d = static_cast<Eigen::Index>(std::llround(std::sqrt(double(rows))));
  if (d * d != rows) throw ShapeError("Liouvillian size is not a perfect square");
}

void attach_spectrum(DenseNess& out, const Eigen::MatrixXcd& l) {
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(l, false);
  if (es.info() != Eigen::Success) throw NumericalError("Liouvillian eigensolver failed");
  out.spectrum = es.eigenvalues();
  int zeros = 0;
  double gap = -std::numeric_limits<double>::infinity();
  for (const cplx& lambda : out.spectrum) {
    if (std::abs(lambda) <= kNullTol) {
      ++zeros;
    } else {
      gap = std::max(gap, lambda.real());
    }
  }
  out.multiplicity = zeros;
  if (std::isfinite(gap)) out.gap = -gap;
  if (zeros > 1) {
    throw NumericalError("steady state is not unique: " + std::to_string(zeros) +
                         " zero eigenvalues");
  }
}

}  // namespace

SparseMatrixXcd embed_pauli(char which, std::size_t site, std::size_t n) {
  if (site < 1 || site > n) throw DomainError("site " + std::to_string(site) + " out of range");
  const Eigen::Index left = Eigen::Index{1} << (site - 1);
  const Eigen::Index right = Eigen::Index{1} << (n - site);
  return Eigen::kroneckerProduct(
      SparseMatrixXcd(Eigen::kroneckerProduct(sparse_identity(left), pauli(which))),
      sparse_identity(right));
}

SparseMatrixXcd sparse_hamiltonian(const ModelParams& params) {
  params.validate();
  const std::size_t n = params.n_sites;
  const Eigen::Index d = Eigen::Index{1} << n;
  SparseMatrixXcd h(d, d);
  for (std::size_t i = 1; i < n; ++i) {
    const double j = params.j[i - 1];
    h += j * SparseMatrixXcd(embed_pauli('x', i, n) * embed_pauli('x', i + 1, n));
    h += j * SparseMatrixXcd(embed_pauli('y', i, n) * embed_pauli('y', i + 1, n));
    h += j * params.delta[i - 1] *
         SparseMatrixXcd(embed_pauli('z', i, n) * embed_pauli('z', i + 1, n));
  }
  for (std::size_t i = 1; i <= n; ++i) h += params.h[i - 1] * embed_pauli('z', i, n);
  return h;
}

SparseMatrixXcd sparse_liouvillian(const ModelParams& params) {
  check_size(params, kSparseLimit);
  const std::size_t n = params.n_sites;
  const SparseMatrixXcd h = sparse_hamiltonian(params);
  const SparseMatrixXcd id = sparse_identity(h.rows());
  const cplx minus_i(0.0, -1.0);
  SparseMatrixXcd l = minus_i * SparseMatrixXcd(Eigen::kroneckerProduct(id, h));
  l -= minus_i * SparseMatrixXcd(Eigen::kroneckerProduct(SparseMatrixXcd(h.transpose()), id));

  auto bath = [&](std::size_t site, double gamma, double f) {
    if (gamma * f != 0.0) l += dissipator(embed_pauli('-', site, n), gamma * f);
    if (gamma * (1.0 - f) != 0.0) l += dissipator(embed_pauli('+', site, n), gamma * (1.0 - f));
  };
  bath(1, params.gamma1, params.f1);
  if (n > 1) bath(n, params.gammaN, params.fN);
  l.makeCompressed();
  return l;
}

Eigen::MatrixXcd dense_liouvillian(const ModelParams& params) {
  check_size(params, kDenseLimit);
  return Eigen::MatrixXcd(sparse_liouvillian(params));
}

SparseMatrixXcd sparse_current(const ModelParams& params, std::size_t bond) {
  params.validate();
  const std::size_t n = params.n_sites;
  if (bond < 1 || bond >= n) throw DomainError("bond " + std::to_string(bond) + " out of range");
  const SparseMatrixXcd xy = embed_pauli('x', bond, n) * embed_pauli('y', bond + 1, n);
  const SparseMatrixXcd yx = embed_pauli('y', bond, n) * embed_pauli('x', bond + 1, n);
  return 2.0 * params.j[bond - 1] * SparseMatrixXcd(xy - yx);
}

DenseNess dense_ness(const Eigen::MatrixXcd& l) {
  check_square(l.rows(), l.cols());
  DenseNess out;
  const bool small = l.rows() <= (Eigen::Index{1} << (2 * kSpectrumLimit));
  if (small) {
    DenseNess spectral;
    attach_spectrum(spectral, l);
    const SparseMatrixXcd sparse = l.sparseView();
    const Eigen::VectorXcd x = bordered_solve(sparse);
    out = finish(x, (l * x).norm());
    out.spectrum = std::move(spectral.spectrum);
    out.gap = spectral.gap;
    out.multiplicity = spectral.multiplicity;
    return out;
  }
  const SparseMatrixXcd sparse = l.sparseView();
  const Eigen::VectorXcd x = bordered_solve(sparse);
  return finish(x, (l * x).norm());
}

DenseNess dense_ness(const SparseMatrixXcd& l) {
  check_square(l.rows(), l.cols());
  if (l.rows() <= (Eigen::Index{1} << (2 * kSpectrumLimit))) {
    return dense_ness(Eigen::MatrixXcd(l));
  }
  const Eigen::VectorXcd x = bordered_solve(l);
  return finish(x, (l * x).norm());
}

DenseNess dense_ness(const ModelParams& params) {
  check_size(params, kDenseLimit);
  return dense_ness(sparse_liouvillian(params));
}

DenseObservables dense_observables(const DenseNess& ness, const ModelParams& params) {
  params.validate();
  const std::size_t n = params.n_sites;
  if (ness.rho.rows() != (Eigen::Index{1} << n) || ness.rho.cols() != ness.rho.rows()) {
    throw ShapeError("density matrix does not match the chain length");
  }
  DenseObservables out;
  auto trace_with = [&](const SparseMatrixXcd& op) {
    const cplx v = (op * ness.rho).trace();
    out.max_imag = std::max(out.max_imag, std::abs(v.imag()));
    return v.real();
  };
  for (std::size_t i = 1; i < n; ++i) out.current.push_back(trace_with(sparse_current(params, i)));
  for (std::size_t i = 1; i <= n; ++i) {
    out.magnetization.push_back(trace_with(embed_pauli('z', i, n)));
  }
  if (out.max_imag > 1e-10) {
    throw NumericalError("observable has imaginary part " + std::to_string(out.max_imag) +
                         "; state is unphysical");
  }
  return out;
}

OracleFixture make_fixture(const std::string& name, const ModelParams& params) {
  const DenseNess ness = dense_ness(params);
  const DenseObservables obs = dense_observables(ness, params);
  return {name, params, ness.residual, obs.current, obs.magnetization, kGenerator};
}

void write_fixtures(const std::string& path, const std::vector<OracleFixture>& fixtures) {
  nlohmann::json doc;
  doc["generator"] = kGenerator;
  doc["fixtures"] = nlohmann::json::array();
  for (const auto& f : fixtures) {
    doc["fixtures"].push_back({{"name", f.name},
                               {"params",
                                {{"n_sites", f.params.n_sites},
                                 {"J", f.params.j},
                                 {"Delta", f.params.delta},
                                 {"h", f.params.h},
                                 {"gamma1", f.params.gamma1},
                                 {"gammaN", f.params.gammaN},
                                 {"f1", f.params.f1},
                                 {"fN", f.params.fN}}},
                               {"residual", f.residual},
                               {"current", f.current},
                               {"magnetization", f.magnetization},
                               {"generator", f.generator}});
  }
  std::ofstream os(path);
  if (!os) throw Error("cannot open fixture file for writing: " + path);
  os << std::setprecision(17) << doc.dump(2) << '\n';
}

std::vector<OracleFixture> read_fixtures(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open fixture file: " + path);
  const nlohmann::json doc = nlohmann::json::parse(is);
  std::vector<OracleFixture> out;
  for (const auto& f : doc.at("fixtures")) {
    OracleFixture fx;
    fx.name = f.at("name").get<std::string>();
    const auto& p = f.at("params");
    fx.params.n_sites = p.at("n_sites").get<std::size_t>();
    fx.params.j = p.at("J").get<std::vector<double>>();
    fx.params.delta = p.at("Delta").get<std::vector<double>>();
    fx.params.h = p.at("h").get<std::vector<double>>();
    fx.params.gamma1 = p.at("gamma1").get<double>();
    fx.params.gammaN = p.at("gammaN").get<double>();
    fx.params.f1 = p.at("f1").get<double>();
    fx.params.fN = p.at("fN").get<double>();
    fx.residual = f.at("residual").get<double>();
    fx.current = f.at("current").get<std::vector<double>>();
    fx.magnetization = f.at("magnetization").get<std::vector<double>>();
    fx.generator = f.value("generator", std::string{});
    out.push_back(std::move(fx));
  }
  return out;
}

}  // namespace nessdmrg
