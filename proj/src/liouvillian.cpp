#include "nessdmrg/liouvillian.hpp"

#include <cmath>
#include <string>

namespace nessdmrg {

namespace {

constexpr double kTargetCutoff = 1e-14;

void add_dissipator(OperatorBuilder& b, const OrderingScheme& scheme, std::size_t site,
                    double gamma, double f) {
  // D[L] rho = L rho L^+ - 1/2 L^+L rho - 1/2 rho L^+L
  struct Channel {
    double rate;
    const char* jump;
    const char* jump_dag;
    const char* number;
  };
  const Channel channels[] = {{gamma * f, "S-", "S+", "S+S-"},
                              {gamma * (1.0 - f), "S+", "S-", "S-S+"}};
  for (const auto& c : channels) {
    if (c.rate == 0.0) continue;
    b.add_term(superspace_term(c.rate, {{site, c.jump, Side::L}, {site, c.jump_dag, Side::R}},
                               scheme));
    b.add_term(superspace_term(-0.5 * c.rate, {{site, c.number, Side::L}}, scheme));
    b.add_term(superspace_term(-0.5 * c.rate, {{site, c.number, Side::R}}, scheme));
  }
}

}  // namespace

ModelParams ModelParams::uniform(std::size_t n, double delta, double gamma, double f1, double fN,
                                 double h) {
  ModelParams p;
  p.n_sites = n;
  p.j.assign(n > 0 ? n - 1 : 0, 1.0);
  p.delta.assign(n > 0 ? n - 1 : 0, delta);
  p.h.assign(n, h);
  p.gamma1 = gamma;
  p.gammaN = gamma;
  p.f1 = f1;
  p.fN = fN;
  return p;
}

void ModelParams::validate() const {
  if (n_sites < 1) throw DomainError("chain length must be at least 1");
  if (j.size() + 1 != n_sites || delta.size() + 1 != n_sites) {
    throw DomainError("J and Delta need N-1 = " + std::to_string(n_sites - 1) + " entries");
  }
  if (h.size() != n_sites) {
    throw DomainError("h needs N = " + std::to_string(n_sites) + " entries");
  }
  auto finite = [](const std::vector<double>& v) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  if (!finite(j) || !finite(delta) || !finite(h)) throw DomainError("couplings must be finite");
  if (!(gamma1 > 0.0) || !(gammaN > 0.0) || !std::isfinite(gamma1) || !std::isfinite(gammaN)) {
    throw DomainError("bath rates gamma must be positive");
  }
  if (!(f1 >= 0.0 && f1 <= 1.0) || !(fN >= 0.0 && fN <= 1.0)) {
    throw DomainError("bath biases f must lie in [0, 1]");
  }
}

MatrixProductOperator build_liouvillian(const ModelParams& params, const OrderingScheme& scheme) {
  params.validate();
  if (scheme.n_phys() != params.n_sites) throw ShapeError("scheme length differs from model");
  const std::size_t n = params.n_sites;
  const cplx minus_i(0.0, -1.0);
  OperatorBuilder b = superspace_builder(scheme);

  // -i[H, rho]: H acts from the left with -i and from the right with +i.
  // sigma = 2 S, so each two-spin coupling carries a factor 4.
  for (const auto& [side, sign] : {std::pair{Side::L, minus_i}, std::pair{Side::R, -minus_i}}) {
    for (std::size_t i = 1; i < n; ++i) {
      const double jb = params.j[i - 1];
      const double zz = jb * params.delta[i - 1];
      if (jb != 0.0) {
        b.add_term(superspace_term(sign * 4.0 * jb, {{i, "Sx", side}, {i + 1, "Sx", side}}, scheme));
        b.add_term(superspace_term(sign * 4.0 * jb, {{i, "Sy", side}, {i + 1, "Sy", side}}, scheme));
      }
      if (zz != 0.0) {
        b.add_term(superspace_term(sign * 4.0 * zz, {{i, "Sz", side}, {i + 1, "Sz", side}}, scheme));
      }
    }
    for (std::size_t i = 1; i <= n; ++i) {
      if (params.h[i - 1] != 0.0) {
        b.add_term(superspace_term(sign * 2.0 * params.h[i - 1], {{i, "Sz", side}}, scheme));
      }
    }
  }

  // a single-site chain keeps only the first bath
  add_dissipator(b, scheme, 1, params.gamma1, params.f1);
  if (n > 1) add_dissipator(b, scheme, n, params.gammaN, params.fN);
  return compile_mpo(b);
}

MatrixProductOperator build_dissipator(const ModelParams& params, const OrderingScheme& scheme,
                                       std::size_t site) {
  params.validate();
  if (site != 1 && site != params.n_sites) {
    throw DomainError("baths act only on sites 1 and N");
  }
  OperatorBuilder b = superspace_builder(scheme);
  if (site == 1) {
    add_dissipator(b, scheme, 1, params.gamma1, params.f1);
  } else {
    add_dissipator(b, scheme, site, params.gammaN, params.fN);
  }
  return compile_mpo(b);
}

MpoProduct build_target(const MatrixProductOperator& liouvillian) {
  return mpo_product(mpo_dagger(liouvillian), liouvillian, kTargetCutoff);
}

MatrixProductOperator build_current_mpo(const ModelParams& params, const OrderingScheme& scheme,
                                        std::size_t bond) {
  if (bond < 1 || bond + 1 > params.n_sites) {
    throw DomainError("current bond " + std::to_string(bond) + " outside [1, N-1]");
  }
  // 2 J (sx sy - sy sx) = 8 J (Sx Sy - Sy Sx)
  const double c = 8.0 * params.j[bond - 1];
  OperatorBuilder b = superspace_builder(scheme);
  b.add_term(superspace_term(c, {{bond, "Sx", Side::L}, {bond + 1, "Sy", Side::L}}, scheme));
  b.add_term(superspace_term(-c, {{bond, "Sy", Side::L}, {bond + 1, "Sx", Side::L}}, scheme));
  return compile_mpo(b);
}

MatrixProductOperator build_magnetization_mpo(const OrderingScheme& scheme, std::size_t site) {
  if (site < 1 || site > scheme.n_phys()) {
    throw DomainError("magnetization site " + std::to_string(site) + " outside [1, N]");
  }
  OperatorBuilder b = superspace_builder(scheme);
  b.add_term(superspace_term(2.0, {{site, "Sz", Side::L}}, scheme));
  return compile_mpo(b);
}

SuperOperatorSet build_superoperators(const ModelParams& params, Ordering ordering) {
  params.validate();
  OrderingScheme scheme(ordering, params.n_sites);
  MatrixProductOperator l = build_liouvillian(params, scheme);
  MpoProduct target = build_target(l);
  SuperOperatorSet set{scheme, std::move(l), std::move(target.op), target.discarded_weight, {}, {}};
  for (std::size_t i = 1; i < params.n_sites; ++i) {
    set.current_ops.push_back(build_current_mpo(params, scheme, i));
  }
  for (std::size_t i = 1; i <= params.n_sites; ++i) {
    set.magnetization_ops.push_back(build_magnetization_mpo(scheme, i));
  }
  return set;
}

}  // namespace nessdmrg
