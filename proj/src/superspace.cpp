#include "nessdmrg/superspace.hpp"

#include <algorithm>
#include <cctype>

namespace nessdmrg {

namespace {

constexpr std::size_t kMaxRnlnIvecSites = 10;

OperatorAlphabet make_spin_half() {
  using M = Eigen::Matrix2cd;
  const cplx i(0.0, 1.0);
  M sx, sy, sz, sp, sm;
  sx << 0.0, 0.5, 0.5, 0.0;
  sy << 0.0, -0.5 * i, 0.5 * i, 0.0;
  sz << 0.5, 0.0, 0.0, -0.5;
  sp << 0.0, 1.0, 0.0, 0.0;
  sm << 0.0, 0.0, 1.0, 0.0;
  OperatorAlphabet a(2);
  a.add("Sx", sx).add("Sy", sy).add("Sz", sz).add("S+", sp).add("S-", sm);
  a.add("S+S-", sp * sm).add("S-S+", sm * sp);
  return a;
}

OperatorAlphabet make_superspace() {
  const OperatorAlphabet& base = spin_half_alphabet();
  OperatorAlphabet a(2);
  for (const auto& name : base.names()) {
    if (name == "Id") continue;
    a.add(name + "L", base.matrix(name));
    a.add(name + "R", base.matrix(name).transpose());
  }
  return a;
}

}  // namespace

std::string to_string(Ordering o) { return o == Ordering::RLN ? "rln" : "rnln"; }

Ordering parse_ordering(const std::string& s) {
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "rln") return Ordering::RLN;
  if (lower == "rnln") return Ordering::RNLN;
  throw DomainError("unknown ordering '" + s + "' (expected rln or rnln)");
}

OrderingScheme::OrderingScheme(Ordering kind, std::size_t n_phys) : kind_(kind), n_phys_(n_phys) {
  if (n_phys == 0) throw DomainError("physical chain length must be positive");
}

std::size_t OrderingScheme::primed_site(std::size_t i) const {
  if (i < 1 || i > n_phys_) throw DomainError("physical site out of range");
  return kind_ == Ordering::RLN ? 2 * i - 1 : i;
}

std::size_t OrderingScheme::unprimed_site(std::size_t i) const {
  if (i < 1 || i > n_phys_) throw DomainError("physical site out of range");
  return kind_ == Ordering::RLN ? 2 * i : n_phys_ + i;
}

std::vector<std::size_t> OrderingScheme::leg_positions() const {
  std::vector<std::size_t> pos(n_super());
  for (std::size_t i = 1; i <= n_phys_; ++i) {
    pos[primed_site(i) - 1] = i - 1;
    pos[unprimed_site(i) - 1] = n_phys_ + i - 1;
  }
  return pos;
}

const OperatorAlphabet& spin_half_alphabet() {
  static const OperatorAlphabet alphabet = make_spin_half();
  return alphabet;
}

const OperatorAlphabet& superspace_alphabet() {
  static const OperatorAlphabet alphabet = make_superspace();
  return alphabet;
}

Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw ShapeError("vectorize expects a square matrix");
  return m.reshaped();  // Eigen storage is column-major
}

Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, std::size_t d) {
  const auto dd = static_cast<Eigen::Index>(d);
  if (v.size() != dd * dd) {
    throw ShapeError("vector of length " + std::to_string(v.size()) + " is not " +
                     std::to_string(d) + "^2");
  }
  return v.reshaped(dd, dd);
}

SuperspaceFactor map_side_op(const SideOp& op, const OrderingScheme& scheme) {
  if (op.site < 1 || op.site > scheme.n_phys()) {
    throw DomainError("side operator site " + std::to_string(op.site) + " outside [1, " +
                      std::to_string(scheme.n_phys()) + "]");
  }
  const Eigen::MatrixXcd& base = spin_half_alphabet().matrix(op.name);
  if (op.side == Side::L) {
    return {scheme.unprimed_site(op.site), op.name + "L", base};
  }
  return {scheme.primed_site(op.site), op.name + "R", base.transpose()};
}

OperatorString superspace_term(cplx coefficient, const std::vector<SideOp>& ops,
                               const OrderingScheme& scheme) {
  OperatorString term{coefficient, {}};
  for (const auto& op : ops) {
    const SuperspaceFactor f = map_side_op(op, scheme);
    term.factors.emplace_back(f.site, f.name);
  }
  std::sort(term.factors.begin(), term.factors.end());
  for (std::size_t k = 1; k < term.factors.size(); ++k) {
    if (term.factors[k].first == term.factors[k - 1].first) {
      throw DomainError("two side operators act on the same leg of superspace site " +
                        std::to_string(term.factors[k].first));
    }
  }
  return term;
}

OperatorBuilder superspace_builder(const OrderingScheme& scheme) {
  return OperatorBuilder(superspace_alphabet(), scheme.n_super());
}

MatrixProductState make_ivec(const OrderingScheme& scheme) {
  const std::size_t n = scheme.n_phys();
  std::vector<LabeledTensor> tensors;
  const std::vector<std::string> labels{"l", "p", "r"};
  if (scheme.kind() == Ordering::RLN) {
    for (std::size_t i = 0; i < n; ++i) {
      LabeledTensor primed(labels, {1, 2, 2});
      LabeledTensor unprimed(labels, {2, 2, 1});
      for (std::size_t s = 0; s < 2; ++s) {
        primed.at({0, s, s}) = 1.0;
        unprimed.at({s, s, 0}) = 1.0;
      }
      tensors.push_back(std::move(primed));
      tensors.push_back(std::move(unprimed));
    }
    return MatrixProductState(std::move(tensors));
  }

  if (n > kMaxRnlnIvecSites) {
    throw DomainError("exact vec(I) under RNLN needs bond 2^N; supported up to N = " +
                      std::to_string(kMaxRnlnIvecSites));
  }
  // Primed sites append their value to the bond register; unprimed site j
  // consumes the most significant remaining bit, which holds s_j'.
  for (std::size_t k = 1; k <= n; ++k) {
    const std::size_t dl = std::size_t{1} << (k - 1);
    LabeledTensor t(labels, {dl, 2, 2 * dl});
    for (std::size_t x = 0; x < dl; ++x) {
      for (std::size_t s = 0; s < 2; ++s) t.at({x, s, 2 * x + s}) = 1.0;
    }
    tensors.push_back(std::move(t));
  }
  for (std::size_t j = 1; j <= n; ++j) {
    const std::size_t dr = std::size_t{1} << (n - j);
    LabeledTensor t(labels, {2 * dr, 2, dr});
    for (std::size_t x = 0; x < 2 * dr; ++x) {
      t.at({x, x / dr, x % dr}) = 1.0;
    }
    tensors.push_back(std::move(t));
  }
  return MatrixProductState(std::move(tensors));
}

namespace {

std::vector<Eigen::Index> chain_to_vec_index(const OrderingScheme& scheme) {
  const std::size_t legs = scheme.n_super();
  const auto pos = scheme.leg_positions();
  const std::size_t dim = std::size_t{1} << legs;
  std::vector<Eigen::Index> map(dim);
  for (std::size_t x = 0; x < dim; ++x) {
    std::size_t y = 0;
    for (std::size_t s = 0; s < legs; ++s) {
      const std::size_t bit = (x >> (legs - 1 - s)) & 1U;
      y |= bit << (legs - 1 - pos[s]);
    }
    map[x] = static_cast<Eigen::Index>(y);
  }
  return map;
}

}  // namespace

Eigen::VectorXcd to_vec_order(const Eigen::VectorXcd& v, const OrderingScheme& scheme) {
  const auto map = chain_to_vec_index(scheme);
  if (static_cast<std::size_t>(v.size()) != map.size()) throw ShapeError("superspace size mismatch");
  Eigen::VectorXcd out(v.size());
  for (std::size_t x = 0; x < map.size(); ++x) out[map[x]] = v[static_cast<Eigen::Index>(x)];
  return out;
}

Eigen::MatrixXcd to_vec_order(const Eigen::MatrixXcd& m, const OrderingScheme& scheme) {
  const auto map = chain_to_vec_index(scheme);
  if (static_cast<std::size_t>(m.rows()) != map.size() || m.rows() != m.cols()) {
    throw ShapeError("superspace size mismatch");
  }
  Eigen::MatrixXcd out(m.rows(), m.cols());
  for (std::size_t x = 0; x < map.size(); ++x) {
    for (std::size_t y = 0; y < map.size(); ++y) {
      out(map[x], map[y]) = m(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(y));
    }
  }
  return out;
}

}  // namespace nessdmrg
