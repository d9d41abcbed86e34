#include "nessdmrg/operator_builder.hpp"

#include <map>
#include <string>

namespace nessdmrg {

namespace {

using Factor = std::pair<std::size_t, std::string>;
using Prefix = std::vector<Factor>;

// Automaton states on one bond, ordered: "idle" (nothing placed yet), the
// open prefixes in lexicographic order, then "done" (term complete).
struct BondStates {
  bool idle = false;
  bool done = false;
  std::map<Prefix, std::size_t> open;
  std::size_t idle_index = 0;
  std::size_t done_index = 0;
  std::size_t size = 0;

  void finalize() {
    std::size_t next = 0;
    if (idle) idle_index = next++;
    for (auto& [prefix, index] : open) index = next++;
    if (done) done_index = next++;
    size = next;
  }
};

Prefix prefix_through(const OperatorString& term, std::size_t site) {
  Prefix out;
  for (const auto& f : term.factors) {
    if (f.first > site) break;
    out.push_back(f);
  }
  return out;
}

void accumulate(LabeledTensor& w, std::size_t a, std::size_t b, const Eigen::MatrixXcd& m,
                cplx scale) {
  const auto d = static_cast<std::size_t>(m.rows());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      w.at({a, i, j, b}) += scale * m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
}

void assign(LabeledTensor& w, std::size_t a, std::size_t b, const Eigen::MatrixXcd& m) {
  const auto d = static_cast<std::size_t>(m.rows());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      w.at({a, i, j, b}) = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
}

}  // namespace

OperatorAlphabet::OperatorAlphabet(std::size_t dim) : dim_(dim) {
  if (dim == 0) throw DomainError("operator alphabet dimension must be positive");
  ops_["Id"] = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(dim),
                                          static_cast<Eigen::Index>(dim));
}

OperatorAlphabet& OperatorAlphabet::add(const std::string& name, const Eigen::MatrixXcd& m) {
  if (static_cast<std::size_t>(m.rows()) != dim_ || static_cast<std::size_t>(m.cols()) != dim_) {
    throw ShapeError("operator '" + name + "' is not " + std::to_string(dim_) + "x" +
                     std::to_string(dim_));
  }
  ops_[name] = m;
  return *this;
}

const Eigen::MatrixXcd& OperatorAlphabet::matrix(const std::string& name) const {
  auto it = ops_.find(name);
  if (it == ops_.end()) throw LabelError("unknown operator '" + name + "'");
  return it->second;
}

std::vector<std::string> OperatorAlphabet::names() const {
  std::vector<std::string> out;
  for (const auto& [name, m] : ops_) out.push_back(name);
  return out;
}

OperatorBuilder::OperatorBuilder(OperatorAlphabet alphabet, std::size_t length)
    : alphabet_(std::move(alphabet)), length_(length) {
  if (length == 0) throw DomainError("operator chain length must be positive");
}

OperatorBuilder& OperatorBuilder::add_term(cplx coefficient, std::vector<Factor> factors) {
  return add_term(OperatorString{coefficient, std::move(factors)});
}

OperatorBuilder& OperatorBuilder::add_term(const OperatorString& term) {
  std::size_t last = 0;
  for (const auto& [site, name] : term.factors) {
    if (site < 1 || site > length_) {
      throw DomainError("term site " + std::to_string(site) + " outside [1, " +
                        std::to_string(length_) + "]");
    }
    if (site <= last) throw DomainError("term sites must be strictly increasing");
    if (!alphabet_.contains(name)) throw LabelError("unknown operator '" + name + "'");
    last = site;
  }
  OperatorString stored = term;
  if (stored.factors.empty()) stored.factors.emplace_back(1, "Id");
  terms_.push_back(std::move(stored));
  return *this;
}

MatrixProductOperator compile_mpo(const OperatorBuilder& builder) {
  const auto& terms = builder.terms();
  if (terms.empty()) throw DomainError("cannot compile an operator with no terms");
  const std::size_t n = builder.length();
  const std::size_t d = builder.alphabet().dim();

  // bonds[c] sits between sites c and c+1 (1-based); bonds[0] and bonds[n]
  // are the chain ends.
  std::vector<BondStates> bonds(n + 1);
  bonds[0].idle = true;
  bonds[n].done = true;
  for (const auto& term : terms) {
    const std::size_t first = term.factors.front().first;
    const std::size_t last = term.factors.back().first;
    for (std::size_t c = 1; c < n; ++c) {
      if (c < first) {
        bonds[c].idle = true;
      } else if (c >= last) {
        bonds[c].done = true;
      } else {
        bonds[c].open.emplace(prefix_through(term, c), 0);
      }
    }
  }
  for (auto& b : bonds) b.finalize();

  const Eigen::MatrixXcd& id = builder.alphabet().matrix("Id");
  std::vector<LabeledTensor> tensors;
  for (std::size_t site = 1; site <= n; ++site) {
    const BondStates& left = bonds[site - 1];
    const BondStates& right = bonds[site];
    LabeledTensor w({"l", "out", "in", "r"}, {left.size, d, d, right.size});
    if (left.idle && right.idle) assign(w, left.idle_index, right.idle_index, id);
    if (left.done && right.done) assign(w, left.done_index, right.done_index, id);

    for (const auto& term : terms) {
      const std::size_t first = term.factors.front().first;
      const std::size_t last = term.factors.back().first;
      if (site < first || site > last) continue;

      const Eigen::MatrixXcd* op = &id;
      for (const auto& [s, name] : term.factors) {
        if (s == site) op = &builder.alphabet().matrix(name);
      }
      const std::size_t a = site == first ? left.idle_index : left.open.at(prefix_through(term, site - 1));
      if (site == last) {
        accumulate(w, a, right.done_index, *op, term.coefficient);
      } else {
        // shared prefixes map to one transition, so assign rather than add
        assign(w, a, right.open.at(prefix_through(term, site)), *op);
      }
    }
    tensors.push_back(std::move(w));
  }
  return MatrixProductOperator(std::move(tensors));
}

}  // namespace nessdmrg
