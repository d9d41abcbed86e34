#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "nessdmrg/mpo.hpp"

namespace nessdmrg {

/// Named single-site matrices shared by every site of a chain.
class OperatorAlphabet {
 public:
  explicit OperatorAlphabet(std::size_t dim);

  /// Registers `name`; re-registering a name replaces its matrix.
  OperatorAlphabet& add(const std::string& name, const Eigen::MatrixXcd& m);

  std::size_t dim() const { return dim_; }
  bool contains(const std::string& name) const { return ops_.count(name) != 0; }
  const Eigen::MatrixXcd& matrix(const std::string& name) const;
  std::vector<std::string> names() const;

 private:
  std::size_t dim_;
  std::map<std::string, Eigen::MatrixXcd> ops_;
};

/// coefficient * prod_k op(name_k) at site_k, identity elsewhere.
/// Sites are 1-based and strictly increasing.
struct OperatorString {
  cplx coefficient{1.0};
  std::vector<std::pair<std::size_t, std::string>> factors;
};

/// Accumulates operator strings and compiles them into an exact MPO.
///
/// Compilation builds a finite-state automaton over the chain: at each bond
/// the states are "nothing placed yet", "term finished", and one state per
/// distinct partially placed prefix. Terms that share a prefix share its
/// states, so the bond dimension is 2 plus the number of distinct open
/// prefixes, at most, and does not depend on any state's bond dimension.
class OperatorBuilder {
 public:
  OperatorBuilder(OperatorAlphabet alphabet, std::size_t length);

  OperatorBuilder& add_term(const OperatorString& term);
  OperatorBuilder& add_term(cplx coefficient,
                            std::vector<std::pair<std::size_t, std::string>> factors);

  std::size_t length() const { return length_; }
  const OperatorAlphabet& alphabet() const { return alphabet_; }
  const std::vector<OperatorString>& terms() const { return terms_; }

 private:
  OperatorAlphabet alphabet_;
  std::size_t length_;
  std::vector<OperatorString> terms_;
};

MatrixProductOperator compile_mpo(const OperatorBuilder& builder);

}  // namespace nessdmrg
