#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "nessdmrg/mps.hpp"
#include "nessdmrg/operator_builder.hpp"

namespace nessdmrg {

/// Layout of the vectorized density matrix on a chain of 2N qubit sites.
///
/// vec(|s><s'|) = |s'>|s>: each physical site i owns a primed (bra,
/// right-action) leg and an unprimed (ket, left-action) leg.
///  - RLN:  (s1' s1)(s2' s2)...(sN' sN); site i -> superspace sites 2i-1, 2i.
///  - RNLN: s1'...sN' s1...sN;           site i -> superspace sites i, N+i.
/// RNLN coincides with plain column stacking of the 2^N x 2^N matrix.
enum class Ordering { RLN, RNLN };

std::string to_string(Ordering o);
Ordering parse_ordering(const std::string& s);

class OrderingScheme {
 public:
  OrderingScheme(Ordering kind, std::size_t n_phys);

  Ordering kind() const { return kind_; }
  std::size_t n_phys() const { return n_phys_; }
  std::size_t n_super() const { return 2 * n_phys_; }

  /// 1-based superspace sites carrying physical site i.
  std::size_t primed_site(std::size_t i) const;
  std::size_t unprimed_site(std::size_t i) const;

  /// For each superspace position (0-based, in chain order), the position of
  /// the same leg in column-stacking order.
  std::vector<std::size_t> leg_positions() const;

 private:
  Ordering kind_;
  std::size_t n_phys_;
};

enum class Side { L, R };

/// Base single-site operator acting on the density matrix from one side:
/// L means A rho, R means rho A.
struct SideOp {
  std::size_t site;
  std::string name;
  Side side;
};

/// Spin-1/2 operators: Id, Sx, Sy, Sz, S+, S-, S+S-, S-S+ (S = sigma/2,
/// S+ = |up><down|, basis (up, down)).
const OperatorAlphabet& spin_half_alphabet();

/// Superspace alphabet: each base name B appears as BL (matrix A) and BR
/// (matrix A^T), plus Id.
const OperatorAlphabet& superspace_alphabet();

/// Column-stacking vectorization.
Eigen::VectorXcd vectorize(const Eigen::MatrixXcd& m);
Eigen::MatrixXcd unvectorize(const Eigen::VectorXcd& v, std::size_t d);

struct SuperspaceFactor {
  std::size_t site;  // 1-based superspace site
  std::string name;  // entry of superspace_alphabet()
  Eigen::MatrixXcd matrix;
};

/// L-side ops act with A on the unprimed leg; R-side with A^T on the primed leg.
SuperspaceFactor map_side_op(const SideOp& op, const OrderingScheme& scheme);

/// Translates a product of side operators into a superspace operator string.
/// Two factors landing on the same superspace leg is an error.
OperatorString superspace_term(cplx coefficient, const std::vector<SideOp>& ops,
                               const OrderingScheme& scheme);

/// Builder on the 2N-site superspace chain.
OperatorBuilder superspace_builder(const OrderingScheme& scheme);

/// vec(I) as an exact matrix product state. Under RLN it is a product of
/// per-site Bell pairs (bond 2 inside a pair, 1 between pairs); under RNLN
/// the bond at cut k is 2^min(k, 2N-k).
MatrixProductState make_ivec(const OrderingScheme& scheme);

/// Reorders a superspace vector (chain order of `scheme`) into column-stacking order.
Eigen::VectorXcd to_vec_order(const Eigen::VectorXcd& v, const OrderingScheme& scheme);
/// Conjugates a superspace matrix into column-stacking order.
Eigen::MatrixXcd to_vec_order(const Eigen::MatrixXcd& m, const OrderingScheme& scheme);

}  // namespace nessdmrg
