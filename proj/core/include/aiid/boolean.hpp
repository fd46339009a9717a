#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "aiid/tensor.hpp"

namespace aiid {

// Subsets of [n], points of {0,1}^n and indicator inputs all share one
// n-bit encoding: bit (n - i) of a mask is coordinate/site i, so a mask is
// simultaneously the subset S, the string 1_S, and the big-endian basis
// index used by the operator modules.
using BitMask = std::uint32_t;

int popcount(BitMask m);

// f(x) = sum_S c_S prod_{i in S} x_i with sparse real coefficients.
struct MultilinearPolynomial {
  int n = 0;
  std::map<BitMask, double> coefficients;

  int degree() const;  // max |S| with nonzero coefficient; -1 if all zero
};

// Real-valued function on {0,1}^n backed by a full table.
struct BooleanFunction {
  int n = 0;
  std::vector<double> table;  // size 2^n, indexed by mask

  static BooleanFunction from_table(int n, std::vector<double> table);
  static BooleanFunction from_function(int n,
                                       const std::function<double(BitMask)>& f);
  double operator()(BitMask x) const { return table[x]; }
};

// Inclusion-exclusion coefficients c_S = sum_{T subseteq S} (-1)^{|S|-|T|} f(1_T).
MultilinearPolynomial moebius_coefficients(const BooleanFunction& f);

double evaluate(const MultilinearPolynomial& p, const std::vector<double>& x);
double evaluate_boolean(const MultilinearPolynomial& p, BitMask x);

struct SliceRankResult {
  int dimension = 0;  // null-space dimension of the vanishing system
  std::vector<MultilinearPolynomial> certificate;
};

// Dimension of {degree <= r multilinear f : f(x) = 0 whenever |x| != n/2}.
// Zero exactly expresses the middle-slice vanishing obstruction; callers pass
// r >= n/2 to exhibit the failure mode.
SliceRankResult middle_slice_rank_test(int n, int r);

// f(x) = <x| rho |x> for a qubit diagonal readout (d = 2 only).
BooleanFunction diagonal_function(const DensityOperator& rho);

// l2 residual of the best degree <= deg multilinear approximation over all
// 2^n points; 0 (within 1e-10) iff such a representation exists.
double low_degree_fit_residual(const BooleanFunction& f, int deg);

}  // namespace aiid
