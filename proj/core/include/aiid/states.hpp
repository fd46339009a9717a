#pragma once

#include <optional>
#include <vector>

#include "aiid/rng.hpp"
#include "aiid/tensor.hpp"

namespace aiid {

// n-fold tensor power. Guard: d^n <= 4096.
DensityOperator iid_state(const DensityOperator& rho, int n);

DensityOperator maximally_mixed(int d, int n);

// Permutation average of rho^{(n-k)} x omega_k, computed over the
// n!/(n-k)! ordered defect placements (the reference block is permutation
// symmetric, so this equals the full S_n average). omega with zero sites
// gives back the i.i.d. state.
DensityOperator defect_state(const DensityOperator& rho,
                             const DensityOperator& omega_k, int n);

// 0-site placeholder defect, for the k = 0 case of defect_state.
DensityOperator no_defect(int d);

// Projector onto span{ U_pi (psi^{(n-r)} x |e_j>) }: all placements of r
// unconstrained slots into n sites around the reference product.
struct SpanProjector {
  int n = 0;
  int r = 0;
  int site_dim = 2;
  Vec reference;  // single-site |psi>
  Mat projector;
  int rank = 0;
};

SpanProjector v_span_projector(const Vec& psi, int n, int r);

// Tail weight profiles over the defect count.
struct TailWeight {
  enum class Kind { hard_cutoff, indicator, linear, exponential };
  Kind kind = Kind::linear;
  int r0 = 0;         // cutoff / indicator threshold
  double lambda = 0;  // exponential rate

  static TailWeight hard_cutoff(int r0);
  static TailWeight indicator(int r0);
  static TailWeight linear();
  static TailWeight exponential(double lambda);

  // f(r); +infinity allowed (hard cutoff above r0).
  double value(int r, int n) const;
};

// sum_{r=1..n} f(r) Tr[(Pi_r - Pi_{r-1}) rho_ext] with the convention
// 0 * infinity = 0 (weights below 1e-10 do not trigger an infinite term).
// Pi_0 is the rank-one projector onto the reference product, so the zero
// defect mass carries no weight and the hard cutoff reproduces span
// membership for every r0 >= 0.
double tail_functional(const DensityOperator& rho_ext, const Vec& psi,
                       const TailWeight& f);

struct GentleCheck {
  double lhs = 0.0;      // (1/2) || rho - P rho P ||_1
  double rhs = 0.0;      // sqrt(eta)
  double overlap = 0.0;  // Tr[P rho]
  bool pass = false;
};

// Requires Tr[P rho] >= 1 - eta; verifies the gentle measurement bound.
GentleCheck gentle_projection_check(const DensityOperator& rho, const Mat& proj,
                                    double eta);

// Fixed five-qubit stabilizer state whose 1- and 2-site marginals are all
// maximally mixed; the construction is verified numerically before being
// returned.
DensityOperator five_qubit_code_state();

// Seeded random instances (normalized G G^dagger with complex Gaussian G;
// diagonal variant from squared Gaussians).
DensityOperator random_density(Rng& rng, int d, int n);
DensityOperator random_pure(Rng& rng, int d, int n);
DensityOperator random_diagonal_density(Rng& rng, int d, int n);
Vec random_pure_vector(Rng& rng, int dim);

}  // namespace aiid
