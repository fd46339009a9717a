#pragma once

#include <cstdint>
#include <vector>

#include "aiid/conic.hpp"
#include "aiid/tensor.hpp"

namespace aiid {

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma);
double helstrom_success(const DensityOperator& rho, const DensityOperator& sigma);

// Optimal decomposition rho - sigma = sum_i X_i with Tr_{A_i} X_i = 0,
// value = sum_i ||X_i||_1 / 2. The SDP splits each X_i into PSD parts
// P_i - Q_i and minimizes (1/2) sum Tr(P_i + Q_i); a minimizer has P_i, Q_i
// with essentially disjoint supports, which recovers the neighbouring-state
// form X_i = c_i (tau_i - eta_i) with c_i = ||X_i||_1 / 2.
struct W1Certificate {
  int site_dim = 2;
  int n_sites = 1;
  double value = 0.0;
  std::vector<Mat> site_terms;   // X_i
  std::vector<double> weights;   // c_i
  double max_constraint_residual = 0.0;
  double solver_gap = 0.0;
  int iterations = 0;

  // Neighbouring-state pair for site i (1-based); sites with weight below
  // 1e-9 return the maximally mixed state to avoid 0/0.
  DensityOperator tau(int site) const;
  DensityOperator eta(int site) const;
};

W1Certificate w1_primal(const DensityOperator& rho, const DensityOperator& sigma,
                        double tol = 1e-7);

// Dual side: max Tr[(rho - sigma) H] over observables with Lipschitz
// constant at most 1, i.e. with per-site compressions M_i satisfying
// ||H - 1_i x M_i|| <= 1/2; solved as its own conic program, independent of
// the primal route.
struct LipschitzWitness {
  int site_dim = 2;
  int n_sites = 1;
  double value = 0.0;
  Mat observable;                 // H, traceless gauge
  std::vector<Mat> compressions;  // M_i acting on the complement of site i
  double max_site_norm = 0.0;     // max_i ||H - 1_i x M_i||
  double solver_gap = 0.0;
  int iterations = 0;
};

LipschitzWitness w1_dual(const DensityOperator& rho, const DensityOperator& sigma,
                         double tol = 1e-7);

// Checks a candidate witness without solving: feasibility norms and value.
LipschitzWitness make_witness(const DensityOperator& rho,
                              const DensityOperator& sigma, const Mat& observable,
                              const std::vector<Mat>& compressions);

struct LipschitzConstant {
  double value = 0.0;              // max_i per_site[i]
  std::vector<double> per_site;    // partial_i X = 2 min_M ||X - 1_i x M||
};

LipschitzConstant lipschitz_constant(const HermitianObservable& x,
                                     double tol = 1e-7);

// (1/2) sum_k 2^{-k} E_{|I|=k} || Tr_{I^c}[rho - sigma] ||_1, exact by
// enumeration. Guard: n <= 12.
double lv_norm(const DensityOperator& rho, const DensityOperator& sigma);

struct LvEstimate {
  double value = 0.0;
  double stderr_ = 0.0;
};

// Stratified sampling estimate (per subset size k), unbiased per stratum.
LvEstimate lv_norm_sampled(const DensityOperator& rho,
                           const DensityOperator& sigma, int samples,
                           std::uint64_t seed);

// sqrt(n/2 D(rho || omega)) for an explicit product omega; +infinity when
// the support condition fails.
double marton_bound(const DensityOperator& rho,
                    const std::vector<DensityOperator>& omega_factors);

// h2(w) + w ln(d^2 - 1); the bound depends on n only through w = W1/n.
// Evaluated verbatim on all of [0,1]; values above 1/2, where h2 decreases,
// are flagged at reporting level.
double entropy_continuity_bound(double w, int n, int d);

// sqrt((h2(p) + p ln(d-1)) / 2) + p with p the average infidelity of the
// marginals of rho to the pure factors.
double pure_product_bound(const DensityOperator& rho,
                          const std::vector<DensityOperator>& pure_factors);

// Bound specialization p = r/n for span-projector states.
double msr_epsilon(int n, int r, int d);

// Orthonormal Hermitian bases used by the conic encodings.
std::vector<Mat> traceless_hermitian_basis(int side);
std::vector<Mat> full_hermitian_basis(int side);  // identity/sqrt(D) first

}  // namespace aiid
