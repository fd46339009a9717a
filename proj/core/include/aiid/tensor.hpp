#pragma once

#include <Eigen/Dense>
#include <complex>
#include <functional>
#include <vector>

namespace aiid {

using Cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;

// Numerical tolerances shared by the operator carriers.
constexpr double kHermTol = 1e-12;      // allowed anti-Hermitian residual
constexpr double kTraceTol = 1e-10;     // allowed deviation of Tr rho from 1
constexpr double kPsdTol = 1e-10;       // allowed negative eigenvalue magnitude
constexpr double kEntropyClip = 1e-14;  // eigenvalues below this count as 0 in logs

// Increasing list of sites drawn from {1, ..., n} (1-based).
struct SiteSubset {
  int n = 0;
  std::vector<int> indices;

  static SiteSubset make(int n, std::vector<int> indices);
  int size() const { return static_cast<int>(indices.size()); }
  SiteSubset complement() const;
  bool contains(int site) const;
};

// Bijection on {1, ..., n}; image[i-1] is where site i goes.
struct Permutation {
  int n = 0;
  std::vector<int> image;

  static Permutation make(int n, std::vector<int> image);
  static Permutation identity(int n);
  Permutation inverse() const;
  int operator()(int site) const { return image[site - 1]; }
};

// Generic multipartite operator: n_sites sites of local dimension site_dim,
// matrix of side site_dim^n_sites. Site 1 indexes the most significant digit
// of a basis label (big-endian layout); every module inherits this.
struct SiteOperator {
  int site_dim = 2;
  int n_sites = 1;
  Mat mat;

  Eigen::Index dim() const { return mat.rows(); }
};

struct HermitianObservable : SiteOperator {
  // Validates hermiticity within kHermTol.
  static HermitianObservable make(int site_dim, int n_sites, Mat m);
};

struct DensityOperator : SiteOperator {
  // Validates hermiticity, unit trace and positive semidefiniteness.
  static DensityOperator make(int site_dim, int n_sites, Mat m);
  // Skips the eigenvalue check; for operators that are densities by
  // construction (partial traces, tensor products of densities, ...).
  static DensityOperator trusted(int site_dim, int n_sites, Mat m);

  HermitianObservable observable() const;
};

int checked_power(int base, int exp, int limit);

// (A + A^dagger) / 2; applied before every eigendecomposition.
Mat hermitized(const Mat& m);

// Kronecker product with site 1 of `a` as the leftmost (most significant)
// factor. Requires matching site_dim.
SiteOperator tensor_product(const SiteOperator& a, const SiteOperator& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);

// Reduced operator on `keep` (complement traced out). Keeping nothing is an
// error: the scalar trace is not an operator.
SiteOperator partial_trace(const SiteOperator& op, const SiteSubset& keep);
DensityOperator partial_trace(const DensityOperator& op, const SiteSubset& keep);
DensityOperator single_site_marginal(const DensityOperator& op, int site);

// Conjugation by the unitary that moves the content of site i to site pi(i).
SiteOperator permute_sites(const SiteOperator& op, const Permutation& pi);
DensityOperator permute_sites(const DensityOperator& op, const Permutation& pi);

// Embeds an operator on n-1 sites as acting trivially on `site` of n sites.
SiteOperator lift_omitting_site(const SiteOperator& rest, int site);

double trace_norm(const Mat& x);
double operator_norm(const Mat& x);
double trace_norm(const SiteOperator& x);
double operator_norm(const SiteOperator& x);

// Entropies in nats throughout; base conversions happen at reporting time.
double von_neumann_entropy(const DensityOperator& rho);
double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma);
double binary_entropy(double x);

// Canonical eigendecomposition purification: eigenvalues nonincreasing, ties
// broken by eigenvector lexicographic order, environment labels in the
// computational basis. The input is treated as a single site group, so the
// result lives on two sites of dimension dim(rho).
DensityOperator purify(const DensityOperator& rho);

// Exact mean of f over all C(n, k) subsets of size k. Guard: C(n,k) <= 1e6.
double subset_average(int n, int k,
                      const std::function<double(const SiteSubset&)>& f);

// Enumeration helper behind subset_average and the marginal averages.
void for_each_subset(int n, int k,
                     const std::function<void(const SiteSubset&)>& visit);
double binomial(int n, int k);

// Common fixtures.
DensityOperator maximally_mixed_site(int d);
DensityOperator basis_state(int d, int index);
Mat identity_matrix(Eigen::Index side);

}  // namespace aiid
