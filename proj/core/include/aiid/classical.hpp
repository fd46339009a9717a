#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "aiid/rng.hpp"
#include "aiid/tensor.hpp"

namespace aiid {

// Sparse probability distribution over digit strings in {0,...,d-1}^n.
// Keys are length-n digit strings; iteration order is lexicographic, which
// keeps transport bases and serialized files reproducible.
struct ClassicalDistribution {
  int d = 2;
  int n = 1;
  std::map<std::string, double> probs;

  static ClassicalDistribution make(int d, int n,
                                    std::map<std::string, double> probs);
  static ClassicalDistribution point_mass(int d, const std::string& x);
  static ClassicalDistribution uniform_symbol(int d);

  double prob(const std::string& x) const;
};

// Symbol counts of a string; sums to n.
struct TypeVector {
  int n = 0;
  std::vector<long long> counts;

  static TypeVector make(std::vector<long long> counts);
  int alphabet() const { return static_cast<int>(counts.size()); }
};

// Transport plan between two distributions on the same string space.
struct Coupling {
  std::map<std::pair<std::string, std::string>, double> mass;
  ClassicalDistribution p, q;
};

struct TransportResult {
  double value = 0.0;
  double dual_value = 0.0;  // from the final node potentials
  Coupling coupling;
};

int hamming_distance(const std::string& x, const std::string& y);

// Ornstein d-bar: optimal transport with Hamming cost, solved as a
// min-cost-flow on the bipartite support graph (successive shortest paths
// with integer reduced costs). Guard: |supp p| * |supp q| <= 1e6.
TransportResult hamming_w1(const ClassicalDistribution& p,
                           const ClassicalDistribution& q);

ClassicalDistribution type_class_uniform(const TypeVector& t);
long long type_class_size(const TypeVector& t);

// Product distribution p(x1)...p(xn) of a single-symbol p; zero-probability
// strings are omitted from the sparse map. Guard: n <= 20.
ClassicalDistribution iid_distribution(const ClassicalDistribution& p, int n);

// Odd positions i.i.d. along p; each even position copies its predecessor.
ClassicalDistribution paired_source(const ClassicalDistribution& p, int n);

// Marginal of the paired source on an arbitrary subset, computed from the
// pair-block structure without materializing the full distribution; valid
// for any n.
ClassicalDistribution paired_source_marginal(const ClassicalDistribution& p,
                                             int n, const SiteSubset& sites);

// Balanced-type uniform distribution for even n; for odd n the n-1 site
// version tensored with a fresh uniform bit on the last site.
ClassicalDistribution xi_distribution(int n);

ClassicalDistribution marginal(const ClassicalDistribution& p,
                               const SiteSubset& sites);

ClassicalDistribution product(const ClassicalDistribution& a,
                              const ClassicalDistribution& b);

// Sum of absolute differences (trace-norm convention, not halved).
double l1_distance(const ClassicalDistribution& p,
                   const ClassicalDistribution& q);

// Average over |I| = k of || (p_n)_I - p^{x k} ||_1.
double avg_marginal_tv(const ClassicalDistribution& p_n,
                       const ClassicalDistribution& p_single, int k);

struct SampledEstimate {
  double mean = 0.0;
  double stderr_ = 0.0;
  int samples = 0;
};

// Same average estimated from `samples` uniform subsets, with the marginal
// supplied as a callback so structured families avoid full enumeration.
SampledEstimate avg_marginal_tv_sampled(
    const std::function<ClassicalDistribution(const SiteSubset&)>& marginal_of,
    const ClassicalDistribution& p_single, int n, int k, int samples, Rng& rng);

double classical_entropy(const ClassicalDistribution& p);  // nats
double kl_divergence(const ClassicalDistribution& p,
                     const ClassicalDistribution& q);

// sqrt((d-1) ln(n+1) / (2n)), natural-log convention.
double quantitative_wass_bound(const TypeVector& t, int n);

// Diagonal embedding into the canonical basis. Guard: d^n <= 4096.
DensityOperator classical_to_density(const ClassicalDistribution& p);

// Inverse direction for operators diagonal in the canonical basis
// (off-diagonal weight above 1e-10 is an error).
ClassicalDistribution diagonal_distribution(const DensityOperator& rho);

}  // namespace aiid
