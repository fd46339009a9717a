#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "aiid/classical.hpp"
#include "aiid/tensor.hpp"
#include "aiid/w1.hpp"

namespace aiid {

// One verified inequality (or equality within tolerance): pass iff
// margin = rhs - lhs >= -tol.
struct CheckResult {
  std::string name;
  std::string paper_ref;  // anchor label of the statement being checked
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tol = 0.0;
  bool pass = false;
  bool skipped = false;
  std::map<std::string, double> meta;       // n, d, seed, ...
  std::map<std::string, std::string> notes;
  double runtime_sec = 0.0;  // in-memory diagnostics; not serialized

  static CheckResult make(std::string name, std::string anchor, double lhs,
                          double rhs, double tol);
  static CheckResult skipped_check(std::string name, std::string anchor,
                                   std::string reason);
};

struct VerificationReport {
  std::string suite;
  std::vector<CheckResult> checks;
  int n_pass = 0;
  int n_fail = 0;
  int n_skipped = 0;

  void add(CheckResult c);
  void merge(const VerificationReport& other);
  void finalize();  // sorts by name and recounts
  bool all_pass() const { return n_fail == 0; }
};

std::string report_to_json(const VerificationReport& report);
std::string report_to_csv(const VerificationReport& report);

struct CheckContext {
  double solver_tol = 1e-8;  // conic / transport accuracy
  double margin_tol = 1e-6;  // comparison tolerance for proved inequalities
};

// Local-variation vs Wasserstein: LV <= (2/n) W1 (the proved constant).
// The stated 1/n variant is recorded in meta as informational.
CheckResult check_wlv(const std::string& name, const DensityOperator& rho,
                      const DensityOperator& sigma, const CheckContext& ctx,
                      double w1_value);

CheckResult check_marton(const std::string& name, const DensityOperator& rho,
                         const std::vector<DensityOperator>& omega_factors,
                         const CheckContext& ctx, double w1_value);

CheckResult check_entropy_continuity(const std::string& name,
                                     const DensityOperator& rho,
                                     const DensityOperator& sigma,
                                     const CheckContext& ctx, double w1_value);

CheckResult check_pure_product(const std::string& name,
                               const DensityOperator& rho,
                               const std::vector<DensityOperator>& pure_factors,
                               const CheckContext& ctx, double w1_value);

// Defect state with pure reference and k orthogonal defects; the state is
// diagonal, so the Wasserstein value comes from the exact transport route.
CheckResult check_msr_epsilon(const std::string& name, int n, int k,
                              const CheckContext& ctx);

// E_{|I|=k} ||(rho_n)_I - rho^{x k}||_1 <= 2^{k+1} LV(rho_n, rho^{x n}).
CheckResult check_metrisation(const std::string& name,
                              const DensityOperator& rho_n,
                              const DensityOperator& rho_single, int k,
                              const CheckContext& ctx);

VerificationReport verify_paired_counterexample(const ClassicalDistribution& p,
                                                const std::vector<int>& n_list,
                                                int k, const CheckContext& ctx,
                                                std::uint64_t seed);

VerificationReport verify_xi_counterexample(const std::vector<int>& n_list_even,
                                            const CheckContext& ctx);

VerificationReport verify_ame_lower_bound(const CheckContext& ctx,
                                          bool attempt_full_dual = false);

struct SuiteConfig {
  std::uint64_t seed = 0;
  double solver_tol = 1e-8;
  double margin_tol = 1e-6;
  bool enforce_one_over_n = false;  // make the stated 1/n variant blocking
  bool attempt_full_dual = false;   // 5-qubit dual conic solve instead of witness
  int threads = 1;
  std::string only;  // run only task groups whose name starts with this
};

// which: all | hierarchy | counterexamples | ame.
VerificationReport run_suite(const std::string& which, const SuiteConfig& config);

}  // namespace aiid
