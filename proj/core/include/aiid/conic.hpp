#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "aiid/tensor.hpp"

namespace aiid::conic {

// One PSD cone variable: complex Hermitian (is_complex) or real symmetric.
struct Block {
  int side = 0;
  bool is_complex = true;
};

// Affine equality  sum_b <A_b, X_b> + free_coeff . u = rhs, with Hermitian
// A_b given per touched block (missing blocks are zero).
struct ConstraintRow {
  std::map<int, Mat> coeff;
  Eigen::VectorXd free_coeff;  // empty or size n_free
  double rhs = 0.0;
};

// minimize  sum_b <C_b, X_b> + free_objective . u
// subject to the listed equalities, X_b PSD, u free.
//
// The free-variable extension is what lets the Lipschitz-ball problems keep
// their natural observable coordinates; problems without free variables
// leave n_free at 0.
struct ConicProblem {
  std::vector<Block> blocks;
  std::vector<Mat> objective;  // one Hermitian cost per block (empty = zero)
  Eigen::VectorXd free_objective;
  int n_free = 0;
  std::vector<ConstraintRow> constraints;
};

enum class SolveStatus { optimal, infeasible, unbounded, numerical_failure };
std::string to_string(SolveStatus s);

struct SolverResult {
  SolveStatus status = SolveStatus::numerical_failure;
  double primal_value = 0.0;
  double dual_value = 0.0;
  double gap = 1.0;  // |primal - dual| / max(1, |primal|)
  double feasibility_residual = 1.0;
  std::vector<Mat> block_solution;  // Hermitian PSD per block
  Eigen::VectorXd free_solution;
  Eigen::VectorXd dual_y;  // per original constraint; dropped rows carry 0
  std::vector<int> dropped_rows;
  int iterations = 0;
};

// Dense primal-dual path-following solve (Nesterov-Todd scaling, Mehrotra
// centering). Deterministic for identical input. Complex blocks are passed
// through the real embedding internally, so the cone arithmetic is real
// symmetric only.
SolverResult solve(const ConicProblem& p, double tol = 1e-7, int max_iter = 500);

// [[Re H, -Im H], [Im H, Re H]] for Hermitian H; H is PSD iff the embedding
// is, and Tr of the embedding doubles.
Eigen::MatrixXd hermitian_real_embedding(const Mat& h);

}  // namespace aiid::conic
