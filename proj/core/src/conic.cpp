#include "aiid/conic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "aiid/errors.hpp"

namespace aiid::conic {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::unbounded: return "unbounded";
    case SolveStatus::numerical_failure: return "numerical-failure";
  }
  return "unknown";
}

Eigen::MatrixXd hermitian_real_embedding(const Mat& h) {
  const double residual =
      (h - h.adjoint()).cwiseAbs().maxCoeff();
  if (residual > 1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("hermitian_real_embedding: input not Hermitian");
  const Eigen::Index d = h.rows();
  MatrixXd out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = h.real();
  out.bottomRightCorner(d, d) = h.real();
  out.topRightCorner(d, d) = -h.imag();
  out.bottomLeftCorner(d, d) = h.imag();
  return out;
}

namespace {

// Realified standard form: real symmetric blocks only, optional free part.
struct RealProblem {
  std::vector<int> sides;
  std::vector<std::vector<std::pair<int, MatrixXd>>> rows;  // (block, coeff)
  std::vector<std::vector<std::pair<int, int>>> touch;      // block -> (row, slot)
  std::vector<MatrixXd> C;
  VectorXd b;
  MatrixXd B;  // m x f
  VectorXd c;  // f
  int m() const { return static_cast<int>(rows.size()); }
  int f() const { return static_cast<int>(c.size()); }

  void rebuild_touch() {
    touch.assign(sides.size(), {});
    for (int k = 0; k < m(); ++k)
      for (int slot = 0; slot < static_cast<int>(rows[k].size()); ++slot)
        touch[rows[k][slot].first].push_back({k, slot});
  }
};

MatrixXd realify(const Mat& a, bool is_complex) {
  if (is_complex) return 0.5 * hermitian_real_embedding(hermitized(a));
  MatrixXd r = a.real();
  return 0.5 * (r + r.transpose());
}

double inner(const MatrixXd& a, const MatrixXd& b) {
  return (a.array() * b.array()).sum();
}

int svec_dim(int s) { return s * (s + 1) / 2; }

VectorXd svec(const MatrixXd& a) {
  const int s = static_cast<int>(a.rows());
  VectorXd v(svec_dim(s));
  const double rt2 = std::sqrt(2.0);
  int p = 0;
  for (int j = 0; j < s; ++j) {
    v[p++] = a(j, j);
    for (int i = j + 1; i < s; ++i) v[p++] = rt2 * a(i, j);
  }
  return v;
}

struct FilterOutcome {
  std::vector<int> kept;
  std::vector<int> dropped;
  bool inconsistent = false;
};

// Rank-reveals the stacked constraint rows and drops dependent ones,
// checking that their right-hand sides stay consistent.
FilterOutcome rank_filter(const RealProblem& p) {
  FilterOutcome out;
  const int m = p.m();
  int dof = p.f();
  std::vector<int> block_off(p.sides.size());
  for (std::size_t b = 0; b < p.sides.size(); ++b) {
    block_off[b] = dof;
    dof += svec_dim(p.sides[b]);
  }

  MatrixXd R = MatrixXd::Zero(dof, m);
  for (int k = 0; k < m; ++k) {
    if (p.B.cols() > 0) R.col(k).head(p.f()) = p.B.row(k).transpose();
    for (const auto& [blk, coeff] : p.rows[k])
      R.col(k).segment(block_off[blk], svec_dim(p.sides[blk])) = svec(coeff);
  }

  Eigen::ColPivHouseholderQR<MatrixXd> qr(R);
  qr.setThreshold(1e-10);
  const int rank = static_cast<int>(qr.rank());
  if (rank == m) {
    out.kept.resize(m);
    for (int k = 0; k < m; ++k) out.kept[k] = k;
    return out;
  }

  const auto& perm = qr.colsPermutation().indices();
  std::vector<char> is_kept(m, 0);
  for (int i = 0; i < rank; ++i) is_kept[perm[i]] = 1;
  for (int k = 0; k < m; ++k)
    (is_kept[k] ? out.kept : out.dropped).push_back(k);

  MatrixXd K(dof, rank);
  VectorXd bk(rank);
  for (int i = 0; i < rank; ++i) {
    K.col(i) = R.col(out.kept[i]);
    bk[i] = p.b[out.kept[i]];
  }
  Eigen::ColPivHouseholderQR<MatrixXd> qrk(K);
  for (int j : out.dropped) {
    const VectorXd alpha = qrk.solve(R.col(j));
    const double rhs_gap = std::abs(p.b[j] - alpha.dot(bk));
    if (rhs_gap > 1e-8 * (1.0 + std::abs(p.b[j]))) {
      out.inconsistent = true;
      return out;
    }
  }
  return out;
}

RealProblem select_rows(const RealProblem& p, const std::vector<int>& kept) {
  RealProblem q;
  q.sides = p.sides;
  q.C = p.C;
  q.c = p.c;
  q.b.resize(kept.size());
  if (p.B.cols() > 0) q.B.resize(kept.size(), p.B.cols());
  else q.B.resize(kept.size(), 0);
  q.rows.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    q.rows.push_back(p.rows[kept[i]]);
    q.b[i] = p.b[kept[i]];
    if (p.B.cols() > 0) q.B.row(i) = p.B.row(kept[i]);
  }
  q.rebuild_touch();
  return q;
}

struct Iterate {
  std::vector<MatrixXd> X, Z;
  VectorXd y, u;
};

struct Direction {
  std::vector<MatrixXd> dX, dZ;
  VectorXd dy, du;
};

// Largest alpha in (0, 1] with X + alpha D still positive definite.
double step_length(const MatrixXd& x, const MatrixXd& d, double tau) {
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> ges;
  MatrixXd xr = x;
  for (int attempt = 0; attempt < 3; ++attempt) {
    ges.compute(d, xr, Eigen::EigenvaluesOnly | Eigen::Ax_lBx);
    if (ges.info() == Eigen::Success) break;
    xr += (1e-12 * (1.0 + xr.trace())) * MatrixXd::Identity(x.rows(), x.cols());
  }
  if (ges.info() != Eigen::Success) return 1e-8;
  const double lmin = ges.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return 1.0;
  return std::min(1.0, -tau / lmin);
}

struct IpmScratch {
  std::vector<MatrixXd> W, Zinv, WRdW;
};

struct Residuals {
  VectorXd rp, rf;
  std::vector<MatrixXd> Rd;
  double pobj = 0, dobj = 0, pinf = 0, dinf = 0, finf = 0, relgap = 1;
};

Residuals compute_residuals(const RealProblem& p, const Iterate& it,
                            double normb, double normC, double normc) {
  Residuals r;
  const int m = p.m(), f = p.f();
  r.rp = p.b;
  for (int k = 0; k < m; ++k) {
    double ax = 0;
    for (const auto& [blk, coeff] : p.rows[k]) ax += inner(coeff, it.X[blk]);
    r.rp[k] -= ax;
  }
  if (f > 0) r.rp -= p.B * it.u;

  r.Rd.resize(p.sides.size());
  for (std::size_t b = 0; b < p.sides.size(); ++b) {
    r.Rd[b] = p.C[b] - it.Z[b];
    for (const auto& [k, slot] : p.touch[b])
      r.Rd[b] -= it.y[k] * p.rows[k][slot].second;
  }
  if (f > 0) r.rf = p.c - p.B.transpose() * it.y;

  r.pobj = 0;
  for (std::size_t b = 0; b < p.sides.size(); ++b)
    r.pobj += inner(p.C[b], it.X[b]);
  if (f > 0) r.pobj += p.c.dot(it.u);
  r.dobj = p.b.dot(it.y);

  double dinf2 = 0;
  for (const auto& rd : r.Rd) dinf2 += rd.squaredNorm();
  r.pinf = r.rp.norm() / (1.0 + normb);
  r.dinf = std::sqrt(dinf2) / (1.0 + normC);
  r.finf = (f > 0) ? r.rf.norm() / (1.0 + normc) : 0.0;
  r.relgap = std::abs(r.pobj - r.dobj) /
             (1.0 + std::max(std::abs(r.pobj), std::abs(r.dobj)));
  return r;
}

struct RealResult {
  SolveStatus status = SolveStatus::numerical_failure;
  Iterate it;
  double pobj = 0, dobj = 0, relgap = 1, feas = 1;
  int iterations = 0;
};

RealResult ipm(const RealProblem& p, double tol, int max_iter) {
  const int m = p.m(), f = p.f();
  const std::size_t nb = p.sides.size();
  const double normb = p.b.size() ? p.b.cwiseAbs().maxCoeff() : 0.0;
  double normC = 0.0;
  for (const auto& cb : p.C) normC = std::max(normC, cb.norm());
  const double normc = f > 0 ? p.c.cwiseAbs().maxCoeff() : 0.0;

  double total_dim = 0;
  for (int s : p.sides) total_dim += s;

  Iterate it;
  it.X.resize(nb);
  it.Z.resize(nb);
  it.y = VectorXd::Zero(m);
  it.u = VectorXd::Zero(f);
  for (std::size_t b = 0; b < nb; ++b) {
    double amax = 0.0;
    for (const auto& [k, slot] : p.touch[b])
      amax = std::max(amax, p.rows[k][slot].second.norm());
    const double xi = std::max({10.0, std::sqrt(double(p.sides[b])),
                                (1.0 + normb) / (1.0 + amax)});
    const double zeta = std::max({10.0, std::sqrt(double(p.sides[b])),
                                  p.C[b].norm(), amax});
    it.X[b] = xi * MatrixXd::Identity(p.sides[b], p.sides[b]);
    it.Z[b] = zeta * MatrixXd::Identity(p.sides[b], p.sides[b]);
  }

  RealResult best;
  best.it = it;
  double best_score = std::numeric_limits<double>::infinity();

  IpmScratch sc;
  sc.W.resize(nb);
  sc.Zinv.resize(nb);
  sc.WRdW.resize(nb);
  int stall = 0;

  for (int iter = 0; iter < max_iter; ++iter) {
    Residuals res = compute_residuals(p, it, normb, normC, normc);

    const double score =
        std::max({res.pinf, res.dinf, res.finf, res.relgap});
    if (score < best_score) {
      best_score = score;
      best.it = it;
      best.pobj = res.pobj;
      best.dobj = res.dobj;
      best.relgap = res.relgap;
      best.feas = std::max({res.pinf, res.finf, res.dinf});
      best.iterations = iter;
    }
    if (res.pinf <= tol && res.dinf <= tol && res.finf <= tol &&
        res.relgap <= tol) {
      best.status = SolveStatus::optimal;
      return best;
    }
    // Divergence heuristics; these problems are Slater-regular, so a wildly
    // growing dual objective signals primal infeasibility and vice versa.
    if (res.dobj > 1e13 && res.dinf <= 1e-6) {
      best.status = SolveStatus::infeasible;
      return best;
    }
    if (res.pobj < -1e13 && res.pinf <= 1e-6) {
      best.status = SolveStatus::unbounded;
      return best;
    }

    double mu = 0.0;
    for (std::size_t b = 0; b < nb; ++b) mu += inner(it.X[b], it.Z[b]);
    mu /= total_dim;

    // Nesterov-Todd scaling point per block: W Z W = X.
    bool scaling_ok = true;
    for (std::size_t b = 0; b < nb; ++b) {
      Eigen::SelfAdjointEigenSolver<MatrixXd> ez(it.Z[b]);
      if (ez.info() != Eigen::Success) { scaling_ok = false; break; }
      VectorXd sz = ez.eigenvalues();
      const double zfloor = std::max(1e-300, 1e-15 * sz.maxCoeff());
      for (int i = 0; i < sz.size(); ++i) sz[i] = std::max(sz[i], zfloor);
      const MatrixXd& Qz = ez.eigenvectors();
      MatrixXd zhalf = Qz * sz.cwiseSqrt().asDiagonal() * Qz.transpose();
      MatrixXd zinvhalf =
          Qz * sz.cwiseSqrt().cwiseInverse().asDiagonal() * Qz.transpose();
      sc.Zinv[b] = Qz * sz.cwiseInverse().asDiagonal() * Qz.transpose();

      MatrixXd T = zhalf * it.X[b] * zhalf;
      T = 0.5 * (T + T.transpose());
      Eigen::SelfAdjointEigenSolver<MatrixXd> et(T);
      if (et.info() != Eigen::Success) { scaling_ok = false; break; }
      VectorXd st = et.eigenvalues().cwiseMax(0.0);
      MatrixXd thalf = et.eigenvectors() * st.cwiseSqrt().asDiagonal() *
                       et.eigenvectors().transpose();
      sc.W[b] = zinvhalf * thalf * zinvhalf;
      sc.W[b] = 0.5 * (sc.W[b] + sc.W[b].transpose());
      sc.WRdW[b] = sc.W[b] * res.Rd[b] * sc.W[b];
    }
    if (!scaling_ok) break;

    // Schur complement M_kl = sum_b <A_k, W A_l W>.
    MatrixXd M = MatrixXd::Zero(m, m);
    std::vector<std::vector<MatrixXd>> WAW(nb);
    for (std::size_t b = 0; b < nb; ++b) {
      const auto& tb = p.touch[b];
      WAW[b].resize(tb.size());
      for (std::size_t i = 0; i < tb.size(); ++i) {
        const MatrixXd& A = p.rows[tb[i].first][tb[i].second].second;
        WAW[b][i] = sc.W[b] * A * sc.W[b];
      }
      for (std::size_t i = 0; i < tb.size(); ++i) {
        const int ki = tb[i].first;
        for (std::size_t j = 0; j <= i; ++j) {
          const int kj = tb[j].first;
          const double v =
              inner(p.rows[tb[j].first][tb[j].second].second, WAW[b][i]);
          M(ki, kj) += v;
          if (ki != kj) M(kj, ki) += v;
        }
      }
    }

    Eigen::LLT<MatrixXd> llt;
    double jitter = 0.0;
    for (int attempt = 0; attempt < 4; ++attempt) {
      llt.compute(M + jitter * MatrixXd::Identity(m, m));
      if (llt.info() == Eigen::Success) break;
      jitter = (jitter == 0.0) ? 1e-12 * (1.0 + M.trace() / m) : jitter * 100;
    }
    if (llt.info() != Eigen::Success) break;

    MatrixXd G;
    Eigen::LDLT<MatrixXd> ldlt_s;
    if (f > 0) {
      G = llt.matrixL().solve(p.B);
      MatrixXd S = G.transpose() * G;
      ldlt_s.compute(S);
      if (ldlt_s.info() != Eigen::Success) break;
    }

    auto solve_direction = [&](const std::vector<MatrixXd>& Rc) {
      Direction d;
      VectorXd h = res.rp;
      for (int k = 0; k < m; ++k) {
        double acc = 0.0;
        for (const auto& [blk, coeff] : p.rows[k])
          acc += inner(coeff, Rc[blk] - sc.WRdW[blk]);
        h[k] -= acc;
      }
      if (f > 0) {
        const VectorXd t1 = llt.matrixL().solve(h);
        d.du = ldlt_s.solve(G.transpose() * t1 - res.rf);
        d.dy = llt.solve(h - p.B * d.du);
      } else {
        d.dy = llt.solve(h);
        d.du = VectorXd::Zero(0);
      }
      d.dZ.resize(nb);
      d.dX.resize(nb);
      for (std::size_t b = 0; b < nb; ++b) {
        d.dZ[b] = res.Rd[b];
        for (const auto& [k, slot] : p.touch[b])
          d.dZ[b] -= d.dy[k] * p.rows[k][slot].second;
        MatrixXd dx = Rc[b] - sc.W[b] * d.dZ[b] * sc.W[b];
        d.dX[b] = 0.5 * (dx + dx.transpose());
      }
      return d;
    };

    // Predictor (affine scaling) step fixes the centering parameter.
    std::vector<MatrixXd> Rc(nb);
    for (std::size_t b = 0; b < nb; ++b) Rc[b] = -it.X[b];
    Direction aff = solve_direction(Rc);
    double ap = 1.0, ad = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      ap = std::min(ap, step_length(it.X[b], aff.dX[b], 1.0));
      ad = std::min(ad, step_length(it.Z[b], aff.dZ[b], 1.0));
    }
    double mu_aff = 0.0;
    for (std::size_t b = 0; b < nb; ++b)
      mu_aff += inner(it.X[b] + ap * aff.dX[b], it.Z[b] + ad * aff.dZ[b]);
    mu_aff = std::max(0.0, mu_aff / total_dim);
    double sigma = std::pow(mu_aff / mu, 3.0);
    sigma = std::clamp(sigma, 1e-8, 1.0);

    for (std::size_t b = 0; b < nb; ++b)
      Rc[b] = sigma * mu * sc.Zinv[b] - it.X[b];
    Direction dir = solve_direction(Rc);

    double alpha_p = 1.0, alpha_d = 1.0;
    for (std::size_t b = 0; b < nb; ++b) {
      alpha_p = std::min(alpha_p, step_length(it.X[b], dir.dX[b], 0.98));
      alpha_d = std::min(alpha_d, step_length(it.Z[b], dir.dZ[b], 0.98));
    }

    if (alpha_p < 1e-8 && alpha_d < 1e-8) {
      if (++stall >= 3) break;
    } else {
      stall = 0;
    }

    for (std::size_t b = 0; b < nb; ++b) {
      it.X[b] += alpha_p * dir.dX[b];
      it.Z[b] += alpha_d * dir.dZ[b];
      it.X[b] = 0.5 * (it.X[b] + it.X[b].transpose());
      it.Z[b] = 0.5 * (it.Z[b] + it.Z[b].transpose());
    }
    it.y += alpha_d * dir.dy;
    if (f > 0) it.u += alpha_p * dir.du;
    best.iterations = iter + 1;
  }

  // Loop exhausted or stalled: classify from the best iterate seen.
  best.status = (best_score <= tol) ? SolveStatus::optimal
                                    : SolveStatus::numerical_failure;
  return best;
}

Mat extract_block(const MatrixXd& y, bool is_complex) {
  if (!is_complex) {
    MatrixXd s = 0.5 * (y + y.transpose());
    return s.cast<Cd>();
  }
  const Eigen::Index d = y.rows() / 2;
  const MatrixXd a =
      0.5 * (y.topLeftCorner(d, d) + y.bottomRightCorner(d, d));
  const MatrixXd bm =
      0.5 * (y.topRightCorner(d, d).transpose() - y.topRightCorner(d, d));
  Mat x(d, d);
  x.real() = 0.5 * (a + a.transpose());
  x.imag() = 0.5 * (bm - bm.transpose());
  return x;
}

}  // namespace

SolverResult solve(const ConicProblem& p, double tol, int max_iter) {
  if (p.blocks.empty()) throw std::invalid_argument("solve: no blocks");
  if (p.constraints.empty()) throw std::invalid_argument("solve: no constraints");
  if (tol <= 0) throw std::invalid_argument("solve: tol must be positive");

  RealProblem rp;
  rp.sides.reserve(p.blocks.size());
  for (const auto& blk : p.blocks)
    rp.sides.push_back(blk.is_complex ? 2 * blk.side : blk.side);
  rp.C.resize(p.blocks.size());
  for (std::size_t b = 0; b < p.blocks.size(); ++b) {
    if (b < p.objective.size() && p.objective[b].size() > 0) {
      if (p.objective[b].rows() != p.blocks[b].side)
        throw std::invalid_argument("solve: objective side mismatch");
      rp.C[b] = realify(p.objective[b], p.blocks[b].is_complex);
    } else {
      rp.C[b] = MatrixXd::Zero(rp.sides[b], rp.sides[b]);
    }
  }
  rp.c = p.free_objective.size() ? p.free_objective : VectorXd::Zero(p.n_free);
  if (rp.c.size() != p.n_free)
    throw std::invalid_argument("solve: free objective size mismatch");

  const int m = static_cast<int>(p.constraints.size());
  rp.b.resize(m);
  rp.B = MatrixXd::Zero(m, p.n_free);
  rp.rows.resize(m);
  for (int k = 0; k < m; ++k) {
    const auto& row = p.constraints[k];
    rp.b[k] = row.rhs;
    if (row.free_coeff.size() > 0) {
      if (row.free_coeff.size() != p.n_free)
        throw std::invalid_argument("solve: free coefficient size mismatch");
      rp.B.row(k) = row.free_coeff.transpose();
    }
    for (const auto& [blk, coeff] : row.coeff) {
      if (blk < 0 || blk >= static_cast<int>(p.blocks.size()))
        throw std::invalid_argument("solve: constraint touches unknown block");
      if (coeff.rows() != p.blocks[blk].side)
        throw std::invalid_argument("solve: constraint side mismatch");
      rp.rows[k].push_back({blk, realify(coeff, p.blocks[blk].is_complex)});
    }
  }
  rp.rebuild_touch();

  std::vector<int> kept(m);
  for (int k = 0; k < m; ++k) kept[k] = k;
  std::vector<int> dropped;
  RealProblem* active = &rp;
  RealProblem filtered;

  auto apply_filter = [&]() -> bool {
    FilterOutcome fo = rank_filter(rp);
    if (fo.inconsistent) return false;
    if (!fo.dropped.empty()) {
      std::cerr << "aiid::conic: dropping " << fo.dropped.size()
                << " linearly dependent constraint row(s)\n";
      filtered = select_rows(rp, fo.kept);
      kept = fo.kept;
      dropped = fo.dropped;
      active = &filtered;
    }
    return true;
  };

  SolverResult out;
  out.dual_y = VectorXd::Zero(m);
  out.dropped_rows.clear();

  // Cheap problems get the rank safety net up front; large ones only when
  // the Schur factorization actually degenerates.
  if (m <= 512) {
    if (!apply_filter()) {
      out.status = SolveStatus::infeasible;
      return out;
    }
  }

  RealResult rr = ipm(*active, tol, max_iter);
  if (rr.status == SolveStatus::numerical_failure && dropped.empty() && m > 512) {
    if (!apply_filter()) {
      out.status = SolveStatus::infeasible;
      return out;
    }
    if (active == &filtered) rr = ipm(*active, tol, max_iter);
  }

  out.status = rr.status;
  out.primal_value = rr.pobj;
  out.dual_value = rr.dobj;
  out.gap = std::abs(rr.pobj - rr.dobj) / std::max(1.0, std::abs(rr.pobj));
  out.feasibility_residual = rr.feas;
  out.iterations = rr.iterations;
  out.dropped_rows = dropped;
  out.block_solution.resize(p.blocks.size());
  for (std::size_t b = 0; b < p.blocks.size(); ++b)
    out.block_solution[b] = extract_block(rr.it.X[b], p.blocks[b].is_complex);
  out.free_solution = rr.it.u;
  for (std::size_t i = 0; i < kept.size(); ++i)
    out.dual_y[kept[i]] = rr.it.y[i];
  return out;
}

}  // namespace aiid::conic
