#include "aiid/w1.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>

#include "aiid/errors.hpp"
#include "aiid/rng.hpp"

namespace aiid {

namespace {

void require_same_shape(const DensityOperator& a, const DensityOperator& b,
                        const char* what) {
  if (a.site_dim != b.site_dim || a.n_sites != b.n_sites) {
    std::ostringstream os;
    os << what << ": operators live on different site structures";
    throw std::invalid_argument(os.str());
  }
}

Mat lift_site(const Mat& g, int site, int d, int n) {
  SiteOperator rest{d, n - 1, g};
  return lift_omitting_site(rest, site).mat;
}

Mat positive_part(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(x));
  const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
  return es.eigenvectors() * ev.asDiagonal() *
         es.eigenvectors().adjoint();
}

}  // namespace

double trace_distance(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_shape(rho, sigma, "trace_distance");
  return 0.5 * trace_norm(rho.mat - sigma.mat);
}

double helstrom_success(const DensityOperator& rho, const DensityOperator& sigma) {
  return 0.5 * (1.0 + trace_distance(rho, sigma));
}

std::vector<Mat> traceless_hermitian_basis(int side) {
  std::vector<Mat> out;
  for (int k = 1; k < side; ++k) {
    Mat m = Mat::Zero(side, side);
    const double norm = std::sqrt(double(k) * (k + 1));
    for (int i = 0; i < k; ++i) m(i, i) = 1.0 / norm;
    m(k, k) = -double(k) / norm;
    out.push_back(std::move(m));
  }
  const double rt2inv = 1.0 / std::sqrt(2.0);
  for (int k = 0; k < side; ++k)
    for (int l = k + 1; l < side; ++l) {
      Mat sym = Mat::Zero(side, side);
      sym(k, l) = rt2inv;
      sym(l, k) = rt2inv;
      out.push_back(std::move(sym));
      Mat asym = Mat::Zero(side, side);
      asym(k, l) = Cd(0.0, -rt2inv);
      asym(l, k) = Cd(0.0, rt2inv);
      out.push_back(std::move(asym));
    }
  return out;
}

std::vector<Mat> full_hermitian_basis(int side) {
  std::vector<Mat> out;
  out.push_back(Mat::Identity(side, side) / std::sqrt(double(side)));
  std::vector<Mat> rest = traceless_hermitian_basis(side);
  for (auto& m : rest) out.push_back(std::move(m));
  return out;
}

W1Certificate w1_primal(const DensityOperator& rho, const DensityOperator& sigma,
                        double tol) {
  require_same_shape(rho, sigma, "w1_primal");
  const int n = rho.n_sites;
  const int d = rho.site_dim;
  const Eigen::Index D = rho.dim();
  const Eigen::Index Dc = D / d;
  const Mat delta = rho.mat - sigma.mat;

  conic::ConicProblem p;
  p.blocks.assign(2 * n, conic::Block{static_cast<int>(D), true});
  p.objective.assign(2 * n, 0.5 * Mat::Identity(D, D));

  // sum_i (P_i - Q_i) = delta over the traceless component; the trace
  // component is implied by the per-site partial trace rows.
  for (const Mat& f : traceless_hermitian_basis(static_cast<int>(D))) {
    conic::ConstraintRow row;
    for (int i = 0; i < n; ++i) {
      row.coeff[2 * i] = f;
      row.coeff[2 * i + 1] = -f;
    }
    row.rhs = (f * delta).trace().real();
    p.constraints.push_back(std::move(row));
  }
  for (int site = 1; site <= n; ++site) {
    for (const Mat& g : full_hermitian_basis(static_cast<int>(Dc))) {
      conic::ConstraintRow row;
      const Mat lifted = lift_site(g, site, d, n);
      row.coeff[2 * (site - 1)] = lifted;
      row.coeff[2 * (site - 1) + 1] = -lifted;
      row.rhs = 0.0;
      p.constraints.push_back(std::move(row));
    }
  }

  const conic::SolverResult res = conic::solve(p, tol);
  if (res.status != conic::SolveStatus::optimal)
    throw SolverError("w1_primal: conic solve " + conic::to_string(res.status));

  W1Certificate cert;
  cert.site_dim = d;
  cert.n_sites = n;
  cert.value = res.primal_value;
  cert.solver_gap = res.gap;
  cert.iterations = res.iterations;
  Mat sum = Mat::Zero(D, D);
  for (int i = 0; i < n; ++i) {
    Mat x = res.block_solution[2 * i] - res.block_solution[2 * i + 1];
    x = hermitized(x);
    sum += x;
    cert.weights.push_back(0.5 * trace_norm(x));
    cert.site_terms.push_back(std::move(x));
  }
  double resid = (sum - delta).cwiseAbs().maxCoeff();
  for (int site = 1; site <= n; ++site) {
    SiteOperator xi{d, n, cert.site_terms[site - 1]};
    if (n == 1) {
      resid = std::max(resid, std::abs(xi.mat.trace().real()));
    } else {
      const SiteOperator red =
          partial_trace(xi, SiteSubset::make(n, {site}).complement());
      resid = std::max(resid, red.mat.cwiseAbs().maxCoeff());
    }
  }
  cert.max_constraint_residual = resid;
  return cert;
}

DensityOperator W1Certificate::tau(int site) const {
  const Eigen::Index D = site_terms[site - 1].rows();
  if (weights[site - 1] <= 1e-9)
    return DensityOperator::trusted(site_dim, n_sites,
                                    Mat::Identity(D, D) / double(D));
  return DensityOperator::trusted(
      site_dim, n_sites, positive_part(site_terms[site - 1]) / weights[site - 1]);
}

DensityOperator W1Certificate::eta(int site) const {
  const Eigen::Index D = site_terms[site - 1].rows();
  if (weights[site - 1] <= 1e-9)
    return DensityOperator::trusted(site_dim, n_sites,
                                    Mat::Identity(D, D) / double(D));
  return DensityOperator::trusted(
      site_dim, n_sites,
      positive_part(-site_terms[site - 1]) / weights[site - 1]);
}

LipschitzWitness w1_dual(const DensityOperator& rho, const DensityOperator& sigma,
                         double tol) {
  require_same_shape(rho, sigma, "w1_dual");
  const int n = rho.n_sites;
  const int d = rho.site_dim;
  const int D = static_cast<int>(rho.dim());
  const int Dc = D / d;
  const Mat delta = rho.mat - sigma.mat;

  const std::vector<Mat> h_basis = traceless_hermitian_basis(D);
  const std::vector<Mat> e_basis = full_hermitian_basis(D);
  const std::vector<Mat> m_basis = full_hermitian_basis(Dc);
  const int nh = static_cast<int>(h_basis.size());
  const int nm = static_cast<int>(m_basis.size());

  conic::ConicProblem p;
  p.blocks.assign(2 * n, conic::Block{D, true});
  p.objective.assign(2 * n, Mat());
  p.n_free = nh + n * nm;
  p.free_objective = Eigen::VectorXd::Zero(p.n_free);
  for (int a = 0; a < nh; ++a)
    p.free_objective[a] = -(h_basis[a] * delta).trace().real();

  // Per site: inner products of the constraint basis with lifted M basis.
  std::vector<std::vector<Mat>> lifted(n);
  for (int site = 1; site <= n; ++site) {
    lifted[site - 1].reserve(nm);
    for (const Mat& g : m_basis)
      lifted[site - 1].push_back(lift_site(g, site, d, n));
  }

  for (int site = 1; site <= n; ++site) {
    for (int sgn = 0; sgn < 2; ++sgn) {
      const double s = (sgn == 0) ? 1.0 : -1.0;
      const int block = 2 * (site - 1) + sgn;
      for (int b = 0; b < D * D; ++b) {
        conic::ConstraintRow row;
        row.coeff[block] = e_basis[b];
        row.free_coeff = Eigen::VectorXd::Zero(p.n_free);
        if (b >= 1) row.free_coeff[b - 1] = s;
        for (int c = 0; c < nm; ++c)
          row.free_coeff[nh + (site - 1) * nm + c] =
              -s * (e_basis[b] * lifted[site - 1][c]).trace().real();
        row.rhs = (b == 0) ? 0.5 * std::sqrt(double(D)) : 0.0;
        p.constraints.push_back(std::move(row));
      }
    }
  }

  const conic::SolverResult res = conic::solve(p, tol);
  if (res.status != conic::SolveStatus::optimal)
    throw SolverError("w1_dual: conic solve " + conic::to_string(res.status));

  Mat h = Mat::Zero(D, D);
  for (int a = 0; a < nh; ++a) h += res.free_solution[a] * h_basis[a];
  std::vector<Mat> ms(n);
  for (int site = 1; site <= n; ++site) {
    ms[site - 1] = Mat::Zero(Dc, Dc);
    for (int c = 0; c < nm; ++c)
      ms[site - 1] +=
          res.free_solution[nh + (site - 1) * nm + c] * m_basis[c];
  }
  LipschitzWitness w = make_witness(rho, sigma, h, ms);
  w.solver_gap = res.gap;
  w.iterations = res.iterations;
  return w;
}

LipschitzWitness make_witness(const DensityOperator& rho,
                              const DensityOperator& sigma, const Mat& observable,
                              const std::vector<Mat>& compressions) {
  require_same_shape(rho, sigma, "make_witness");
  const int n = rho.n_sites;
  const int d = rho.site_dim;
  if (static_cast<int>(compressions.size()) != n)
    throw std::invalid_argument("make_witness: one compression per site required");
  LipschitzWitness w;
  w.site_dim = d;
  w.n_sites = n;
  w.observable = hermitized(observable);
  w.compressions = compressions;
  w.value = (w.observable * (rho.mat - sigma.mat)).trace().real();
  for (int site = 1; site <= n; ++site) {
    const Mat lifted = lift_site(hermitized(compressions[site - 1]), site, d, n);
    w.max_site_norm =
        std::max(w.max_site_norm, operator_norm(w.observable - lifted));
  }
  return w;
}

LipschitzConstant lipschitz_constant(const HermitianObservable& x, double tol) {
  const int n = x.n_sites;
  const int d = x.site_dim;
  const int D = static_cast<int>(x.dim());
  const int Dc = D / d;
  const std::vector<Mat> e_basis = full_hermitian_basis(D);
  const std::vector<Mat> m_basis = full_hermitian_basis(Dc);
  const int nm = static_cast<int>(m_basis.size());

  LipschitzConstant out;
  for (int site = 1; site <= n; ++site) {
    conic::ConicProblem p;
    p.blocks.assign(2, conic::Block{D, true});
    p.objective.assign(2, Mat());
    p.n_free = 1 + nm;
    p.free_objective = Eigen::VectorXd::Zero(p.n_free);
    p.free_objective[0] = 1.0;  // minimize t

    std::vector<Mat> lifted;
    lifted.reserve(nm);
    for (const Mat& g : m_basis) lifted.push_back(lift_site(g, site, d, n));

    for (int sgn = 0; sgn < 2; ++sgn) {
      const double s = (sgn == 0) ? 1.0 : -1.0;
      for (int b = 0; b < D * D; ++b) {
        conic::ConstraintRow row;
        row.coeff[sgn] = e_basis[b];
        row.free_coeff = Eigen::VectorXd::Zero(p.n_free);
        row.free_coeff[0] = -((b == 0) ? std::sqrt(double(D)) : 0.0);
        for (int c = 0; c < nm; ++c)
          row.free_coeff[1 + c] =
              -s * (e_basis[b] * lifted[c]).trace().real();
        row.rhs = -s * (e_basis[b] * x.mat).trace().real();
        p.constraints.push_back(std::move(row));
      }
    }
    const conic::SolverResult res = conic::solve(p, tol);
    if (res.status != conic::SolveStatus::optimal)
      throw SolverError("lipschitz_constant: conic solve " +
                        conic::to_string(res.status));
    out.per_site.push_back(2.0 * res.primal_value);
  }
  out.value = 0.0;
  for (double v : out.per_site) out.value = std::max(out.value, v);
  return out;
}

double lv_norm(const DensityOperator& rho, const DensityOperator& sigma) {
  require_same_shape(rho, sigma, "lv_norm");
  const int n = rho.n_sites;
  if (n > 12) throw GuardError("lv_norm: exact mode limited to n <= 12");
  const SiteOperator diff{rho.site_dim, n, rho.mat - sigma.mat};
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double avg = subset_average(n, k, [&](const SiteSubset& I) {
      if (k == n) return trace_norm(diff);
      return trace_norm(partial_trace(diff, I));
    });
    acc += std::ldexp(avg, -k);  // 2^{-k} avg
  }
  return 0.5 * acc;
}

LvEstimate lv_norm_sampled(const DensityOperator& rho,
                           const DensityOperator& sigma, int samples,
                           std::uint64_t seed) {
  require_same_shape(rho, sigma, "lv_norm_sampled");
  if (samples < 1) throw std::invalid_argument("lv_norm_sampled: samples < 1");
  const int n = rho.n_sites;
  const SiteOperator diff{rho.site_dim, n, rho.mat - sigma.mat};
  Rng rng = Rng::derive(seed, "lv-norm-sampled");

  LvEstimate est;
  double var_acc = 0.0;
  std::vector<int> pool(n);
  for (int k = 1; k <= n; ++k) {
    double sum = 0.0, sumsq = 0.0;
    for (int s = 0; s < samples; ++s) {
      for (int i = 0; i < n; ++i) pool[i] = i + 1;
      for (int i = 0; i < k; ++i) {
        const int j = i + static_cast<int>(rng.uniform_index(n - i));
        std::swap(pool[i], pool[j]);
      }
      std::vector<int> idx(pool.begin(), pool.begin() + k);
      std::sort(idx.begin(), idx.end());
      const double v =
          (k == n) ? trace_norm(diff)
                   : trace_norm(partial_trace(diff, SiteSubset::make(n, idx)));
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / samples;
    est.value += std::ldexp(mean, -k);
    if (samples > 1) {
      const double var =
          std::max(0.0, (sumsq - samples * mean * mean) / (samples - 1));
      var_acc += std::ldexp(var / samples, -2 * k);
    }
  }
  est.value *= 0.5;
  est.stderr_ = 0.5 * std::sqrt(var_acc);
  return est;
}

double marton_bound(const DensityOperator& rho,
                    const std::vector<DensityOperator>& omega_factors) {
  const int n = rho.n_sites;
  if (static_cast<int>(omega_factors.size()) != n)
    throw std::invalid_argument("marton_bound: omega must come as n single-site factors");
  DensityOperator omega = omega_factors[0];
  if (omega.n_sites != 1 || omega.site_dim != rho.site_dim)
    throw std::invalid_argument("marton_bound: factors must be single-site");
  for (int i = 1; i < n; ++i) {
    if (omega_factors[i].n_sites != 1)
      throw std::invalid_argument("marton_bound: factors must be single-site");
    omega = tensor_product(omega, omega_factors[i]);
  }
  const double rel = relative_entropy(rho, omega);
  return std::sqrt(0.5 * n * rel);
}

double entropy_continuity_bound(double w, int n, int d) {
  if (n < 1 || d < 2)
    throw std::invalid_argument("entropy_continuity_bound: bad n or d");
  if (w < 0.0 || w > 1.0)
    throw std::invalid_argument("entropy_continuity_bound: w outside [0,1]");
  return binary_entropy(w) + w * std::log(double(d) * d - 1.0);
}

double pure_product_bound(const DensityOperator& rho,
                          const std::vector<DensityOperator>& pure_factors) {
  const int n = rho.n_sites;
  const int d = rho.site_dim;
  if (static_cast<int>(pure_factors.size()) != n)
    throw std::invalid_argument("pure_product_bound: one pure factor per site");
  double p = 0.0;
  for (int site = 1; site <= n; ++site) {
    const DensityOperator& phi = pure_factors[site - 1];
    if (phi.n_sites != 1 || phi.site_dim != d)
      throw std::invalid_argument("pure_product_bound: factors must be single-site");
    const double purity = (phi.mat * phi.mat).trace().real();
    if (std::abs(purity - 1.0) > 1e-9)
      throw std::invalid_argument("pure_product_bound: factor is not pure");
    const DensityOperator margin = single_site_marginal(rho, site);
    p += 1.0 - (margin.mat * phi.mat).trace().real();
  }
  p = std::min(1.0, std::max(0.0, p / n));
  return std::sqrt(0.5 * (binary_entropy(p) + p * std::log(double(d - 1)))) + p;
}

double msr_epsilon(int n, int r, int d) {
  if (r < 0 || r > n) throw std::invalid_argument("msr_epsilon: need 0 <= r <= n");
  if (d < 2) throw std::invalid_argument("msr_epsilon: need d >= 2");
  const double x = static_cast<double>(r) / n;
  return std::sqrt(0.5 * (binary_entropy(x) + x * std::log(double(d - 1)))) + x;
}

}  // namespace aiid
