#include "aiid/states.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>

#include "aiid/errors.hpp"

namespace aiid {

DensityOperator iid_state(const DensityOperator& rho, int n) {
  if (n < 1) throw std::invalid_argument("iid_state: n must be >= 1");
  checked_power(rho.site_dim, rho.n_sites * n, 4096);
  DensityOperator out = rho;
  for (int i = 1; i < n; ++i) out = tensor_product(out, rho);
  return out;
}

DensityOperator maximally_mixed(int d, int n) {
  const int dim = checked_power(d, n, 4096);
  return DensityOperator::trusted(d, n, Mat::Identity(dim, dim) / double(dim));
}

DensityOperator no_defect(int d) {
  return DensityOperator::trusted(d, 0, Mat::Ones(1, 1));
}

DensityOperator defect_state(const DensityOperator& rho,
                             const DensityOperator& omega_k, int n) {
  const int k = omega_k.n_sites;
  if (k == 0) return iid_state(rho, n);
  if (rho.site_dim != omega_k.site_dim)
    throw std::invalid_argument("defect_state: site_dim mismatch");
  if (rho.n_sites != 1)
    throw std::invalid_argument("defect_state: reference must be single-site");
  if (k > n) throw std::invalid_argument("defect_state: more defects than sites");
  checked_power(rho.site_dim, n, 4096);

  double placements = 1.0;
  for (int i = 0; i < k; ++i) placements *= (n - i);
  if (placements > 1e4)
    throw GuardError("defect_state: too many ordered placements");

  DensityOperator base = omega_k;
  if (k < n) {
    DensityOperator ref = rho;
    for (int i = 1; i < n - k; ++i) ref = tensor_product(ref, rho);
    base = tensor_product(ref, omega_k);
  }

  // Ordered injective tuples (p_1, ..., p_k): defect slot j lands on p_j,
  // reference sites fill the remaining positions in increasing order.
  Mat acc = Mat::Zero(base.dim(), base.dim());
  long long count = 0;
  std::vector<int> current;
  std::function<void(int)> rec = [&](int depth) {
    if (depth == k) {
      std::vector<int> image(n, 0);
      std::vector<bool> used(n + 1, false);
      for (int j = 0; j < k; ++j) {
        image[n - k + j] = current[j];
        used[current[j]] = true;
      }
      int pos = 1;
      for (int site = 1; site <= n - k; ++site) {
        while (used[pos]) ++pos;
        image[site - 1] = pos;
        used[pos] = true;
      }
      acc += permute_sites(base, Permutation::make(n, image)).mat;
      ++count;
      return;
    }
    for (int p = 1; p <= n; ++p) {
      if (std::find(current.begin(), current.end(), p) != current.end()) continue;
      current.push_back(p);
      rec(depth + 1);
      current.pop_back();
    }
  };
  rec(0);
  acc /= static_cast<double>(count);
  return DensityOperator::trusted(rho.site_dim, n, std::move(acc));
}

SpanProjector v_span_projector(const Vec& psi, int n, int r) {
  const int d = static_cast<int>(psi.size());
  if (d < 2) throw std::invalid_argument("v_span_projector: bad reference dimension");
  if (std::abs(psi.norm() - 1.0) > 1e-10)
    throw std::invalid_argument("v_span_projector: reference not normalized");
  if (r < 0 || r > n) throw std::invalid_argument("v_span_projector: r out of range");
  const int dim = checked_power(d, n, 4096);

  double gen_count = binomial(n, r);
  for (int i = 0; i < r; ++i) gen_count *= d;
  if (gen_count > 20000)
    throw GuardError("v_span_projector: generator count exceeds guard");

  Mat gens(dim, static_cast<Eigen::Index>(gen_count));
  Eigen::Index col = 0;

  std::vector<int> subset;  // defect positions, 1-based increasing
  std::function<void(int)> pick = [&](int from) {
    if (static_cast<int>(subset.size()) == r) {
      // all defect-basis assignments for this position subset
      std::vector<int> digits(r, 0);
      while (true) {
        Vec v = Vec::Ones(1);
        int slot = 0;
        for (int site = 1; site <= n; ++site) {
          Vec factor;
          if (slot < r && subset[slot] == site) {
            factor = Vec::Zero(d);
            factor[digits[slot]] = 1.0;
            ++slot;
          } else {
            factor = psi;
          }
          Vec next(v.size() * d);
          for (Eigen::Index a = 0; a < v.size(); ++a)
            next.segment(a * d, d) = v[a] * factor;
          v = std::move(next);
        }
        gens.col(col++) = v;
        int j = r - 1;
        while (j >= 0 && digits[j] == d - 1) { digits[j] = 0; --j; }
        if (j < 0) break;
        ++digits[j];
      }
      return;
    }
    for (int p = from; p <= n; ++p) {
      subset.push_back(p);
      pick(p + 1);
      subset.pop_back();
    }
  };
  if (r == 0) {
    Vec v = Vec::Ones(1);
    for (int site = 1; site <= n; ++site) {
      Vec next(v.size() * d);
      for (Eigen::Index a = 0; a < v.size(); ++a)
        next.segment(a * d, d) = v[a] * psi;
      v = std::move(next);
    }
    gens.col(col++) = v;
  } else {
    pick(1);
  }

  Eigen::JacobiSVD<Mat> svd(gens, Eigen::ComputeThinU);
  const auto& sv = svd.singularValues();
  const double cut = 1e-9 * std::max(1.0, sv.size() ? sv[0] : 0.0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;

  SpanProjector out;
  out.n = n;
  out.r = r;
  out.site_dim = d;
  out.reference = psi;
  const Mat u = svd.matrixU().leftCols(rank);
  out.projector = u * u.adjoint();
  out.rank = rank;
  return out;
}

TailWeight TailWeight::hard_cutoff(int r0) { return {Kind::hard_cutoff, r0, 0.0}; }
TailWeight TailWeight::indicator(int r0) { return {Kind::indicator, r0, 0.0}; }
TailWeight TailWeight::linear() { return {Kind::linear, 0, 0.0}; }
TailWeight TailWeight::exponential(double lambda) {
  return {Kind::exponential, 0, lambda};
}

double TailWeight::value(int r, int n) const {
  switch (kind) {
    case Kind::hard_cutoff:
      return r > r0 ? std::numeric_limits<double>::infinity() : 0.0;
    case Kind::indicator:
      return r > r0 ? 1.0 : 0.0;
    case Kind::linear:
      return static_cast<double>(r) / n;
    case Kind::exponential:
      return std::exp(lambda * r);
  }
  return 0.0;
}

double tail_functional(const DensityOperator& rho_ext, const Vec& psi,
                       const TailWeight& f) {
  const int n = rho_ext.n_sites;
  if (static_cast<int>(psi.size()) != rho_ext.site_dim)
    throw std::invalid_argument("tail_functional: reference dimension mismatch");

  Mat prev = v_span_projector(psi, n, 0).projector;
  double acc = 0.0;
  for (int r = 1; r <= n; ++r) {
    const Mat cur = v_span_projector(psi, n, r).projector;
    double w = ((cur - prev) * rho_ext.mat).trace().real();
    prev = cur;
    if (w < 1e-10) continue;  // 0 * inf = 0 convention
    const double fr = f.value(r, n);
    if (std::isinf(fr)) return std::numeric_limits<double>::infinity();
    acc += fr * w;
  }
  return acc;
}

GentleCheck gentle_projection_check(const DensityOperator& rho, const Mat& proj,
                                    double eta) {
  if (proj.rows() != rho.dim())
    throw std::invalid_argument("gentle_projection_check: shape mismatch");
  GentleCheck out;
  out.overlap = (proj * rho.mat).trace().real();
  if (out.overlap < 1.0 - eta - 1e-9)
    throw std::invalid_argument(
        "gentle_projection_check: Tr[P rho] < 1 - eta precondition violated");
  out.lhs = 0.5 * trace_norm(rho.mat - proj * rho.mat * proj);
  out.rhs = std::sqrt(std::max(0.0, eta));
  out.pass = out.lhs <= out.rhs + 1e-9;
  return out;
}

namespace {

Mat pauli(char c) {
  Mat m(2, 2);
  switch (c) {
    case 'I': m << 1, 0, 0, 1; break;
    case 'X': m << 0, 1, 1, 0; break;
    case 'Z': m << 1, 0, 0, -1; break;
    case 'Y':
      m << Cd(0, 0), Cd(0, -1), Cd(0, 1), Cd(0, 0);
      break;
    default: throw std::logic_error("pauli: unknown label");
  }
  return m;
}

Mat pauli_string(const std::string& word) {
  Mat acc = Mat::Ones(1, 1);
  for (char c : word) {
    const Mat p = pauli(c);
    Mat next(acc.rows() * 2, acc.cols() * 2);
    for (Eigen::Index i = 0; i < acc.rows(); ++i)
      for (Eigen::Index j = 0; j < acc.cols(); ++j)
        next.block(i * 2, j * 2, 2, 2) = acc(i, j) * p;
    acc = std::move(next);
  }
  return acc;
}

}  // namespace

DensityOperator five_qubit_code_state() {
  const std::vector<std::string> generators = {"XZZXI", "IXZZX", "XIXZZ",
                                               "ZXIXZ"};
  const Eigen::Index dim = 32;
  Mat proj = Mat::Identity(dim, dim);
  for (const auto& g : generators)
    proj = proj * 0.5 * (Mat::Identity(dim, dim) + pauli_string(g));

  Vec seed = Vec::Zero(dim);
  seed[0] = 1.0;
  Vec v = proj * seed;
  v /= v.norm();
  DensityOperator psi = DensityOperator::trusted(2, 5, v * v.adjoint());

  // Construction gate: every small marginal must be exactly mixed.
  for (int k = 1; k <= 2; ++k) {
    for_each_subset(5, k, [&](const SiteSubset& I) {
      const DensityOperator red = partial_trace(psi, I);
      const double dev = (red.mat - Mat::Identity(red.dim(), red.dim()) /
                                        double(red.dim()))
                             .cwiseAbs()
                             .maxCoeff();
      if (dev > 1e-9)
        throw std::logic_error("five_qubit_code_state: marginal check failed");
    });
  }
  return psi;
}

DensityOperator random_density(Rng& rng, int d, int n) {
  const int dim = checked_power(d, n, 4096);
  Mat g(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = 0; j < dim; ++j) g(i, j) = rng.complex_gaussian();
  Mat rho = g * g.adjoint();
  rho /= rho.trace().real();
  return DensityOperator::trusted(d, n, std::move(rho));
}

DensityOperator random_pure(Rng& rng, int d, int n) {
  const int dim = checked_power(d, n, 4096);
  const Vec v = random_pure_vector(rng, dim);
  return DensityOperator::trusted(d, n, v * v.adjoint());
}

DensityOperator random_diagonal_density(Rng& rng, int d, int n) {
  const int dim = checked_power(d, n, 4096);
  Eigen::VectorXd w(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double x = rng.gaussian();
    w[i] = x * x;
  }
  w /= w.sum();
  Mat m = Mat::Zero(dim, dim);
  for (Eigen::Index i = 0; i < dim; ++i) m(i, i) = w[i];
  return DensityOperator::trusted(d, n, std::move(m));
}

Vec random_pure_vector(Rng& rng, int dim) {
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = rng.complex_gaussian();
  v /= v.norm();
  return v;
}

}  // namespace aiid
