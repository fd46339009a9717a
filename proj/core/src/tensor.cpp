#include "aiid/tensor.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "aiid/errors.hpp"

namespace aiid {

namespace {

double max_abs(const Mat& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

void require_hermitian(const Mat& m, const char* what) {
  const double residual = max_abs(m - m.adjoint());
  if (residual > kHermTol * std::max(1.0, max_abs(m))) {
    std::ostringstream os;
    os << what << ": matrix is not Hermitian (residual " << residual << ")";
    throw std::invalid_argument(os.str());
  }
}

Eigen::VectorXd hermitian_eigenvalues(const Mat& m) {
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(m),
                                        Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

// Stride of 1-based site i in a d^n-dimensional big-endian index.
Eigen::Index site_stride(int d, int n, int site) {
  Eigen::Index s = 1;
  for (int i = 0; i < n - site; ++i) s *= d;
  return s;
}

}  // namespace

int checked_power(int base, int exp, int limit) {
  long long v = 1;
  for (int i = 0; i < exp; ++i) {
    v *= base;
    if (v > limit) {
      std::ostringstream os;
      os << "dimension " << base << "^" << exp << " exceeds guard " << limit;
      throw GuardError(os.str());
    }
  }
  return static_cast<int>(v);
}

Mat hermitized(const Mat& m) { return 0.5 * (m + m.adjoint()); }

SiteSubset SiteSubset::make(int n, std::vector<int> indices) {
  if (n < 1) throw std::invalid_argument("SiteSubset: n must be >= 1");
  for (std::size_t i = 0; i < indices.size(); ++i) {
    if (indices[i] < 1 || indices[i] > n)
      throw std::invalid_argument("SiteSubset: index out of range");
    if (i > 0 && indices[i] <= indices[i - 1])
      throw std::invalid_argument("SiteSubset: indices must strictly increase");
  }
  return SiteSubset{n, std::move(indices)};
}

SiteSubset SiteSubset::complement() const {
  std::vector<int> rest;
  rest.reserve(n - indices.size());
  std::size_t j = 0;
  for (int i = 1; i <= n; ++i) {
    if (j < indices.size() && indices[j] == i) {
      ++j;
    } else {
      rest.push_back(i);
    }
  }
  return SiteSubset{n, std::move(rest)};
}

bool SiteSubset::contains(int site) const {
  return std::binary_search(indices.begin(), indices.end(), site);
}

Permutation Permutation::make(int n, std::vector<int> image) {
  if (static_cast<int>(image.size()) != n)
    throw std::invalid_argument("Permutation: image size mismatch");
  std::vector<bool> seen(n, false);
  for (int v : image) {
    if (v < 1 || v > n || seen[v - 1])
      throw std::invalid_argument("Permutation: image is not a bijection");
    seen[v - 1] = true;
  }
  return Permutation{n, std::move(image)};
}

Permutation Permutation::identity(int n) {
  std::vector<int> img(n);
  std::iota(img.begin(), img.end(), 1);
  return Permutation{n, std::move(img)};
}

Permutation Permutation::inverse() const {
  std::vector<int> inv(n);
  for (int i = 1; i <= n; ++i) inv[image[i - 1] - 1] = i;
  return Permutation{n, std::move(inv)};
}

HermitianObservable HermitianObservable::make(int site_dim, int n_sites, Mat m) {
  if (site_dim < 2) throw std::invalid_argument("site_dim must be >= 2");
  if (n_sites < 1) throw std::invalid_argument("n_sites must be >= 1");
  const int side = checked_power(site_dim, n_sites,
                                 std::numeric_limits<int>::max());
  if (m.rows() != side || m.cols() != side)
    throw std::invalid_argument("matrix side does not match site_dim^n_sites");
  require_hermitian(m, "HermitianObservable");
  HermitianObservable out;
  out.site_dim = site_dim;
  out.n_sites = n_sites;
  out.mat = std::move(m);
  return out;
}

DensityOperator DensityOperator::make(int site_dim, int n_sites, Mat m) {
  HermitianObservable h = HermitianObservable::make(site_dim, n_sites, std::move(m));
  const double tr = h.mat.trace().real();
  if (std::abs(tr - 1.0) > kTraceTol) {
    std::ostringstream os;
    os << "DensityOperator: trace " << tr << " differs from 1";
    throw std::invalid_argument(os.str());
  }
  const Eigen::VectorXd ev = hermitian_eigenvalues(h.mat);
  if (ev.minCoeff() < -kPsdTol) {
    std::ostringstream os;
    os << "DensityOperator: negative eigenvalue " << ev.minCoeff();
    throw std::invalid_argument(os.str());
  }
  DensityOperator out;
  out.site_dim = h.site_dim;
  out.n_sites = h.n_sites;
  out.mat = std::move(h.mat);
  return out;
}

DensityOperator DensityOperator::trusted(int site_dim, int n_sites, Mat m) {
  DensityOperator out;
  out.site_dim = site_dim;
  out.n_sites = n_sites;
  out.mat = std::move(m);
  return out;
}

HermitianObservable DensityOperator::observable() const {
  HermitianObservable out;
  out.site_dim = site_dim;
  out.n_sites = n_sites;
  out.mat = mat;
  return out;
}

SiteOperator tensor_product(const SiteOperator& a, const SiteOperator& b) {
  if (a.site_dim != b.site_dim)
    throw std::invalid_argument("tensor_product: site_dim mismatch");
  const Eigen::Index da = a.dim();
  const Eigen::Index db = b.dim();
  Mat out(da * db, da * db);
  for (Eigen::Index i = 0; i < da; ++i)
    for (Eigen::Index j = 0; j < da; ++j)
      out.block(i * db, j * db, db, db) = a.mat(i, j) * b.mat;
  return SiteOperator{a.site_dim, a.n_sites + b.n_sites, std::move(out)};
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
  SiteOperator p = tensor_product(static_cast<const SiteOperator&>(a),
                                  static_cast<const SiteOperator&>(b));
  return DensityOperator::trusted(p.site_dim, p.n_sites, std::move(p.mat));
}

SiteOperator partial_trace(const SiteOperator& op, const SiteSubset& keep) {
  if (keep.n != op.n_sites)
    throw std::invalid_argument("partial_trace: subset ambient size mismatch");
  if (keep.indices.empty())
    throw std::invalid_argument(
        "partial_trace: empty keep set (the scalar trace is not an operator)");
  const int d = op.site_dim;
  const int n = op.n_sites;
  const int k = keep.size();
  if (k == n) return op;

  const SiteSubset traced = keep.complement();
  const Eigen::Index dk = checked_power(d, k, std::numeric_limits<int>::max());
  const Eigen::Index dt = op.dim() / dk;

  // Offset of each kept / traced multi-index inside the full index.
  std::vector<Eigen::Index> keep_off(dk, 0), tr_off(dt, 0);
  {
    std::vector<Eigen::Index> kstr(k), tstr(n - k);
    for (int j = 0; j < k; ++j) kstr[j] = site_stride(d, n, keep.indices[j]);
    for (int j = 0; j < n - k; ++j)
      tstr[j] = site_stride(d, n, traced.indices[j]);
    for (Eigen::Index idx = 0; idx < dk; ++idx) {
      Eigen::Index rem = idx, off = 0;
      for (int j = k - 1; j >= 0; --j) {
        off += (rem % d) * kstr[j];
        rem /= d;
      }
      keep_off[idx] = off;
    }
    for (Eigen::Index idx = 0; idx < dt; ++idx) {
      Eigen::Index rem = idx, off = 0;
      for (int j = n - k - 1; j >= 0; --j) {
        off += (rem % d) * tstr[j];
        rem /= d;
      }
      tr_off[idx] = off;
    }
  }

  Mat out = Mat::Zero(dk, dk);
  for (Eigen::Index r = 0; r < dk; ++r)
    for (Eigen::Index c = 0; c < dk; ++c) {
      Cd acc(0.0, 0.0);
      for (Eigen::Index t = 0; t < dt; ++t)
        acc += op.mat(keep_off[r] + tr_off[t], keep_off[c] + tr_off[t]);
      out(r, c) = acc;
    }
  return SiteOperator{d, k, std::move(out)};
}

DensityOperator partial_trace(const DensityOperator& op, const SiteSubset& keep) {
  SiteOperator r = partial_trace(static_cast<const SiteOperator&>(op), keep);
  return DensityOperator::trusted(r.site_dim, r.n_sites, std::move(r.mat));
}

DensityOperator single_site_marginal(const DensityOperator& op, int site) {
  return partial_trace(op, SiteSubset::make(op.n_sites, {site}));
}

SiteOperator permute_sites(const SiteOperator& op, const Permutation& pi) {
  if (pi.n != op.n_sites)
    throw std::invalid_argument("permute_sites: size mismatch");
  const int d = op.site_dim;
  const int n = op.n_sites;
  const Eigen::Index D = op.dim();

  std::vector<Eigen::Index> new_index(D, 0);
  std::vector<Eigen::Index> strides(n + 1);
  for (int i = 1; i <= n; ++i) strides[i] = site_stride(d, n, i);
  for (Eigen::Index x = 0; x < D; ++x) {
    Eigen::Index y = 0;
    for (int i = 1; i <= n; ++i) {
      const Eigen::Index digit = (x / strides[i]) % d;
      y += digit * strides[pi(i)];
    }
    new_index[x] = y;
  }

  Mat out(D, D);
  for (Eigen::Index r = 0; r < D; ++r)
    for (Eigen::Index c = 0; c < D; ++c)
      out(new_index[r], new_index[c]) = op.mat(r, c);
  return SiteOperator{d, n, std::move(out)};
}

DensityOperator permute_sites(const DensityOperator& op, const Permutation& pi) {
  SiteOperator r = permute_sites(static_cast<const SiteOperator&>(op), pi);
  return DensityOperator::trusted(r.site_dim, r.n_sites, std::move(r.mat));
}

SiteOperator lift_omitting_site(const SiteOperator& rest, int site) {
  const int d = rest.site_dim;
  const int n = rest.n_sites + 1;
  if (site < 1 || site > n)
    throw std::invalid_argument("lift_omitting_site: site out of range");
  const Eigen::Index dr = rest.dim();
  const Eigen::Index low_block = site_stride(d, n, site);
  Mat out = Mat::Zero(dr * d, dr * d);
  for (Eigen::Index a = 0; a < dr; ++a) {
    const Eigen::Index ahigh = a / low_block, alow = a % low_block;
    for (Eigen::Index b = 0; b < dr; ++b) {
      const Cd v = rest.mat(a, b);
      if (v == Cd(0.0, 0.0)) continue;
      const Eigen::Index bhigh = b / low_block, blow = b % low_block;
      for (int j = 0; j < d; ++j) {
        const Eigen::Index r = (ahigh * d + j) * low_block + alow;
        const Eigen::Index c = (bhigh * d + j) * low_block + blow;
        out(r, c) = v;
      }
    }
  }
  return SiteOperator{d, n, std::move(out)};
}

double trace_norm(const Mat& x) {
  require_hermitian(x, "trace_norm");
  return hermitian_eigenvalues(x).cwiseAbs().sum();
}

double operator_norm(const Mat& x) {
  require_hermitian(x, "operator_norm");
  const Eigen::VectorXd ev = hermitian_eigenvalues(x);
  return ev.size() == 0 ? 0.0 : ev.cwiseAbs().maxCoeff();
}

double trace_norm(const SiteOperator& x) { return trace_norm(x.mat); }
double operator_norm(const SiteOperator& x) { return operator_norm(x.mat); }

double von_neumann_entropy(const DensityOperator& rho) {
  const Eigen::VectorXd ev = hermitian_eigenvalues(rho.mat);
  double s = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev[i] > kEntropyClip) s -= ev[i] * std::log(ev[i]);
  return s;
}

double relative_entropy(const DensityOperator& rho, const DensityOperator& sigma) {
  if (rho.dim() != sigma.dim())
    throw std::invalid_argument("relative_entropy: shape mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(sigma.mat));
  const Eigen::VectorXd s = es.eigenvalues();
  const Mat v = es.eigenvectors();
  // Diagonal of rho in sigma's eigenbasis gives Tr[rho ln sigma] termwise.
  double cross = 0.0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const double weight = std::real(Cd(v.col(i).adjoint() * rho.mat * v.col(i)));
    if (s[i] > kEntropyClip) {
      cross += weight * std::log(s[i]);
    } else if (weight > 1e-12) {
      return std::numeric_limits<double>::infinity();
    }
  }
  return std::max(0.0, -von_neumann_entropy(rho) - cross);
}

double binary_entropy(double x) {
  if (x < 0.0 || x > 1.0)
    throw std::invalid_argument("binary_entropy: argument outside [0,1]");
  double s = 0.0;
  if (x > 0.0) s -= x * std::log(x);
  if (x < 1.0) s -= (1.0 - x) * std::log(1.0 - x);
  return s;
}

namespace {

// Phase-canonicalize (first nonzero entry positive real), then compare
// entries as (re, im) pairs.
Vec canonical_phase(const Vec& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) > 1e-12) {
      return v * (std::conj(v[i]) / std::abs(v[i]));
    }
  }
  return v;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a[i].real() != b[i].real()) return a[i].real() < b[i].real();
    if (a[i].imag() != b[i].imag()) return a[i].imag() < b[i].imag();
  }
  return false;
}

}  // namespace

DensityOperator purify(const DensityOperator& rho) {
  const Eigen::Index D = rho.dim();
  Eigen::SelfAdjointEigenSolver<Mat> es(hermitized(rho.mat));
  std::vector<Eigen::Index> order(D);
  std::iota(order.begin(), order.end(), 0);
  std::vector<Vec> vecs(D);
  for (Eigen::Index i = 0; i < D; ++i)
    vecs[i] = canonical_phase(es.eigenvectors().col(i));
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double la = es.eigenvalues()[a], lb = es.eigenvalues()[b];
    if (std::abs(la - lb) > 1e-12) return la > lb;
    return lex_less(vecs[a], vecs[b]);
  });

  Vec psi = Vec::Zero(D * D);
  for (Eigen::Index rank = 0; rank < D; ++rank) {
    const double lambda = std::max(0.0, es.eigenvalues()[order[rank]]);
    if (lambda <= kEntropyClip) continue;
    const Vec& v = vecs[order[rank]];
    const double w = std::sqrt(lambda);
    for (Eigen::Index i = 0; i < D; ++i) psi[i * D + rank] += w * v[i];
  }
  Mat out = psi * psi.adjoint();
  return DensityOperator::trusted(static_cast<int>(D), 2, std::move(out));
}

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double v = 1.0;
  for (int i = 1; i <= k; ++i) v = v * (n - k + i) / i;
  return v;
}

void for_each_subset(int n, int k,
                     const std::function<void(const SiteSubset&)>& visit) {
  if (k < 1 || k > n) throw std::invalid_argument("for_each_subset: bad k");
  std::vector<int> idx(k);
  std::iota(idx.begin(), idx.end(), 1);
  while (true) {
    visit(SiteSubset{n, idx});
    int j = k - 1;
    while (j >= 0 && idx[j] == n - (k - 1 - j)) --j;
    if (j < 0) break;
    ++idx[j];
    for (int t = j + 1; t < k; ++t) idx[t] = idx[t - 1] + 1;
  }
}

double subset_average(int n, int k,
                      const std::function<double(const SiteSubset&)>& f) {
  if (k < 1 || k > n) throw std::invalid_argument("subset_average: bad k");
  const double count = binomial(n, k);
  if (count > 1e6)
    throw GuardError("subset_average: C(n,k) exceeds enumeration guard 1e6");
  double acc = 0.0;
  for_each_subset(n, k, [&](const SiteSubset& s) { acc += f(s); });
  return acc / count;
}

DensityOperator maximally_mixed_site(int d) {
  return DensityOperator::trusted(d, 1, Mat::Identity(d, d) / double(d));
}

DensityOperator basis_state(int d, int index) {
  if (index < 0 || index >= d)
    throw std::invalid_argument("basis_state: index out of range");
  Mat m = Mat::Zero(d, d);
  m(index, index) = Cd(1.0, 0.0);
  return DensityOperator::trusted(d, 1, std::move(m));
}

Mat identity_matrix(Eigen::Index side) { return Mat::Identity(side, side); }

}  // namespace aiid
