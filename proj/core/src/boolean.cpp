#include "aiid/boolean.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <bit>
#include <cmath>

#include "aiid/errors.hpp"

namespace aiid {

int popcount(BitMask m) { return std::popcount(m); }

int MultilinearPolynomial::degree() const {
  int deg = -1;
  for (const auto& [mask, c] : coefficients)
    if (c != 0.0) deg = std::max(deg, popcount(mask));
  return deg;
}

BooleanFunction BooleanFunction::from_table(int n, std::vector<double> table) {
  if (n < 1 || n > 16) throw GuardError("BooleanFunction: table mode needs 1 <= n <= 16");
  if (table.size() != (std::size_t{1} << n))
    throw std::invalid_argument("BooleanFunction: table size is not 2^n");
  return BooleanFunction{n, std::move(table)};
}

BooleanFunction BooleanFunction::from_function(
    int n, const std::function<double(BitMask)>& f) {
  if (n < 1 || n > 20) throw GuardError("BooleanFunction: needs 1 <= n <= 20");
  std::vector<double> table(std::size_t{1} << n);
  for (BitMask x = 0; x < table.size(); ++x) table[x] = f(x);
  return BooleanFunction{n, std::move(table)};
}

MultilinearPolynomial moebius_coefficients(const BooleanFunction& f) {
  std::vector<double> g = f.table;
  for (int b = 0; b < f.n; ++b)
    for (BitMask mask = 0; mask < g.size(); ++mask)
      if (mask & (BitMask{1} << b)) g[mask] -= g[mask ^ (BitMask{1} << b)];
  MultilinearPolynomial p;
  p.n = f.n;
  for (BitMask mask = 0; mask < g.size(); ++mask)
    if (g[mask] != 0.0) p.coefficients[mask] = g[mask];
  return p;
}

double evaluate(const MultilinearPolynomial& p, const std::vector<double>& x) {
  if (static_cast<int>(x.size()) != p.n)
    throw std::invalid_argument("evaluate: point has wrong arity");
  double acc = 0.0;
  for (const auto& [mask, c] : p.coefficients) {
    double mono = c;
    for (int i = 1; i <= p.n; ++i)
      if (mask & (BitMask{1} << (p.n - i))) mono *= x[i - 1];
    acc += mono;
  }
  return acc;
}

double evaluate_boolean(const MultilinearPolynomial& p, BitMask x) {
  double acc = 0.0;
  for (const auto& [mask, c] : p.coefficients)
    if ((mask & x) == mask) acc += c;
  return acc;
}

namespace {

std::vector<BitMask> masks_up_to_degree(int n, int r) {
  std::vector<BitMask> cols;
  for (BitMask m = 0; m < (BitMask{1} << n); ++m)
    if (popcount(m) <= r) cols.push_back(m);
  return cols;
}

}  // namespace

SliceRankResult middle_slice_rank_test(int n, int r) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("middle_slice_rank_test: n must be even");
  if (n > 12) throw GuardError("middle_slice_rank_test: n > 12");
  if (r < 0 || r > n) throw std::invalid_argument("middle_slice_rank_test: bad r");

  const std::vector<BitMask> cols = masks_up_to_degree(n, r);
  std::vector<BitMask> rows;
  for (BitMask x = 0; x < (BitMask{1} << n); ++x)
    if (popcount(x) != n / 2) rows.push_back(x);

  Eigen::MatrixXd A(rows.size(), cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      A(i, j) = ((cols[j] & rows[i]) == cols[j]) ? 1.0 : 0.0;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double cut = sv.size() ? 1e-9 * sv[0] : 0.0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv[i] > cut) ++rank;

  SliceRankResult out;
  out.dimension = static_cast<int>(cols.size()) - rank;
  for (int k = 0; k < out.dimension; ++k) {
    MultilinearPolynomial poly;
    poly.n = n;
    const auto v = svd.matrixV().col(rank + k);
    for (std::size_t j = 0; j < cols.size(); ++j)
      if (std::abs(v[j]) > 1e-12) poly.coefficients[cols[j]] = v[j];
    out.certificate.push_back(std::move(poly));
  }
  return out;
}

BooleanFunction diagonal_function(const DensityOperator& rho) {
  if (rho.site_dim != 2)
    throw std::invalid_argument("diagonal_function: needs qubit sites (d = 2)");
  if (rho.n_sites > 12) throw GuardError("diagonal_function: n > 12");
  const int n = rho.n_sites;
  std::vector<double> table(std::size_t{1} << n);
  for (BitMask x = 0; x < table.size(); ++x)
    table[x] = rho.mat(x, x).real();
  return BooleanFunction::from_table(n, std::move(table));
}

double low_degree_fit_residual(const BooleanFunction& f, int deg) {
  if (deg < 0 || deg > f.n)
    throw std::invalid_argument("low_degree_fit_residual: bad degree");
  const std::vector<BitMask> cols = masks_up_to_degree(f.n, deg);
  const double points = static_cast<double>(std::size_t{1} << f.n);
  if (points * cols.size() * cols.size() > 2e9)
    throw GuardError("low_degree_fit_residual: system too large");

  Eigen::MatrixXd A(static_cast<Eigen::Index>(points), cols.size());
  Eigen::VectorXd b(static_cast<Eigen::Index>(points));
  for (BitMask x = 0; x < static_cast<BitMask>(points); ++x) {
    b[x] = f.table[x];
    for (std::size_t j = 0; j < cols.size(); ++j)
      A(x, j) = ((cols[j] & x) == cols[j]) ? 1.0 : 0.0;
  }
  const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
  return (A * c - b).norm();
}

}  // namespace aiid
