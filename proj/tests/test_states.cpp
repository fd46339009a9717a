#include <doctest.h>

#include <cmath>
#include <vector>

#include "aiid/errors.hpp"
#include "aiid/rng.hpp"
#include "aiid/states.hpp"
#include "aiid/tensor.hpp"

using namespace aiid;

namespace {

double max_abs_diff(const Mat& a, const Mat& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

// Full S_n average, the brute-force oracle for defect_state.
DensityOperator full_symmetric_average(const DensityOperator& base) {
  const int n = base.n_sites;
  std::vector<int> image(n);
  for (int i = 0; i < n; ++i) image[i] = i + 1;
  Mat acc = Mat::Zero(base.dim(), base.dim());
  long long count = 0;
  std::sort(image.begin(), image.end());
  do {
    acc += permute_sites(base, Permutation::make(n, image)).mat;
    ++count;
  } while (std::next_permutation(image.begin(), image.end()));
  acc /= double(count);
  return DensityOperator::trusted(base.site_dim, n, std::move(acc));
}

}  // namespace

TEST_CASE("iid state") {
  Rng rng(301);
  const DensityOperator rho = random_density(rng, 2, 1);
  CHECK(max_abs_diff(iid_state(rho, 1).mat, rho.mat) == 0.0);

  const DensityOperator t3 = iid_state(maximally_mixed_site(2), 3);
  CHECK(max_abs_diff(t3.mat, Mat::Identity(8, 8) / 8.0) < 1e-15);

  const DensityOperator r4 = iid_state(rho, 4);
  const DensityOperator r2 = iid_state(rho, 2);
  CHECK(max_abs_diff(partial_trace(r4, SiteSubset::make(4, {2, 3})).mat, r2.mat) <
        1e-13);

  CHECK_THROWS_AS(iid_state(rho, 13), GuardError);
}

TEST_CASE("defect state") {
  Rng rng(307);
  const DensityOperator rho = random_density(rng, 2, 1);
  CHECK(max_abs_diff(defect_state(rho, no_defect(2), 3).mat,
                     iid_state(rho, 3).mat) < 1e-14);

  const DensityOperator d21 =
      defect_state(basis_state(2, 0), basis_state(2, 1), 2);
  Mat expect = Mat::Zero(4, 4);
  expect(1, 1) = 0.5;
  expect(2, 2) = 0.5;
  CHECK(max_abs_diff(d21.mat, expect) < 1e-14);

  // Equality with the full S_n average, including a non-symmetric defect
  // block on two sites.
  const DensityOperator omega2 =
      tensor_product(random_density(rng, 2, 1), random_density(rng, 2, 1));
  const DensityOperator via_placements = defect_state(rho, omega2, 4);
  DensityOperator base = tensor_product(tensor_product(rho, rho), omega2);
  CHECK(max_abs_diff(via_placements.mat, full_symmetric_average(base).mat) <
        1e-12);

  // Permutation invariance.
  const Permutation pi = Permutation::make(4, {3, 1, 4, 2});
  CHECK(max_abs_diff(permute_sites(via_placements, pi).mat,
                     via_placements.mat) < 1e-12);

  // Single-site marginal formula: ((n-k) rho + k avg-omega-site) / n.
  const DensityOperator m1 = single_site_marginal(via_placements, 1);
  const Mat omega_site =
      0.5 * (single_site_marginal(omega2, 1).mat + single_site_marginal(omega2, 2).mat);
  const Mat predicted = (2.0 * rho.mat + 2.0 * omega_site) / 4.0;
  CHECK(max_abs_diff(m1.mat, predicted) < 1e-12);
}

TEST_CASE("span projectors") {
  Vec zero = Vec::Zero(2);
  zero[0] = 1.0;

  const SpanProjector p0 = v_span_projector(zero, 3, 0);
  CHECK(p0.rank == 1);
  const DensityOperator psi3 = iid_state(basis_state(2, 0), 3);
  CHECK(max_abs_diff(p0.projector, psi3.mat) < 1e-12);

  CHECK(v_span_projector(zero, 2, 1).rank == 3);
  CHECK(v_span_projector(zero, 3, 1).rank == 4);
  CHECK(v_span_projector(zero, 3, 3).rank == 8);

  Rng rng(311);
  const Vec psi = random_pure_vector(rng, 2);
  const SpanProjector p1 = v_span_projector(psi, 3, 1);
  CHECK(max_abs_diff(p1.projector * p1.projector, p1.projector) < 1e-9);
  CHECK(max_abs_diff(p1.projector, p1.projector.adjoint()) < 1e-12);
  CHECK(std::abs(p1.projector.trace().real() - p1.rank) < 0.5);

  // Nesting and generator membership.
  const SpanProjector p2 = v_span_projector(psi, 3, 2);
  CHECK(max_abs_diff(p2.projector * p1.projector, p1.projector) < 1e-9);

  Vec gen = Vec::Ones(1);
  const Vec e1 = (Vec(2) << 0.0, 1.0).finished();
  for (const Vec* factor : {&psi, &e1, &psi}) {
    Vec next(gen.size() * 2);
    for (Eigen::Index a = 0; a < gen.size(); ++a)
      next.segment(a * 2, 2) = gen[a] * (*factor);
    gen = next;
  }
  CHECK((p1.projector * gen - gen).norm() < 1e-8);
}

TEST_CASE("tail functional") {
  Vec zero = Vec::Zero(2);
  zero[0] = 1.0;

  const DensityOperator pure4 = iid_state(basis_state(2, 0), 4);
  CHECK(tail_functional(pure4, zero, TailWeight::hard_cutoff(0)) ==
        doctest::Approx(0.0));
  CHECK(tail_functional(pure4, zero, TailWeight::linear()) ==
        doctest::Approx(0.0).epsilon(1e-10));

  const DensityOperator defect =
      defect_state(basis_state(2, 0), basis_state(2, 1), 4);
  const SpanProjector p1 = v_span_projector(zero, 4, 1);
  CHECK(std::abs((p1.projector * defect.mat).trace().real() - 1.0) < 1e-9);

  CHECK(tail_functional(defect, zero, TailWeight::hard_cutoff(1)) ==
        doctest::Approx(0.0));
  CHECK(std::isinf(tail_functional(defect, zero, TailWeight::hard_cutoff(0))));
  CHECK(tail_functional(defect, zero, TailWeight::linear()) <= 0.25 + 1e-9);

  // Indicator preset equals one minus the captured weight.
  for (int r0 : {1, 2}) {
    const SpanProjector pr = v_span_projector(zero, 4, r0);
    const double captured = (pr.projector * defect.mat).trace().real();
    CHECK(tail_functional(defect, zero, TailWeight::indicator(r0)) ==
          doctest::Approx(1.0 - captured).epsilon(1e-9));
  }

  // The exponential preset weights the single increment at r = 1.
  const double lam = 0.3;
  const double expected = std::exp(lam) *
                          (1.0 - (v_span_projector(zero, 4, 0).projector *
                                  defect.mat)
                                     .trace()
                                     .real());
  CHECK(tail_functional(defect, zero, TailWeight::exponential(lam)) ==
        doctest::Approx(expected).epsilon(1e-8));
}

TEST_CASE("gentle projection") {
  Rng rng(313);
  const DensityOperator rho = random_density(rng, 2, 2);
  const Mat full = Mat::Identity(4, 4);
  const GentleCheck same = gentle_projection_check(rho, full, 0.0);
  CHECK(same.lhs == doctest::Approx(0.0).epsilon(1e-12));

  // Mixed construction with exact overlap 1 - eta.
  const double eta = 0.04;
  Mat proj = Mat::Zero(4, 4);
  proj(0, 0) = 1.0;
  Mat mix = Mat::Zero(4, 4);
  mix(0, 0) = 1.0 - eta;
  mix(1, 1) = mix(2, 2) = mix(3, 3) = eta / 3.0;
  const GentleCheck gc =
      gentle_projection_check(DensityOperator::make(2, 2, mix), proj, eta);
  CHECK(gc.lhs <= gc.rhs + 1e-12);
  CHECK(gc.overlap == doctest::Approx(1.0 - eta).epsilon(1e-12));

  // Random states with overlap pinned at 0.99.
  for (int trial = 0; trial < 5; ++trial) {
    const DensityOperator inside = random_density(rng, 2, 1);
    Mat lift = Mat::Zero(4, 4);
    lift.topLeftCorner(2, 2) = inside.mat;
    const DensityOperator outside = random_density(rng, 2, 1);
    Mat lift2 = Mat::Zero(4, 4);
    lift2.bottomRightCorner(2, 2) = outside.mat;
    Mat p2 = Mat::Zero(4, 4);
    p2(0, 0) = p2(1, 1) = 1.0;
    const DensityOperator mixed = DensityOperator::trusted(
        2, 2, 0.99 * lift + 0.01 * lift2);
    const GentleCheck g = gentle_projection_check(mixed, p2, 0.01);
    CHECK(g.lhs <= g.rhs + 1e-12);
  }

  CHECK_THROWS_AS(gentle_projection_check(rho, proj, 0.001),
                  std::invalid_argument);
}

TEST_CASE("five qubit code state") {
  const DensityOperator psi = five_qubit_code_state();
  CHECK(psi.n_sites == 5);
  CHECK(von_neumann_entropy(psi) == doctest::Approx(0.0).epsilon(1e-9));
  CHECK((psi.mat * psi.mat - psi.mat).cwiseAbs().maxCoeff() < 1e-10);

  for (int k = 1; k <= 2; ++k) {
    for_each_subset(5, k, [&](const SiteSubset& I) {
      const DensityOperator red = partial_trace(psi, I);
      CHECK(max_abs_diff(red.mat, Mat::Identity(red.dim(), red.dim()) /
                                      double(red.dim())) < 1e-9);
    });
  }
}

TEST_CASE("maximally mixed") {
  const DensityOperator t2 = maximally_mixed(2, 2);
  CHECK(t2.mat.trace().real() == doctest::Approx(1.0));
  CHECK(max_abs_diff(t2.mat, Mat::Identity(4, 4) * 0.25) < 1e-15);
  CHECK(von_neumann_entropy(maximally_mixed(2, 3)) ==
        doctest::Approx(3 * std::log(2)).epsilon(1e-12));
}
