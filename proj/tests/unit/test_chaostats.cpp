#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "krylovchaos/chaostats.hpp"
#include "support/test_support.hpp"

using namespace kc;

TEST_CASE("eta normalization constants") {
  CHECK(eta_from_ratio(kPoissonRatio) == 0.0);
  CHECK(eta_from_ratio(kGoeRatio) == 1.0);
}

TEST_CASE("gap ratio examples") {
  std::vector<double> fence(40);
  for (std::size_t i = 0; i < fence.size(); ++i) fence[i] = 0.25 * static_cast<double>(i);
  const GapRatioResult f = r_ratio_mean(fence);
  CHECK(f.r_mean == doctest::Approx(1.0));
  CHECK(f.eta == doctest::Approx(4.102).epsilon(1e-3));
  CHECK(f.n_gaps == 38);

  const std::vector<double> three{0.0, 1.0, 3.0};
  const GapRatioResult t = r_ratio_mean(three);
  CHECK(t.r_mean == doctest::Approx(0.5));
  CHECK(t.n_gaps == 1);
}

TEST_CASE("gap ratio errors") {
  try {
    (void)r_ratio_mean(std::vector<double>{0.0, 1.0});
    FAIL("expected TooFewLevels");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TooFewLevels);
  }
  CHECK_THROWS_AS((void)r_ratio_mean(std::vector<double>{0.0, 2.0, 1.0}), Error);

  const std::vector<double> degenerate{0.0, 1.0, 1.0, 2.5, 3.0};
  const GapRatioResult dropped = r_ratio_mean(degenerate);
  CHECK(dropped.n_dropped == 1);
  CHECK(dropped.n_gaps == 2);
  GapRatioOptions strict;
  strict.policy = DegeneracyPolicy::Reject;
  try {
    (void)r_ratio_mean(degenerate, strict);
    FAIL("expected DegenerateSpectrum");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::DegenerateSpectrum);
  }
}

TEST_CASE("gap ratio is affine invariant") {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> levels(200);
  for (double& x : levels) x = normal(rng);
  std::sort(levels.begin(), levels.end());
  const double base = r_ratio_mean(levels).r_mean;
  // power-of-two scalings are exact in floating point
  for (double a : {2.0, 0.125, 16.0}) {
    std::vector<double> mapped(levels.size());
    std::transform(levels.begin(), levels.end(), mapped.begin(), [&](double x) { return a * x; });
    CHECK(std::abs(r_ratio_mean(mapped).r_mean - base) < 1e-14);
  }
  for (auto [a, b] : {std::pair{0.3, 3.0}, std::pair{7.0, -5.0}}) {
    std::vector<double> mapped(levels.size());
    std::transform(levels.begin(), levels.end(), mapped.begin(), [&](double x) { return a * x + b; });
    CHECK(std::abs(r_ratio_mean(mapped).r_mean - base) < 1e-12);
  }
}

TEST_CASE("central_window keeps the middle of the spectrum") {
  std::vector<double> levels(10);
  for (std::size_t i = 0; i < levels.size(); ++i) levels[i] = static_cast<double>(i);
  const std::vector<double> mid = central_window(levels, 0.5);
  REQUIRE(mid.size() == 5);
  CHECK(mid.front() >= 2.0);
  CHECK(mid.back() <= 7.0);
  CHECK(central_window(levels, 1.0).size() == 10);
}

TEST_CASE("goe_component_cdf examples") {
  CHECK(goe_component_cdf(0.0, 10) == 0.0);
  CHECK(goe_component_cdf(1.0, 10) == doctest::Approx(1.0));
  CHECK(goe_component_cdf(0.25, 3) == doctest::Approx(0.5).epsilon(1e-12));
  const int d = 1024;
  const double x = 3.0 / d;
  CHECK(std::abs(goe_component_cdf(x, d) - std::erf(std::sqrt(d * x / 2.0))) < 1e-3);
  CHECK_THROWS_AS((void)goe_component_cdf(-0.1, 5), Error);
  CHECK_THROWS_AS((void)goe_component_cdf(0.5, 2), Error);
}

TEST_CASE("goe_component_cdf agrees with quadrature and is monotone") {
  for (int d : {3, 7, 64, 1024}) {
    double prev = 0.0;
    for (int i = 1; i <= 50; ++i) {
      const double x = std::pow(static_cast<double>(i) / 50.0, 3.0);
      const double v = goe_component_cdf(x, d);
      CHECK(std::abs(v - kc::testing::goe_cdf_quadrature(x, d)) < 1e-8);
      CHECK(v >= prev);
      prev = v;
    }
  }
}

TEST_CASE("goe_component_pdf integrates to one") {
  boost::math::quadrature::tanh_sinh<double> integrator;
  for (int d : {3, 10, 200}) {
    // tanh-sinh copes with the x^{-1/2} endpoint singularity
    const auto f = [d](double x) { return goe_component_pdf(x, d); };
    CHECK(std::abs(integrator.integrate(f, 0.0, 1.0, 1e-13) - 1.0) < 1e-9);
    CHECK(goe_component_pdf(0.3, d) ==
          doctest::Approx((goe_component_cdf(0.3 + 1e-6, d) - goe_component_cdf(0.3 - 1e-6, d)) / 2e-6)
              .epsilon(1e-5));
  }
}

TEST_CASE("ks_sup_distance evaluates both sides of each jump") {
  const std::vector<double> sample{0.5};
  const std::vector<double> cdf{0.5};
  CHECK(ks_sup_distance(sample, cdf) == doctest::Approx(0.5));
  const std::vector<double> two{0.1, 0.9};
  const std::vector<double> cdf2{0.1, 0.9};
  CHECK(ks_sup_distance(two, cdf2) == doctest::Approx(0.4));
}

TEST_CASE("delta_ks of identical bases is far from one") {
  const ComplexMatrix id = ComplexMatrix::Identity(16, 16);
  const EigenvectorStatsResult r = delta_ks(id, id, "identity");
  CHECK(r.delta_ks < 0.2);
  CHECK(r.n_coefficients == 256);
  CHECK(r.reference_basis_id == "identity");
}

TEST_CASE("delta_ks of Haar orthogonal vectors is near one") {
  std::mt19937_64 rng(16);
  const ComplexMatrix id = ComplexMatrix::Identity(128, 128);
  for (int trial = 0; trial < 3; ++trial) {
    CHECK(delta_ks(kc::testing::haar_orthogonal(128, rng), id).delta_ks > 0.98);
  }
}

TEST_CASE("delta_ks ignores column phases") {
  std::mt19937_64 rng(17);
  const int d = 24;
  const ComplexMatrix vecs = kc::testing::haar_unitary(d, rng);
  const ComplexMatrix ref = kc::testing::haar_unitary(d, rng);
  const double base = delta_ks(vecs, ref).delta_ks;
  std::uniform_real_distribution<double> angle(-3.0, 3.0);
  ComplexVector p1(d), p2(d);
  for (int j = 0; j < d; ++j) {
    p1[j] = std::polar(1.0, angle(rng));
    p2[j] = std::polar(1.0, angle(rng));
  }
  const double rotated = delta_ks(vecs * p1.asDiagonal(), ref * p2.asDiagonal()).delta_ks;
  CHECK(rotated == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("delta_ks input validation") {
  const ComplexMatrix id = ComplexMatrix::Identity(4, 4);
  try {
    (void)delta_ks(id, ComplexMatrix::Identity(5, 5));
    FAIL("expected ShapeMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ShapeMismatch);
  }
  try {
    (void)delta_ks(2.0 * id, id);
    FAIL("expected NonUnitaryBasis");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonUnitaryBasis);
  }
}
