#include <doctest.h>

#include <algorithm>
#include <numbers>
#include <vector>

#include "krylovchaos/chaostats.hpp"
#include "krylovchaos/models.hpp"
#include "support/test_support.hpp"

using namespace kc;
using kc::testing::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

// Dense Kronecker construction of the clean chain, independent of the bit
// manipulation in chain_hamiltonian.
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
  ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

// Site operator acting on `site` (1-based, LSB). Kronecker order puts the
// most significant bit first, so site N is the leftmost factor.
ComplexMatrix site_op(const ComplexMatrix& op, int site, int n) {
  ComplexMatrix out = ComplexMatrix::Identity(1, 1);
  for (int s = n; s >= 1; --s) out = kron(out, s == site ? op : ComplexMatrix::Identity(2, 2));
  return out;
}

ComplexMatrix kron_chain(int n, double h_z, const std::vector<double>& delta) {
  ComplexMatrix x(2, 2), z(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  // index 0 is down with Z = -1
  z << -1.0, 0.0, 0.0, 1.0;
  const Eigen::Index d = Eigen::Index{1} << n;
  ComplexMatrix h = ComplexMatrix::Zero(d, d);
  for (int i = 1; i <= n; ++i) {
    h += site_op(x, i, n) + h_z * delta[static_cast<std::size_t>(i - 1)] * site_op(z, i, n);
  }
  for (int i = 1; i < n; ++i) h -= site_op(z, i, n) * site_op(z, i + 1, n);
  return h;
}

}  // namespace

TEST_CASE("rmt_hamiltonian is symmetric and deterministic") {
  const RmtParams p{64, 0.7, 99};
  const ComplexMatrix h = rmt_hamiltonian(p);
  CHECK(h == h.transpose());
  CHECK(h.imag().isZero());
  CHECK(h == rmt_hamiltonian(p));
  CHECK(h != rmt_hamiltonian(RmtParams{64, 0.7, 100}));
  CHECK(p.coupling() == doctest::Approx(std::sqrt(2.0 * kPi * 0.7 / 64.0)));
}

TEST_CASE("rmt_hamiltonian at lambda = 0 is diagonal") {
  const ComplexMatrix h = rmt_hamiltonian(RmtParams{32, 0.0, 5});
  CHECK(ComplexMatrix(h.diagonal().asDiagonal()) == h);
}

TEST_CASE("rmt ensemble gap ratios at the two limits") {
  const auto eta_mean = [](int dim, double lambda, int n) {
    double sum = 0.0;
    for (int r = 0; r < n; ++r) {
      const SpectralData s = hermitian_eigendecompose(rmt_hamiltonian(RmtParams{dim, lambda, 1000u + r}));
      const std::vector<double> levels(s.values.data(), s.values.data() + s.values.size());
      sum += r_ratio_mean(levels).eta;
    }
    return sum / n;
  };
  CHECK(std::abs(eta_mean(256, 0.0, 50)) < 0.03);
  CHECK(std::abs(eta_mean(256, 10.0, 50) - 1.0) < 0.05);
}

TEST_CASE("chain_hamiltonian for N = 2 at h_z = 0") {
  const ComplexMatrix h = chain_hamiltonian(ChainParams{2, 0.0, 0.0, 0, ParitySector::None});
  CHECK(max_abs(h - kron_chain(2, 0.0, {1.0, 1.0})) < 1e-15);
  const SpectralData s = hermitian_eigendecompose(h);
  const double r5 = std::sqrt(5.0);
  CHECK(s.values[0] == doctest::Approx(-r5));
  CHECK(s.values[1] == doctest::Approx(-1.0));
  CHECK(s.values[2] == doctest::Approx(1.0));
  CHECK(s.values[3] == doctest::Approx(r5));
}

TEST_CASE("chain_hamiltonian matches a Kronecker construction with disorder") {
  const ChainParams p{5, 0.8, 0.3, 17, ParitySector::None};
  const std::vector<double> delta = chain_disorder(p);
  REQUIRE(delta.size() == 5);
  CHECK(max_abs(chain_hamiltonian(p) - kron_chain(5, 0.8, delta)) < 1e-13);
  CHECK(chain_disorder(p) == delta);
  const std::vector<double> clean = chain_disorder(ChainParams{5, 0.8, 0.0, 17, ParitySector::None});
  CHECK(std::all_of(clean.begin(), clean.end(), [](double d) { return d == 1.0; }));
}

TEST_CASE("parity sector dimensions and symmetry") {
  CHECK(parity_sector_dim(10, ParitySector::Positive) == 528);
  CHECK(ParityBasis(10, ParitySector::Positive).dim() == 528);
  for (int n : {3, 4, 7}) {
    const Eigen::Index pos = ParityBasis(n, ParitySector::Positive).dim();
    const Eigen::Index neg = ParityBasis(n, ParitySector::Negative).dim();
    CHECK(pos + neg == (Eigen::Index{1} << n));
    CHECK(pos == parity_sector_dim(n, ParitySector::Positive));
  }

  const int n = 6;
  const ComplexMatrix p = parity_operator(n);
  CHECK(max_abs(p * p - ComplexMatrix::Identity(64, 64)) == 0.0);
  for (double h_z : {0.0, 0.7}) {
    const ComplexMatrix h = chain_hamiltonian(ChainParams{n, h_z, 0.0, 0, ParitySector::None});
    CHECK(max_abs(h * p - p * h) < 1e-12);
  }

  const ParityBasis basis(n, ParitySector::Positive);
  const ComplexMatrix iso = basis.isometry();
  CHECK(unitarity_residual(iso) < 1e-14);
  CHECK(max_abs(p * iso - iso) < 1e-14);
  const ComplexMatrix full = chain_hamiltonian(ChainParams{n, 0.5, 0.0, 0, ParitySector::None});
  const ComplexMatrix sector = chain_hamiltonian(ChainParams{n, 0.5, 0.0, 0, ParitySector::Positive});
  CHECK(max_abs(sector - iso.adjoint() * full * iso) < 1e-13);
}

TEST_CASE("parity sector with disorder is rejected") {
  try {
    (void)chain_hamiltonian(ChainParams{4, 0.5, 0.1, 1, ParitySector::Positive});
    FAIL("expected ParityWithDisorder");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ParityWithDisorder);
  }
}

TEST_CASE("interaction energies and eigenbasis for N = 2") {
  const RealVector e = interaction_energies(2);
  CHECK(e[0] == -1.0);
  CHECK(e[1] == 1.0);
  CHECK(e[2] == 1.0);
  CHECK(e[3] == -1.0);
  const ComplexMatrix b = interaction_eigenbasis(2);
  CHECK(unitarity_residual(b) == 0.0);
  // ordered by energy, ties by index: e0, e3, e1, e2
  CHECK(b(0, 0) == Complex(1.0));
  CHECK(b(3, 1) == Complex(1.0));
  CHECK(b(1, 2) == Complex(1.0));
  CHECK(b(2, 3) == Complex(1.0));
  CHECK(interaction_eigenbasis(2) == b);
}

TEST_CASE("single-site propagator matches the dense exponential") {
  ComplexMatrix h(2, 2);
  const double field = 0.37;
  h << -field, 1.0, 1.0, field;
  const Eigen::Matrix2cd u = single_site_propagator(field, 1.9);
  CHECK(max_abs(ComplexMatrix(u) - kc::testing::dense_expm(h, 1.9)) < 1e-13);
}

TEST_CASE("trotter_unitary at N = 2 matches dense exponentials") {
  const double tau = kPi / 2.0;
  const ChainParams chain{2, 0.0, 0.0, 0, ParitySector::None};
  const UnitaryMatrix u = trotter_unitary(TrotterParams{chain, tau});
  ComplexMatrix x(2, 2);
  x << 0.0, 1.0, 1.0, 0.0;
  const ComplexMatrix hs = site_op(x, 1, 2) + site_op(x, 2, 2);
  const ComplexMatrix hzz = interaction_energies(2).cast<Complex>().asDiagonal();
  const ComplexMatrix expected = kc::testing::dense_expm(hzz, tau) * kc::testing::dense_expm(hs, tau);
  CHECK(max_abs(u.matrix() - expected) < 1e-12);
  CHECK(u.residual() <= 1e-12);
}

TEST_CASE("trotter_unitary is unitary across parameters") {
  for (double h_z : {0.0, 0.5, 3.0}) {
    for (double tau : {0.01, 1.0, 3.77}) {
      const UnitaryMatrix u = trotter_unitary(TrotterParams{ChainParams{6, h_z, 0.1, 3, ParitySector::None}, tau});
      CHECK(unitarity_residual(u.matrix()) <= 1e-12);
    }
  }
  const UnitaryMatrix sector = trotter_unitary(TrotterParams{ChainParams{6, 0.5, 0.0, 0, ParitySector::Positive}, 0.8});
  CHECK(sector.dim() == parity_sector_dim(6, ParitySector::Positive));
}

TEST_CASE("trotter error scales as tau squared") {
  const ChainParams chain{6, 0.7, 0.2, 8, ParitySector::None};
  const ComplexMatrix h = chain_hamiltonian(chain);
  const auto err = [&](double tau) {
    return frobenius_distance(trotter_unitary(TrotterParams{chain, tau}).matrix(),
                              unitary_from_hamiltonian(h, tau).matrix());
  };
  const double e1 = err(1e-3), e2 = err(2e-3), e4 = err(4e-3);
  CHECK(e2 / e1 == doctest::Approx(4.0).epsilon(0.2));
  CHECK(e4 / e2 == doctest::Approx(4.0).epsilon(0.2));

  const double tau = 1e-4;
  const ComplexMatrix first_order = ComplexMatrix::Identity(64, 64) - Complex(0.0, tau) * h;
  const double dev = max_abs(trotter_unitary(TrotterParams{chain, tau}).matrix() - first_order);
  CHECK(dev < 10.0 * tau * tau * max_abs(h) * max_abs(h));
}

TEST_CASE("computational initial states") {
  StateContext ctx;
  ctx.n_sites = 3;
  const ComplexVector down = initial_state({InitialStateKind::AllDown, 0.0}, ctx);
  const ComplexVector up = initial_state({InitialStateKind::AllUp, 0.0}, ctx);
  CHECK(down.size() == 8);
  CHECK(down[0] == Complex(1.0));
  CHECK(down.norm() == 1.0);
  CHECK(up[7] == Complex(1.0));
  CHECK(up.norm() == 1.0);

  ctx.n_sites = 4;
  ctx.parity_sector = ParitySector::Positive;
  const ComplexVector sector_down = initial_state({InitialStateKind::AllDown, 0.0}, ctx);
  CHECK(sector_down.size() == parity_sector_dim(4, ParitySector::Positive));
  CHECK(sector_down.norm() == doctest::Approx(1.0));
}

TEST_CASE("center eigenstate is index floor(D/2) of the clean chain") {
  StateContext ctx;
  ctx.n_sites = 8;
  const ComplexVector psi = initial_state({InitialStateKind::CenterEigenstate, 0.0}, ctx);
  const ComplexMatrix h = chain_hamiltonian(ChainParams{8, 0.0, 0.0, 0, ParitySector::None});
  const SpectralData s = hermitian_eigendecompose(h);
  CHECK(psi.norm() == doctest::Approx(1.0));
  const ComplexVector hpsi = h * psi;
  CHECK((hpsi - s.values[128] * psi).norm() < 1e-9);
  // cross-check against a differently ordered solver
  Eigen::ComplexEigenSolver<ComplexMatrix> ces(h);
  std::vector<Eigen::Index> order(256);
  for (Eigen::Index i = 0; i < 256; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(),
            [&](Eigen::Index a, Eigen::Index b) { return ces.eigenvalues()[a].real() < ces.eigenvalues()[b].real(); });
  CHECK(ces.eigenvalues()[order[128]].real() == doctest::Approx(s.values[128]));
  const bool non_degenerate = s.values[128] - s.values[127] > 1e-8 && s.values[129] - s.values[128] > 1e-8;
  if (non_degenerate) {
    const ComplexVector other = ces.eigenvectors().col(order[128]).normalized();
    CHECK(std::abs(other.dot(psi)) == doctest::Approx(1.0).epsilon(1e-8));
  }
}

TEST_CASE("random initial states") {
  const ComplexVector haar = haar_random_state(50, 7);
  CHECK(haar.norm() == doctest::Approx(1.0));
  CHECK(haar == haar_random_state(50, 7));
  CHECK(haar != haar_random_state(50, 8));

  const ComplexVector basis = random_basis_state(50, 7);
  CHECK(basis.norm() == 1.0);
  CHECK(basis.cwiseAbs().maxCoeff() == 1.0);
  CHECK(basis == random_basis_state(50, 7));
  CHECK(is_random_state(InitialStateKind::HaarRandom));
  CHECK(is_random_state(InitialStateKind::RandomBasis));
  CHECK_FALSE(is_random_state(InitialStateKind::AllUp));

  StateContext ctx;
  ctx.dim = 20;
  ctx.seed = 3;
  CHECK(initial_state({InitialStateKind::HaarRandom, 0.0}, ctx) == haar_random_state(20, 3));
}

TEST_CASE("spectral weights") {
  std::mt19937_64 rng(18);
  const int d = 20;
  const UnitaryMatrix u = UnitaryMatrix::certify(kc::testing::haar_unitary(d, rng));
  const ComplexVector psi = kc::testing::random_unit_vector(d, rng);
  const std::vector<SpectralWeight> w = spectral_weight(u, psi);
  double total = 0.0;
  for (const SpectralWeight& sw : w) total += sw.weight;
  CHECK(std::abs(total - 1.0) < 1e-10);

  ComplexVector v = psi;
  for (int t = 0; t <= 10; ++t) {
    Complex moment = 0.0;
    for (const SpectralWeight& sw : w) moment += sw.weight * std::polar(1.0, t * sw.phase);
    CHECK(std::abs(moment - psi.dot(v)) < 1e-9);
    v = u.matrix() * v;
  }

  const SpectralData s = unitary_eigenphases(u);
  const ComplexVector eig = s.vectors.col(3);
  const std::vector<SpectralWeight> single = spectral_weight(s, eig);
  CHECK(single[3].weight == doctest::Approx(1.0));
  CHECK(single[3].phase == s.values[3]);
}
