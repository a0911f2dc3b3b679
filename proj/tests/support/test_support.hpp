#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <unsupported/Eigen/MatrixFunctions>

#include "krylovchaos/matrixcore.hpp"

namespace kc::testing {

inline ComplexMatrix gaussian_complex(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      const double re = normal(rng);
      m(i, j) = Complex(re, normal(rng));
    }
  }
  return m;
}

// Haar unitary: QR of a Ginibre matrix with the phases of R's diagonal
// absorbed into Q.
inline ComplexMatrix haar_unitary(Eigen::Index d, std::mt19937_64& rng) {
  const ComplexMatrix g = gaussian_complex(d, d, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index k = 0; k < d; ++k) {
    const Complex diag = r(k, k);
    q.col(k) *= diag / std::abs(diag);
  }
  return q;
}

// Haar orthogonal matrix, returned as complex.
inline ComplexMatrix haar_orthogonal(Eigen::Index d, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  for (Eigen::Index k = 0; k < d; ++k) {
    if (qr.matrixQR()(k, k) < 0.0) q.col(k) *= -1.0;
  }
  return q.cast<Complex>();
}

inline ComplexMatrix random_hermitian(Eigen::Index d, std::mt19937_64& rng) {
  const ComplexMatrix g = gaussian_complex(d, d, rng);
  return (g + g.adjoint()) * 0.5;
}

inline ComplexVector random_unit_vector(Eigen::Index d, std::mt19937_64& rng) {
  ComplexVector v = gaussian_complex(d, 1, rng);
  return v / v.norm();
}

// Dense exponential exp(-i tau H) by Pade scaling and squaring, independent
// of any eigendecomposition.
inline ComplexMatrix dense_expm(const ComplexMatrix& h, double tau) {
  const ComplexMatrix a = Complex(0.0, -tau) * h;
  return a.exp();
}

// CDF of the squared GOE component by quadrature. With x = u^2 the
// integrand 2u * pdf(u^2) is smooth:
//   2 Gamma(D/2) / (Gamma((D-1)/2) sqrt(pi)) (1 - u^2)^{(D-3)/2}.
inline double goe_cdf_quadrature(double x, int dim) {
  const double d = dim;
  const double log_norm = std::lgamma(d / 2.0) - std::lgamma((d - 1.0) / 2.0) - 0.5 * std::log(M_PI);
  const double norm = 2.0 * std::exp(log_norm);
  const auto integrand = [&](double u) { return norm * std::pow(1.0 - u * u, (d - 3.0) / 2.0); };
  if (x <= 0.0) return 0.0;
  boost::math::quadrature::tanh_sinh<double> integrator;
  return integrator.integrate(integrand, 0.0, std::sqrt(std::min(x, 1.0)), 1e-14);
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace kc::testing
