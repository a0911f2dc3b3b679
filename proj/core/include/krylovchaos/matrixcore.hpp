#pragma once

#include <complex>

#include <Eigen/Dense>

#include "krylovchaos/errors.hpp"

namespace kc {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

/// Numerical tolerances shared by the dense routines. Defaults suit double
/// precision up to D ~ 4096.
struct Tolerances {
  double unitarity = 1e-10;
  double hermiticity = 1e-10;
  double reconstruction = 1e-9;  // relative to ||H||_max
  double orthonormality = 1e-9;
};

/// Max-norm (largest entry modulus).
double max_norm(const ComplexMatrix& m);

/// ||M^dagger M - I||_max.
double unitarity_residual(const ComplexMatrix& m);

/// ||M - M^dagger||_max.
double hermiticity_residual(const ComplexMatrix& m);

bool all_finite(const ComplexMatrix& m);

/// Maps an angle to the half-open interval [-pi, pi).
double wrap_phase(double phi);

/// A square complex matrix certified unitary at construction.
class UnitaryMatrix {
 public:
  /// Throws NonUnitaryInput when ||U^dagger U - I||_max exceeds `tolerance`.
  static UnitaryMatrix certify(ComplexMatrix m, double tolerance = Tolerances{}.unitarity);

  const ComplexMatrix& matrix() const noexcept { return matrix_; }
  double residual() const noexcept { return residual_; }
  Eigen::Index dim() const noexcept { return matrix_.rows(); }

 private:
  UnitaryMatrix(ComplexMatrix m, double residual) : matrix_(std::move(m)), residual_(residual) {}

  ComplexMatrix matrix_;
  double residual_;
};

enum class SpectrumKind { Energies, Phases };

/// Eigenvalues (energies) or eigenphases in [-pi, pi), ascending, with the
/// matching eigenvectors stored column-wise.
struct SpectralData {
  SpectrumKind kind = SpectrumKind::Energies;
  RealVector values;
  ComplexMatrix vectors;
  double spectral_variance = 0.0;

  Eigen::Index dim() const noexcept { return values.size(); }
};

/// Population variance of the entries.
double population_variance(const RealVector& v);

/// Diagonalizes a Hermitian matrix. Purely real input is routed through the
/// real symmetric solver.
SpectralData hermitian_eigendecompose(const ComplexMatrix& h, const Tolerances& tol = {});

/// U = V diag(exp(-i tau e_k)) V^dagger.
UnitaryMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double tau,
                                       const Tolerances& tol = {});

/// Same as above, reusing an existing eigendecomposition of H.
UnitaryMatrix unitary_from_spectrum(const SpectralData& h_spectrum, double tau,
                                    const Tolerances& tol = {});

/// Eigenphases of exp(-i tau H) read off the spectrum of H: (-tau e_k) folded
/// to [-pi, pi) and re-sorted, with the eigenvectors permuted to match.
SpectralData phases_from_spectrum(const SpectralData& h_spectrum, double tau);

/// Eigenphases and orthonormal eigenvectors of a unitary supplied without a
/// generator. Diagonalizes the Hermitian matrix (e^{-i phi} U + h.c.) / 2,
/// which shares U's eigenvectors, then re-diagonalizes U inside clusters
/// that the Hermitian eigenvalues cannot separate. Throws ConvergenceFailure
/// if V^dagger U V is not diagonal to 100 * tol.unitarity.
SpectralData unitary_eigenphases(const UnitaryMatrix& u, const Tolerances& tol = {});

/// Reference implementation via the complex Schur form (diagonal for normal
/// matrices). Several times slower; kept for cross-checks.
SpectralData unitary_eigenphases_schur(const UnitaryMatrix& u, const Tolerances& tol = {});

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b);

}  // namespace kc
