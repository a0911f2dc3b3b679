#pragma once

#include <optional>

#include "krylovchaos/matrixcore.hpp"

namespace kc {

/// Krylov representation of a unitary U seeded by |psi0>.
///
/// `basis` holds |K_0>..|K_{M-1}> column-wise and `hessenberg` the M x M
/// matrix <K_m|U|K_n>. The Arnoldi sequences are read off it:
///   seq_a[n] = <K_n|U|K_n>        (length M)
///   seq_b[n] = <K_{n+1}|U|K_n>    (length M-1, real positive)
///   seq_c[n] = <K_0|U|K_n>        (length M)
struct KrylovDecomposition {
  ComplexMatrix basis;
  ComplexMatrix hessenberg;
  ComplexVector seq_a;
  RealVector seq_b;
  ComplexVector seq_c;
  /// True when the residual norm fell below the breakdown tolerance before
  /// reaching the requested dimension.
  bool terminated_early = false;
  std::optional<double> termination_norm;

  Eigen::Index dim() const noexcept { return basis.rows(); }
  Eigen::Index krylov_dim() const noexcept { return basis.cols(); }
};

struct ArnoldiOptions {
  /// Defaults to the full Hilbert-space dimension.
  std::optional<Eigen::Index> max_dim;
  /// Defaults to 1e-12 * sqrt(D).
  std::optional<double> breakdown_tol;
};

double default_breakdown_tol(Eigen::Index dim);

/// Arnoldi iteration with full re-orthogonalization (two classical
/// Gram-Schmidt passes per step). Upper-triangle matrix elements come from
/// explicit inner products, never from the c_n identity.
KrylovDecomposition arnoldi_iterate(const UnitaryMatrix& u, const ComplexVector& psi0,
                                    const ArnoldiOptions& opts = {});

/// Reference construction: builds U^t|psi0> explicitly, orthonormalizes the
/// power sequence with modified Gram-Schmidt and forms every matrix element
/// by direct inner products. Slow and ill-conditioned for large M; intended
/// as a test oracle for small D.
KrylovDecomposition brute_force_krylov(const UnitaryMatrix& u, const ComplexVector& psi0,
                                       const ArnoldiOptions& opts = {});

/// max_{m <= n} |H[m,n] c_m - a_m c_n|, the division-free form of the
/// identity <K_m|U|K_n> = (a_m / c_m) c_n.
double verify_sequence_identity(const KrylovDecomposition& k);

/// Lower-triangular alpha with |K_n> = sum_t alpha(n,t) U^t|psi0>.
/// Throws IllConditioned when the triangular solve produces non-finite values.
ComplexMatrix alpha_coefficients(const KrylovDecomposition& k, const UnitaryMatrix& u,
                                 const ComplexVector& psi0);

/// Structural diagnostics used by tests and the acceptance suite.
struct KrylovResiduals {
  double orthonormality = 0.0;       // ||Q^dagger Q - I||_max
  double hessenberg_zeros = 0.0;     // max |<K_m|U|K_n>| over m > n+1, explicit products
  double sequence_identity = 0.0;    // verify_sequence_identity
  double max_entry = 0.0;            // max |U_K entry|
  double max_column_norm = 0.0;
};

KrylovResiduals structural_residuals(const KrylovDecomposition& k, const UnitaryMatrix& u);

}  // namespace kc
