#pragma once

#include <cstdint>
#include <vector>

#include "krylovchaos/matrixcore.hpp"

namespace kc {

// ---------------------------------------------------------------------------
// Parametric random-matrix model: H = (H0 + k V) / sqrt(1 + k^2)
// ---------------------------------------------------------------------------

struct RmtParams {
  int dim = 0;
  double lambda = 0.0;  // transition parameter, lambda = k^2 D / (2 pi)
  std::uint64_t seed = 0;

  double coupling() const;  // k = sqrt(2 pi lambda / D)
};

/// H0 is diagonal with unit-variance Gaussian entries; V is GOE with
/// off-diagonal std 1/sqrt(D) and diagonal std sqrt(2)/sqrt(D). The result is
/// exactly symmetric.
ComplexMatrix rmt_hamiltonian(const RmtParams& p);

// ---------------------------------------------------------------------------
// Tilted-field Ising chain with open boundaries
//   H = sum_i (X_i + h_z delta_i Z_i) - sum_i Z_i Z_{i+1}
//
// Basis convention: bit i of the state index (LSB = site 1) is 1 for spin
// up, Z|up> = +|up>. Index 0 is all spins down.
// ---------------------------------------------------------------------------

enum class ParitySector { None, Positive, Negative };

struct ChainParams {
  int n_sites = 0;
  double h_z = 0.0;
  double disorder_sigma = 0.0;
  std::uint64_t seed = 0;
  ParitySector parity_sector = ParitySector::None;
};

inline constexpr int kMaxChainSites = 14;

/// delta_i ~ N(1, sigma^2), one per site; all ones when sigma == 0.
std::vector<double> chain_disorder(const ChainParams& p);

/// Basis of the site-reversal parity sector, in full-space coordinates.
/// Each column is e_s for a palindromic s, or (e_s +- e_rev(s))/sqrt(2) for
/// s < rev(s); columns are ordered by representative index.
class ParityBasis {
 public:
  ParityBasis(int n_sites, ParitySector sector);

  Eigen::Index full_dim() const noexcept { return full_dim_; }
  Eigen::Index dim() const noexcept { return static_cast<Eigen::Index>(reps_.size()); }
  ParitySector sector() const noexcept { return sector_; }

  /// Representative (smaller) state index of sector column `a`.
  std::uint32_t representative(Eigen::Index a) const { return reps_[static_cast<std::size_t>(a)]; }

  /// Sector column holding full-space state `s`, or -1 if `s` has no
  /// component in this sector.
  Eigen::Index column_of(std::uint32_t s) const { return column_of_[s]; }

  /// Coefficient of e_s in the sector column that contains it.
  double coefficient(std::uint32_t s) const;

  /// Full-space isometry P (full_dim x dim).
  ComplexMatrix isometry() const;

  /// P^dagger A P for a full-space operator A, using the sparse structure of P.
  ComplexMatrix project(const ComplexMatrix& full) const;

  /// P^dagger v.
  ComplexVector project(const ComplexVector& full) const;

 private:
  int n_sites_;
  ParitySector sector_;
  Eigen::Index full_dim_;
  std::vector<std::uint32_t> reps_;
  std::vector<Eigen::Index> column_of_;
};

std::uint32_t reverse_sites(std::uint32_t state, int n_sites);

/// Site-reversal permutation operator on the full space.
ComplexMatrix parity_operator(int n_sites);

/// (2^N + 2^ceil(N/2)) / 2 for the positive sector.
Eigen::Index parity_sector_dim(int n_sites, ParitySector sector);

/// Chain Hamiltonian in the computational basis, or in the requested parity
/// sector. Throws ParityWithDisorder if a sector is requested with sigma > 0.
ComplexMatrix chain_hamiltonian(const ChainParams& p);

/// Diagonal of H_zz = -sum Z_i Z_{i+1} over the full computational basis.
RealVector interaction_energies(int n_sites);

/// Eigenbasis of the interaction term: computational basis states ordered by
/// interaction energy, ties broken by index. Within a parity sector the
/// sector basis itself diagonalizes the interaction term, so the result is
/// the identity reordered by energy.
ComplexMatrix interaction_eigenbasis(int n_sites, ParitySector sector = ParitySector::None);

// ---------------------------------------------------------------------------
// Trotterized chain: U = exp(-i tau H_zz) exp(-i tau H_s)
// ---------------------------------------------------------------------------

struct TrotterParams {
  ChainParams chain;
  double tau = 0.0;
};

/// exp(-i tau (X + field Z)) in the (down, up) single-site basis.
Eigen::Matrix2cd single_site_propagator(double field, double tau);

UnitaryMatrix trotter_unitary(const TrotterParams& p, const Tolerances& tol = {});

// ---------------------------------------------------------------------------
// Initial states and spectral weights
// ---------------------------------------------------------------------------

enum class InitialStateKind { AllDown, AllUp, CenterEigenstate, HaarRandom, RandomBasis };

struct InitialStateSpec {
  InitialStateKind kind = InitialStateKind::AllDown;
  double h_value = 0.0;  // field used for CenterEigenstate
};

/// Model context for initial states: chain geometry, or a plain dimension
/// plus seed for Haar-random states.
struct StateContext {
  int n_sites = 0;
  ParitySector parity_sector = ParitySector::None;
  Eigen::Index dim = 0;  // used when n_sites == 0
  std::uint64_t seed = 0;
};

/// Normalized complex Gaussian vector.
ComplexVector haar_random_state(Eigen::Index dim, std::uint64_t seed);

/// Computational basis vector e_j with j uniform in [0, dim).
ComplexVector random_basis_state(Eigen::Index dim, std::uint64_t seed);

/// True for kinds drawn per realization from the seed.
bool is_random_state(InitialStateKind kind);

/// all_down / all_up are computational basis vectors (projected into the
/// sector if one is set). CenterEigenstate diagonalizes the clean chain at
/// h_z = h_value and returns eigenvector floor(D/2) in ascending order.
ComplexVector initial_state(const InitialStateSpec& spec, const StateContext& ctx);

struct SpectralWeight {
  double phase = 0.0;
  double weight = 0.0;
};

/// |<phi_k|psi0>|^2 over the eigenvectors of U (the empirical weight function).
std::vector<SpectralWeight> spectral_weight(const SpectralData& u_spectrum, const ComplexVector& psi0);
std::vector<SpectralWeight> spectral_weight(const UnitaryMatrix& u, const ComplexVector& psi0);

}  // namespace kc
