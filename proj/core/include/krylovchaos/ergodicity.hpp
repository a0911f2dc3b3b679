#pragma once

#include <optional>
#include <span>

#include "krylovchaos/arnoldi.hpp"

namespace kc {

struct ErgMeasure {
  double erg_inverse = 0.0;  // ||U_erg - U_K||_F / sqrt(2M), in (0, 1]
  double erg = 0.0;          // 1 / erg_inverse
};

struct ErgodicityReport {
  double erg_inverse = 0.0;
  double erg = 0.0;
  Eigen::Index krylov_dim = 0;
  double delta_unif = 0.0;
  std::optional<double> tau_star;
};

/// The pure-shift target: ones on the first subdiagonal, zeros elsewhere
/// (its last column is empty, so it is not unitary).
ComplexMatrix ergodic_target(Eigen::Index m);

/// Distance of the Krylov-basis unitary to the pure-shift form.
ErgMeasure erg_measure(const ComplexMatrix& u_k);

/// Twice the Kolmogorov-Smirnov distance between the empirical CDF of the
/// phases and the uniform CDF on [-pi, pi). Input need not be sorted.
double level_uniformity(std::span<const double> phases);

/// Characteristic time step pi / sigma_E.
double characteristic_time(double spectral_variance);

/// C_t = <K_n|U^t|K_n> for t = 0..t_max, by repeated application of U.
ComplexVector autocorrelator(const UnitaryMatrix& u, const KrylovDecomposition& k, Eigen::Index n,
                             Eigen::Index t_max);

struct SequenceTail {
  double mean_abs_a = 0.0;
  double mean_b = 0.0;
  double mean_abs_c = 0.0;
  Eigen::Index count = 0;
};

/// Means of |a_n|, b_n and |c_n| over the trailing `tail_fraction` of
/// indices. Requires a Krylov dimension of at least 4.
SequenceTail sequence_asymptotics(const KrylovDecomposition& k, double tail_fraction = 0.5);

}  // namespace kc
