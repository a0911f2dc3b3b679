#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "krylovchaos/matrixcore.hpp"

namespace kc {

/// Mean gap ratio of an uncorrelated (Poisson) spectrum.
inline constexpr double kPoissonRatio = 0.38629;
/// Mean gap ratio of the Gaussian orthogonal ensemble.
inline constexpr double kGoeRatio = 0.53590;

/// Affine normalization of <r>: 0 for Poisson, 1 for GOE. Not clamped.
constexpr double eta_from_ratio(double r_mean) {
  return (r_mean - kPoissonRatio) / (kGoeRatio - kPoissonRatio);
}

struct GapRatioResult {
  double r_mean = 0.0;
  double eta = 0.0;
  std::size_t n_gaps = 0;     // number of ratios averaged
  std::size_t n_dropped = 0;  // levels removed as exact degeneracies
};

enum class DegeneracyPolicy {
  Drop,    // remove the duplicate level and count it
  Reject,  // throw DegenerateSpectrum
};

struct GapRatioOptions {
  double degeneracy_rel_tol = 1e-12;  // relative to the spectral range
  DegeneracyPolicy policy = DegeneracyPolicy::Drop;
};

/// Mean of min(s_n, s_{n-1}) / max(s_n, s_{n-1}) over sorted levels, using
/// linear spacings only (no wrap-around gap for phases).
GapRatioResult r_ratio_mean(std::span<const double> levels, const GapRatioOptions& opts = {});

/// Central `fraction` of a sorted spectrum.
std::vector<double> central_window(std::span<const double> levels, double fraction);

/// CDF of a squared eigenvector component of a D-dimensional GOE matrix,
/// i.e. the regularized incomplete beta function I_x(1/2, (D-1)/2).
double goe_component_cdf(double x, int dim);

/// Density matching goe_component_cdf.
double goe_component_pdf(double x, int dim);

struct EigenvectorStatsResult {
  double delta_ks = 0.0;            // 1 - sup |eCDF - CDF|
  std::size_t n_coefficients = 0;
  std::string reference_basis_id;
};

/// Kolmogorov-Smirnov supremum between a sample and a continuous CDF,
/// evaluated on both sides of each jump. `cdf_values` holds the CDF at the
/// sorted sample points.
double ks_sup_distance(std::span<const double> sorted_sample, std::span<const double> cdf_values);

/// Pools |<phi_j|psi_i>|^2 over all pairs and compares them to the GOE
/// component distribution.
EigenvectorStatsResult delta_ks(const ComplexMatrix& eigvecs, const ComplexMatrix& ref_basis,
                                std::string reference_basis_id = "custom",
                                double unitarity_tol = 1e-9);

}  // namespace kc
