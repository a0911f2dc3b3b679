#include "krylovchaos/chaostats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace kc {

GapRatioResult r_ratio_mean(std::span<const double> levels, const GapRatioOptions& opts) {
  if (levels.size() < 3) throw Error(ErrorCode::TooFewLevels, "need at least 3 levels");
  for (std::size_t i = 0; i < levels.size(); ++i) {
    if (!std::isfinite(levels[i])) throw Error(ErrorCode::NonFiniteInput, "non-finite level");
    if (i > 0 && levels[i] < levels[i - 1]) {
      throw Error(ErrorCode::OutOfRange, "levels must be sorted ascending");
    }
  }
  const double threshold = opts.degeneracy_rel_tol * (levels.back() - levels.front());

  GapRatioResult out;
  std::vector<double> kept;
  kept.reserve(levels.size());
  kept.push_back(levels.front());
  for (std::size_t i = 1; i < levels.size(); ++i) {
    if (levels[i] - kept.back() <= threshold) {
      if (opts.policy == DegeneracyPolicy::Reject) {
        throw Error(ErrorCode::DegenerateSpectrum,
                    "gap below threshold at level " + std::to_string(i));
      }
      ++out.n_dropped;
      continue;
    }
    kept.push_back(levels[i]);
  }
  if (kept.size() < 3) {
    throw Error(ErrorCode::TooFewLevels, "fewer than 3 distinct levels after degeneracy filtering");
  }

  double sum = 0.0;
  for (std::size_t i = 1; i + 1 < kept.size(); ++i) {
    const double s_prev = kept[i] - kept[i - 1];
    const double s_next = kept[i + 1] - kept[i];
    sum += std::min(s_prev, s_next) / std::max(s_prev, s_next);
  }
  out.n_gaps = kept.size() - 2;
  out.r_mean = sum / static_cast<double>(out.n_gaps);
  out.eta = eta_from_ratio(out.r_mean);
  return out;
}

std::vector<double> central_window(std::span<const double> levels, double fraction) {
  if (!(fraction > 0.0 && fraction <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "window fraction must lie in (0, 1]");
  }
  const std::size_t n = levels.size();
  const auto keep = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
  const std::size_t start = (n - keep) / 2;
  return {levels.begin() + static_cast<std::ptrdiff_t>(start),
          levels.begin() + static_cast<std::ptrdiff_t>(start + keep)};
}

namespace {

void check_component_args(double x, int dim) {
  if (dim < 3) throw Error(ErrorCode::OutOfRange, "GOE component distribution needs D >= 3");
  if (!(x >= 0.0 && x <= 1.0)) throw Error(ErrorCode::OutOfRange, "x must lie in [0, 1]");
}

}  // namespace

double goe_component_cdf(double x, int dim) {
  check_component_args(x, dim);
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  return boost::math::ibeta(0.5, 0.5 * (dim - 1), x);
}

double goe_component_pdf(double x, int dim) {
  check_component_args(x, dim);
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (x == 1.0) return dim == 3 ? 0.5 : 0.0;
  const double d = static_cast<double>(dim);
  const double log_norm = std::lgamma(0.5 * d) - std::lgamma(0.5 * (d - 1.0));
  return std::exp(log_norm - 0.5 * std::log(std::numbers::pi * x) + 0.5 * (d - 3.0) * std::log1p(-x));
}

double ks_sup_distance(std::span<const double> sorted_sample, std::span<const double> cdf_values) {
  if (sorted_sample.empty()) throw Error(ErrorCode::EmptyInput, "empty sample");
  if (sorted_sample.size() != cdf_values.size()) {
    throw Error(ErrorCode::ShapeMismatch, "sample and CDF values differ in length");
  }
  const double n = static_cast<double>(sorted_sample.size());
  double sup = 0.0;
  // Walk groups of tied values so each jump is evaluated once on each side.
  std::size_t i = 0;
  while (i < sorted_sample.size()) {
    std::size_t j = i;
    while (j + 1 < sorted_sample.size() && sorted_sample[j + 1] == sorted_sample[i]) ++j;
    const double cdf = cdf_values[i];
    const double before = static_cast<double>(i) / n;
    const double after = static_cast<double>(j + 1) / n;
    sup = std::max({sup, std::abs(cdf - before), std::abs(after - cdf)});
    i = j + 1;
  }
  return sup;
}

EigenvectorStatsResult delta_ks(const ComplexMatrix& eigvecs, const ComplexMatrix& ref_basis,
                                std::string reference_basis_id, double unitarity_tol) {
  if (eigvecs.rows() != eigvecs.cols() || ref_basis.rows() != ref_basis.cols() ||
      eigvecs.rows() != ref_basis.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "eigenvector and reference bases must be equal square shapes");
  }
  const Eigen::Index d = eigvecs.rows();
  if (d < 3) throw Error(ErrorCode::OutOfRange, "need D >= 3");
  if (unitarity_residual(eigvecs) > unitarity_tol) {
    throw Error(ErrorCode::NonUnitaryBasis, "eigenvector matrix is not unitary");
  }
  if (unitarity_residual(ref_basis) > unitarity_tol) {
    throw Error(ErrorCode::NonUnitaryBasis, "reference basis is not unitary");
  }

  // Row i of `overlaps` holds the components of eigenvector i.
  const Eigen::MatrixXd overlaps = (eigvecs.adjoint() * ref_basis).cwiseAbs2();
  const Eigen::VectorXd row_sums = overlaps.rowwise().sum();
  if ((row_sums.array() - 1.0).abs().maxCoeff() > 1e-10) {
    throw Error(ErrorCode::NonUnitaryBasis, "overlap rows do not sum to one");
  }

  std::vector<double> sample(overlaps.data(), overlaps.data() + overlaps.size());
  std::sort(sample.begin(), sample.end());
  std::vector<double> cdf(sample.size());
  const int dim = static_cast<int>(d);
  for (std::size_t i = 0; i < sample.size(); ++i) {
    // Rounding can push a squared modulus a hair outside [0, 1].
    cdf[i] = goe_component_cdf(std::clamp(sample[i], 0.0, 1.0), dim);
  }

  EigenvectorStatsResult out;
  out.delta_ks = 1.0 - ks_sup_distance(sample, cdf);
  out.n_coefficients = sample.size();
  out.reference_basis_id = std::move(reference_basis_id);
  return out;
}

}  // namespace kc
