#include "krylovchaos/matrixcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Eigenvalues>

namespace kc {

namespace {

void require_square(const ComplexMatrix& m, const char* what) {
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw Error(ErrorCode::NonSquareInput, std::string(what) + " must be square and non-empty");
  }
}

// Permutes (values, vectors) so that values ascend. Stable so equal values
// keep solver order.
void sort_spectrum(RealVector& values, ComplexMatrix& vectors) {
  const Eigen::Index n = values.size();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) { return values[a] < values[b]; });
  RealVector sorted_values(n);
  ComplexMatrix sorted_vectors(vectors.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    sorted_values[k] = values[order[static_cast<std::size_t>(k)]];
    sorted_vectors.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  values = std::move(sorted_values);
  vectors = std::move(sorted_vectors);
}

}  // namespace

double max_norm(const ComplexMatrix& m) {
  return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

double unitarity_residual(const ComplexMatrix& m) {
  const ComplexMatrix gram = m.adjoint() * m;
  return max_norm(gram - ComplexMatrix::Identity(gram.rows(), gram.cols()));
}

double hermiticity_residual(const ComplexMatrix& m) {
  return max_norm(m - m.adjoint());
}

bool all_finite(const ComplexMatrix& m) {
  return m.allFinite();
}

double wrap_phase(double phi) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(phi + std::numbers::pi, two_pi);
  if (r < 0.0) r += two_pi;
  r -= std::numbers::pi;
  // fmod can land exactly on +pi after the shift back through rounding.
  if (r >= std::numbers::pi) r -= two_pi;
  return r;
}

UnitaryMatrix UnitaryMatrix::certify(ComplexMatrix m, double tolerance) {
  require_square(m, "unitary");
  if (!all_finite(m)) throw Error(ErrorCode::NonFiniteInput, "unitary has non-finite entries");
  const double residual = unitarity_residual(m);
  if (!(residual <= tolerance)) {
    throw Error(ErrorCode::NonUnitaryInput,
                "||U^dagger U - I||_max = " + std::to_string(residual) + " exceeds tolerance");
  }
  return UnitaryMatrix(std::move(m), residual);
}

double population_variance(const RealVector& v) {
  if (v.size() == 0) return 0.0;
  const double mean = v.mean();
  return (v.array() - mean).square().mean();
}

SpectralData hermitian_eigendecompose(const ComplexMatrix& h, const Tolerances& tol) {
  require_square(h, "Hamiltonian");
  if (!all_finite(h)) throw Error(ErrorCode::NonFiniteInput, "Hamiltonian has non-finite entries");
  const double asym = hermiticity_residual(h);
  if (!(asym <= tol.hermiticity)) {
    throw Error(ErrorCode::NonHermitianInput,
                "||H - H^dagger||_max = " + std::to_string(asym));
  }

  SpectralData out;
  out.kind = SpectrumKind::Energies;
  if (h.imag().cwiseAbs().maxCoeff() == 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h.real());
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::ConvergenceFailure, "real symmetric eigensolver did not converge");
    }
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors().cast<Complex>();
  } else {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
    if (solver.info() != Eigen::Success) {
      throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
    }
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
  }
  // Eigen already returns ascending order; the stable sort is a no-op guard.
  sort_spectrum(out.values, out.vectors);
  out.spectral_variance = population_variance(out.values);
  return out;
}

UnitaryMatrix unitary_from_spectrum(const SpectralData& h_spectrum, double tau,
                                    const Tolerances& tol) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::OutOfRange, "time step tau must be positive and finite");
  }
  if (h_spectrum.kind != SpectrumKind::Energies) {
    throw Error(ErrorCode::DimensionMismatch, "expected an energy spectrum");
  }
  const Eigen::Index d = h_spectrum.dim();
  ComplexVector phases(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    phases[k] = std::polar(1.0, -tau * h_spectrum.values[k]);
  }
  const auto& v = h_spectrum.vectors;
  ComplexMatrix u = v * phases.asDiagonal() * v.adjoint();
  return UnitaryMatrix::certify(std::move(u), tol.unitarity);
}

UnitaryMatrix unitary_from_hamiltonian(const ComplexMatrix& h, double tau, const Tolerances& tol) {
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw Error(ErrorCode::OutOfRange, "time step tau must be positive and finite");
  }
  return unitary_from_spectrum(hermitian_eigendecompose(h, tol), tau, tol);
}

SpectralData phases_from_spectrum(const SpectralData& h_spectrum, double tau) {
  if (h_spectrum.kind != SpectrumKind::Energies) {
    throw Error(ErrorCode::DimensionMismatch, "expected an energy spectrum");
  }
  SpectralData out;
  out.kind = SpectrumKind::Phases;
  out.values.resize(h_spectrum.dim());
  for (Eigen::Index k = 0; k < h_spectrum.dim(); ++k) {
    out.values[k] = wrap_phase(-tau * h_spectrum.values[k]);
  }
  out.vectors = h_spectrum.vectors;
  sort_spectrum(out.values, out.vectors);
  out.spectral_variance = population_variance(out.values);
  return out;
}

SpectralData unitary_eigenphases_schur(const UnitaryMatrix& u, const Tolerances& tol) {
  Eigen::ComplexSchur<ComplexMatrix> schur(u.matrix(), /*computeU=*/true);
  if (schur.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "complex Schur decomposition did not converge");
  }
  const ComplexMatrix& t = schur.matrixT();
  const Eigen::Index d = t.rows();
  double off_diagonal = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) off_diagonal = std::max(off_diagonal, std::abs(t(i, j)));
  }
  // A normal matrix has a diagonal Schur form; anything larger means the
  // input was not unitary to working precision.
  if (off_diagonal > 100.0 * tol.unitarity) {
    throw Error(ErrorCode::ConvergenceFailure,
                "Schur form not diagonal (" + std::to_string(off_diagonal) + ")");
  }

  SpectralData out;
  out.kind = SpectrumKind::Phases;
  out.values.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) out.values[k] = wrap_phase(std::arg(t(k, k)));
  out.vectors = schur.matrixU();
  sort_spectrum(out.values, out.vectors);
  out.spectral_variance = population_variance(out.values);
  return out;
}

namespace {

Eigen::Index find_root(std::vector<Eigen::Index>& parent, Eigen::Index i) {
  while (parent[static_cast<std::size_t>(i)] != i) {
    auto& p = parent[static_cast<std::size_t>(i)];
    p = parent[static_cast<std::size_t>(p)];
    i = p;
  }
  return i;
}

}  // namespace

SpectralData unitary_eigenphases(const UnitaryMatrix& u, const Tolerances& tol) {
  const ComplexMatrix& m = u.matrix();
  const Eigen::Index d = m.rows();
  // Irrational rotation so that eigenphase pairs mirrored about it are rare.
  const Complex rot = std::polar(1.0, -0.6180339887498949);
  const ComplexMatrix b = (rot * m + std::conj(rot) * m.adjoint()) * 0.5;
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(b);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::ConvergenceFailure, "Hermitian eigensolver did not converge");
  }
  ComplexMatrix v = solver.eigenvectors();
  ComplexMatrix t = v.adjoint() * (m * v);

  // Columns coupled through V^dagger U V belong to (near-)degenerate
  // clusters of the Hermitian part.
  constexpr double kClusterTol = 1e-10;
  std::vector<Eigen::Index> parent(static_cast<std::size_t>(d));
  std::iota(parent.begin(), parent.end(), Eigen::Index{0});
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i != j && std::abs(t(i, j)) > kClusterTol) {
        parent[static_cast<std::size_t>(find_root(parent, i))] = find_root(parent, j);
      }
    }
  }
  std::vector<std::vector<Eigen::Index>> clusters(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) clusters[static_cast<std::size_t>(find_root(parent, i))].push_back(i);

  bool refined = false;
  for (const auto& cluster : clusters) {
    if (cluster.size() < 2) continue;
    const auto n = static_cast<Eigen::Index>(cluster.size());
    ComplexMatrix block(n, n);
    ComplexMatrix cols(d, n);
    for (Eigen::Index a = 0; a < n; ++a) {
      cols.col(a) = v.col(cluster[static_cast<std::size_t>(a)]);
      for (Eigen::Index c = 0; c < n; ++c) {
        block(a, c) = t(cluster[static_cast<std::size_t>(a)], cluster[static_cast<std::size_t>(c)]);
      }
    }
    Eigen::ComplexSchur<ComplexMatrix> schur(block, /*computeU=*/true);
    if (schur.info() != Eigen::Success) {
      throw Error(ErrorCode::ConvergenceFailure, "Schur decomposition of a degenerate cluster failed");
    }
    const ComplexMatrix rotated = cols * schur.matrixU();
    for (Eigen::Index a = 0; a < n; ++a) v.col(cluster[static_cast<std::size_t>(a)]) = rotated.col(a);
    refined = true;
  }
  if (refined) t = v.adjoint() * (m * v);

  double off_diagonal = 0.0;
  for (Eigen::Index j = 0; j < d; ++j) {
    for (Eigen::Index i = 0; i < d; ++i) {
      if (i != j) off_diagonal = std::max(off_diagonal, std::abs(t(i, j)));
    }
  }
  if (off_diagonal > 100.0 * tol.unitarity) {
    throw Error(ErrorCode::ConvergenceFailure,
                "V^dagger U V not diagonal (" + std::to_string(off_diagonal) + ")");
  }

  SpectralData out;
  out.kind = SpectrumKind::Phases;
  out.values.resize(d);
  for (Eigen::Index k = 0; k < d; ++k) out.values[k] = wrap_phase(std::arg(t(k, k)));
  out.vectors = std::move(v);
  sort_spectrum(out.values, out.vectors);
  out.spectral_variance = population_variance(out.values);
  return out;
}

double frobenius_distance(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "frobenius_distance operands differ in shape");
  }
  return (a - b).norm();
}

}  // namespace kc
