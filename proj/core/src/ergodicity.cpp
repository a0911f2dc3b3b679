#include "krylovchaos/ergodicity.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace kc {

ComplexMatrix ergodic_target(Eigen::Index m) {
  ComplexMatrix target = ComplexMatrix::Zero(m, m);
  for (Eigen::Index n = 0; n + 1 < m; ++n) target(n + 1, n) = 1.0;
  return target;
}

ErgMeasure erg_measure(const ComplexMatrix& u_k) {
  if (u_k.rows() != u_k.cols() || u_k.rows() == 0) {
    throw Error(ErrorCode::NonSquareInput, "Krylov unitary must be square and non-empty");
  }
  const Eigen::Index m = u_k.rows();
  ErgMeasure out;
  out.erg_inverse = frobenius_distance(ergodic_target(m), u_k) / std::sqrt(2.0 * static_cast<double>(m));
  out.erg = 1.0 / out.erg_inverse;
  return out;
}

double level_uniformity(std::span<const double> phases) {
  if (phases.empty()) throw Error(ErrorCode::EmptyInput, "no phases");
  std::vector<double> sorted(phases.begin(), phases.end());
  for (double p : sorted) {
    if (!(p >= -std::numbers::pi && p < std::numbers::pi)) {
      throw Error(ErrorCode::OutOfRange, "phase outside [-pi, pi)");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double sup = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double uniform = (sorted[i] + std::numbers::pi) / (2.0 * std::numbers::pi);
    const double above = static_cast<double>(i + 1) / n - uniform;
    const double below = uniform - static_cast<double>(i) / n;
    sup = std::max({sup, above, below});
  }
  return 2.0 * sup;
}

double characteristic_time(double spectral_variance) {
  if (!(spectral_variance > 0.0)) {
    throw Error(ErrorCode::DegenerateRange, "spectral variance must be positive");
  }
  return std::numbers::pi / std::sqrt(spectral_variance);
}

ComplexVector autocorrelator(const UnitaryMatrix& u, const KrylovDecomposition& k, Eigen::Index n,
                             Eigen::Index t_max) {
  if (n < 0 || n >= k.krylov_dim()) {
    throw Error(ErrorCode::IndexOutOfRange, "Krylov index " + std::to_string(n) + " out of range");
  }
  if (t_max < 0) throw Error(ErrorCode::OutOfRange, "t_max must be non-negative");
  if (u.dim() != k.dim()) throw Error(ErrorCode::DimensionMismatch, "unitary and basis disagree on D");

  const auto krylov_state = k.basis.col(n);
  ComplexVector evolved = krylov_state;
  ComplexVector out(t_max + 1);
  out[0] = krylov_state.dot(evolved);
  ComplexVector scratch(evolved.size());
  for (Eigen::Index t = 1; t <= t_max; ++t) {
    scratch.noalias() = u.matrix() * evolved;
    evolved.swap(scratch);
    out[t] = krylov_state.dot(evolved);
  }
  return out;
}

SequenceTail sequence_asymptotics(const KrylovDecomposition& k, double tail_fraction) {
  const Eigen::Index m = k.krylov_dim();
  if (m < 4) {
    throw Error(ErrorCode::InsufficientDimension, "sequence asymptotics need krylov_dim >= 4");
  }
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw Error(ErrorCode::OutOfRange, "tail_fraction must lie in (0, 1]");
  }
  const auto tail_len = [tail_fraction](Eigen::Index len) {
    const auto count = static_cast<Eigen::Index>(std::ceil(tail_fraction * static_cast<double>(len)));
    return std::clamp<Eigen::Index>(count, 1, len);
  };

  SequenceTail out;
  const Eigen::Index na = tail_len(m);
  out.count = na;
  out.mean_abs_a = k.seq_a.tail(na).cwiseAbs().mean();
  out.mean_abs_c = k.seq_c.tail(na).cwiseAbs().mean();
  const Eigen::Index nb = tail_len(k.seq_b.size());
  out.mean_b = k.seq_b.tail(nb).mean();
  return out;
}

}  // namespace kc
