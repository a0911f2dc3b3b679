#include "krylovchaos/arnoldi.hpp"

#include <algorithm>
#include <cmath>

namespace kc {

namespace {

constexpr double kUnitNormTolerance = 1e-12;

struct Prepared {
  Eigen::Index dim;
  Eigen::Index max_dim;
  double breakdown_tol;
};

Prepared prepare(const UnitaryMatrix& u, const ComplexVector& psi0, const ArnoldiOptions& opts) {
  const Eigen::Index d = u.dim();
  if (psi0.size() != d) {
    throw Error(ErrorCode::DimensionMismatch, "initial state length " + std::to_string(psi0.size()) +
                                                  " does not match D = " + std::to_string(d));
  }
  if (std::abs(psi0.norm() - 1.0) > kUnitNormTolerance) {
    throw Error(ErrorCode::NonUnitVector, "initial state is not normalized");
  }
  const Eigen::Index max_dim = opts.max_dim.value_or(d);
  if (max_dim < 1 || max_dim > d) {
    throw Error(ErrorCode::DimensionMismatch, "max_dim must lie in [1, D]");
  }
  const double tol = opts.breakdown_tol.value_or(default_breakdown_tol(d));
  if (!(tol > 0.0)) throw Error(ErrorCode::OutOfRange, "breakdown tolerance must be positive");
  return {d, max_dim, tol};
}

void fill_sequences(KrylovDecomposition& k) {
  const Eigen::Index m = k.hessenberg.rows();
  k.seq_a = k.hessenberg.diagonal();
  k.seq_c = k.hessenberg.row(0).transpose();
  k.seq_b.resize(std::max<Eigen::Index>(m - 1, 0));
  for (Eigen::Index n = 0; n + 1 < m; ++n) k.seq_b[n] = k.hessenberg(n + 1, n).real();
}

}  // namespace

double default_breakdown_tol(Eigen::Index dim) {
  return 1e-12 * std::sqrt(static_cast<double>(dim));
}

KrylovDecomposition arnoldi_iterate(const UnitaryMatrix& u, const ComplexVector& psi0,
                                    const ArnoldiOptions& opts) {
  const Prepared p = prepare(u, psi0, opts);
  const ComplexMatrix& op = u.matrix();

  ComplexMatrix q(p.dim, p.max_dim);
  ComplexMatrix h = ComplexMatrix::Zero(p.max_dim, p.max_dim);
  q.col(0) = psi0;

  KrylovDecomposition out;
  Eigen::Index built = p.max_dim;
  ComplexVector w(p.dim);
  for (Eigen::Index n = 0; n < p.max_dim; ++n) {
    w.noalias() = op * q.col(n);
    const auto prev = q.leftCols(n + 1);
    ComplexVector coeffs = prev.adjoint() * w;
    w.noalias() -= prev * coeffs;
    // Second pass: "twice is enough".
    const ComplexVector correction = prev.adjoint() * w;
    w.noalias() -= prev * correction;
    coeffs += correction;
    h.col(n).head(n + 1) = coeffs;

    if (n + 1 == p.max_dim) break;
    const double beta = w.norm();
    if (beta < p.breakdown_tol) {
      built = n + 1;
      out.terminated_early = true;
      out.termination_norm = beta;
      break;
    }
    h(n + 1, n) = beta;
    q.col(n + 1) = w / beta;
  }

  out.basis = q.leftCols(built);
  out.hessenberg = h.topLeftCorner(built, built);
  fill_sequences(out);
  return out;
}

KrylovDecomposition brute_force_krylov(const UnitaryMatrix& u, const ComplexVector& psi0,
                                       const ArnoldiOptions& opts) {
  const Prepared p = prepare(u, psi0, opts);
  const ComplexMatrix& op = u.matrix();

  ComplexMatrix q(p.dim, p.max_dim);
  KrylovDecomposition out;
  Eigen::Index built = p.max_dim;
  ComplexVector power = psi0;  // U^t |psi0>
  for (Eigen::Index t = 0; t < p.max_dim; ++t) {
    if (t == 0) {
      q.col(0) = psi0;
    } else {
      power = op * power;
      ComplexVector v = power;
      for (int pass = 0; pass < 2; ++pass) {
        for (Eigen::Index l = 0; l < t; ++l) v -= q.col(l).dot(v) * q.col(l);
      }
      const double norm = v.norm();
      if (norm < p.breakdown_tol) {
        built = t;
        out.terminated_early = true;
        out.termination_norm = norm;
        break;
      }
      q.col(t) = v / norm;
    }
  }

  out.basis = q.leftCols(built);
  out.hessenberg = out.basis.adjoint() * (op * out.basis);
  fill_sequences(out);
  return out;
}

double verify_sequence_identity(const KrylovDecomposition& k) {
  const Eigen::Index m = k.hessenberg.rows();
  double worst = 0.0;
  for (Eigen::Index n = 0; n < m; ++n) {
    for (Eigen::Index r = 0; r <= n; ++r) {
      const double residual = std::abs(k.hessenberg(r, n) * k.seq_c[r] - k.seq_a[r] * k.seq_c[n]);
      worst = std::max(worst, residual);
    }
  }
  return worst;
}

ComplexMatrix alpha_coefficients(const KrylovDecomposition& k, const UnitaryMatrix& u,
                                 const ComplexVector& psi0) {
  const Eigen::Index m = k.krylov_dim();
  if (psi0.size() != k.dim() || u.dim() != k.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "decomposition, unitary and state disagree on D");
  }
  ComplexMatrix powers(k.dim(), m);
  powers.col(0) = psi0;
  for (Eigen::Index t = 1; t < m; ++t) powers.col(t) = u.matrix() * powers.col(t - 1);

  // beta(n, t) = <K_n|psi_t> is upper triangular; alpha^T is its inverse.
  const ComplexMatrix beta = k.basis.adjoint() * powers;
  const ComplexMatrix inverse = beta.triangularView<Eigen::Upper>().solve(ComplexMatrix::Identity(m, m));
  if (!inverse.allFinite()) {
    throw Error(ErrorCode::IllConditioned, "power sequence is numerically dependent");
  }
  ComplexMatrix alpha = inverse.transpose();
  alpha.triangularView<Eigen::StrictlyUpper>().setZero();
  return alpha;
}

KrylovResiduals structural_residuals(const KrylovDecomposition& k, const UnitaryMatrix& u) {
  KrylovResiduals r;
  const Eigen::Index m = k.krylov_dim();
  r.orthonormality = max_norm(k.basis.adjoint() * k.basis - ComplexMatrix::Identity(m, m));
  const ComplexMatrix explicit_elements = k.basis.adjoint() * (u.matrix() * k.basis);
  for (Eigen::Index n = 0; n < m; ++n) {
    for (Eigen::Index row = n + 2; row < m; ++row) {
      r.hessenberg_zeros = std::max(r.hessenberg_zeros, std::abs(explicit_elements(row, n)));
    }
  }
  r.sequence_identity = verify_sequence_identity(k);
  r.max_entry = max_norm(k.hessenberg);
  r.max_column_norm = m == 0 ? 0.0 : k.hessenberg.colwise().norm().maxCoeff();
  return r;
}

}  // namespace kc
