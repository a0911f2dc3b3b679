#include "krylovchaos/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "krylovchaos/seeding.hpp"

namespace kc {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

void check_sites(int n_sites) {
  if (n_sites < 1 || n_sites > kMaxChainSites) {
    throw Error(ErrorCode::OutOfRange,
                "chain length must lie in [1, " + std::to_string(kMaxChainSites) + "]");
  }
}

inline double spin(std::uint32_t state, int site) {
  return ((state >> site) & 1U) ? 1.0 : -1.0;
}

double zz_energy(std::uint32_t state, int n_sites) {
  double e = 0.0;
  for (int i = 0; i + 1 < n_sites; ++i) e -= spin(state, i) * spin(state, i + 1);
  return e;
}

double diagonal_energy(std::uint32_t state, int n_sites, double h_z, const std::vector<double>& delta) {
  double e = zz_energy(state, n_sites);
  for (int i = 0; i < n_sites; ++i) e += h_z * delta[static_cast<std::size_t>(i)] * spin(state, i);
  return e;
}

}  // namespace

// ----------------------------------------------------------------------------- RMT

double RmtParams::coupling() const {
  if (dim < 1 || !(lambda >= 0.0)) {
    throw Error(ErrorCode::OutOfRange, "RMT parameters need dim >= 1 and lambda >= 0");
  }
  return std::sqrt(2.0 * std::numbers::pi * lambda / static_cast<double>(dim));
}

ComplexMatrix rmt_hamiltonian(const RmtParams& p) {
  if (p.dim < 2) throw Error(ErrorCode::OutOfRange, "RMT dimension must be at least 2");
  const double k = p.coupling();
  const auto d = static_cast<Eigen::Index>(p.dim);
  const double off_sigma = 1.0 / std::sqrt(static_cast<double>(d));
  const double diag_sigma = std::sqrt(2.0) * off_sigma;

  auto engine = make_engine(p.seed, Stream::Hamiltonian);
  std::normal_distribution<double> normal(0.0, 1.0);

  Eigen::VectorXd h0(d);
  for (Eigen::Index i = 0; i < d; ++i) h0[i] = normal(engine);

  Eigen::MatrixXd v(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    v(i, i) = diag_sigma * normal(engine);
    for (Eigen::Index j = i + 1; j < d; ++j) {
      v(i, j) = off_sigma * normal(engine);
      v(j, i) = v(i, j);
    }
  }

  Eigen::MatrixXd h = k * v;
  h.diagonal() += h0;
  h /= std::sqrt(1.0 + k * k);
  return h.cast<Complex>();
}

// ----------------------------------------------------------------------------- chain

std::vector<double> chain_disorder(const ChainParams& p) {
  check_sites(p.n_sites);
  if (!(p.disorder_sigma >= 0.0)) throw Error(ErrorCode::OutOfRange, "disorder sigma must be >= 0");
  std::vector<double> delta(static_cast<std::size_t>(p.n_sites), 1.0);
  if (p.disorder_sigma == 0.0) return delta;
  auto engine = make_engine(p.seed, Stream::Disorder);
  std::normal_distribution<double> normal(1.0, p.disorder_sigma);
  for (double& d : delta) d = normal(engine);
  return delta;
}

std::uint32_t reverse_sites(std::uint32_t state, int n_sites) {
  std::uint32_t out = 0;
  for (int i = 0; i < n_sites; ++i) {
    if ((state >> i) & 1U) out |= 1U << (n_sites - 1 - i);
  }
  return out;
}

Eigen::Index parity_sector_dim(int n_sites, ParitySector sector) {
  check_sites(n_sites);
  const Eigen::Index full = Eigen::Index{1} << n_sites;
  const Eigen::Index palindromes = Eigen::Index{1} << ((n_sites + 1) / 2);
  switch (sector) {
    case ParitySector::None: return full;
    case ParitySector::Positive: return (full + palindromes) / 2;
    case ParitySector::Negative: return (full - palindromes) / 2;
  }
  return full;
}

ParityBasis::ParityBasis(int n_sites, ParitySector sector)
    : n_sites_(n_sites), sector_(sector), full_dim_(Eigen::Index{1} << n_sites) {
  check_sites(n_sites);
  column_of_.assign(static_cast<std::size_t>(full_dim_), -1);
  for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(full_dim_); ++s) {
    const std::uint32_t r = reverse_sites(s, n_sites);
    bool include = false;
    switch (sector) {
      case ParitySector::None: include = true; break;
      case ParitySector::Positive: include = s <= r; break;
      case ParitySector::Negative: include = s < r; break;
    }
    if (!include) continue;
    const auto column = static_cast<Eigen::Index>(reps_.size());
    reps_.push_back(s);
    column_of_[s] = column;
    if (sector != ParitySector::None && r != s) column_of_[r] = column;
  }
}

double ParityBasis::coefficient(std::uint32_t s) const {
  if (column_of_[s] < 0) return 0.0;
  if (sector_ == ParitySector::None) return 1.0;
  const std::uint32_t r = reverse_sites(s, n_sites_);
  if (r == s) return 1.0;
  if (sector_ == ParitySector::Positive) return kInvSqrt2;
  return s < r ? kInvSqrt2 : -kInvSqrt2;
}

ComplexMatrix ParityBasis::isometry() const {
  ComplexMatrix p = ComplexMatrix::Zero(full_dim_, dim());
  for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(full_dim_); ++s) {
    if (column_of_[s] >= 0) p(s, column_of_[s]) = coefficient(s);
  }
  return p;
}

ComplexMatrix ParityBasis::project(const ComplexMatrix& full) const {
  if (full.rows() != full_dim_ || full.cols() != full_dim_) {
    throw Error(ErrorCode::ShapeMismatch, "operator does not act on the full chain space");
  }
  if (sector_ == ParitySector::None) return full;
  ComplexMatrix out = ComplexMatrix::Zero(dim(), dim());
  for (Eigen::Index col_state = 0; col_state < full_dim_; ++col_state) {
    const Eigen::Index b = column_of_[static_cast<std::size_t>(col_state)];
    if (b < 0) continue;
    const double cb = coefficient(static_cast<std::uint32_t>(col_state));
    for (Eigen::Index row_state = 0; row_state < full_dim_; ++row_state) {
      const Eigen::Index a = column_of_[static_cast<std::size_t>(row_state)];
      if (a < 0) continue;
      out(a, b) += coefficient(static_cast<std::uint32_t>(row_state)) * cb * full(row_state, col_state);
    }
  }
  return out;
}

ComplexVector ParityBasis::project(const ComplexVector& full) const {
  if (full.size() != full_dim_) throw Error(ErrorCode::ShapeMismatch, "vector length is not 2^N");
  if (sector_ == ParitySector::None) return full;
  ComplexVector out = ComplexVector::Zero(dim());
  for (Eigen::Index s = 0; s < full_dim_; ++s) {
    const Eigen::Index a = column_of_[static_cast<std::size_t>(s)];
    if (a >= 0) out[a] += coefficient(static_cast<std::uint32_t>(s)) * full[s];
  }
  return out;
}

ComplexMatrix parity_operator(int n_sites) {
  check_sites(n_sites);
  const Eigen::Index d = Eigen::Index{1} << n_sites;
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  for (std::uint32_t s = 0; s < static_cast<std::uint32_t>(d); ++s) p(reverse_sites(s, n_sites), s) = 1.0;
  return p;
}

ComplexMatrix chain_hamiltonian(const ChainParams& p) {
  check_sites(p.n_sites);
  if (p.parity_sector != ParitySector::None && p.disorder_sigma > 0.0) {
    throw Error(ErrorCode::ParityWithDisorder, "disorder breaks site-reversal symmetry");
  }
  const std::vector<double> delta = chain_disorder(p);
  const ParityBasis basis(p.n_sites, p.parity_sector);
  const Eigen::Index dim = basis.dim();

  // Assemble column by column from the sparse action of H on each
  // component of the sector basis vector; H is real.
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    const std::uint32_t rep = basis.representative(b);
    const std::uint32_t rev = reverse_sites(rep, p.n_sites);
    std::uint32_t components[2] = {rep, rev};
    const int n_components = (basis.sector() == ParitySector::None || rev == rep) ? 1 : 2;
    for (int c = 0; c < n_components; ++c) {
      const std::uint32_t s = components[c];
      const double cs = basis.coefficient(s);
      h(b, b) += cs * basis.coefficient(s) * diagonal_energy(s, p.n_sites, p.h_z, delta);
      for (int site = 0; site < p.n_sites; ++site) {
        const std::uint32_t t = s ^ (1U << site);
        const Eigen::Index a = basis.column_of(t);
        if (a >= 0) h(a, b) += basis.coefficient(t) * cs;
      }
    }
  }
  return h.cast<Complex>();
}

RealVector interaction_energies(int n_sites) {
  check_sites(n_sites);
  const Eigen::Index d = Eigen::Index{1} << n_sites;
  RealVector e(d);
  for (Eigen::Index s = 0; s < d; ++s) e[s] = zz_energy(static_cast<std::uint32_t>(s), n_sites);
  return e;
}

ComplexMatrix interaction_eigenbasis(int n_sites, ParitySector sector) {
  const RealVector energies = interaction_energies(n_sites);
  const ParityBasis basis(n_sites, sector);
  const Eigen::Index d = basis.dim();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return energies[basis.representative(a)] < energies[basis.representative(b)];
  });
  ComplexMatrix out = ComplexMatrix::Zero(d, d);
  for (Eigen::Index k = 0; k < d; ++k) out(order[static_cast<std::size_t>(k)], k) = 1.0;
  return out;
}

// ----------------------------------------------------------------------------- Trotter

Eigen::Matrix2cd single_site_propagator(double field, double tau) {
  const double r = std::sqrt(1.0 + field * field);
  const double c = std::cos(tau * r);
  const double s = std::sin(tau * r) / r;
  const Complex i(0.0, 1.0);
  Eigen::Matrix2cd g;
  // Z = diag(-1, +1) in the (down, up) ordering.
  g << c + i * s * field, -i * s,
       -i * s, c - i * s * field;
  return g;
}

UnitaryMatrix trotter_unitary(const TrotterParams& p, const Tolerances& tol) {
  const ChainParams& chain = p.chain;
  check_sites(chain.n_sites);
  if (!(p.tau > 0.0)) throw Error(ErrorCode::OutOfRange, "Trotter step must be positive");
  if (chain.parity_sector != ParitySector::None && chain.disorder_sigma > 0.0) {
    throw Error(ErrorCode::ParityWithDisorder, "disorder breaks site-reversal symmetry");
  }
  const std::vector<double> delta = chain_disorder(chain);
  const int n = chain.n_sites;
  const Eigen::Index d = Eigen::Index{1} << n;

  std::vector<Eigen::Matrix2cd> gates;
  gates.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    gates.push_back(single_site_propagator(chain.h_z * delta[static_cast<std::size_t>(i)], p.tau));
  }

  ComplexMatrix u(d, d);
  for (Eigen::Index col = 0; col < d; ++col) {
    for (Eigen::Index row = 0; row < d; ++row) {
      Complex amp(1.0, 0.0);
      for (int i = 0; i < n; ++i) amp *= gates[static_cast<std::size_t>(i)]((row >> i) & 1, (col >> i) & 1);
      u(row, col) = amp;
    }
  }
  for (Eigen::Index row = 0; row < d; ++row) {
    u.row(row) *= std::polar(1.0, -p.tau * zz_energy(static_cast<std::uint32_t>(row), n));
  }

  if (chain.parity_sector != ParitySector::None) {
    u = ParityBasis(n, chain.parity_sector).project(u);
  }
  return UnitaryMatrix::certify(std::move(u), tol.unitarity);
}

// ----------------------------------------------------------------------------- states

ComplexVector haar_random_state(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorCode::OutOfRange, "state dimension must be positive");
  auto engine = make_engine(seed, Stream::InitialState);
  std::normal_distribution<double> normal(0.0, 1.0);
  ComplexVector v(dim);
  for (Eigen::Index i = 0; i < dim; ++i) {
    const double re = normal(engine);
    const double im = normal(engine);
    v[i] = Complex(re, im);
  }
  return v / v.norm();
}

ComplexVector random_basis_state(Eigen::Index dim, std::uint64_t seed) {
  if (dim < 1) throw Error(ErrorCode::OutOfRange, "state dimension must be positive");
  auto engine = make_engine(seed, Stream::InitialState);
  std::uniform_int_distribution<Eigen::Index> pick(0, dim - 1);
  ComplexVector v = ComplexVector::Zero(dim);
  v[pick(engine)] = 1.0;
  return v;
}

bool is_random_state(InitialStateKind kind) {
  return kind == InitialStateKind::HaarRandom || kind == InitialStateKind::RandomBasis;
}

namespace {

ComplexVector chain_basis_state(const StateContext& ctx, std::uint32_t state) {
  const ParityBasis basis(ctx.n_sites, ctx.parity_sector);
  const Eigen::Index column = basis.column_of(state);
  if (column < 0) {
    throw Error(ErrorCode::DimensionMismatch, "basis state has no component in the parity sector");
  }
  ComplexVector v = ComplexVector::Zero(basis.dim());
  v[column] = 1.0;
  return v;
}

}  // namespace

ComplexVector initial_state(const InitialStateSpec& spec, const StateContext& ctx) {
  if (is_random_state(spec.kind)) {
    const Eigen::Index dim = ctx.n_sites > 0 ? parity_sector_dim(ctx.n_sites, ctx.parity_sector) : ctx.dim;
    return spec.kind == InitialStateKind::HaarRandom ? haar_random_state(dim, ctx.seed)
                                                     : random_basis_state(dim, ctx.seed);
  }
  if (ctx.n_sites <= 0) {
    throw Error(ErrorCode::ConfigError, "chain initial states need a chain context");
  }
  switch (spec.kind) {
    case InitialStateKind::AllDown: return chain_basis_state(ctx, 0U);
    case InitialStateKind::AllUp: return chain_basis_state(ctx, (1U << ctx.n_sites) - 1U);
    case InitialStateKind::CenterEigenstate: {
      ChainParams clean;
      clean.n_sites = ctx.n_sites;
      clean.h_z = spec.h_value;
      clean.parity_sector = ctx.parity_sector;
      const SpectralData spectrum = hermitian_eigendecompose(chain_hamiltonian(clean));
      return spectrum.vectors.col(spectrum.dim() / 2);
    }
    case InitialStateKind::HaarRandom:
    case InitialStateKind::RandomBasis: break;
  }
  throw Error(ErrorCode::ConfigError, "unknown initial state kind");
}

std::vector<SpectralWeight> spectral_weight(const SpectralData& u_spectrum, const ComplexVector& psi0) {
  if (psi0.size() != u_spectrum.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "state length does not match the spectrum");
  }
  const Eigen::VectorXd weights = (u_spectrum.vectors.adjoint() * psi0).cwiseAbs2();
  std::vector<SpectralWeight> out(static_cast<std::size_t>(weights.size()));
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    out[static_cast<std::size_t>(k)] = {u_spectrum.values[k], weights[k]};
  }
  return out;
}

std::vector<SpectralWeight> spectral_weight(const UnitaryMatrix& u, const ComplexVector& psi0) {
  if (std::abs(psi0.norm() - 1.0) > 1e-12) throw Error(ErrorCode::NonUnitVector, "state is not normalized");
  return spectral_weight(unitary_eigenphases(u), psi0);
}

}  // namespace kc
