#include "krylovchaos/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numbers>
#include <numeric>
#include <thread>

#include "krylovchaos/chaostats.hpp"
#include "krylovchaos/ergodicity.hpp"
#include "krylovchaos/seeding.hpp"

namespace kc {

Stat Accumulator::finish() const noexcept {
  Stat s;
  s.count = n_;
  if (n_ == 0) return s;
  const double n = static_cast<double>(n_);
  s.mean = sum_ / n;
  if (n_ == 1) {
    s.sem = 0.0;
    return s;
  }
  const double var = std::max(0.0, (sum_sq_ - n * s.mean * s.mean) / (n - 1.0));
  s.sem = std::sqrt(var / n);
  return s;
}

std::uint64_t realization_seed(std::uint64_t master_seed, double grid_value, int realization) {
  return split_seed(master_seed, grid_key(grid_value), static_cast<std::uint64_t>(realization));
}

std::uint64_t unit_seed(const SweepConfig& cfg, double grid_value, int realization) {
  if (cfg.shared_realizations) {
    constexpr std::uint64_t kSharedKey = 0x5348415245440000ULL;
    return split_seed(cfg.master_seed, kSharedKey, static_cast<std::uint64_t>(realization));
  }
  return realization_seed(cfg.master_seed, grid_value, realization);
}

namespace {

struct SweepContext {
  const SweepConfig* cfg = nullptr;
  std::optional<ComplexVector> fixed_psi0;
  std::optional<SpectralData> scan_spectrum;
  std::optional<double> tau_star;
  std::optional<ComplexMatrix> reference_basis;
};

StateContext state_context(const SweepConfig& cfg, std::uint64_t seed) {
  StateContext ctx;
  ctx.seed = seed;
  if (cfg.experiment == Experiment::RmtLambda) {
    ctx.dim = cfg.dim;
  } else {
    ctx.n_sites = cfg.n_sites;
    ctx.parity_sector = cfg.parity_sector;
  }
  return ctx;
}

ChainParams chain_params(const SweepConfig& cfg, double h_z, std::uint64_t seed) {
  ChainParams p;
  p.n_sites = cfg.n_sites;
  p.h_z = h_z;
  p.disorder_sigma = cfg.disorder_sigma;
  p.seed = seed;
  p.parity_sector = cfg.parity_sector;
  return p;
}

SweepContext make_context(const SweepConfig& cfg) {
  SweepContext ctx;
  ctx.cfg = &cfg;
  if (!is_random_state(cfg.initial_state.kind)) {
    ctx.fixed_psi0 = initial_state(cfg.initial_state, state_context(cfg, 0));
  }
  if (cfg.experiment == Experiment::TauScan) {
    ChainParams p = chain_params(cfg, cfg.h_z, cfg.master_seed);
    ctx.scan_spectrum = hermitian_eigendecompose(chain_hamiltonian(p));
    ctx.tau_star = characteristic_time(ctx.scan_spectrum->spectral_variance);
  }
  if (cfg.experiment == Experiment::ChainHz || cfg.experiment == Experiment::TrotterHz) {
    ctx.reference_basis = interaction_eigenbasis(cfg.n_sites, cfg.parity_sector);
  }
  return ctx;
}

ModelInstance instance_for(const SweepContext& ctx, double grid_value, std::uint64_t seed) {
  const SweepConfig& cfg = *ctx.cfg;
  const auto psi0 = [&]() {
    return ctx.fixed_psi0 ? *ctx.fixed_psi0 : initial_state(cfg.initial_state, state_context(cfg, seed));
  };
  switch (cfg.experiment) {
    case Experiment::RmtLambda: {
      RmtParams p{cfg.dim, grid_value, seed};
      SpectralData spectrum = hermitian_eigendecompose(rmt_hamiltonian(p));
      UnitaryMatrix u = unitary_from_spectrum(spectrum, cfg.tau);
      return ModelInstance{std::move(u), psi0(), cfg.tau, std::move(spectrum)};
    }
    case Experiment::ChainHz: {
      SpectralData spectrum = hermitian_eigendecompose(chain_hamiltonian(chain_params(cfg, grid_value, seed)));
      UnitaryMatrix u = unitary_from_spectrum(spectrum, cfg.tau);
      return ModelInstance{std::move(u), psi0(), cfg.tau, std::move(spectrum)};
    }
    case Experiment::TrotterHz: {
      TrotterParams p{chain_params(cfg, grid_value, seed), cfg.tau};
      return ModelInstance{trotter_unitary(p), psi0(), cfg.tau, std::nullopt};
    }
    case Experiment::TauScan: {
      const double tau = grid_value * *ctx.tau_star;
      UnitaryMatrix u = unitary_from_spectrum(*ctx.scan_spectrum, tau);
      return ModelInstance{std::move(u), psi0(), tau, std::nullopt};
    }
  }
  throw Error(ErrorCode::ConfigError, "unknown experiment");
}

GapRatioResult gap_ratio(const SweepConfig& cfg, const RealVector& sorted_levels) {
  std::span<const double> levels(sorted_levels.data(), static_cast<std::size_t>(sorted_levels.size()));
  if (cfg.gap_window == GapWindow::CentralHalf) {
    const std::vector<double> window = central_window(levels, 0.5);
    return r_ratio_mean(window);
  }
  return r_ratio_mean(levels);
}

RealVector folded_phases(const RealVector& energies, double tau) {
  RealVector phases(energies.size());
  for (Eigen::Index k = 0; k < energies.size(); ++k) phases[k] = wrap_phase(-tau * energies[k]);
  return phases;
}

bool is_dump_point(const SweepConfig& cfg, double value) {
  return std::any_of(cfg.dump_points.begin(), cfg.dump_points.end(),
                     [value](double p) { return std::abs(p - value) <= 1e-12 * std::max(1.0, std::abs(p)); });
}

struct UnitOutput {
  Measurement measurement;
  std::optional<SequenceDump> dump;
};

UnitOutput run_unit(const SweepContext& ctx, std::size_t grid_index, int realization, std::uint64_t seed) {
  const SweepConfig& cfg = *ctx.cfg;
  const double value = cfg.grid[grid_index];
  ModelInstance inst = instance_for(ctx, value, seed);

  UnitOutput out;
  Measurement& m = out.measurement;
  RealVector phases;
  switch (cfg.experiment) {
    case Experiment::RmtLambda:
    case Experiment::ChainHz: {
      const GapRatioResult gr = gap_ratio(cfg, inst.h_spectrum->values);
      m.eta = gr.eta;
      m.r_mean = gr.r_mean;
      m.dropped_levels = gr.n_dropped;
      if (ctx.reference_basis) {
        m.delta_ks = delta_ks(inst.h_spectrum->vectors, *ctx.reference_basis, "interaction_zz").delta_ks;
      }
      phases = folded_phases(inst.h_spectrum->values, inst.tau);
      break;
    }
    case Experiment::TrotterHz: {
      const SpectralData spectrum = unitary_eigenphases(inst.unitary);
      const GapRatioResult gr = gap_ratio(cfg, spectrum.values);
      m.eta = gr.eta;
      m.r_mean = gr.r_mean;
      m.dropped_levels = gr.n_dropped;
      m.delta_ks = delta_ks(spectrum.vectors, *ctx.reference_basis, "interaction_zz").delta_ks;
      phases = spectrum.values;
      break;
    }
    case Experiment::TauScan:
      phases = folded_phases(ctx.scan_spectrum->values, inst.tau);
      break;
  }
  m.delta_unif = level_uniformity(std::span<const double>(phases.data(), static_cast<std::size_t>(phases.size())));

  ArnoldiOptions opts;
  opts.max_dim = cfg.krylov_max_dim ? std::optional<Eigen::Index>(std::min(*cfg.krylov_max_dim, inst.unitary.dim()))
                                    : std::nullopt;
  const KrylovDecomposition k = arnoldi_iterate(inst.unitary, inst.psi0, opts);
  const ErgMeasure erg = erg_measure(k.hessenberg);
  m.erg_inverse = erg.erg_inverse;
  m.erg = erg.erg;
  m.krylov_dim = k.krylov_dim();
  m.terminated_early = k.terminated_early;

  if (realization == 0 && is_dump_point(cfg, value)) {
    SequenceDump dump;
    dump.grid_index = grid_index;
    dump.param = value;
    dump.tau = inst.tau;
    dump.json = decomposition_json(k, cfg.dump_basis);
    if (cfg.dump_matrix) dump.unitary = inst.unitary.matrix();
    out.dump = std::move(dump);
  }
  return out;
}

template <class Fn>
void parallel_for(std::size_t n_units, int workers, Fn&& fn) {
  const auto n_threads = static_cast<std::size_t>(std::max(1, workers));
  if (n_threads == 1 || n_units <= 1) {
    for (std::size_t i = 0; i < n_units; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(std::min(n_threads, n_units));
  for (std::size_t t = 0; t < std::min(n_threads, n_units); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < n_units; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

void fill_rescaled_columns(std::vector<SweepRow>& rows) {
  if (rows.size() < 2) return;
  const bool have_eta = std::all_of(rows.begin(), rows.end(), [](const SweepRow& r) { return r.eta.present(); });
  if (!have_eta) return;
  std::vector<double> eta;
  for (const auto& r : rows) eta.push_back(r.eta.mean);

  const auto rescale_column = [&](auto member, auto target) {
    if (!std::all_of(rows.begin(), rows.end(), [&](const SweepRow& r) { return (r.*member).present(); })) return;
    std::vector<double> x;
    for (const auto& r : rows) x.push_back((r.*member).mean);
    try {
      const std::vector<double> scaled = rescale(x, eta);
      for (std::size_t i = 0; i < rows.size(); ++i) rows[i].*target = scaled[i];
    } catch (const Error&) {
      // Flat curve: nothing meaningful to rescale, columns stay empty.
    }
  };
  rescale_column(&SweepRow::erg, &SweepRow::erg_norm);
  rescale_column(&SweepRow::delta_ks, &SweepRow::dks_norm);
}

}  // namespace

ModelInstance build_instance(const SweepConfig& cfg, double grid_value, std::uint64_t seed) {
  validate(cfg);
  const SweepContext ctx = make_context(cfg);
  return instance_for(ctx, grid_value, seed);
}

SweepResult run_sweep(const SweepConfig& cfg) {
  validate(cfg);
  const SweepContext ctx = make_context(cfg);

  const int n_real = cfg.experiment == Experiment::TauScan ? 1 : cfg.n_realizations;
  const std::size_t n_grid = cfg.grid.size();
  const std::size_t n_units = n_grid * static_cast<std::size_t>(n_real);

  std::vector<RealizationRecord> records(n_units);
  std::vector<std::optional<SequenceDump>> dumps(n_units);
  parallel_for(n_units, cfg.workers, [&](std::size_t unit) {
    RealizationRecord& rec = records[unit];
    rec.grid_index = unit / static_cast<std::size_t>(n_real);
    rec.realization = static_cast<int>(unit % static_cast<std::size_t>(n_real));
    rec.seed = unit_seed(cfg, cfg.grid[rec.grid_index], rec.realization);
    try {
      UnitOutput out = run_unit(ctx, rec.grid_index, rec.realization, rec.seed);
      rec.measurement = out.measurement;
      dumps[unit] = std::move(out.dump);
    } catch (const std::exception& e) {
      rec.error = e.what();
    }
  });

  SweepResult result;
  result.config = cfg;
  result.tau_star = ctx.tau_star;
  for (std::size_t g = 0; g < n_grid; ++g) {
    SweepRow row;
    row.param = cfg.grid[g];
    Accumulator eta, dks, erginv, erg, dunif, kdim;
    row.kdim_min = std::numeric_limits<Eigen::Index>::max();
    row.kdim_max = 0;
    for (int r = 0; r < n_real; ++r) {
      const RealizationRecord& rec = records[g * static_cast<std::size_t>(n_real) + static_cast<std::size_t>(r)];
      if (!rec.measurement) {
        ++row.n_fail;
        continue;
      }
      const Measurement& m = *rec.measurement;
      ++row.n_ok;
      if (m.eta) eta.add(*m.eta);
      if (m.delta_ks) dks.add(*m.delta_ks);
      erginv.add(m.erg_inverse);
      erg.add(m.erg);
      dunif.add(m.delta_unif);
      kdim.add(static_cast<double>(m.krylov_dim));
      row.kdim_min = std::min(row.kdim_min, m.krylov_dim);
      row.kdim_max = std::max(row.kdim_max, m.krylov_dim);
      if (m.delta_unif >= cfg.uniformity_threshold) ++row.n_nonuniform;
    }
    if (row.n_ok == 0) row.kdim_min = 0;
    row.eta = eta.finish();
    row.delta_ks = dks.finish();
    row.erg_inverse = erginv.finish();
    row.erg = erg.finish();
    row.delta_unif = dunif.finish();
    row.krylov_dim = kdim.finish();
    result.total_ok += row.n_ok;
    result.total_fail += row.n_fail;
    result.rows.push_back(row);
  }
  fill_rescaled_columns(result.rows);
  result.realizations = std::move(records);
  for (auto& d : dumps) {
    if (d) result.dumps.push_back(std::move(*d));
  }
  return result;
}

SweepResult tau_scan(const SweepConfig& cfg) {
  if (cfg.experiment != Experiment::TauScan) {
    throw Error(ErrorCode::ConfigError, "tau_scan needs experiment = tau_scan");
  }
  return run_sweep(cfg);
}

std::vector<double> rescale(std::span<const double> x, std::span<const double> eta_ref) {
  if (x.size() != eta_ref.size()) throw Error(ErrorCode::ShapeMismatch, "rescale inputs differ in length");
  if (x.size() < 2) throw Error(ErrorCode::DegenerateRange, "rescale needs at least two points");
  const auto [x_min, x_max] = std::minmax_element(x.begin(), x.end());
  const auto [e_min, e_max] = std::minmax_element(eta_ref.begin(), eta_ref.end());
  if (!(*x_max > *x_min)) throw Error(ErrorCode::DegenerateRange, "max X equals min X");
  if (!(*e_max > *e_min)) throw Error(ErrorCode::DegenerateRange, "max eta equals min eta");

  const double scale = (*e_max - *e_min) / (*x_max - *x_min);
  std::vector<double> out(x.size());
  double shift = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    out[i] = x[i] * scale;
    shift += out[i] - eta_ref[i];
  }
  shift /= static_cast<double>(x.size());
  for (double& v : out) v -= shift;
  return out;
}

double pearson_correlation(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::ShapeMismatch, "pearson_correlation needs two equal-length series");
  }
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw Error(ErrorCode::DegenerateRange, "constant series");
  return sxy / std::sqrt(sxx * syy);
}

int exit_code(const SweepResult& result) {
  if (result.total_ok == 0) return 4;
  if (result.total_fail > 0) return 3;
  return 0;
}

}  // namespace kc
