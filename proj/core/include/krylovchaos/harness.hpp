#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "krylovchaos/arnoldi.hpp"
#include "krylovchaos/models.hpp"

namespace kc {

inline constexpr const char* kLibraryVersion = "0.1.0";

enum class Experiment { TauScan, RmtLambda, ChainHz, TrotterHz };
enum class GapWindow { Full, CentralHalf };

std::string_view to_string(Experiment e);
std::string_view to_string(ParitySector s);
std::string_view to_string(InitialStateKind k);
std::string_view to_string(GapWindow w);

struct SweepConfig {
  Experiment experiment = Experiment::RmtLambda;

  // Model parameters. Which ones apply depends on the experiment; the swept
  // parameter (lambda, h_z, or tau/tau* for the tau scan) comes from `grid`.
  int dim = 0;
  int n_sites = 0;
  double h_z = 0.0;
  double disorder_sigma = 0.0;
  ParitySector parity_sector = ParitySector::None;

  std::vector<double> grid;
  int n_realizations = 1;
  std::uint64_t master_seed = 0;
  double tau = 100.0;
  InitialStateSpec initial_state{InitialStateKind::HaarRandom, 0.0};
  std::string output_path = "out";

  GapWindow gap_window = GapWindow::Full;
  /// Realizations with delta_unif at or above this are counted as
  /// non-uniform (their Erg is not trusted, but still averaged).
  double uniformity_threshold = 0.1;
  /// Grid values whose realization-0 Arnoldi sequences are dumped.
  std::vector<double> dump_points;
  std::optional<Eigen::Index> krylov_max_dim;
  /// Reuse realization r's random draws at every grid point (common random
  /// numbers). Ensemble means are unchanged; differences between grid points
  /// become much less noisy.
  bool shared_realizations = false;

  // Run-time options, not part of the persisted config.
  int workers = 1;
  bool dump_basis = false;
  bool dump_matrix = false;
};

/// Parses and validates a JSON config. Unknown keys and invalid values throw
/// ConfigError.
SweepConfig parse_config(const std::string& json_text);
SweepConfig load_config(const std::string& path);
void validate(const SweepConfig& cfg);

/// Canonical JSON echo of the persisted fields.
std::string config_to_json(const SweepConfig& cfg, int indent = 2);

/// Mean and standard error of the mean.
struct Stat {
  double mean = std::numeric_limits<double>::quiet_NaN();
  double sem = std::numeric_limits<double>::quiet_NaN();
  std::size_t count = 0;

  bool present() const noexcept { return count > 0; }
};

/// Order-fixed accumulator of values and squares.
class Accumulator {
 public:
  void add(double x) noexcept {
    sum_ += x;
    sum_sq_ += x * x;
    ++n_;
  }
  Stat finish() const noexcept;

 private:
  double sum_ = 0.0;
  double sum_sq_ = 0.0;
  std::size_t n_ = 0;
};

/// Measurements of one realization at one grid point.
struct Measurement {
  std::optional<double> eta;
  std::optional<double> r_mean;
  std::optional<double> delta_ks;
  double erg_inverse = 0.0;
  double erg = 0.0;
  double delta_unif = 0.0;
  Eigen::Index krylov_dim = 0;
  bool terminated_early = false;
  std::size_t dropped_levels = 0;
};

struct RealizationRecord {
  std::size_t grid_index = 0;
  int realization = 0;
  std::uint64_t seed = 0;
  std::optional<Measurement> measurement;
  std::string error;  // empty on success
};

struct SweepRow {
  double param = 0.0;
  Stat eta;
  Stat delta_ks;
  Stat erg_inverse;
  Stat erg;
  Stat delta_unif;
  Stat krylov_dim;
  Eigen::Index kdim_min = 0;
  Eigen::Index kdim_max = 0;
  std::size_t n_ok = 0;
  std::size_t n_fail = 0;
  std::size_t n_nonuniform = 0;
  double erg_norm = std::numeric_limits<double>::quiet_NaN();
  double dks_norm = std::numeric_limits<double>::quiet_NaN();
};

struct SequenceDump {
  std::size_t grid_index = 0;
  double param = 0.0;
  double tau = 0.0;
  std::string json;                          // arnoldi dump schema
  std::optional<ComplexMatrix> unitary;      // kept only with dump_matrix
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;
  std::vector<RealizationRecord> realizations;
  std::vector<SequenceDump> dumps;
  std::optional<double> tau_star;
  std::size_t total_ok = 0;
  std::size_t total_fail = 0;
};

/// Seed of realization r at a grid value. Depends on the value, not its
/// position, so removing a grid point leaves the others unchanged.
std::uint64_t realization_seed(std::uint64_t master_seed, double grid_value, int realization);

/// Seed actually used for a unit, honoring cfg.shared_realizations.
std::uint64_t unit_seed(const SweepConfig& cfg, double grid_value, int realization);

/// The evolution operator and initial state of one realization.
struct ModelInstance {
  UnitaryMatrix unitary;
  ComplexVector psi0;
  double tau = 0.0;
  /// Spectrum of the generating Hamiltonian (absent for the Trotter model).
  std::optional<SpectralData> h_spectrum;
};

/// Builds the model of `cfg` at one grid value. For the tau scan the grid
/// value is tau / tau*.
ModelInstance build_instance(const SweepConfig& cfg, double grid_value, std::uint64_t seed);

/// Runs every (grid point, realization) unit, fail-soft, on cfg.workers
/// threads. The result does not depend on the worker count.
SweepResult run_sweep(const SweepConfig& cfg);

/// tau scan of the clean chain: grid values are tau / tau*.
SweepResult tau_scan(const SweepConfig& cfg);

/// X' = X (range eta / range X), shifted by the least-squares offset
/// mean(X' - eta).
std::vector<double> rescale(std::span<const double> x, std::span<const double> eta_ref);

double pearson_correlation(std::span<const double> x, std::span<const double> y);

/// Process exit code for a finished sweep: 0 all ok, 3 some realizations
/// excluded, 4 none succeeded.
int exit_code(const SweepResult& result);

// Persistence ----------------------------------------------------------------

inline constexpr const char* kCsvHeader =
    "param,eta_mean,eta_sem,dks_mean,dks_sem,erginv_mean,erginv_sem,dunif_mean,dunif_sem,"
    "kdim_mean,erg_norm,dks_norm,n_ok,n_fail";

/// "%.17g"; NaN becomes an empty field.
std::string format_double(double v);

std::string sweep_csv(const SweepResult& result);
std::string sweep_sidecar_json(const SweepResult& result);

/// Writes <out>/<experiment>.csv, <experiment>.json and any dumps. Returns
/// the written paths.
std::vector<std::string> write_outputs(const SweepResult& result, const std::string& out_dir);

/// Arnoldi dump: {dim, m, terminated_early, a: [[re,im],..], b: [..],
/// c: [[re,im],..]} plus "basis" (column-major [[re,im],..] per column)
/// when requested.
std::string decomposition_json(const KrylovDecomposition& k, bool include_basis);

/// Binary dump: little-endian uint64 dimension D, then D*D (re, im) double
/// pairs in row-major order.
void write_matrix_binary(const std::string& path, const ComplexMatrix& m);
ComplexMatrix read_matrix_binary(const std::string& path);

}  // namespace kc
