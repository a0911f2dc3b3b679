#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "krylovchaos/arnoldi.hpp"
#include "krylovchaos/chaostats.hpp"
#include "krylovchaos/errors.hpp"
#include "krylovchaos/harness.hpp"

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitTotalFailure = 4;

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::optional<std::string> out;
  bool dump_basis = false;
  bool dump_matrix = false;
};

void add_common_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config_path, "JSON sweep config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "override master_seed");
  cmd->add_option("--workers", flags.workers, "worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--out", flags.out, "output directory (overrides output_path)");
  cmd->add_flag("--dump-basis", flags.dump_basis, "include Krylov basis vectors in Arnoldi dumps");
  cmd->add_flag("--dump-matrix", flags.dump_matrix, "write binary unitaries next to Arnoldi dumps");
}

kc::SweepConfig load_with_flags(const CommonFlags& flags, kc::Experiment expected) {
  kc::SweepConfig cfg = kc::load_config(flags.config_path);
  if (cfg.experiment != expected) {
    throw kc::Error(kc::ErrorCode::ConfigError,
                    "config experiment is '" + std::string(kc::to_string(cfg.experiment)) + "', expected '" +
                        std::string(kc::to_string(expected)) + "'");
  }
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.out) cfg.output_path = *flags.out;
  cfg.workers = flags.workers;
  cfg.dump_basis = flags.dump_basis;
  cfg.dump_matrix = flags.dump_matrix;
  kc::validate(cfg);
  return cfg;
}

int run_sweep_command(const CommonFlags& flags, kc::Experiment experiment) {
  const kc::SweepConfig cfg = load_with_flags(flags, experiment);
  const kc::SweepResult result = kc::run_sweep(cfg);
  for (const auto& path : kc::write_outputs(result, cfg.output_path)) std::cout << path << '\n';
  if (result.tau_star) std::cerr << "tau* = " << kc::format_double(*result.tau_star) << '\n';
  std::cerr << result.total_ok << " realizations ok, " << result.total_fail << " excluded\n";
  for (const auto& rec : result.realizations) {
    if (!rec.error.empty()) {
      std::cerr << "  grid " << rec.grid_index << " realization " << rec.realization << ": " << rec.error << '\n';
    }
  }
  return kc::exit_code(result);
}

// Dumps realization `realization` of every selected grid point, without
// running the spectral diagnostics.
int run_arnoldi_dump(const CommonFlags& flags, std::optional<double> param, int realization) {
  kc::SweepConfig cfg = kc::load_config(flags.config_path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.out) cfg.output_path = *flags.out;
  const std::string stem(kc::to_string(cfg.experiment));

  std::filesystem::create_directories(cfg.output_path);
  int failures = 0;
  int written = 0;
  for (std::size_t g = 0; g < cfg.grid.size(); ++g) {
    const double value = cfg.grid[g];
    if (param && std::abs(value - *param) > 1e-12 * std::max(1.0, std::abs(*param))) continue;
    try {
      const std::uint64_t seed = kc::unit_seed(cfg, value, realization);
      const kc::ModelInstance inst = kc::build_instance(cfg, value, seed);
      kc::ArnoldiOptions opts;
      opts.max_dim = cfg.krylov_max_dim;
      const kc::KrylovDecomposition k = kc::arnoldi_iterate(inst.unitary, inst.psi0, opts);
      const auto base = std::filesystem::path(cfg.output_path) / ("arnoldi_" + stem + "_g" + std::to_string(g));
      std::ofstream(base.string() + ".json", std::ios::binary) << kc::decomposition_json(k, flags.dump_basis);
      std::cout << base.string() << ".json\n";
      if (flags.dump_matrix) {
        kc::write_matrix_binary(base.string() + ".bin", inst.unitary.matrix());
        std::cout << base.string() << ".bin\n";
      }
      ++written;
    } catch (const std::exception& e) {
      std::cerr << "grid " << g << ": " << e.what() << '\n';
      ++failures;
    }
  }
  if (written == 0 && failures == 0) {
    std::cerr << "no grid value matches --param\n";
    return kExitConfig;
  }
  if (written == 0) return kExitTotalFailure;
  return failures > 0 ? 3 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Krylov-space ergodicity of unitary evolutions"};
  app.set_version_flag("--version", std::string(kc::kLibraryVersion));
  app.require_subcommand(1);

  CommonFlags flags;
  auto* tau_cmd = app.add_subcommand("tau-scan", "tau scan of the clean chain (grid is tau / tau*)");
  auto* rmt_cmd = app.add_subcommand("rmt-sweep", "random-matrix transition sweep over lambda");
  auto* chain_cmd = app.add_subcommand("chain-sweep", "disordered Ising chain sweep over h_z");
  auto* trotter_cmd = app.add_subcommand("trotter-sweep", "Trotterized chain sweep over h_z");
  for (auto* cmd : {tau_cmd, rmt_cmd, chain_cmd, trotter_cmd}) add_common_flags(cmd, flags);

  auto* dump_cmd = app.add_subcommand("arnoldi-dump", "write Arnoldi sequences for grid points of a config");
  add_common_flags(dump_cmd, flags);
  std::optional<double> dump_param;
  int dump_realization = 0;
  dump_cmd->add_option("--param", dump_param, "only this grid value");
  dump_cmd->add_option("--realization", dump_realization, "realization index")->check(CLI::NonNegativeNumber);

  auto* stats_cmd = app.add_subcommand("stats", "statistics helpers");
  stats_cmd->require_subcommand(1);
  auto* cdf_cmd = stats_cmd->add_subcommand("goe-cdf", "CDF of a squared GOE eigenvector component");
  int cdf_dim = 0;
  double cdf_x = 0.0;
  cdf_cmd->add_option("--dim", cdf_dim, "dimension D")->required();
  cdf_cmd->add_option("--x", cdf_x, "argument in [0, 1]")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*tau_cmd) return run_sweep_command(flags, kc::Experiment::TauScan);
    if (*rmt_cmd) return run_sweep_command(flags, kc::Experiment::RmtLambda);
    if (*chain_cmd) return run_sweep_command(flags, kc::Experiment::ChainHz);
    if (*trotter_cmd) return run_sweep_command(flags, kc::Experiment::TrotterHz);
    if (*dump_cmd) return run_arnoldi_dump(flags, dump_param, dump_realization);
    if (*cdf_cmd) {
      std::cout << kc::format_double(kc::goe_component_cdf(cdf_x, cdf_dim)) << '\n';
      return 0;
    }
  } catch (const kc::Error& e) {
    std::cerr << e.what() << '\n';
    return e.code() == kc::ErrorCode::ConfigError || e.code() == kc::ErrorCode::OutOfRange ? kExitConfig
                                                                                            : kExitTotalFailure;
  } catch (const std::exception& e) {
    std::cerr << e.what() << '\n';
    return kExitTotalFailure;
  }
  return 0;
}
