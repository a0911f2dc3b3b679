#include <array>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "krylovchaos/chaostats.hpp"
#include "krylovchaos/harness.hpp"

namespace kc {

using nlohmann::json;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::TauScan: return "tau_scan";
    case Experiment::RmtLambda: return "rmt_lambda";
    case Experiment::ChainHz: return "chain_hz";
    case Experiment::TrotterHz: return "trotter_hz";
  }
  return "unknown";
}

std::string_view to_string(ParitySector s) {
  switch (s) {
    case ParitySector::None: return "none";
    case ParitySector::Positive: return "positive";
    case ParitySector::Negative: return "negative";
  }
  return "unknown";
}

std::string_view to_string(InitialStateKind k) {
  switch (k) {
    case InitialStateKind::AllDown: return "all_down";
    case InitialStateKind::AllUp: return "all_up";
    case InitialStateKind::CenterEigenstate: return "center_eigenstate";
    case InitialStateKind::HaarRandom: return "haar_random";
    case InitialStateKind::RandomBasis: return "random_basis";
  }
  return "unknown";
}

std::string_view to_string(GapWindow w) {
  switch (w) {
    case GapWindow::Full: return "full";
    case GapWindow::CentralHalf: return "central_half";
  }
  return "unknown";
}

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

template <class Enum, std::size_t N>
Enum parse_enum(const json& j, const char* field, const std::array<Enum, N>& values) {
  if (!j.is_string()) config_error(std::string(field) + " must be a string");
  const auto text = j.get<std::string>();
  for (Enum v : values) {
    if (to_string(v) == text) return v;
  }
  config_error("invalid value '" + text + "' for " + field);
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) config_error(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) config_error("unknown key '" + key + "' in " + where);
  }
}

template <class T>
T get_number(const json& j, const char* field) {
  if (!j.is_number()) config_error(std::string(field) + " must be a number");
  if constexpr (std::is_integral_v<T>) {
    if (!j.is_number_integer()) config_error(std::string(field) + " must be an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (j.is_number_unsigned()) return j.get<T>();
      if (j.get<long long>() < 0) config_error(std::string(field) + " must be non-negative");
    }
  }
  return j.get<T>();
}

std::vector<double> parse_grid(const json& j) {
  if (j.is_array()) {
    std::vector<double> grid;
    for (const auto& v : j) grid.push_back(get_number<double>(v, "grid entry"));
    return grid;
  }
  reject_unknown(j, {"spacing", "start", "stop", "count"}, "grid");
  for (const char* k : {"spacing", "start", "stop", "count"}) {
    if (!j.contains(k)) config_error(std::string("grid generator needs '") + k + "'");
  }
  const auto spacing = j.at("spacing").get<std::string>();
  const auto start = get_number<double>(j.at("start"), "grid.start");
  const auto stop = get_number<double>(j.at("stop"), "grid.stop");
  const auto count = get_number<int>(j.at("count"), "grid.count");
  if (count < 1) config_error("grid.count must be positive");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = start;
    return grid;
  }
  for (int i = 0; i < count; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(count - 1);
    if (spacing == "linear") {
      grid[static_cast<std::size_t>(i)] = start + f * (stop - start);
    } else if (spacing == "log") {
      if (!(start > 0.0 && stop > 0.0)) config_error("log grid needs positive bounds");
      grid[static_cast<std::size_t>(i)] = std::exp(std::log(start) + f * (std::log(stop) - std::log(start)));
    } else {
      config_error("grid.spacing must be 'linear' or 'log'");
    }
  }
  grid.back() = stop;
  return grid;
}

void apply_experiment_defaults(SweepConfig& cfg) {
  switch (cfg.experiment) {
    case Experiment::RmtLambda:
      cfg.tau = 100.0;
      cfg.initial_state = {InitialStateKind::HaarRandom, 0.0};
      break;
    case Experiment::ChainHz:
      cfg.tau = 0.15 * 2.0 * std::numbers::pi;
      cfg.initial_state = {InitialStateKind::CenterEigenstate, 0.0};
      break;
    case Experiment::TrotterHz:
      cfg.tau = 0.6 * 2.0 * std::numbers::pi;
      cfg.initial_state = {InitialStateKind::AllUp, 0.0};
      break;
    case Experiment::TauScan:
      cfg.initial_state = {InitialStateKind::AllDown, 0.0};
      cfg.parity_sector = ParitySector::Positive;
      break;
  }
}

constexpr std::array kExperiments{Experiment::TauScan, Experiment::RmtLambda, Experiment::ChainHz,
                                  Experiment::TrotterHz};
constexpr std::array kSectors{ParitySector::None, ParitySector::Positive, ParitySector::Negative};
constexpr std::array kStateKinds{InitialStateKind::AllDown, InitialStateKind::AllUp,
                                 InitialStateKind::CenterEigenstate, InitialStateKind::HaarRandom,
                                 InitialStateKind::RandomBasis};
constexpr std::array kWindows{GapWindow::Full, GapWindow::CentralHalf};

}  // namespace

SweepConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error(std::string("malformed JSON: ") + e.what());
  }
  reject_unknown(root,
                 {"experiment", "model", "grid", "n_realizations", "master_seed", "tau", "initial_state",
                  "output_path", "gap_window", "uniformity_threshold", "dump_points", "krylov_max_dim",
                  "shared_realizations"},
                 "config");
  if (!root.contains("experiment")) config_error("config needs 'experiment'");
  if (!root.contains("grid")) config_error("config needs 'grid'");

  SweepConfig cfg;
  try {
    cfg.experiment = parse_enum(root.at("experiment"), "experiment", kExperiments);
    apply_experiment_defaults(cfg);

    if (root.contains("model")) {
      const json& model = root.at("model");
      reject_unknown(model, {"dim", "n_sites", "h_z", "disorder_sigma", "parity_sector"}, "model");
      if (model.contains("dim")) cfg.dim = get_number<int>(model.at("dim"), "model.dim");
      if (model.contains("n_sites")) cfg.n_sites = get_number<int>(model.at("n_sites"), "model.n_sites");
      if (model.contains("h_z")) cfg.h_z = get_number<double>(model.at("h_z"), "model.h_z");
      if (model.contains("disorder_sigma")) {
        cfg.disorder_sigma = get_number<double>(model.at("disorder_sigma"), "model.disorder_sigma");
      }
      if (model.contains("parity_sector")) {
        cfg.parity_sector = parse_enum(model.at("parity_sector"), "model.parity_sector", kSectors);
      }
    }
    cfg.grid = parse_grid(root.at("grid"));
    if (root.contains("n_realizations")) cfg.n_realizations = get_number<int>(root.at("n_realizations"), "n_realizations");
    if (root.contains("master_seed")) {
      cfg.master_seed = get_number<std::uint64_t>(root.at("master_seed"), "master_seed");
    }
    if (root.contains("tau")) cfg.tau = get_number<double>(root.at("tau"), "tau");
    if (root.contains("initial_state")) {
      const json& s = root.at("initial_state");
      if (s.is_string()) {
        cfg.initial_state = {parse_enum(s, "initial_state", kStateKinds), 0.0};
      } else {
        reject_unknown(s, {"kind", "h"}, "initial_state");
        if (!s.contains("kind")) config_error("initial_state needs 'kind'");
        cfg.initial_state.kind = parse_enum(s.at("kind"), "initial_state.kind", kStateKinds);
        cfg.initial_state.h_value = s.contains("h") ? get_number<double>(s.at("h"), "initial_state.h") : 0.0;
      }
    }
    if (root.contains("output_path")) {
      if (!root.at("output_path").is_string()) config_error("output_path must be a string");
      cfg.output_path = root.at("output_path").get<std::string>();
    }
    if (root.contains("gap_window")) cfg.gap_window = parse_enum(root.at("gap_window"), "gap_window", kWindows);
    if (root.contains("uniformity_threshold")) {
      cfg.uniformity_threshold = get_number<double>(root.at("uniformity_threshold"), "uniformity_threshold");
    }
    if (root.contains("dump_points")) {
      if (!root.at("dump_points").is_array()) config_error("dump_points must be an array");
      for (const auto& v : root.at("dump_points")) cfg.dump_points.push_back(get_number<double>(v, "dump_points entry"));
    }
    if (root.contains("krylov_max_dim")) {
      cfg.krylov_max_dim = get_number<Eigen::Index>(root.at("krylov_max_dim"), "krylov_max_dim");
    }
    if (root.contains("shared_realizations")) {
      if (!root.at("shared_realizations").is_boolean()) config_error("shared_realizations must be a boolean");
      cfg.shared_realizations = root.at("shared_realizations").get<bool>();
    }
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  validate(cfg);
  return cfg;
}

SweepConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::ConfigError, "cannot open config file " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate(const SweepConfig& cfg) {
  if (cfg.grid.empty()) config_error("grid must be non-empty");
  for (std::size_t i = 0; i < cfg.grid.size(); ++i) {
    if (!std::isfinite(cfg.grid[i])) config_error("grid values must be finite");
    if (i > 0 && !(cfg.grid[i] > cfg.grid[i - 1])) config_error("grid must be strictly increasing");
  }
  if (cfg.n_realizations < 1) config_error("n_realizations must be >= 1");
  if (cfg.workers < 1) config_error("workers must be >= 1");
  if (!(cfg.uniformity_threshold > 0.0)) config_error("uniformity_threshold must be positive");
  if (cfg.krylov_max_dim && *cfg.krylov_max_dim < 1) config_error("krylov_max_dim must be positive");
  if (!(cfg.disorder_sigma >= 0.0)) config_error("disorder_sigma must be >= 0");

  const bool chain_model = cfg.experiment != Experiment::RmtLambda;
  if (chain_model) {
    if (cfg.n_sites < 2 || cfg.n_sites > kMaxChainSites) {
      config_error("model.n_sites must lie in [2, " + std::to_string(kMaxChainSites) + "]");
    }
    if (cfg.parity_sector != ParitySector::None && cfg.disorder_sigma > 0.0) {
      config_error("a parity sector cannot be combined with disorder (ParityWithDisorder)");
    }
  } else {
    if (cfg.dim < 3) config_error("model.dim must be >= 3 for the RMT sweep");
    if (!is_random_state(cfg.initial_state.kind)) {
      config_error("the RMT sweep needs a haar_random or random_basis initial state");
    }
    if (cfg.grid.front() < 0.0) config_error("lambda grid must be non-negative");
  }
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) config_error("tau must be positive");

  switch (cfg.experiment) {
    case Experiment::TauScan:
      if (cfg.disorder_sigma != 0.0) config_error("tau_scan requires disorder_sigma = 0");
      if (cfg.grid.front() <= 0.0) config_error("tau_scan grid (tau / tau*) must be positive");
      break;
    case Experiment::ChainHz:
    case Experiment::TrotterHz:
      if (cfg.grid.front() < 0.0) config_error("h_z grid must be non-negative");
      break;
    case Experiment::RmtLambda: break;
  }
}

std::string config_to_json(const SweepConfig& cfg, int indent) {
  json j;
  j["experiment"] = std::string(to_string(cfg.experiment));
  json model = json::object();
  if (cfg.experiment == Experiment::RmtLambda) {
    model["dim"] = cfg.dim;
  } else {
    model["n_sites"] = cfg.n_sites;
    model["disorder_sigma"] = cfg.disorder_sigma;
    model["parity_sector"] = std::string(to_string(cfg.parity_sector));
    if (cfg.experiment == Experiment::TauScan) model["h_z"] = cfg.h_z;
  }
  j["model"] = model;
  j["grid"] = cfg.grid;
  j["n_realizations"] = cfg.n_realizations;
  j["master_seed"] = cfg.master_seed;
  if (cfg.experiment != Experiment::TauScan) j["tau"] = cfg.tau;
  j["initial_state"] = {{"kind", std::string(to_string(cfg.initial_state.kind))},
                        {"h", cfg.initial_state.h_value}};
  j["output_path"] = cfg.output_path;
  j["gap_window"] = std::string(to_string(cfg.gap_window));
  j["uniformity_threshold"] = cfg.uniformity_threshold;
  j["dump_points"] = cfg.dump_points;
  if (cfg.krylov_max_dim) j["krylov_max_dim"] = *cfg.krylov_max_dim;
  j["shared_realizations"] = cfg.shared_realizations;
  return j.dump(indent);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  std::array<char, 32> buf{};
  std::snprintf(buf.data(), buf.size(), "%.17g", v);
  return buf.data();
}

std::string sweep_csv(const SweepResult& result) {
  std::string out = kCsvHeader;
  out += '\n';
  const auto field = [&out](double v) {
    out += ',';
    out += format_double(v);
  };
  for (const SweepRow& row : result.rows) {
    out += format_double(row.param);
    field(row.eta.mean);
    field(row.eta.sem);
    field(row.delta_ks.mean);
    field(row.delta_ks.sem);
    field(row.erg_inverse.mean);
    field(row.erg_inverse.sem);
    field(row.delta_unif.mean);
    field(row.delta_unif.sem);
    field(row.krylov_dim.mean);
    field(row.erg_norm);
    field(row.dks_norm);
    out += ',' + std::to_string(row.n_ok) + ',' + std::to_string(row.n_fail) + '\n';
  }
  return out;
}

namespace {

json number_or_null(double v) { return std::isnan(v) ? json(nullptr) : json(v); }

}  // namespace

std::string sweep_sidecar_json(const SweepResult& result) {
  const SweepConfig& cfg = result.config;
  json j;
  j["library_version"] = kLibraryVersion;
  j["config"] = json::parse(config_to_json(cfg, -1));
  j["design_decisions"] = {
      {"reorthogonalization", "classical_gram_schmidt_twice"},
      {"breakdown_tol", "1e-12*sqrt(D)"},
      {"erg_target", "subdiagonal_ones_no_wrap"},
      {"erg_norm", "frobenius/sqrt(2M)"},
      {"phase_interval", "[-pi,pi)"},
      {"unitary_level_spacings", "linear_no_wrap"},
      {"degeneracy_rel_tol", 1e-12},
      {"gap_window", std::string(to_string(cfg.gap_window))},
      {"eta_constants", {kPoissonRatio, kGoeRatio}},
      {"eta_clamped", false},
      {"dks_pooling", "all_D2_overlaps"},
      {"dks_reference_basis", cfg.experiment == Experiment::ChainHz || cfg.experiment == Experiment::TrotterHz
                                  ? "interaction_zz"
                                  : "none"},
      {"goe_diagonal_sigma", "sqrt(2)/sqrt(D)"},
      {"rmt_initial_state", "haar_random_complex_gaussian"},
      {"spin_convention", "bit_i=1_is_up_lsb_is_site_1"},
      {"center_eigenstate_index", "floor(D/2)"},
      {"seed_split", cfg.shared_realizations ? "splitmix64(master, shared, realization)"
                                             : "splitmix64(master, grid_value_bits, realization)"},
      {"error_bars", "standard_error_of_mean"},
      {"rescale_shift", "closed_form_mean_offset"},
  };
  if (result.tau_star) j["tau_star"] = *result.tau_star;
  j["total_ok"] = result.total_ok;
  j["total_fail"] = result.total_fail;

  json rows = json::array();
  for (const SweepRow& row : result.rows) {
    rows.push_back({{"param", row.param},
                    {"erg_mean", number_or_null(row.erg.mean)},
                    {"erg_sem", number_or_null(row.erg.sem)},
                    {"kdim_min", row.kdim_min},
                    {"kdim_max", row.kdim_max},
                    {"n_nonuniform", row.n_nonuniform}});
  }
  j["rows"] = rows;

  json realizations = json::array();
  for (const RealizationRecord& rec : result.realizations) {
    json r = {{"grid_index", rec.grid_index}, {"realization", rec.realization}, {"seed", rec.seed}};
    if (rec.measurement) {
      r["krylov_dim"] = rec.measurement->krylov_dim;
      r["terminated_early"] = rec.measurement->terminated_early;
      r["dropped_levels"] = rec.measurement->dropped_levels;
    } else {
      r["error"] = rec.error;
    }
    realizations.push_back(std::move(r));
  }
  j["realizations"] = realizations;
  return j.dump(2) + "\n";
}

std::string decomposition_json(const KrylovDecomposition& k, bool include_basis) {
  std::string out;
  const auto complex_pair = [&out](Complex z) {
    out += '[';
    out += format_double(z.real());
    out += ',';
    out += format_double(z.imag());
    out += ']';
  };
  const auto complex_list = [&](const auto& v) {
    out += '[';
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (i > 0) out += ',';
      complex_pair(v[i]);
    }
    out += ']';
  };
  out += "{\"dim\":" + std::to_string(k.dim());
  out += ",\"m\":" + std::to_string(k.krylov_dim());
  out += ",\"terminated_early\":";
  out += k.terminated_early ? "true" : "false";
  out += ",\"a\":";
  complex_list(k.seq_a);
  out += ",\"b\":[";
  for (Eigen::Index i = 0; i < k.seq_b.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(k.seq_b[i]);
  }
  out += "],\"c\":";
  complex_list(k.seq_c);
  if (include_basis) {
    out += ",\"basis\":[";
    for (Eigen::Index col = 0; col < k.krylov_dim(); ++col) {
      if (col > 0) out += ',';
      complex_list(k.basis.col(col));
    }
    out += ']';
  }
  out += "}\n";
  return out;
}

void write_matrix_binary(const std::string& path, const ComplexMatrix& m) {
  if (m.rows() != m.cols()) throw Error(ErrorCode::NonSquareInput, "binary dump expects a square matrix");
  static_assert(std::endian::native == std::endian::little, "binary dumps assume a little-endian host");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open " + path);
  const auto d = static_cast<std::uint64_t>(m.rows());
  out.write(reinterpret_cast<const char*>(&d), sizeof d);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double pair[2] = {m(r, c).real(), m(r, c).imag()};
      out.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
  }
  if (!out) throw Error(ErrorCode::IoError, "failed writing " + path);
}

ComplexMatrix read_matrix_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path);
  std::uint64_t d = 0;
  in.read(reinterpret_cast<char*>(&d), sizeof d);
  if (!in || d == 0 || d > 65536) throw Error(ErrorCode::IoError, "bad dimension header in " + path);
  const auto n = static_cast<Eigen::Index>(d);
  ComplexMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) {
      double pair[2];
      in.read(reinterpret_cast<char*>(pair), sizeof pair);
      m(r, c) = Complex(pair[0], pair[1]);
    }
  }
  if (!in) throw Error(ErrorCode::IoError, "truncated matrix file " + path);
  return m;
}

std::vector<std::string> write_outputs(const SweepResult& result, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create output directory " + out_dir);

  std::vector<std::string> written;
  const auto write_text = [&](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::IoError, "cannot open " + path.string());
    out << text;
    if (!out) throw Error(ErrorCode::IoError, "failed writing " + path.string());
    written.push_back(path.string());
  };

  const std::string stem(to_string(result.config.experiment));
  write_text(fs::path(out_dir) / (stem + ".csv"), sweep_csv(result));
  write_text(fs::path(out_dir) / (stem + ".json"), sweep_sidecar_json(result));
  for (const SequenceDump& dump : result.dumps) {
    const std::string tag = stem + "_g" + std::to_string(dump.grid_index);
    write_text(fs::path(out_dir) / ("arnoldi_" + tag + ".json"), dump.json);
    if (dump.unitary) {
      const fs::path path = fs::path(out_dir) / ("matrix_" + tag + ".bin");
      write_matrix_binary(path.string(), *dump.unitary);
      written.push_back(path.string());
    }
  }
  return written;
}

}  // namespace kc
