#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "nessdmrg/dmrg.hpp"

namespace nessdmrg {

enum class ExperimentKind { Single, GammaScan, SizeScan, OrderingCompare };

std::string to_string(ExperimentKind k);
ExperimentKind parse_experiment(const std::string& s);

/// Parsed run configuration. Scalars in the model section are broadcast to
/// every bond or site; arrays give inhomogeneous couplings.
struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Single;
  ModelParams model = ModelParams::uniform(10, 1.0, 1.0, 1.0, 0.0);
  Ordering scheme = Ordering::RLN;
  SweepSchedule schedule;
  std::vector<double> gamma_values;     // gamma_scan
  std::vector<std::size_t> sizes;       // size_scan
  std::filesystem::path output = "ness-out";
  std::uint64_t seed = 0;
  std::size_t workers = 1;
  bool allow_unconverged = false;

  void validate() const;
};

/// Parses JSON text. Throws ConfigError with line context on syntax errors and
/// with the offending key on semantic ones.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

struct TransportFit {
  std::vector<std::pair<double, double>> points;  // (N, current)
  double alpha = 0.0;
  double fit_residual = 0.0;  // rms residual of log J
};

/// Least-squares slope of log J against log N; alpha = -slope.
TransportFit fit_transport_exponent(const std::vector<std::pair<double, double>>& points);

/// One finished solve together with the parameters that produced it.
struct RunRecord {
  std::string name;
  ModelParams params;
  Ordering scheme = Ordering::RLN;
  RunResult result;
  double mean_current() const;
};

struct OrderingReport {
  RunRecord rln;
  RunRecord rnln;
};

/// Same model and schedule under both orderings.
OrderingReport compare_orderings(const ExperimentConfig& config);

struct ExperimentOutcome {
  std::vector<RunRecord> runs;
  std::optional<TransportFit> fit;
  bool all_converged = true;
  int exit_code = 0;  // 0 success, 2 non-convergence
};

/// Runs the configured experiment and writes its files under config.output.
ExperimentOutcome run_experiment(const ExperimentConfig& config);

/// Writes history.csv, current.csv, magnetization.csv and summary.json for
/// one run into `dir`. Each file is written to a temporary name and renamed.
void write_run(const std::filesystem::path& dir, const RunRecord& run, std::uint64_t seed);

/// Writes `content` to `path` through a temporary file and a rename.
void write_atomic(const std::filesystem::path& path, const std::string& content);

}  // namespace nessdmrg
