#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "qspeckle/analytics.hpp"
#include "qspeckle/input_state.hpp"
#include "qspeckle/montecarlo.hpp"

namespace qspeckle {

enum class Subcommand { Predict, Simulate, Oracle, FigureCmd };
enum class OutputFormat { Csv, Json };

/// Exit codes by error category.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitRange = 3;
inline constexpr int kExitIo = 4;
inline constexpr int kExitEnsembleQuality = 5;

/// Fully resolved invocation. Round-trip invariant:
/// parse_config(serialize_config(c)) == c.
/// predict shares ensemble.ell_over_L as its sweep point.
struct RunConfig {
  Subcommand subcommand = Subcommand::Predict;
  InputState state = InputState::coherent(1.0);
  EnsembleSpec ensemble;                // simulate / oracle; ell also used by predict
  int input_mode = 0;
  int probe_pair_count = 8;
  std::optional<Figure> figure;         // predict / figure
  double predict_g = std::numeric_limits<double>::infinity();
  int oracle_samples = 20;
  int threads = 0;                      // 0 = library default
  std::string output_path;              // empty = stdout
  OutputFormat format = OutputFormat::Csv;

  bool operator==(const RunConfig&) const = default;
};

/// Parse argv into a RunConfig. `--config FILE` loads key=value defaults
/// which explicit flags override. Throws UsageError / RangeError with the
/// offending flag or field named.
RunConfig parse_config(const std::vector<std::string>& args);

/// key=value serialization of every field, one per line, stable order.
std::string serialize_config(const RunConfig& config);

/// 12-significant-digit decimal formatting used in all text output.
std::string format_double12(double x);

/// CSV for prediction rows: quantity,state,mean_photons,ell_over_L,g,value.
/// Leading '#' comment lines echo the effective config.
void write_prediction_csv(const std::vector<PredictionPoint>& rows,
                          const RunConfig& config, std::ostream& out);

/// CSV for ensemble estimates:
/// quantity,state,mean_photons,ell_over_L,g,estimate,stderr,analytic,pull.
void write_simulation_csv(const EnsembleResult& result, const RunConfig& config,
                          std::ostream& out);

/// Fixed-key-order JSON document for an ensemble run: spec_echo (with the
/// master seed), state_echo, estimates, analytic, rejected_realizations,
/// wall_time_seconds, version.
std::string result_to_json(const EnsembleResult& result);

/// The estimates sub-document only (used for determinism comparisons).
std::string estimates_to_json(const EnsembleResult& result);

void emit_json(const EnsembleResult& result, const std::string& path);
void emit_csv_file(const std::vector<PredictionPoint>& rows, const RunConfig& config,
                   const std::string& path);

/// Run the full CLI; returns the process exit code and never throws.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qspeckle
