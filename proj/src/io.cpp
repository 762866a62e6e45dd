#include "qspeckle/io.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qspeckle/fock_oracle.hpp"
#include "qspeckle/moments.hpp"
#include "qspeckle/version.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qspeckle {

namespace {

using OrderedJson = nlohmann::ordered_json;

// help/version requests abort parsing but exit successfully
struct HelpRequested {
  std::string text;
};

const char* subcommand_name(Subcommand s) {
  switch (s) {
    case Subcommand::Predict: return "predict";
    case Subcommand::Simulate: return "simulate";
    case Subcommand::Oracle: return "oracle";
    case Subcommand::FigureCmd: return "figure";
  }
  return "";
}

Subcommand subcommand_from_name(const std::string& name) {
  if (name == "predict") return Subcommand::Predict;
  if (name == "simulate") return Subcommand::Simulate;
  if (name == "oracle") return Subcommand::Oracle;
  if (name == "figure") return Subcommand::FigureCmd;
  throw UsageError("unknown subcommand '" + name +
                   "' (expected predict, simulate, oracle, or figure)");
}

const char* format_name(OutputFormat f) {
  return f == OutputFormat::Csv ? "csv" : "json";
}

OutputFormat format_from_name(const std::string& name) {
  if (name == "csv") return OutputFormat::Csv;
  if (name == "json") return OutputFormat::Json;
  throw UsageError("unknown format '" + name + "' (expected csv or json)");
}

std::string format_exact(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + value + "' as a number");
  }
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const long long x = std::stoll(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + value + "' as an integer");
  }
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
  try {
    size_t used = 0;
    const unsigned long long x = std::stoull(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::exception&) {
    throw UsageError("config key '" + key + "': cannot parse '" + value +
                     "' as an unsigned integer");
  }
}

void apply_config_line(RunConfig& cfg, std::string& state_name, double& state_mean,
                       const std::string& key, const std::string& value) {
  if (key == "subcommand") cfg.subcommand = subcommand_from_name(value);
  else if (key == "state") state_name = value;
  else if (key == "mean_photons") state_mean = parse_double(key, value);
  else if (key == "modes") cfg.ensemble.n_modes = static_cast<int>(parse_int(key, value));
  else if (key == "ell_over_l") cfg.ensemble.ell_over_L = parse_double(key, value);
  else if (key == "ensemble") cfg.ensemble.kind = ensemble_kind_from_name(value);
  else if (key == "realizations") cfg.ensemble.realizations = parse_int(key, value);
  else if (key == "seed") cfg.ensemble.master_seed = parse_uint(key, value);
  else if (key == "input_mode") cfg.input_mode = static_cast<int>(parse_int(key, value));
  else if (key == "pairs") cfg.probe_pair_count = static_cast<int>(parse_int(key, value));
  else if (key == "figure") {
    const auto fig = figure_from_name(value);
    if (!fig) throw UsageError("unknown figure '" + value + "'");
    cfg.figure = fig;
  } else if (key == "predict_g") cfg.predict_g = parse_double(key, value);
  else if (key == "oracle_samples") cfg.oracle_samples = static_cast<int>(parse_int(key, value));
  else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
  else if (key == "output") cfg.output_path = value;
  else if (key == "format") cfg.format = format_from_name(value);
  else throw UsageError("unknown config key '" + key + "'");
}

InputState make_state(const std::string& name, double mean) {
  if (name == "coherent") return InputState::coherent(mean);
  if (name == "thermal") return InputState::thermal(mean);
  if (name == "fock") {
    const double rounded = std::round(mean);
    if (std::abs(mean - rounded) > 1e-9)
      throw RangeError("fock photon number must be an integer, got " + std::to_string(mean));
    return InputState::fock(static_cast<int>(rounded));
  }
  throw UsageError("unknown state '" + name + "' (expected coherent, thermal, or fock)");
}

void load_config_file(RunConfig& cfg, std::string& state_name, double& state_mean,
                      const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config file " + path + ":" + std::to_string(line_no) +
                       ": expected key=value, got '" + line + "'");
    apply_config_line(cfg, state_name, state_mean, line.substr(0, eq), line.substr(eq + 1));
  }
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "subcommand=" << subcommand_name(cfg.subcommand) << '\n';
  out << "state=" << cfg.state.name() << '\n';
  out << "mean_photons=" << format_exact(cfg.state.mean_photons()) << '\n';
  out << "modes=" << cfg.ensemble.n_modes << '\n';
  out << "ell_over_l=" << format_exact(cfg.ensemble.ell_over_L) << '\n';
  out << "ensemble=" << ensemble_kind_name(cfg.ensemble.kind) << '\n';
  out << "realizations=" << cfg.ensemble.realizations << '\n';
  out << "seed=" << cfg.ensemble.master_seed << '\n';
  out << "input_mode=" << cfg.input_mode << '\n';
  out << "pairs=" << cfg.probe_pair_count << '\n';
  if (cfg.figure) out << "figure=" << figure_name(*cfg.figure) << '\n';
  out << "predict_g=" << format_exact(cfg.predict_g) << '\n';
  out << "oracle_samples=" << cfg.oracle_samples << '\n';
  out << "threads=" << cfg.threads << '\n';
  out << "output=" << cfg.output_path << '\n';
  out << "format=" << format_name(cfg.format) << '\n';
  return out.str();
}

RunConfig parse_config(const std::vector<std::string>& args) {
  // pre-scan for --config so file values become defaults that explicit
  // flags then override
  std::vector<std::string> rest;
  std::string config_path;
  for (size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") {
      if (i + 1 >= args.size()) throw UsageError("--config requires a file path");
      config_path = args[++i];
    } else if (a.rfind("--config=", 0) == 0) {
      config_path = a.substr(9);
    } else {
      rest.push_back(a);
    }
  }

  RunConfig cfg;
  std::string state_name = cfg.state.name();
  double state_mean = cfg.state.mean_photons();
  if (!config_path.empty()) load_config_file(cfg, state_name, state_mean, config_path);
  cfg.state = make_state(state_name, state_mean);

  CLI::App app{"photon statistics of multiply scattered quantum light"};
  app.name("qspeckle");

  std::string sub_arg, figure_pos, state_arg, ensemble_arg, figure_arg, format_arg;
  double mean_arg = 0.0, g_arg = 0.0, ell_arg = 0.0;
  int n_arg = 0;
  app.add_option("subcommand", sub_arg, "predict | simulate | oracle | figure");
  app.add_option("figure-name", figure_pos, "figure id (figure subcommand)");
  auto* state_opt = app.add_option("--state", state_arg, "coherent | thermal | fock");
  auto* mean_opt = app.add_option("--mean", mean_arg, "mean photon number (coherent/thermal)");
  auto* n_opt = app.add_option("--n", n_arg, "photon number (fock)");
  auto* modes_opt = app.add_option("--modes", cfg.ensemble.n_modes, "transverse mode count N");
  auto* ell_opt = app.add_option("--ell-over-l", ell_arg, "mean free path over thickness");
  auto* ensemble_opt =
      app.add_option("--ensemble", ensemble_arg,
                     "independent-tau | slice-composition | fixed-tau");
  app.add_option("--realizations", cfg.ensemble.realizations, "disorder realizations");
  app.add_option("--seed", cfg.ensemble.master_seed, "master seed");
  app.add_option("--input-mode", cfg.input_mode, "illuminated input mode index");
  app.add_option("--pairs", cfg.probe_pair_count, "probe pair count");
  auto* figure_opt = app.add_option("--figure", figure_arg, "fig2-reflection | "
                                    "fig2-transmission | fig3 | fig4");
  auto* g_opt = app.add_option("--g", g_arg, "conductance for predictions (inf allowed)");
  app.add_option("--samples", cfg.oracle_samples, "oracle cross-check samples");
  app.add_option("--threads", cfg.threads, "worker threads (0 = default)");
  app.add_option("-o,--output", cfg.output_path, "output file (default stdout)");
  auto* format_opt = app.add_option("--format", format_arg, "csv | json");

  std::vector<std::string> cli_args(rest.rbegin(), rest.rend());  // CLI11 wants reversed
  try {
    app.parse(cli_args);
  } catch (const CLI::CallForHelp&) {
    throw HelpRequested{app.help()};
  } catch (const CLI::ParseError& e) {
    throw UsageError(e.what());
  }

  if (!sub_arg.empty()) cfg.subcommand = subcommand_from_name(sub_arg);
  if (*state_opt || *mean_opt || *n_opt) {
    if (*state_opt) state_name = state_arg;
    if (*n_opt && state_name != "fock")
      throw UsageError("--n applies only to --state fock; use --mean");
    if (*mean_opt && state_name == "fock")
      throw UsageError("--mean applies to coherent/thermal; use --n for fock");
    if (*mean_opt) state_mean = mean_arg;
    if (*n_opt) state_mean = static_cast<double>(n_arg);
    if (*state_opt && !*mean_opt && !*n_opt) {
      // fresh kind keeps a compatible mean: integers carry over to fock
      if (state_name == "fock" && std::abs(state_mean - std::round(state_mean)) > 1e-9)
        state_mean = 1.0;
    }
    cfg.state = make_state(state_name, state_mean);
  }
  if (*ell_opt) cfg.ensemble.ell_over_L = ell_arg;
  if (*ensemble_opt) cfg.ensemble.kind = ensemble_kind_from_name(ensemble_arg);
  if (*g_opt) cfg.predict_g = g_arg;
  if (*format_opt) cfg.format = format_from_name(format_arg);
  if (*figure_opt) {
    const auto fig = figure_from_name(figure_arg);
    if (!fig) throw UsageError("unknown figure '" + figure_arg + "'");
    cfg.figure = fig;
  }
  if (!figure_pos.empty()) {
    if (cfg.subcommand != Subcommand::FigureCmd)
      throw UsageError("positional figure name is only valid for the figure subcommand");
    const auto fig = figure_from_name(figure_pos);
    if (!fig) throw UsageError("unknown figure '" + figure_pos + "'");
    cfg.figure = fig;
  }

  if (*modes_opt || *ell_opt) {
    // surface range errors (naming the field) at parse time
    if (cfg.subcommand == Subcommand::Simulate) cfg.ensemble.validate();
  }
  if (!(cfg.ensemble.ell_over_L > 0.0) || cfg.ensemble.ell_over_L > 1.0)
    throw RangeError("ell_over_L must lie in (0, 1], got " +
                     std::to_string(cfg.ensemble.ell_over_L));
  return cfg;
}

std::string format_double12(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

namespace {

void echo_config(const RunConfig& cfg, std::ostream& out) {
  out << "# qspeckle " << kVersion << '\n';
  std::istringstream lines(serialize_config(cfg));
  std::string line;
  while (std::getline(lines, line)) out << "# " << line << '\n';
}

}  // namespace

void write_prediction_csv(const std::vector<PredictionPoint>& rows, const RunConfig& cfg,
                          std::ostream& out) {
  echo_config(cfg, out);
  out << "quantity,state,mean_photons,ell_over_L,g,value\n";
  for (const auto& row : rows) {
    out << quantity_name(row.quantity) << ',' << row.state.name() << ','
        << format_double12(row.state.mean_photons()) << ','
        << format_double12(row.ell_over_L) << ',' << format_double12(row.g) << ','
        << format_double12(row.value) << '\n';
  }
}

void write_simulation_csv(const EnsembleResult& result, const RunConfig& cfg,
                          std::ostream& out) {
  echo_config(cfg, out);
  out << "quantity,state,mean_photons,ell_over_L,g,estimate,stderr,analytic,pull\n";
  for (const ReportRow& row : convergence_report(result)) {
    out << row.quantity << ',' << result.state_echo.name() << ','
        << format_double12(result.state_echo.mean_photons()) << ','
        << format_double12(result.spec_echo.ell_over_L) << ','
        << format_double12(result.spec_echo.conductance()) << ','
        << format_double12(row.value) << ',' << format_double12(row.standard_error) << ',';
    if (row.has_analytic)
      out << format_double12(row.analytic) << ',' << format_double12(row.pull);
    else
      out << ',';
    out << '\n';
  }
}

namespace {

OrderedJson estimates_block(const EnsembleResult& result) {
  OrderedJson estimates = OrderedJson::object();
  for (const auto& [name, est] : result.estimates) {
    estimates[name] = {{"value", est.value}, {"standard_error", est.standard_error}};
  }
  return estimates;
}

}  // namespace

std::string result_to_json(const EnsembleResult& result) {
  OrderedJson doc = OrderedJson::object();
  doc["spec_echo"] = {
      {"n_modes", result.spec_echo.n_modes},
      {"ell_over_L", result.spec_echo.ell_over_L},
      {"kind", ensemble_kind_name(result.spec_echo.kind)},
      {"realizations", result.spec_echo.realizations},
      {"master_seed", result.spec_echo.master_seed},
  };
  doc["state_echo"] = {
      {"kind", result.state_echo.name()},
      {"mean_photons", result.state_echo.mean_photons()},
  };
  doc["input_mode"] = result.input_mode;
  OrderedJson pairs = OrderedJson::array();
  for (const auto& [b0, b1] : result.probe_pairs) pairs.push_back({b0, b1});
  doc["probe_pairs"] = pairs;
  doc["estimates"] = estimates_block(result);
  OrderedJson analytic = OrderedJson::object();
  for (const auto& [name, value] : result.analytic) analytic[name] = value;
  doc["analytic"] = analytic;
  OrderedJson per_pair = OrderedJson::array();
  for (const Estimate& est : result.per_pair_correlation)
    per_pair.push_back({{"value", est.value}, {"standard_error", est.standard_error}});
  doc["per_pair_correlation"] = per_pair;
  doc["rejected_realizations"] = result.rejected_realizations;
  doc["wall_time_seconds"] = result.wall_time_seconds;
  doc["version"] = kVersion;
  return doc.dump(2) + "\n";
}

std::string estimates_to_json(const EnsembleResult& result) {
  return estimates_block(result).dump(2) + "\n";
}

void emit_json(const EnsembleResult& result, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << result_to_json(result);
  if (!out) throw IoError("failed writing '" + path + "'");
}

void emit_csv_file(const std::vector<PredictionPoint>& rows, const RunConfig& cfg,
                   const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_prediction_csv(rows, cfg, out);
  if (!out) throw IoError("failed writing '" + path + "'");
}

namespace {

std::vector<PredictionPoint> single_point_rows(const RunConfig& cfg) {
  const InputState& state = cfg.state;
  const double ell = cfg.ensemble.ell_over_L;
  const double g = cfg.predict_g;
  std::vector<PredictionPoint> rows;
  rows.push_back({Quantity::TotalTransmissionVarianceRatio, state, ell, g,
                  predict_total_transmission_variance(state, ell, g)});
  rows.push_back({Quantity::TotalReflectionVarianceRatio, state, ell,
                  std::numeric_limits<double>::infinity(),
                  predict_total_reflection_variance(state, ell)});
  if (state.mean_photons() > 0.0)
    rows.push_back({Quantity::TwoPointCorrelation, state,
                    std::numeric_limits<double>::quiet_NaN(),
                    std::numeric_limits<double>::infinity(),
                    predict_two_point_correlation(state)});
  return rows;
}

std::string prediction_rows_json(const std::vector<PredictionPoint>& rows) {
  OrderedJson arr = OrderedJson::array();
  for (const auto& row : rows) {
    arr.push_back({{"quantity", quantity_name(row.quantity)},
                   {"state", row.state.name()},
                   {"mean_photons", row.state.mean_photons()},
                   {"ell_over_L", row.ell_over_L},
                   {"g", row.g},
                   {"value", row.value}});
  }
  return arr.dump(2) + "\n";
}

void write_text(const std::string& text, const std::string& path, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("failed writing '" + path + "'");
}

int run_predict(const RunConfig& cfg, std::ostream& out) {
  const std::vector<PredictionPoint> rows =
      cfg.figure ? figure_sweep(*cfg.figure) : single_point_rows(cfg);
  if (cfg.format == OutputFormat::Json) {
    write_text(prediction_rows_json(rows), cfg.output_path, out);
  } else if (cfg.output_path.empty()) {
    write_prediction_csv(rows, cfg, out);
  } else {
    emit_csv_file(rows, cfg, cfg.output_path);
  }
  return kExitOk;
}

int run_figure(const RunConfig& cfg, std::ostream& out) {
  if (!cfg.figure)
    throw UsageError("figure subcommand requires a figure name "
                     "(fig2-reflection, fig2-transmission, fig3, fig4)");
  return run_predict(cfg, out);
}

int run_simulate(const RunConfig& cfg, std::ostream& out) {
#ifdef _OPENMP
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
#endif
  cfg.ensemble.validate();
  const auto pairs =
      default_probe_pairs(cfg.ensemble.n_modes, cfg.input_mode, cfg.probe_pair_count);
  const EnsembleResult result =
      run_ensemble(cfg.ensemble, cfg.state, cfg.input_mode, pairs);
  if (cfg.format == OutputFormat::Json) {
    write_text(result_to_json(result), cfg.output_path, out);
  } else if (cfg.output_path.empty()) {
    write_simulation_csv(result, cfg, out);
  } else {
    std::ofstream file(cfg.output_path);
    if (!file) throw IoError("cannot open '" + cfg.output_path + "' for writing");
    write_simulation_csv(result, cfg, file);
    if (!file) throw IoError("failed writing '" + cfg.output_path + "'");
  }
  return kExitOk;
}

int run_oracle(const RunConfig& cfg, std::ostream& out) {
  const int n = cfg.ensemble.n_modes;
  if (n < 2 || n > 6)
    throw RangeError("oracle cross-check supports n_modes in [2, 6], got " +
                     std::to_string(n));
  if (cfg.oracle_samples < 1) throw RangeError("oracle samples must be >= 1");

  const SubstreamFactory factory(cfg.ensemble.master_seed);
  constexpr double kTol = 1e-10;
  double worst = 0.0;
  for (int sample = 0; sample < cfg.oracle_samples; ++sample) {
    auto rng = factory.make(StreamDomain::Oracle, static_cast<std::uint64_t>(sample));
    const ComplexMatrix full = haar_unitary(2 * n, rng);
    ScatteringMatrix s;
    s.r_prime = full.topLeftCorner(n, n);
    s.t_prime = full.topRightCorner(n, n);
    s.t = full.bottomLeftCorner(n, n);
    s.r = full.bottomRightCorner(n, n);

    const OracleMoments oracle = oracle_moments(full, cfg.input_mode, cfg.state);
    const double tol = std::max(kTol, oracle.truncation_error);
    std::vector<int> transmitted, reflected;
    for (int m = 0; m < n; ++m) reflected.push_back(m);
    for (int m = n; m < 2 * n; ++m) transmitted.push_back(m);

    for (int b = 0; b < n; ++b) {
      worst = std::max(worst, std::abs(mode_mean(s, cfg.input_mode, b, cfg.state) -
                                       oracle.mode_means(n + b)));
      worst = std::max(worst, std::abs(mode_variance(s, cfg.input_mode, b, cfg.state) -
                                       oracle.mode_covariance(n + b, n + b)));
    }
    const auto [t_mean, t_var] = total_transmission_stats(s, cfg.input_mode, cfg.state);
    const auto [r_mean, r_var] = total_reflection_stats(s, cfg.input_mode, cfg.state);
    worst = std::max(worst, std::abs(t_mean - oracle.subset_mean(transmitted)));
    worst = std::max(worst, std::abs(t_var - oracle.subset_variance(transmitted)));
    worst = std::max(worst, std::abs(r_mean - oracle.subset_mean(reflected)));
    worst = std::max(worst, std::abs(r_var - oracle.subset_variance(reflected)));
    if (worst > tol) {
      out << "oracle cross-check FAILED at sample " << sample << ": max deviation "
          << format_double12(worst) << " > " << format_double12(tol) << "\n";
      throw EnsembleQualityError("moment engine disagrees with the brute-force oracle");
    }
  }
  out << "oracle cross-check passed: " << cfg.oracle_samples << " samples, n_modes=" << n
      << ", state=" << cfg.state.name() << ", max deviation " << format_double12(worst)
      << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const RunConfig cfg = parse_config(args);
    switch (cfg.subcommand) {
      case Subcommand::Predict: return run_predict(cfg, out);
      case Subcommand::Simulate: return run_simulate(cfg, out);
      case Subcommand::Oracle: return run_oracle(cfg, out);
      case Subcommand::FigureCmd: return run_figure(cfg, out);
    }
    throw UsageError("unhandled subcommand");
  } catch (const HelpRequested& help) {
    out << help.text;
    return kExitOk;
  } catch (const EnsembleQualityError& e) {
    err << "error (ensemble quality): " << e.what() << "\n";
    return kExitEnsembleQuality;
  } catch (const IoError& e) {
    err << "error (io): " << e.what() << "\n";
    return kExitIo;
  } catch (const RangeError& e) {
    err << "error (range): " << e.what() << "\n";
    return kExitRange;
  } catch (const UsageError& e) {
    err << "error (usage): " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace qspeckle
