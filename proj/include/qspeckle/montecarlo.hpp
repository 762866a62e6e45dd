#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "qspeckle/analytics.hpp"
#include "qspeckle/input_state.hpp"
#include "qspeckle/scattering.hpp"

namespace qspeckle {

/// Numerically stable streaming mean/variance (Welford) with exact pairwise
/// merging, so partial results from any work partition combine to the same
/// totals.
struct MomentAccumulator {
  long long count = 0;
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations from the running mean

  void add(double x);
  void merge(const MomentAccumulator& other);
  double sample_variance() const;  // m2 / (count - 1)
  double standard_error() const;   // sqrt(sample_variance / count)
};

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

/// Fixed estimate key order used everywhere (reports, JSON).
inline constexpr const char* kEstimateKeys[] = {
    "mean_total_transmission",
    "total_transmission_variance_ratio",
    "total_reflection_variance_ratio",
    "two_point_correlation",
    "c2_diagnostic",
};

/// State-independent per-realization intensity observables; every quantum
/// estimate derives from these plus the input state's photon moments.
struct RealizationTable {
  EnsembleSpec spec;
  int input_mode = 0;
  std::vector<std::pair<int, int>> probe_pairs;
  Eigen::VectorXd total_transmission;  // T_a per realization
  Eigen::VectorXd probe_mean;          // per-realization mean of T_ab over probe modes
  Eigen::MatrixXd pair_products;       // (realization, pair) -> T_ab0 * T_ab1
  long long rejected = 0;              // realizations replaced after the unitarity gate
  double fill_seconds = 0.0;
};

/// Which realization generator the table fill uses.
///  - Auto: reduced sampler for IndependentTau/FixedTau (statistically
///    identical by unitary invariance, far cheaper), full matrices for
///    SliceComposition.
///  - FullMatrix: always assemble the complete scattering matrix.
enum class SamplerPath { Auto, FullMatrix };

/// Deterministic ensemble sweep: realization i is driven by a substream
/// that depends only on (spec.master_seed, i), so the table contents are
/// bit-identical for any worker count. `parallel` enables the OpenMP fill;
/// the serial fill is the reference implementation.
RealizationTable fill_realizations(const EnsembleSpec& spec, int input_mode,
                                   const std::vector<std::pair<int, int>>& probe_pairs,
                                   bool parallel, SamplerPath path = SamplerPath::Auto);

/// Full ensemble estimates for one input state.
struct EnsembleResult {
  EnsembleSpec spec_echo;
  InputState state_echo = InputState::coherent(1.0);
  int input_mode = 0;
  std::vector<std::pair<int, int>> probe_pairs;
  std::vector<std::pair<std::string, Estimate>> estimates;  // kEstimateKeys order
  std::vector<std::pair<std::string, double>> analytic;     // closed-form counterparts
  std::vector<Estimate> per_pair_correlation;  // two-point estimate per probe pair
  long long rejected_realizations = 0;
  double wall_time_seconds = 0.0;

  const Estimate* find(const std::string& key) const;
  const double* find_analytic(const std::string& key) const;
};

/// Deterministic serial reduction of a realization table for one state.
EnsembleResult reduce_realizations(const RealizationTable& table, const InputState& state);

/// fill + reduce with the OpenMP fill.
EnsembleResult run_ensemble(const EnsembleSpec& spec, const InputState& state,
                            int input_mode,
                            const std::vector<std::pair<int, int>>& probe_pairs);

/// Serial reference implementation: same substreams, same reduction,
/// bit-identical estimates.
EnsembleResult run_ensemble_serial(const EnsembleSpec& spec, const InputState& state,
                                   int input_mode,
                                   const std::vector<std::pair<int, int>>& probe_pairs);

/// Long-range intensity-correlation diagnostic
///   c2 = mean(T_ab0 T_ab1) / mean(T_ab)^2 - 1
/// over the probe pairs, with jackknife standard error. Quantitative for
/// SliceComposition (correlated channels); for IndependentTau/FixedTau it
/// reports the free-pairing value.
std::pair<double, double> measure_c2(const EnsembleSpec& spec,
                                     const std::vector<std::pair<int, int>>& probe_pairs);

/// Default probe pairs: consecutive distinct output modes, skipping the
/// input-aligned index, deterministic for (n_modes, input_mode).
std::vector<std::pair<int, int>> default_probe_pairs(int n_modes, int input_mode,
                                                     int count = 8);

struct ReportRow {
  std::string quantity;
  double value = 0.0;
  double standard_error = 0.0;
  double analytic = 0.0;
  double pull = 0.0;
  bool has_analytic = false;
};

/// One row per estimate; pull = (value - analytic)/standard_error where an
/// analytic counterpart exists. Throws UsageError on an empty result.
std::vector<ReportRow> convergence_report(const EnsembleResult& result);

}  // namespace qspeckle
