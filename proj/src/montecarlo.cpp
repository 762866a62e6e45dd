#include "qspeckle/montecarlo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <optional>
#include <set>

#include "qspeckle/moments.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qspeckle {

void MomentAccumulator::add(double x) {
  ++count;
  const double delta = x - mean;
  mean += delta / static_cast<double>(count);
  m2 += delta * (x - mean);
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.count == 0) return;
  if (count == 0) {
    *this = other;
    return;
  }
  const long long n = count + other.count;
  const double delta = other.mean - mean;
  const double weight = static_cast<double>(other.count) / static_cast<double>(n);
  m2 += other.m2 + delta * delta * weight * static_cast<double>(count);
  mean += delta * weight;
  count = n;
}

double MomentAccumulator::sample_variance() const {
  return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
}

double MomentAccumulator::standard_error() const {
  return count > 1 ? std::sqrt(sample_variance() / static_cast<double>(count)) : 0.0;
}

std::vector<std::pair<int, int>> default_probe_pairs(int n_modes, int input_mode,
                                                     int count) {
  if (count < 1) throw UsageError("probe pair count must be >= 1");
  std::vector<int> modes;
  modes.reserve(static_cast<size_t>(n_modes));
  for (int m = 0; m < n_modes; ++m)
    if (m != input_mode) modes.push_back(m);
  const int available = static_cast<int>(modes.size()) / 2;
  if (available < 1)
    throw UsageError("n_modes = " + std::to_string(n_modes) +
                     " leaves no distinct output pair after excluding the input-aligned mode");
  const int k = std::min(count, available);
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(static_cast<size_t>(k));
  for (int i = 0; i < k; ++i) pairs.emplace_back(modes[2 * i], modes[2 * i + 1]);
  return pairs;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

void validate_run_inputs(const EnsembleSpec& spec, int input_mode,
                         const std::vector<std::pair<int, int>>& probe_pairs) {
  spec.validate();
  if (input_mode < 0 || input_mode >= spec.n_modes)
    throw UsageError("input mode " + std::to_string(input_mode) + " out of range [0, " +
                     std::to_string(spec.n_modes) + ")");
  if (probe_pairs.empty()) throw UsageError("at least one probe pair is required");
  for (const auto& [b0, b1] : probe_pairs) {
    if (b0 < 0 || b0 >= spec.n_modes || b1 < 0 || b1 >= spec.n_modes)
      throw UsageError("probe pair (" + std::to_string(b0) + ", " + std::to_string(b1) +
                       ") out of range [0, " + std::to_string(spec.n_modes) + ")");
    if (b0 == b1)
      throw UsageError("probe pair modes must be distinct, got (" + std::to_string(b0) +
                       ", " + std::to_string(b1) + ")");
  }
}

inline std::complex<double> complex_normal(std::mt19937_64& rng,
                                           std::normal_distribution<double>& nd) {
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

// Observables of one realization restricted to what the estimates need.
struct DrawResult {
  double total_t = 0.0;
  Eigen::VectorXd probe_t;  // T_ab at the distinct probe modes
  bool accepted = true;
};

// Reduced sampler for the factorized ensembles: by unitary invariance, the
// input column of a Haar unitary is a uniformly random unit vector u and
// any set of distinct output rows forms an independent Haar orthonormal
// frame {v_b}. Then T_a = || sqrt(tau) u ||^2 and T_ab = |v_b . sqrt(tau) u|^2
// reproduce the full polar construction exactly at O(N P^2) cost.
DrawResult reduced_draw(const EnsembleSpec& spec, int probe_count, std::mt19937_64& rng) {
  const int n = spec.n_modes;
  const std::vector<double> taus = sample_transmission_eigenvalues(spec, rng);
  std::normal_distribution<double> nd(0.0, 1.0);

  Eigen::VectorXcd u(n);
  for (int i = 0; i < n; ++i) u(i) = complex_normal(rng, nd);
  u /= u.norm();
  Eigen::VectorXcd w(n);
  for (int i = 0; i < n; ++i) w(i) = std::sqrt(taus[static_cast<size_t>(i)]) * u(i);

  ComplexMatrix g(n, probe_count);
  for (int j = 0; j < probe_count; ++j)
    for (int i = 0; i < n; ++i) g(i, j) = complex_normal(rng, nd);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  // thin Q; per-column phases are irrelevant because only |v . w|^2 enters
  const ComplexMatrix frame =
      qr.householderQ() * ComplexMatrix::Identity(n, probe_count);

  DrawResult out;
  out.total_t = w.squaredNorm();
  out.probe_t.resize(probe_count);
  for (int k = 0; k < probe_count; ++k) out.probe_t(k) = std::norm(frame.col(k).dot(w));
  return out;
}

DrawResult full_draw(const EnsembleSpec& spec, const SliceCalibration* cal, int input_mode,
                     const std::vector<int>& probe_modes, std::mt19937_64& rng) {
  const ScatteringMatrix s =
      spec.kind == EnsembleKind::SliceComposition
          ? compose_slices(spec, *cal, rng)
          : assemble_polar(sample_transmission_eigenvalues(spec, rng), rng);
  DrawResult out;
  if (unitarity_defect(s) > kUnitarityGate) {
    out.accepted = false;
    return out;
  }
  const Eigen::VectorXd t_row = s.transmission_intensities(input_mode);
  out.total_t = t_row.sum();
  out.probe_t.resize(static_cast<int>(probe_modes.size()));
  for (size_t k = 0; k < probe_modes.size(); ++k)
    out.probe_t(static_cast<int>(k)) = t_row(probe_modes[k]);
  return out;
}

}  // namespace

RealizationTable fill_realizations(const EnsembleSpec& spec, int input_mode,
                                   const std::vector<std::pair<int, int>>& probe_pairs,
                                   bool parallel, SamplerPath path) {
  validate_run_inputs(spec, input_mode, probe_pairs);
  const auto start = Clock::now();

  // distinct probe modes, ascending; pairs index into this list
  std::set<int> mode_set;
  for (const auto& [b0, b1] : probe_pairs) {
    mode_set.insert(b0);
    mode_set.insert(b1);
  }
  const std::vector<int> probe_modes(mode_set.begin(), mode_set.end());
  std::vector<std::pair<int, int>> pair_slots;
  pair_slots.reserve(probe_pairs.size());
  for (const auto& [b0, b1] : probe_pairs) {
    const auto i0 = std::lower_bound(probe_modes.begin(), probe_modes.end(), b0);
    const auto i1 = std::lower_bound(probe_modes.begin(), probe_modes.end(), b1);
    pair_slots.emplace_back(static_cast<int>(i0 - probe_modes.begin()),
                            static_cast<int>(i1 - probe_modes.begin()));
  }
  const int probe_count = static_cast<int>(probe_modes.size());
  const int pair_count = static_cast<int>(probe_pairs.size());

  const bool reduced =
      path == SamplerPath::Auto && spec.kind != EnsembleKind::SliceComposition;
  std::optional<SliceCalibration> cal;
  if (spec.kind == EnsembleKind::SliceComposition) cal = calibrate_slices(spec);

  const long long total = spec.realizations;
  RealizationTable table;
  table.spec = spec;
  table.input_mode = input_mode;
  table.probe_pairs = probe_pairs;
  table.total_transmission.resize(total);
  table.probe_mean.resize(total);
  table.pair_products.resize(total, pair_count);

  const SubstreamFactory factory(spec.master_seed);
  std::vector<char> accepted(static_cast<size_t>(total), 0);

  auto draw_index = [&](long long index) -> DrawResult {
    auto rng = factory.make(StreamDomain::Realization, static_cast<std::uint64_t>(index));
    if (reduced) return reduced_draw(spec, probe_count, rng);
    return full_draw(spec, cal ? &*cal : nullptr, input_mode, probe_modes, rng);
  };
  auto store = [&](long long slot, const DrawResult& d) {
    table.total_transmission(slot) = d.total_t;
    table.probe_mean(slot) = d.probe_t.mean();
    for (int k = 0; k < pair_count; ++k)
      table.pair_products(slot, k) =
          d.probe_t(pair_slots[static_cast<size_t>(k)].first) *
          d.probe_t(pair_slots[static_cast<size_t>(k)].second);
  };

  // Primary pass: slot i <- substream i. Slots are independent, so the
  // parallel fill is bit-identical to the serial one.
#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (long long i = 0; i < total; ++i) {
    const DrawResult d = draw_index(i);
    if (d.accepted) {
      store(i, d);
      accepted[static_cast<size_t>(i)] = 1;
    }
  }
  (void)parallel;

  // Replacement pass: rejected slots are refilled in ascending order from
  // fresh substream indices beyond the nominal count. Serial and
  // deterministic.
  long long rejected = 0;
  long long next_index = total;
  for (long long i = 0; i < total; ++i) {
    if (accepted[static_cast<size_t>(i)]) continue;
    ++rejected;
    for (;;) {
      const DrawResult d = draw_index(next_index++);
      if (d.accepted) {
        store(i, d);
        break;
      }
      ++rejected;
    }
  }
  table.rejected = rejected;
  if (static_cast<double>(rejected) > 0.01 * static_cast<double>(total))
    throw EnsembleQualityError(
        "unitarity gate rejected " + std::to_string(rejected) + " of " +
        std::to_string(total) + " realizations (above the 1% budget)");

  table.fill_seconds = seconds_since(start);
  return table;
}

namespace {

// Jackknife standard error for a smooth function of sample means.
// values_fn(i) must return the estimator with realization i left out.
template <typename LeaveOneOut>
double jackknife_se(long long count, double full_estimate, LeaveOneOut&& leave_one_out) {
  if (count < 2) return 0.0;
  long double sum = 0.0L, sum2 = 0.0L;
  for (long long i = 0; i < count; ++i) {
    const double theta = leave_one_out(i);
    sum += theta;
    sum2 += static_cast<long double>(theta) * theta;
  }
  const long double n = static_cast<long double>(count);
  const long double mean = sum / n;
  long double var = sum2 / n - mean * mean;
  if (var < 0.0L) var = 0.0L;
  (void)full_estimate;
  return static_cast<double>(std::sqrt(static_cast<double>(var * (n - 1.0L))));
}

struct BlockedAccumulator {
  // fixed-size blocks merged left-to-right: the reduction order never
  // depends on the worker count
  static constexpr long long kBlock = 256;
  MomentAccumulator block;
  MomentAccumulator total;
  void add(double x) {
    block.add(x);
    if (block.count == kBlock) {
      total.merge(block);
      block = MomentAccumulator{};
    }
  }
  MomentAccumulator finish() {
    total.merge(block);
    block = MomentAccumulator{};
    return total;
  }
};

}  // namespace

EnsembleResult reduce_realizations(const RealizationTable& table, const InputState& state) {
  const auto start = Clock::now();
  const long long count = table.total_transmission.size();
  if (count == 0) throw UsageError("empty realization table: zero realizations");

  const double mu = state.mean_photons();
  const double fano = state.fano();
  const double m2 = state.photon_moments().second_moment;
  const int pair_count = static_cast<int>(table.pair_products.cols());

  BlockedAccumulator acc_t, acc_vt, acc_vr;
  for (long long i = 0; i < count; ++i) {
    const double t_a = table.total_transmission(i);
    const double r_a = 1.0 - t_a;  // flux conservation, enforced by the unitarity gate
    acc_t.add(t_a);
    acc_vt.add(total_variance_from(t_a, mu, fano) / (mu > 0.0 ? mu : 1.0));
    acc_vr.add(total_variance_from(r_a, mu, fano) / (mu > 0.0 ? mu : 1.0));
  }
  MomentAccumulator t_stats = acc_t.finish();
  MomentAccumulator vt_stats = acc_vt.finish();
  MomentAccumulator vr_stats = acc_vr.finish();

  // Normalized two-point correlation as a ratio of disorder means: mean of
  // the pair second moment over mean of the mean-count product (the
  // unbiased reading; a mean of per-realization ratios would be biased).
  long double num_sum = 0.0L, den_sum = 0.0L, probe_sum = 0.0L;
  Eigen::VectorXd pair_mean(count);
  for (long long i = 0; i < count; ++i) {
    double pm = 0.0;
    for (int k = 0; k < pair_count; ++k) pm += table.pair_products(i, k);
    pm /= pair_count;
    pair_mean(i) = pm;
    num_sum += (m2 - mu) * pm;
    den_sum += mu * mu * pm;
    probe_sum += table.probe_mean(i);
  }

  const double num_mean = static_cast<double>(num_sum) / count;
  const double den_mean = static_cast<double>(den_sum) / count;
  const double two_point = num_mean / den_mean;  // NaN when mu = 0
  const double two_point_se = jackknife_se(count, two_point, [&](long long i) {
    const double n_i = (static_cast<double>(num_sum) - (m2 - mu) * pair_mean(i)) /
                       static_cast<double>(count - 1);
    const double d_i = (static_cast<double>(den_sum) - mu * mu * pair_mean(i)) /
                       static_cast<double>(count - 1);
    return n_i / d_i;
  });

  // c2 diagnostic: mean(T_b0 T_b1) / mean(T_b)^2 - 1 over the probe set.
  long double pair_sum = 0.0L;
  for (long long i = 0; i < count; ++i) pair_sum += pair_mean(i);
  const double a_mean = static_cast<double>(pair_sum) / count;
  const double b_mean = static_cast<double>(probe_sum) / count;
  const double c2 = a_mean / (b_mean * b_mean) - 1.0;
  const double c2_se = jackknife_se(count, c2, [&](long long i) {
    const double a_i =
        (static_cast<double>(pair_sum) - pair_mean(i)) / static_cast<double>(count - 1);
    const double b_i = (static_cast<double>(probe_sum) - table.probe_mean(i)) /
                       static_cast<double>(count - 1);
    return a_i / (b_i * b_i) - 1.0;
  });

  EnsembleResult result;
  result.spec_echo = table.spec;
  result.state_echo = state;
  result.input_mode = table.input_mode;
  result.probe_pairs = table.probe_pairs;
  result.rejected_realizations = table.rejected;

  result.estimates.emplace_back(
      kEstimateKeys[0], Estimate{t_stats.mean, t_stats.standard_error()});
  result.estimates.emplace_back(
      kEstimateKeys[1], Estimate{vt_stats.mean, vt_stats.standard_error()});
  result.estimates.emplace_back(
      kEstimateKeys[2], Estimate{vr_stats.mean, vr_stats.standard_error()});
  result.estimates.emplace_back(kEstimateKeys[3], Estimate{two_point, two_point_se});
  result.estimates.emplace_back(kEstimateKeys[4], Estimate{c2, c2_se});

  // Per-pair correlation estimates (range-independence diagnostics).
  result.per_pair_correlation.reserve(static_cast<size_t>(pair_count));
  for (int k = 0; k < pair_count; ++k) {
    long double col_sum = 0.0L;
    for (long long i = 0; i < count; ++i) col_sum += table.pair_products(i, k);
    const double theta =
        ((m2 - mu) * static_cast<double>(col_sum)) / (mu * mu * static_cast<double>(col_sum));
    const double se = jackknife_se(count, theta, [&](long long i) {
      const double rest = static_cast<double>(col_sum) - table.pair_products(i, k);
      return ((m2 - mu) * rest) / (mu * mu * rest);
    });
    result.per_pair_correlation.push_back(Estimate{theta, se});
  }

  // Closed-form counterparts. The factorized ensembles realize the
  // leading-order (infinite-g) formulas; the slice ensemble carries its
  // finite-g bracket.
  const EnsembleSpec& spec = table.spec;
  const double g_for_prediction = spec.kind == EnsembleKind::SliceComposition
                                      ? spec.conductance()
                                      : std::numeric_limits<double>::infinity();
  result.analytic.emplace_back(kEstimateKeys[0], spec.ell_over_L);
  result.analytic.emplace_back(
      kEstimateKeys[1],
      predict_total_transmission_variance(state, spec.ell_over_L, g_for_prediction));
  result.analytic.emplace_back(
      kEstimateKeys[2], predict_total_reflection_variance(state, spec.ell_over_L));
  if (mu > 0.0)
    result.analytic.emplace_back(kEstimateKeys[3], predict_two_point_correlation(state));
  result.analytic.emplace_back(kEstimateKeys[4], 4.0 / (3.0 * spec.conductance()));

  result.wall_time_seconds = table.fill_seconds + seconds_since(start);
  return result;
}

const Estimate* EnsembleResult::find(const std::string& key) const {
  for (const auto& [name, est] : estimates)
    if (name == key) return &est;
  return nullptr;
}

const double* EnsembleResult::find_analytic(const std::string& key) const {
  for (const auto& [name, value] : analytic)
    if (name == key) return &value;
  return nullptr;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec, const InputState& state,
                            int input_mode,
                            const std::vector<std::pair<int, int>>& probe_pairs) {
  return reduce_realizations(fill_realizations(spec, input_mode, probe_pairs, true), state);
}

EnsembleResult run_ensemble_serial(const EnsembleSpec& spec, const InputState& state,
                                   int input_mode,
                                   const std::vector<std::pair<int, int>>& probe_pairs) {
  return reduce_realizations(fill_realizations(spec, input_mode, probe_pairs, false), state);
}

std::pair<double, double> measure_c2(const EnsembleSpec& spec,
                                     const std::vector<std::pair<int, int>>& probe_pairs) {
  const RealizationTable table = fill_realizations(spec, 0, probe_pairs, true);
  // any state works: c2 is a classical intensity statistic
  const EnsembleResult result = reduce_realizations(table, InputState::coherent(1.0));
  const Estimate* c2 = result.find(kEstimateKeys[4]);
  return {c2->value, c2->standard_error};
}

std::vector<ReportRow> convergence_report(const EnsembleResult& result) {
  if (result.estimates.empty() || result.spec_echo.realizations == 0)
    throw UsageError("convergence report requested for an empty result");
  std::vector<ReportRow> rows;
  rows.reserve(result.estimates.size());
  for (const auto& [name, est] : result.estimates) {
    ReportRow row;
    row.quantity = name;
    row.value = est.value;
    row.standard_error = est.standard_error;
    if (const double* analytic = result.find_analytic(name)) {
      row.has_analytic = true;
      row.analytic = *analytic;
      const double scale = std::max(1.0, std::abs(*analytic));
      const double se = std::max(est.standard_error, 1e-15 * scale);
      row.pull = (est.value - *analytic) / se;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qspeckle
