#include "qspeckle/moments.hpp"

#include <string>

namespace qspeckle {

namespace {

void check_mode(const ScatteringMatrix& s, int index, const char* what) {
  if (index < 0 || index >= s.n_modes())
    throw UsageError(std::string(what) + " index " + std::to_string(index) +
                     " out of range [0, " + std::to_string(s.n_modes()) + ")");
}

void check_realization(const ScatteringMatrix& s) {
  const double defect = unitarity_defect(s);
  if (defect > kUnitarityGate)
    throw RangeError("invalid realization: unitarity defect " + std::to_string(defect) +
                     " exceeds gate " + std::to_string(kUnitarityGate));
}

}  // namespace

double mode_mean(const ScatteringMatrix& s, int a, int b, const InputState& state) {
  check_mode(s, a, "input mode");
  check_mode(s, b, "output mode");
  check_realization(s);
  return mode_mean_from(s.transmission(a, b), state.mean_photons());
}

double mode_variance(const ScatteringMatrix& s, int a, int b, const InputState& state) {
  check_mode(s, a, "input mode");
  check_mode(s, b, "output mode");
  check_realization(s);
  return mode_variance_from(s.transmission(a, b), state.mean_photons(), state.fano());
}

double mode_cross_covariance(const ScatteringMatrix& s, int a, int b0, int b1,
                             const InputState& state) {
  check_mode(s, a, "input mode");
  check_mode(s, b0, "output mode");
  check_mode(s, b1, "output mode");
  if (b0 == b1)
    throw UsageError("mode_cross_covariance requires distinct output modes; use "
                     "mode_variance for b0 == b1");
  check_realization(s);
  return cross_covariance_from(s.transmission(a, b0), s.transmission(a, b1),
                               state.mean_photons(), state.fano());
}

std::pair<double, double> total_transmission_stats(const ScatteringMatrix& s, int a,
                                                   const InputState& state) {
  check_mode(s, a, "input mode");
  check_realization(s);
  const double total_t = s.total_transmission(a);
  const double mu = state.mean_photons();
  return {mu * total_t, total_variance_from(total_t, mu, state.fano())};
}

std::pair<double, double> total_reflection_stats(const ScatteringMatrix& s, int a,
                                                 const InputState& state) {
  check_mode(s, a, "input mode");
  check_realization(s);
  const double total_r = s.total_reflection(a);
  const double mu = state.mean_photons();
  return {mu * total_r, total_variance_from(total_r, mu, state.fano())};
}

double two_point_numerator(const ScatteringMatrix& s, int a, int b0, int b1,
                           const InputState& state) {
  check_mode(s, a, "input mode");
  check_mode(s, b0, "output mode");
  check_mode(s, b1, "output mode");
  if (b0 == b1) throw UsageError("two_point_numerator requires distinct output modes");
  check_realization(s);
  const PhotonMoments pm = state.photon_moments();
  return pair_second_moment_from(s.transmission(a, b0), s.transmission(a, b1), pm.mean,
                                 pm.second_moment);
}

RealizationStatistics realization_statistics(const ScatteringMatrix& s, int a,
                                             const InputState& state) {
  check_mode(s, a, "input mode");
  check_realization(s);
  const int n = s.n_modes();
  const double mu = state.mean_photons();
  const double fano = state.fano();
  const Eigen::VectorXd t_row = s.transmission_intensities(a);

  RealizationStatistics stats;
  stats.mode_means.resize(n);
  stats.mode_variances.resize(n);
  for (int b = 0; b < n; ++b) {
    stats.mode_means(b) = mode_mean_from(t_row(b), mu);
    stats.mode_variances(b) = mode_variance_from(t_row(b), mu, fano);
  }
  stats.transmitted_fraction = t_row.sum();
  stats.total_transmission_mean = mu * stats.transmitted_fraction;
  stats.total_transmission_variance =
      total_variance_from(stats.transmitted_fraction, mu, fano);
  const double total_r = s.total_reflection(a);
  stats.total_reflection_mean = mu * total_r;
  stats.total_reflection_variance = total_variance_from(total_r, mu, fano);
  return stats;
}

}  // namespace qspeckle
