#pragma once

#include <Eigen/Dense>
#include <utility>

#include "qspeckle/input_state.hpp"
#include "qspeckle/scattering.hpp"

namespace qspeckle {

/// Realizations with unitarity defect above this are rejected as invalid.
inline constexpr double kUnitarityGate = 1e-8;

/// Exact quantum photon-number statistics of all outputs for one disorder
/// realization and one left input mode.
struct RealizationStatistics {
  Eigen::VectorXd mode_means;      // <n_b> for each right output mode b
  Eigen::VectorXd mode_variances;  // Var(n_b)
  double total_transmission_mean = 0.0;
  double total_transmission_variance = 0.0;
  double total_reflection_mean = 0.0;
  double total_reflection_variance = 0.0;
  double transmitted_fraction = 0.0;  // T_a = sum_b T_ab
};

// Closed forms shared with the ensemble driver. mu: input mean photons,
// fano: input Fano factor, m2: input second moment <n^2>.
// They express photodetection moments after a lossless linear network fed
// through one port: each output sees a binomially sampled share of the
// input photons plus vacuum from all other ports.
inline double mode_mean_from(double t_ab, double mu) { return mu * t_ab; }
inline double mode_variance_from(double t_ab, double mu, double fano) {
  return mu * t_ab + mu * (fano - 1.0) * t_ab * t_ab;
}
inline double cross_covariance_from(double t0, double t1, double mu, double fano) {
  return mu * (fano - 1.0) * t0 * t1;
}
inline double total_variance_from(double total_t, double mu, double fano) {
  return mu * total_t + mu * (fano - 1.0) * total_t * total_t;
}
inline double pair_second_moment_from(double t0, double t1, double mu, double m2) {
  return (m2 - mu) * t0 * t1;  // <n_b0 n_b1>, b0 != b1
}

/// <n_b>: mean photon count in right output mode b for input mode a.
double mode_mean(const ScatteringMatrix& s, int a, int b, const InputState& state);

/// Var(n_b).
double mode_variance(const ScatteringMatrix& s, int a, int b, const InputState& state);

/// Cov(n_b0, n_b1) for distinct right output modes.
double mode_cross_covariance(const ScatteringMatrix& s, int a, int b0, int b1,
                             const InputState& state);

/// (mean, variance) of the total transmitted photon number.
std::pair<double, double> total_transmission_stats(const ScatteringMatrix& s, int a,
                                                   const InputState& state);

/// (mean, variance) of the total reflected photon number.
std::pair<double, double> total_reflection_stats(const ScatteringMatrix& s, int a,
                                                 const InputState& state);

/// <n_b0 n_b1> for distinct right output modes (the numerator of the
/// normalized two-point correlation before disorder averaging).
double two_point_numerator(const ScatteringMatrix& s, int a, int b0, int b1,
                           const InputState& state);

/// Everything above in one pass over the realization.
RealizationStatistics realization_statistics(const ScatteringMatrix& s, int a,
                                             const InputState& state);

}  // namespace qspeckle
