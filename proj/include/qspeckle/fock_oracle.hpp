#pragma once

#include <Eigen/Dense>
#include <vector>

#include "qspeckle/errors.hpp"
#include "qspeckle/input_state.hpp"
#include "qspeckle/scattering.hpp"

namespace qspeckle {

/// Budget and truncation settings for the brute-force oracle.
struct OracleConfig {
  int max_modes = 8;
  int max_photons = 6;
  int thermal_truncation = 80;      // Fock cutoff for thermal mixtures
  double thermal_tail_bound = 1e-12;  // required bound on the neglected tail mass
};

/// Exact output photon statistics computed independently of the moment
/// formulas: per-mode means, the full count covariance matrix, and totals
/// over arbitrary mode subsets.
struct OracleMoments {
  Eigen::VectorXd mode_means;
  Eigen::MatrixXd mode_covariance;
  double truncation_error = 0.0;  // certified bound; 0 for exact cases

  double subset_mean(const std::vector<int>& modes) const;
  double subset_variance(const std::vector<int>& modes) const;
  /// <n_m0 n_m1> from covariance + means.
  double pair_second_moment(int m0, int m1) const;
};

/// n-photon Fock state into input mode a of an M x M unitary network:
/// output counts are jointly multinomial(n; p_m = |U(m, a)|^2).
OracleMoments oracle_fock(const ComplexMatrix& unitary, int a, int n,
                          const OracleConfig& config = {});

/// Coherent state of mean mu into mode a: outputs are independent Poisson
/// with means mu |U(m, a)|^2.
OracleMoments oracle_coherent(const ComplexMatrix& unitary, int a, double mean);

/// Thermal state of mean mu into mode a: Bose-Einstein mixture over the
/// Fock oracle up to the configured cutoff, with a rigorous truncation
/// bound on every reported moment. Throws TruncationError when the
/// neglected tail mass exceeds config.thermal_tail_bound.
OracleMoments oracle_thermal(const ComplexMatrix& unitary, int a, double mean,
                             const OracleConfig& config = {});

/// Dispatch on state kind.
OracleMoments oracle_moments(const ComplexMatrix& unitary, int a,
                             const InputState& state,
                             const OracleConfig& config = {});

/// Neglected probability mass of the geometric photon-number distribution
/// beyond the cutoff: (mu/(1+mu))^(cutoff+1).
double thermal_tail_mass(double mean, int cutoff);

struct TruncationError : EnsembleQualityError {
  TruncationError(const std::string& what, double tail)
      : EnsembleQualityError(what), tail_mass(tail) {}
  double tail_mass;
};

struct ResourceError : RangeError {
  using RangeError::RangeError;
};

}  // namespace qspeckle
