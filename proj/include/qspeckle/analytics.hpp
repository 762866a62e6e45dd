#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qspeckle/input_state.hpp"

namespace qspeckle {

enum class Quantity {
  TotalTransmissionVarianceRatio,
  TotalReflectionVarianceRatio,
  TwoPointCorrelation,
  ModeVariance,
  ModeCrossCovariance,
};

const char* quantity_name(Quantity q);

enum class Figure { Fig2Reflection, Fig2Transmission, Fig3, Fig4 };

const char* figure_name(Figure f);
std::optional<Figure> figure_from_name(const std::string& name);

/// One closed-form prediction evaluated at one parameter point.
/// g is +infinity where mesoscopic corrections are neglected; ell_over_L is
/// NaN for quantities that do not depend on it.
struct PredictionPoint {
  Quantity quantity;
  InputState state;
  double ell_over_L;
  double g;
  double value;
};

/// Disorder-averaged variance of the total transmitted photon number over
/// the input mean:
///   ell/L + (ell/L)^2 (F-1) [1 + (1/g)(4/3 + ell/L)],
/// bracket = 1 for infinite g. Valid in the diffusive regime; g <= 1 throws
/// OutOfValidityError.
double predict_total_transmission_variance(const InputState& state,
                                           double ell_over_L, double g);

/// Disorder-averaged variance of the total reflected photon number over the
/// input mean:
///   (1 - ell/L) + (1 - ell/L)^2 (F-1),
/// with no 1/g correction term. Accepts ell_over_L in [0, 1]; the value at
/// 0 is the thick-sample endpoint, equal to the input Fano factor.
double predict_total_reflection_variance(const InputState& state, double ell_over_L);

/// Normalized two-point photon correlation between distinct output modes:
///   1 + (F-1)/mean.
/// Exact, independent of disorder strength and of g. mean = 0 throws
/// RangeError (undefined correlation).
double predict_two_point_correlation(const InputState& state);

/// (variance ratio, cross-covariance ratio) for a single output mode pair
/// at ensemble level:
///   variance_ratio = T + T^2 (F-1)(2 + 8/3g)
///   cross_ratio    = T^2 (F-1)(1 + 4/3g)
/// with T the ensemble-mean per-mode transmission.
std::pair<double, double> predict_mode_moments(const InputState& state,
                                               double mean_T, double g);

/// Prediction curves behind the standard figures:
///   Fig2Reflection:   reflection variance ratio vs ell/L (with the ell/L=0
///                     endpoint row), three states, g infinite
///   Fig2Transmission: transmission variance ratio vs ell/L, three states,
///                     g infinite
///   Fig3:             two-point correlation vs mean photon number
///                     (coherent/thermal on a log grid; Fock at integer n)
///   Fig4:             transmission variance ratio vs g at ell/L = 1/3
/// Row order is deterministic.
std::vector<PredictionPoint> figure_sweep(Figure which);

}  // namespace qspeckle
