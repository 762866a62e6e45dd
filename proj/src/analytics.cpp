#include "qspeckle/analytics.hpp"

#include <cmath>
#include <limits>

#include "qspeckle/errors.hpp"

namespace qspeckle {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_g(double g) {
  if (std::isinf(g)) return;
  if (!(g > 1.0))
    throw OutOfValidityError("conductance g = " + std::to_string(g) +
                             " is outside the diffusive regime (need g > 1)");
}

void check_ell(double ell_over_L, double lowest) {
  if (!(ell_over_L >= lowest) || ell_over_L > 1.0)
    throw RangeError("ell_over_L must lie in [" + std::to_string(lowest) + ", 1], got " +
                     std::to_string(ell_over_L));
}

}  // namespace

const char* quantity_name(Quantity q) {
  switch (q) {
    case Quantity::TotalTransmissionVarianceRatio: return "total_transmission_variance_ratio";
    case Quantity::TotalReflectionVarianceRatio: return "total_reflection_variance_ratio";
    case Quantity::TwoPointCorrelation: return "two_point_correlation";
    case Quantity::ModeVariance: return "mode_variance";
    case Quantity::ModeCrossCovariance: return "mode_cross_covariance";
  }
  return "";
}

const char* figure_name(Figure f) {
  switch (f) {
    case Figure::Fig2Reflection: return "fig2-reflection";
    case Figure::Fig2Transmission: return "fig2-transmission";
    case Figure::Fig3: return "fig3";
    case Figure::Fig4: return "fig4";
  }
  return "";
}

std::optional<Figure> figure_from_name(const std::string& name) {
  if (name == "fig2-reflection") return Figure::Fig2Reflection;
  if (name == "fig2-transmission") return Figure::Fig2Transmission;
  if (name == "fig3") return Figure::Fig3;
  if (name == "fig4") return Figure::Fig4;
  return std::nullopt;
}

double predict_total_transmission_variance(const InputState& state, double ell_over_L,
                                           double g) {
  check_ell(ell_over_L, std::nextafter(0.0, 1.0));
  check_g(g);
  const double x = ell_over_L;
  const double bracket = std::isinf(g) ? 1.0 : 1.0 + (4.0 / 3.0 + x) / g;
  return x + x * x * (state.fano() - 1.0) * bracket;
}

double predict_total_reflection_variance(const InputState& state, double ell_over_L) {
  check_ell(ell_over_L, 0.0);  // 0 allowed: the thick-sample endpoint
  const double rho = 1.0 - ell_over_L;
  return rho + rho * rho * (state.fano() - 1.0);
}

double predict_two_point_correlation(const InputState& state) {
  const double mu = state.mean_photons();
  if (!(mu > 0.0))
    throw RangeError("two-point correlation undefined for mean_photons = 0");
  return 1.0 + (state.fano() - 1.0) / mu;
}

std::pair<double, double> predict_mode_moments(const InputState& state, double mean_T,
                                               double g) {
  if (!(mean_T > 0.0) || mean_T > 1.0)
    throw RangeError("mean_T must lie in (0, 1], got " + std::to_string(mean_T));
  check_g(g);
  const double inv_g = std::isinf(g) ? 0.0 : 1.0 / g;
  const double excess = state.fano() - 1.0;
  const double variance_ratio =
      mean_T + mean_T * mean_T * excess * (2.0 + 8.0 / 3.0 * inv_g);
  const double cross_ratio = mean_T * mean_T * excess * (1.0 + 4.0 / 3.0 * inv_g);
  return {variance_ratio, cross_ratio};
}

namespace {

std::vector<InputState> sweep_states() {
  return {InputState::coherent(1.0), InputState::thermal(1.0), InputState::fock(1)};
}

}  // namespace

std::vector<PredictionPoint> figure_sweep(Figure which) {
  std::vector<PredictionPoint> rows;
  switch (which) {
    case Figure::Fig2Reflection: {
      for (const InputState& state : sweep_states()) {
        // include the thick-sample endpoint, where the ratio equals the
        // input Fano factor exactly
        rows.push_back({Quantity::TotalReflectionVarianceRatio, state, 0.0, kInf,
                        predict_total_reflection_variance(state, 0.0)});
        for (int i = 1; i <= 100; ++i) {
          const double x = i / 100.0;
          rows.push_back({Quantity::TotalReflectionVarianceRatio, state, x, kInf,
                          predict_total_reflection_variance(state, x)});
        }
      }
      break;
    }
    case Figure::Fig2Transmission: {
      for (const InputState& state : sweep_states()) {
        for (int i = 1; i <= 100; ++i) {
          const double x = i / 100.0;
          rows.push_back({Quantity::TotalTransmissionVarianceRatio, state, x, kInf,
                          predict_total_transmission_variance(state, x, kInf)});
        }
      }
      break;
    }
    case Figure::Fig3: {
      // correlation vs mean photon number; independent of ell/L and g
      for (int i = 0; i < 50; ++i) {
        const double mu = 0.1 * std::pow(100.0, i / 49.0);  // log grid 0.1 .. 10
        const InputState cs = InputState::coherent(mu);
        rows.push_back(
            {Quantity::TwoPointCorrelation, cs, kNaN, kInf, predict_two_point_correlation(cs)});
      }
      for (int i = 0; i < 50; ++i) {
        const double mu = 0.1 * std::pow(100.0, i / 49.0);
        const InputState ts = InputState::thermal(mu);
        rows.push_back(
            {Quantity::TwoPointCorrelation, ts, kNaN, kInf, predict_two_point_correlation(ts)});
      }
      for (int n = 1; n <= 10; ++n) {  // Fock states exist only at integer n
        const InputState fs = InputState::fock(n);
        rows.push_back(
            {Quantity::TwoPointCorrelation, fs, kNaN, kInf, predict_two_point_correlation(fs)});
      }
      break;
    }
    case Figure::Fig4: {
      const double x = 1.0 / 3.0;
      for (const InputState& state : sweep_states()) {
        for (int g = 2; g <= 50; ++g) {
          rows.push_back({Quantity::TotalTransmissionVarianceRatio, state, x,
                          static_cast<double>(g),
                          predict_total_transmission_variance(state, x, g)});
        }
      }
      break;
    }
  }
  return rows;
}

}  // namespace qspeckle
