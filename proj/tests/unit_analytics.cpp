#include <doctest.h>

#include <cmath>
#include <limits>

#include "qspeckle/analytics.hpp"
#include "qspeckle/errors.hpp"

using namespace qspeckle;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("total transmission variance ratio: pinned values") {
  // coherent: linear in ell/L at every conductance
  CHECK(predict_total_transmission_variance(InputState::coherent(1.0), 0.5, kInf) ==
        doctest::Approx(0.5).epsilon(1e-15));
  CHECK(predict_total_transmission_variance(InputState::coherent(3.0), 0.5, 2.0) ==
        doctest::Approx(0.5).epsilon(1e-15));

  // Fock at full transparency: no fluctuations left
  CHECK(predict_total_transmission_variance(InputState::fock(1), 1.0, kInf) ==
        doctest::Approx(0.0).epsilon(1e-15));

  // thermal mean 1 at ell/L = 1/3, g = 10
  CHECK(predict_total_transmission_variance(InputState::thermal(1.0), 1.0 / 3.0, 10.0) ==
        doctest::Approx(1.0 / 3.0 + (1.0 / 9.0) * (1.0 + 0.1 * (4.0 / 3.0 + 1.0 / 3.0)))
            .epsilon(1e-14));
  CHECK(predict_total_transmission_variance(InputState::thermal(1.0), 1.0 / 3.0, 10.0) ==
        doctest::Approx(0.4630).epsilon(1e-3));
}

TEST_CASE("total reflection variance ratio: pinned values") {
  // thick-sample endpoint recovers the input Fano factor exactly
  CHECK(predict_total_reflection_variance(InputState::coherent(2.0), 0.0) == 1.0);
  CHECK(predict_total_reflection_variance(InputState::thermal(1.0), 0.0) == 2.0);
  CHECK(predict_total_reflection_variance(InputState::fock(3), 0.0) == 0.0);

  CHECK(predict_total_reflection_variance(InputState::fock(1), 0.5) ==
        doctest::Approx(0.25).epsilon(1e-15));
  for (double x : {0.1, 0.4, 0.9})
    CHECK(predict_total_reflection_variance(InputState::coherent(1.0), x) ==
          doctest::Approx(1.0 - x).epsilon(1e-15));
}

TEST_CASE("two-point correlation: pinned values") {
  for (double mu : {0.2, 1.0, 5.0})
    CHECK(predict_two_point_correlation(InputState::thermal(mu)) ==
          doctest::Approx(2.0).epsilon(1e-15));
  CHECK(predict_two_point_correlation(InputState::fock(1)) ==
        doctest::Approx(0.0).epsilon(1e-15));
  for (int n : {2, 3, 7})
    CHECK(predict_two_point_correlation(InputState::fock(n)) ==
          doctest::Approx(1.0 - 1.0 / n).epsilon(1e-14));
  CHECK(predict_two_point_correlation(InputState::coherent(0.01)) ==
        doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("per-mode moment ratios: pinned values") {
  const auto [cv, cc] = predict_mode_moments(InputState::coherent(1.0), 0.3, 5.0);
  CHECK(cv == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(cc == doctest::Approx(0.0).epsilon(1e-15));

  const auto [fv, fc] = predict_mode_moments(InputState::fock(2), 0.1, kInf);
  CHECK(fv == doctest::Approx(0.08).epsilon(1e-14));
  CHECK(fc == doctest::Approx(-0.01).epsilon(1e-14));

  const auto [tv, tc] = predict_mode_moments(InputState::thermal(1.0), 0.1, kInf);
  CHECK(tv == doctest::Approx(0.12).epsilon(1e-14));
  CHECK(tc == doctest::Approx(0.01).epsilon(1e-14));
}

TEST_CASE("domain gates") {
  CHECK_THROWS_AS(
      predict_total_transmission_variance(InputState::coherent(1.0), 0.5, 1.0),
      OutOfValidityError);
  CHECK_THROWS_AS(
      predict_total_transmission_variance(InputState::coherent(1.0), 0.0, kInf),
      RangeError);
  CHECK_THROWS_AS(
      predict_total_transmission_variance(InputState::coherent(1.0), 1.2, kInf),
      RangeError);
  CHECK_THROWS_AS(predict_total_reflection_variance(InputState::fock(1), -0.1), RangeError);
  CHECK_THROWS_AS(predict_two_point_correlation(InputState::fock(0)), RangeError);
  CHECK_THROWS_AS(predict_mode_moments(InputState::fock(1), 0.0, kInf), RangeError);
}

TEST_CASE("structural invariants of the closed forms") {
  const InputState cs = InputState::coherent(1.0);
  const InputState ts = InputState::thermal(1.0);
  const InputState fs = InputState::fock(1);

  for (int i = 1; i <= 20; ++i) {
    const double x = i / 20.0;
    for (const InputState& s : {cs, ts, fs}) {
      // variance ratios stay non-negative over the whole domain at g = inf
      CHECK(predict_total_transmission_variance(s, x, kInf) >= 0.0);
      CHECK(predict_total_reflection_variance(s, x) >= 0.0);
    }
    // finite-g correction keeps coherent/thermal non-negative too (the Fock
    // curve may dip below zero near full transparency, where the 1/g
    // expansion is no longer uniformly valid)
    CHECK(predict_total_transmission_variance(cs, x, 8.0) >= 0.0);
    CHECK(predict_total_transmission_variance(ts, x, 8.0) >= 0.0);
    // coherent flatness: the finite-g bracket multiplies zero
    CHECK(predict_total_transmission_variance(cs, x, 2.5) ==
          doctest::Approx(predict_total_transmission_variance(cs, x, kInf))
              .epsilon(1e-15));
    // sign dichotomy of the quadratic term
    CHECK(predict_total_transmission_variance(ts, x, kInf) - x >= 0.0);
    CHECK(predict_total_transmission_variance(fs, x, kInf) - x <= 0.0);
  }

  // endpoint continuity: full transparency in transmission mirrors the
  // thick-sample limit in reflection
  for (const InputState& s : {cs, ts, fs})
    CHECK(predict_total_transmission_variance(s, 1.0, kInf) ==
          doctest::Approx(predict_total_reflection_variance(s, 0.0)).epsilon(1e-15));

  // anti-bunching below the coherent line, bunching above
  for (int n = 1; n <= 10; ++n)
    CHECK(predict_two_point_correlation(InputState::fock(n)) < 1.0);
  for (double mu : {0.1, 1.0, 10.0})
    CHECK(predict_two_point_correlation(InputState::thermal(mu)) > 1.0);
}

TEST_CASE("figure sweeps: deterministic grids with pinned shapes") {
  const auto reflection = figure_sweep(Figure::Fig2Reflection);
  CHECK(reflection.size() == 3 * 101);  // endpoint + 100 interior points per state
  CHECK(reflection.front().ell_over_L == 0.0);
  CHECK(reflection.front().value == 1.0);  // coherent endpoint = Fano factor

  const auto transmission = figure_sweep(Figure::Fig2Transmission);
  CHECK(transmission.size() == 3 * 100);
  for (const auto& row : transmission) CHECK(std::isinf(row.g));

  const auto correlation = figure_sweep(Figure::Fig3);
  CHECK(correlation.size() == 50 + 50 + 10);
  int coherent_rows = 0;
  for (const auto& row : correlation) {
    if (row.state.kind() == StateKind::Coherent) {
      ++coherent_rows;
      CHECK(row.value == doctest::Approx(1.0).epsilon(1e-15));
    }
    if (row.state.kind() == StateKind::Thermal)
      CHECK(row.value == doctest::Approx(2.0).epsilon(1e-15));
  }
  CHECK(coherent_rows == 50);

  const auto trend = figure_sweep(Figure::Fig4);
  CHECK(trend.size() == 3 * 49);  // g = 2..50
  for (const auto& row : trend) {
    CHECK(row.ell_over_L == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    if (row.state.kind() == StateKind::Coherent)
      CHECK(row.value == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  }

  // repeated sweeps are identical
  const auto again = figure_sweep(Figure::Fig4);
  REQUIRE(again.size() == trend.size());
  for (size_t i = 0; i < trend.size(); ++i) CHECK(again[i].value == trend[i].value);
}

TEST_CASE("names round-trip") {
  for (Figure f :
       {Figure::Fig2Reflection, Figure::Fig2Transmission, Figure::Fig3, Figure::Fig4})
    CHECK(figure_from_name(figure_name(f)) == f);
  CHECK(!figure_from_name("fig9"));
  CHECK(quantity_name(Quantity::TwoPointCorrelation) ==
        std::string("two_point_correlation"));
}
