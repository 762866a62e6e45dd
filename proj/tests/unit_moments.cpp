#include <doctest.h>

#include <cmath>
#include <vector>

#include "qspeckle/moments.hpp"
#include "qspeckle/scattering.hpp"

using namespace qspeckle;

namespace {

// Lossless 50/50 splitter: zero reflection, Hadamard transmission, so
// T_00 = T_01 = 1/2.
ScatteringMatrix fifty_fifty() {
  const double s = 1.0 / std::sqrt(2.0);
  ScatteringMatrix m = ScatteringMatrix::identity(2);
  m.t << s, s, s, -s;
  m.t_prime = m.t;
  return m;
}

ScatteringMatrix random_medium(int n, double ell_over_L, std::uint64_t seed,
                               std::uint64_t index) {
  EnsembleSpec spec;
  spec.n_modes = n;
  spec.ell_over_L = ell_over_L;
  auto rng = SubstreamFactory(seed).make(StreamDomain::Realization, index);
  return assemble_polar(sample_transmission_eigenvalues(spec, rng), rng);
}

}  // namespace

TEST_CASE("identity medium passes the input statistics through untouched") {
  const ScatteringMatrix id = ScatteringMatrix::identity(3);
  for (const InputState& state :
       {InputState::coherent(2.5), InputState::thermal(1.0), InputState::fock(4)}) {
    const double mu = state.mean_photons();
    CHECK(mode_mean(id, 1, 1, state) == doctest::Approx(mu).epsilon(1e-14));
    CHECK(mode_mean(id, 1, 0, state) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(mode_mean(id, 1, 2, state) == doctest::Approx(0.0).epsilon(1e-14));
    // fully transmitted: count fluctuations equal the input's
    const auto [t_mean, t_var] = total_transmission_stats(id, 1, state);
    CHECK(t_mean == doctest::Approx(mu).epsilon(1e-14));
    CHECK(t_var == doctest::Approx(state.fano() * mu).epsilon(1e-14));
  }
}

TEST_CASE("50/50 splitter: textbook single-input moments") {
  const ScatteringMatrix bs = fifty_fifty();

  // two photons split evenly: one per arm on average
  CHECK(mode_mean(bs, 0, 0, InputState::fock(2)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(mode_mean(bs, 0, 1, InputState::fock(2)) == doctest::Approx(1.0).epsilon(1e-14));

  // one photon: Bernoulli(1/2) per arm, variance 1/4, anticorrelated arms
  CHECK(mode_variance(bs, 0, 0, InputState::fock(1)) ==
        doctest::Approx(0.25).epsilon(1e-14));
  CHECK(mode_cross_covariance(bs, 0, 0, 1, InputState::fock(1)) ==
        doctest::Approx(-0.25).epsilon(1e-14));

  // thermal bunching gives positively correlated arms
  CHECK(mode_cross_covariance(bs, 0, 0, 1, InputState::thermal(1.0)) ==
        doctest::Approx(0.25).epsilon(1e-14));

  // pair second moments
  CHECK(two_point_numerator(bs, 0, 0, 1, InputState::thermal(1.0)) ==
        doctest::Approx(0.5).epsilon(1e-14));
  CHECK(two_point_numerator(bs, 0, 0, 1, InputState::fock(1)) ==
        doctest::Approx(0.0).epsilon(1e-14));
  const double mu = 1.7;
  CHECK(two_point_numerator(bs, 0, 0, 1, InputState::coherent(mu)) ==
        doctest::Approx(mu * mu * 0.25).epsilon(1e-14));

  // transparent two-port: Fock total-transmission variance vanishes
  const auto [t_mean, t_var] = total_transmission_stats(bs, 0, InputState::fock(3));
  CHECK(t_mean == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(t_var == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("half-reflecting medium: binomial totals for Fock input") {
  auto rng = SubstreamFactory(11).make(StreamDomain::Realization, 0);
  const ScatteringMatrix s = assemble_polar(std::vector<double>(4, 0.5), rng);
  for (int n : {1, 2, 5}) {
    const auto [r_mean, r_var] = total_reflection_stats(s, 0, InputState::fock(n));
    CHECK(r_mean == doctest::Approx(0.5 * n).epsilon(1e-12));
    CHECK(r_var == doctest::Approx(0.25 * n).epsilon(1e-12));  // n R (1-R)
    const auto [t_mean, t_var] = total_transmission_stats(s, 0, InputState::fock(n));
    CHECK(t_var == doctest::Approx(0.25 * n).epsilon(1e-12));  // n T (1-T)
    CHECK(t_mean + r_mean == doctest::Approx(static_cast<double>(n)).epsilon(1e-12));
  }
}

TEST_CASE("per-realization invariants across random media and states") {
  const std::vector<InputState> states = {InputState::coherent(1.3),
                                          InputState::thermal(0.8), InputState::fock(3)};
  for (int rep = 0; rep < 50; ++rep) {
    const int n = 6;
    const ScatteringMatrix s = random_medium(n, 0.4, 12, rep);
    const int a = rep % n;
    for (const InputState& state : states) {
      const RealizationStatistics stats = realization_statistics(s, a, state);
      const double mu = state.mean_photons();

      // mean consistency and flux split
      CHECK(stats.total_transmission_mean ==
            doctest::Approx(mu * stats.transmitted_fraction).epsilon(1e-12));
      CHECK(stats.total_transmission_mean + stats.total_reflection_mean ==
            doctest::Approx(mu).epsilon(1e-10));

      // reconstruction: total variance = sum of per-mode variances plus all
      // cross-covariances
      double reconstructed = 0.0;
      for (int b = 0; b < n; ++b) reconstructed += mode_variance(s, a, b, state);
      for (int b0 = 0; b0 < n; ++b0)
        for (int b1 = 0; b1 < n; ++b1)
          if (b0 != b1) reconstructed += mode_cross_covariance(s, a, b0, b1, state);
      CHECK(std::abs(stats.total_transmission_variance - reconstructed) < 1e-10);

      // agreement between the bulk and single-quantity entry points
      for (int b = 0; b < n; ++b) {
        CHECK(stats.mode_means(b) ==
              doctest::Approx(mode_mean(s, a, b, state)).epsilon(1e-13));
        CHECK(stats.mode_variances(b) ==
              doctest::Approx(mode_variance(s, a, b, state)).epsilon(1e-13));
        CHECK(stats.mode_variances(b) >= -1e-12);
      }

      // realization-level correlation ratio is a state constant
      const double expected_ratio = 1.0 + (state.fano() - 1.0) / mu;
      for (int b1 = 1; b1 < n; ++b1) {
        const double m0 = mode_mean(s, a, 0, state);
        const double m1 = mode_mean(s, a, b1, state);
        if (m0 > 1e-12 && m1 > 1e-12) {
          const double ratio = two_point_numerator(s, a, 0, b1, state) / (m0 * m1);
          CHECK(ratio == doctest::Approx(expected_ratio).epsilon(1e-10));
        }
      }
    }

    // coherent input stays Poissonian mode by mode and in both totals
    const InputState cs = InputState::coherent(2.2);
    const RealizationStatistics ps = realization_statistics(s, a, cs);
    for (int b = 0; b < n; ++b)
      CHECK(ps.mode_variances(b) == doctest::Approx(ps.mode_means(b)).epsilon(1e-13));
    CHECK(ps.total_transmission_variance ==
          doctest::Approx(ps.total_transmission_mean).epsilon(1e-13));
    CHECK(ps.total_reflection_variance ==
          doctest::Approx(ps.total_reflection_mean).epsilon(1e-13));
  }
}

TEST_CASE("vacuum input yields all-zero statistics without error") {
  const ScatteringMatrix s = random_medium(4, 0.5, 13, 0);
  const RealizationStatistics stats = realization_statistics(s, 0, InputState::fock(0));
  CHECK(stats.total_transmission_mean == 0.0);
  CHECK(stats.total_transmission_variance == 0.0);
  CHECK(stats.mode_means.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("argument and unitarity gates") {
  const ScatteringMatrix s = random_medium(4, 0.5, 14, 0);
  const InputState state = InputState::thermal(1.0);

  CHECK_THROWS_AS(mode_mean(s, -1, 0, state), UsageError);
  CHECK_THROWS_AS(mode_mean(s, 0, 4, state), UsageError);
  CHECK_THROWS_AS(mode_cross_covariance(s, 0, 2, 2, state), UsageError);
  CHECK_THROWS_AS(two_point_numerator(s, 0, 1, 1, state), UsageError);

  // an amplifying (non-unitary) matrix must be rejected, not evaluated
  ScatteringMatrix bad = s;
  bad.t *= 1.1;
  CHECK_THROWS_AS(mode_mean(bad, 0, 0, state), RangeError);
  CHECK_THROWS_AS(total_transmission_stats(bad, 0, state), RangeError);
  CHECK_THROWS_AS(realization_statistics(bad, 0, state), RangeError);
}
