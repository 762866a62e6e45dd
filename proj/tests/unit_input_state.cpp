#include <doctest.h>

#include "qspeckle/errors.hpp"
#include "qspeckle/input_state.hpp"

using namespace qspeckle;

TEST_CASE("fano factors: 1 coherent, 1 + mean thermal, 0 fock") {
  CHECK(InputState::coherent(0.3).fano() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(InputState::coherent(7.0).fano() == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(InputState::thermal(1.0).fano() == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(InputState::thermal(2.5).fano() == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(InputState::fock(1).fano() == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(InputState::fock(5).fano() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("photon moments (mean, second moment)") {
  const auto cs = InputState::coherent(4.0).photon_moments();
  CHECK(cs.mean == doctest::Approx(4.0).epsilon(1e-15));
  CHECK(cs.second_moment == doctest::Approx(20.0).epsilon(1e-15));  // mu^2 + mu

  const auto fs = InputState::fock(3).photon_moments();
  CHECK(fs.mean == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(fs.second_moment == doctest::Approx(9.0).epsilon(1e-15));  // n^2 exactly

  const auto ts = InputState::thermal(1.0).photon_moments();
  CHECK(ts.mean == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(ts.second_moment == doctest::Approx(3.0).epsilon(1e-15));  // mu^2 + (1+mu) mu
}

TEST_CASE("vacuum edge cases are allowed and zero") {
  for (const InputState& s :
       {InputState::coherent(0.0), InputState::thermal(0.0), InputState::fock(0)}) {
    CHECK(s.mean_photons() == 0.0);
    CHECK(s.photon_moments().second_moment == 0.0);
  }
}

TEST_CASE("negative occupations are rejected") {
  CHECK_THROWS_AS(InputState::coherent(-0.1), RangeError);
  CHECK_THROWS_AS(InputState::thermal(-2.0), RangeError);
  CHECK_THROWS_AS(InputState::fock(-1), RangeError);
}

TEST_CASE("names and equality") {
  CHECK(InputState::coherent(1.0).name() == "coherent");
  CHECK(InputState::thermal(1.0).name() == "thermal");
  CHECK(InputState::fock(2).name() == "fock");
  CHECK(InputState::fock(2) == InputState::fock(2));
  CHECK(!(InputState::fock(2) == InputState::fock(3)));
  CHECK(!(InputState::coherent(1.0) == InputState::thermal(1.0)));
}
