#pragma once

#include <string>

#include "qspeckle/errors.hpp"

namespace qspeckle {

enum class StateKind { Coherent, Thermal, Fock };

/// First two photon-number moments of the input state.
struct PhotonMoments {
  double mean;
  double second_moment;  // <n^2>
};

/// Single-mode quantum state illuminating the medium. Everything downstream
/// consumes only (mean photon number, Fano factor), so the state is stored
/// as moments; full Fock-space representations live in the oracle.
class InputState {
 public:
  static InputState coherent(double mean_photons) {
    require_mean(mean_photons);
    return InputState(StateKind::Coherent, mean_photons);
  }
  static InputState thermal(double mean_photons) {
    require_mean(mean_photons);
    return InputState(StateKind::Thermal, mean_photons);
  }
  static InputState fock(int n) {
    if (n < 0) throw RangeError("fock photon number must be >= 0, got " + std::to_string(n));
    return InputState(StateKind::Fock, static_cast<double>(n));
  }

  StateKind kind() const { return kind_; }
  double mean_photons() const { return mean_; }

  /// Photon-number variance over mean: 1 (Coherent), 1 + mean (Thermal),
  /// 0 (Fock).
  double fano() const {
    switch (kind_) {
      case StateKind::Coherent: return 1.0;
      case StateKind::Thermal: return 1.0 + mean_;
      case StateKind::Fock: return 0.0;
    }
    return 1.0;  // unreachable
  }

  /// (mean, second moment), with <n^2> = mean^2 + fano * mean.
  PhotonMoments photon_moments() const {
    return {mean_, mean_ * mean_ + fano() * mean_};
  }

  std::string name() const {
    switch (kind_) {
      case StateKind::Coherent: return "coherent";
      case StateKind::Thermal: return "thermal";
      case StateKind::Fock: return "fock";
    }
    return "";  // unreachable
  }

  bool operator==(const InputState& other) const {
    return kind_ == other.kind_ && mean_ == other.mean_;
  }

 private:
  InputState(StateKind kind, double mean) : kind_(kind), mean_(mean) {}
  static void require_mean(double mean) {
    if (!(mean >= 0.0))
      throw RangeError("mean_photons must be >= 0, got " + std::to_string(mean));
  }

  StateKind kind_;
  double mean_;
};

}  // namespace qspeckle
