#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "qspeckle/errors.hpp"
#include "qspeckle/rng.hpp"

namespace qspeckle {

using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

/// How disorder realizations are generated.
///  - IndependentTau: transmission eigenvalues drawn iid from the quasi-1D
///    bimodal density, mixed by independent Haar unitaries. Fast; exact at
///    leading order; carries no eigenvalue repulsion, so its finite-size
///    corrections follow the free-pairing (uncorrelated-channel) values.
///  - SliceComposition: star-product composition of many weakly scattering
///    slices. Builds inter-channel correlations physically; used for
///    mesoscopic 1/g trends.
///  - FixedTau: every eigenvalue pinned to ell/L. Degenerate reference
///    ensemble with zero classical fluctuation of the total transmission;
///    realizes the leading-order formulas exactly at any sample size.
enum class EnsembleKind { IndependentTau, SliceComposition, FixedTau };

const char* ensemble_kind_name(EnsembleKind kind);
EnsembleKind ensemble_kind_from_name(const std::string& name);

/// Parameters selecting a random-medium ensemble.
struct EnsembleSpec {
  int n_modes = 64;
  double ell_over_L = 0.25;        // transport mean free path over thickness
  EnsembleKind kind = EnsembleKind::IndependentTau;
  long long realizations = 10000;
  std::uint64_t master_seed = 1;

  /// Dimensionless conductance g = N * ell/L.
  double conductance() const { return n_modes * ell_over_L; }

  /// Throws RangeError / OutOfValidityError naming the offending field.
  void validate() const;

  bool operator==(const EnsembleSpec&) const = default;
};

/// Two-sided scattering matrix of an N-mode region, stored as four N x N
/// blocks acting on amplitude column vectors (element (out, in)).
///   t:        left in  -> right out      r:       right in -> right out
///   t_prime:  right in -> left out       r_prime: left in  -> left out
/// The assembled 2N x 2N matrix S = [[r_prime, t_prime], [t, r]] maps
/// (left in, right in) to (left out, right out) and is unitary for a
/// non-absorbing medium.
struct ScatteringMatrix {
  ComplexMatrix t;
  ComplexMatrix r;
  ComplexMatrix t_prime;
  ComplexMatrix r_prime;

  int n_modes() const { return static_cast<int>(t.rows()); }

  /// Identity medium: perfect transmission, no reflection.
  static ScatteringMatrix identity(int n);

  /// The full 2N x 2N matrix [[r_prime, t_prime], [t, r]].
  ComplexMatrix assemble() const;

  /// Intensity transmission coefficient T_ab = |t(b, a)|^2 for left input
  /// mode a and right output mode b.
  double transmission(int a, int b) const;
  /// Intensity reflection coefficient |r_prime(a_out, a)|^2.
  double reflection(int a, int a_out) const;

  /// All T_ab for left input a, as a length-N vector indexed by b.
  Eigen::VectorXd transmission_intensities(int a) const;
  /// Total transmission T_a = sum_b T_ab.
  double total_transmission(int a) const;
  /// Total reflection R_a = sum_a' |r_prime(a', a)|^2.
  double total_reflection(int a) const;
};

/// Haar-distributed n x n unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phases folded into Q.
ComplexMatrix haar_unitary(int n, std::mt19937_64& rng);

/// N transmission eigenvalues for one realization. IndependentTau and
/// SliceComposition draw tau = 1/cosh^2(x), x uniform on [0, L/ell];
/// FixedTau returns ell/L for every channel.
std::vector<double> sample_transmission_eigenvalues(const EnsembleSpec& spec,
                                                    std::mt19937_64& rng);

/// Polar-form scattering matrix with the given transmission eigenvalues:
///   t = V sqrt(tau) U,  r = V sqrt(1-tau) X,
///   t_prime = W sqrt(tau) X,  r_prime = -W sqrt(1-tau) U,
/// with U, V, W, X independent Haar unitaries. Unitary by construction.
ScatteringMatrix assemble_polar(const std::vector<double>& taus,
                                std::mt19937_64& rng);

/// Redheffer star product: the scattering matrix of medium `left` followed
/// by medium `right`.
ScatteringMatrix star_product(const ScatteringMatrix& left,
                              const ScatteringMatrix& right);

/// max-norm of S^dagger S - I over the assembled 2N x 2N matrix.
double unitarity_defect(const ScatteringMatrix& s);

/// Result of the slice-strength calibration for SliceComposition.
struct SliceCalibration {
  double strength = 0.0;       // per-slice disorder parameter; x ~ U[0, strength]
  int slice_count = 0;
  double achieved_mean_T = 0.0;  // probe-ensemble mean of T_a at `strength`
  int evaluations = 0;           // bisection probe evaluations used
};

/// Slice count policy: enough slices that each one scatters weakly,
/// clamped to [16, 64].
int default_slice_count(double ell_over_L);

/// Bisection on the per-slice strength so the probe-ensemble mean of T_a
/// matches ell/L within 2% relative. 200 probe realizations per evaluation,
/// common random numbers across evaluations, at most 25 bisection steps.
/// Deterministic for fixed spec. Throws CalibrationError (carrying the
/// achieved value) when the tolerance cannot be met.
SliceCalibration calibrate_slices(const EnsembleSpec& spec);

/// Star-product composition of calibrated weakly scattering slices.
/// The (spec.n_modes, spec.ell_over_L, spec.master_seed) -> calibration
/// mapping is cached process-wide, so repeated calls calibrate once.
ScatteringMatrix compose_slices(const EnsembleSpec& spec, std::mt19937_64& rng);

/// Same, with an explicit calibration (no cache lookup).
ScatteringMatrix compose_slices(const EnsembleSpec& spec,
                                const SliceCalibration& cal,
                                std::mt19937_64& rng);

/// One disorder realization of the ensemble `spec`, dispatching on kind.
ScatteringMatrix generate_realization(const EnsembleSpec& spec,
                                      std::mt19937_64& rng);

}  // namespace qspeckle
