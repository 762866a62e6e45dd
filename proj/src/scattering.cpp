#include "qspeckle/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <tuple>

namespace qspeckle {

namespace {

using Complex = std::complex<double>;

// One standard complex Gaussian (variance 1 per real component).
inline Complex complex_normal(std::mt19937_64& rng, std::normal_distribution<double>& nd) {
  const double re = nd(rng);
  const double im = nd(rng);
  return {re, im};
}

ComplexMatrix ginibre(int rows, int cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  ComplexMatrix g(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) g(i, j) = complex_normal(rng, nd);
  return g;
}

}  // namespace

const char* ensemble_kind_name(EnsembleKind kind) {
  switch (kind) {
    case EnsembleKind::IndependentTau: return "independent-tau";
    case EnsembleKind::SliceComposition: return "slice-composition";
    case EnsembleKind::FixedTau: return "fixed-tau";
  }
  return "";
}

EnsembleKind ensemble_kind_from_name(const std::string& name) {
  if (name == "independent-tau") return EnsembleKind::IndependentTau;
  if (name == "slice-composition") return EnsembleKind::SliceComposition;
  if (name == "fixed-tau") return EnsembleKind::FixedTau;
  throw RangeError("unknown ensemble kind '" + name +
                   "' (expected independent-tau, slice-composition, or fixed-tau)");
}

void EnsembleSpec::validate() const {
  if (n_modes < 1)
    throw RangeError("n_modes must be a positive integer, got " + std::to_string(n_modes));
  if (!(ell_over_L > 0.0) || ell_over_L > 1.0)
    throw RangeError("ell_over_L must lie in (0, 1], got " + std::to_string(ell_over_L));
  if (realizations < 1)
    throw RangeError("realizations must be a positive integer, got " +
                     std::to_string(realizations));
  if (!(conductance() > 1.0))
    throw OutOfValidityError(
        "conductance g = n_modes * ell_over_L = " + std::to_string(conductance()) +
        " must exceed 1 (diffusive regime)");
}

ScatteringMatrix ScatteringMatrix::identity(int n) {
  ScatteringMatrix s;
  s.t = ComplexMatrix::Identity(n, n);
  s.r = ComplexMatrix::Zero(n, n);
  s.t_prime = ComplexMatrix::Identity(n, n);
  s.r_prime = ComplexMatrix::Zero(n, n);
  return s;
}

ComplexMatrix ScatteringMatrix::assemble() const {
  const int n = n_modes();
  ComplexMatrix s(2 * n, 2 * n);
  s.topLeftCorner(n, n) = r_prime;
  s.topRightCorner(n, n) = t_prime;
  s.bottomLeftCorner(n, n) = t;
  s.bottomRightCorner(n, n) = r;
  return s;
}

double ScatteringMatrix::transmission(int a, int b) const { return std::norm(t(b, a)); }

double ScatteringMatrix::reflection(int a, int a_out) const {
  return std::norm(r_prime(a_out, a));
}

Eigen::VectorXd ScatteringMatrix::transmission_intensities(int a) const {
  return t.col(a).cwiseAbs2();
}

double ScatteringMatrix::total_transmission(int a) const {
  return t.col(a).squaredNorm();
}

double ScatteringMatrix::total_reflection(int a) const {
  return r_prime.col(a).squaredNorm();
}

ComplexMatrix haar_unitary(int n, std::mt19937_64& rng) {
  if (n < 1) throw RangeError("haar_unitary: dimension must be >= 1, got " + std::to_string(n));
  ComplexMatrix g = ginibre(n, n, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  // Fold the R-diagonal phases into Q; without this step the distribution
  // is biased away from Haar measure.
  const auto& qrm = qr.matrixQR();
  for (int j = 0; j < n; ++j) {
    const Complex d = qrm(j, j);
    const double mag = std::abs(d);
    const Complex phase = mag > 0.0 ? d / mag : Complex(1.0, 0.0);
    q.col(j) *= phase;
  }
  return q;
}

std::vector<double> sample_transmission_eigenvalues(const EnsembleSpec& spec,
                                                    std::mt19937_64& rng) {
  spec.validate();
  std::vector<double> taus(static_cast<size_t>(spec.n_modes));
  if (spec.kind == EnsembleKind::FixedTau) {
    std::fill(taus.begin(), taus.end(), spec.ell_over_L);
    return taus;
  }
  // tau = sech^2(x), x uniform on [0, L/ell]: the quasi-1D bimodal density.
  const double x_max = 1.0 / spec.ell_over_L;
  std::uniform_real_distribution<double> ud(0.0, x_max);
  for (auto& tau : taus) {
    const double c = std::cosh(ud(rng));
    tau = 1.0 / (c * c);
  }
  return taus;
}

ScatteringMatrix assemble_polar(const std::vector<double>& taus, std::mt19937_64& rng) {
  const int n = static_cast<int>(taus.size());
  if (n < 1) throw RangeError("assemble_polar: need at least one eigenvalue");
  Eigen::VectorXd sqrt_tau(n), sqrt_rho(n);
  for (int i = 0; i < n; ++i) {
    const double tau = taus[static_cast<size_t>(i)];
    if (!(tau > 0.0) || tau > 1.0)
      throw RangeError("assemble_polar: tau must lie in (0, 1], got " + std::to_string(tau));
    sqrt_tau(i) = std::sqrt(tau);
    sqrt_rho(i) = std::sqrt(1.0 - tau);
  }
  const ComplexMatrix u = haar_unitary(n, rng);
  const ComplexMatrix v = haar_unitary(n, rng);
  const ComplexMatrix w = haar_unitary(n, rng);
  const ComplexMatrix x = haar_unitary(n, rng);

  ScatteringMatrix s;
  s.t = v * sqrt_tau.asDiagonal() * u;
  s.r = v * sqrt_rho.asDiagonal() * x;
  s.t_prime = w * sqrt_tau.asDiagonal() * x;
  s.r_prime = -(w * sqrt_rho.asDiagonal() * u);
  return s;
}

ScatteringMatrix star_product(const ScatteringMatrix& left, const ScatteringMatrix& right) {
  const int n = left.n_modes();
  if (right.n_modes() != n)
    throw RangeError("star_product: mode counts differ (" + std::to_string(n) + " vs " +
                     std::to_string(right.n_modes()) + ")");
  const ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  // Multiple-bounce resummation between the facing reflections.
  Eigen::PartialPivLU<ComplexMatrix> lu_a(eye - left.r * right.r_prime);
  Eigen::PartialPivLU<ComplexMatrix> lu_b(eye - right.r_prime * left.r);
  const ComplexMatrix m1 = lu_a.solve(left.t);
  const ComplexMatrix m2 = lu_b.solve(right.t_prime);

  ScatteringMatrix s;
  s.t = right.t * m1;
  s.r_prime = left.r_prime + left.t_prime * (right.r_prime * m1);
  s.t_prime = left.t_prime * m2;
  s.r = right.r + right.t * (left.r * m2);
  return s;
}

double unitarity_defect(const ScatteringMatrix& s) {
  const ComplexMatrix full = s.assemble();
  const ComplexMatrix gram = full.adjoint() * full;
  const int m = static_cast<int>(gram.rows());
  return (gram - ComplexMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
}

int default_slice_count(double ell_over_L) {
  const int wanted = static_cast<int>(std::ceil(8.0 / ell_over_L));
  return std::clamp(wanted, 16, 64);
}

namespace {

// Slices use the same bimodal parametrization as IndependentTau but with a
// free strength parameter calibrated so the composed stack hits the target
// mean total transmission.
std::vector<double> sample_slice_taus(int n, double strength, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> ud(0.0, strength);
  std::vector<double> taus(static_cast<size_t>(n));
  for (auto& tau : taus) {
    const double c = std::cosh(ud(rng));
    tau = 1.0 / (c * c);
  }
  return taus;
}

ScatteringMatrix compose_with_strength(int n, int slices, double strength,
                                       std::mt19937_64& rng) {
  ScatteringMatrix s = ScatteringMatrix::identity(n);
  for (int k = 0; k < slices; ++k) {
    const ScatteringMatrix slice = assemble_polar(sample_slice_taus(n, strength, rng), rng);
    s = star_product(s, slice);
  }
  return s;
}

// Probe-ensemble mean of T_a at a candidate strength. Common random numbers
// (fixed substream indices) make this a smooth monotone function of the
// strength, which bisection then inverts.
double probe_mean_transmission(const EnsembleSpec& spec, int slices, double strength) {
  constexpr int kProbes = 200;
  const SubstreamFactory factory(spec.master_seed);
  double sum = 0.0;
  for (int i = 0; i < kProbes; ++i) {
    auto rng = factory.make(StreamDomain::Calibration, static_cast<std::uint64_t>(i));
    const ScatteringMatrix s = compose_with_strength(spec.n_modes, slices, strength, rng);
    // trace mean over input modes: isotropy makes every column equivalent
    sum += s.t.squaredNorm() / spec.n_modes;
  }
  return sum / kProbes;
}

std::mutex g_calibration_mutex;
std::map<std::tuple<int, double, std::uint64_t>, SliceCalibration> g_calibration_cache;

}  // namespace

SliceCalibration calibrate_slices(const EnsembleSpec& spec) {
  spec.validate();
  if (spec.kind != EnsembleKind::SliceComposition)
    throw UsageError("calibrate_slices requires a slice-composition ensemble");

  {
    std::lock_guard<std::mutex> lock(g_calibration_mutex);
    const auto key = std::make_tuple(spec.n_modes, spec.ell_over_L, spec.master_seed);
    auto it = g_calibration_cache.find(key);
    if (it != g_calibration_cache.end()) return it->second;
  }

  const double target = spec.ell_over_L;
  constexpr double kRelTol = 0.02;
  constexpr int kMaxBisection = 25;
  const int slices = default_slice_count(spec.ell_over_L);

  SliceCalibration cal;
  cal.slice_count = slices;

  // Mean transmission decreases monotonically with strength: bracket the
  // target by doubling, then bisect.
  double lo = 1e-3;
  double hi = 0.5;
  double mean_lo = probe_mean_transmission(spec, slices, lo);
  cal.evaluations = 1;
  if (mean_lo < target)
    throw CalibrationError("slice calibration: weakest slices already below target mean " +
                               std::to_string(target),
                           mean_lo);
  double mean_hi = probe_mean_transmission(spec, slices, hi);
  ++cal.evaluations;
  while (mean_hi > target && hi < 64.0) {
    hi *= 2.0;
    mean_hi = probe_mean_transmission(spec, slices, hi);
    ++cal.evaluations;
  }
  if (mean_hi > target)
    throw CalibrationError("slice calibration: could not bracket target mean " +
                               std::to_string(target),
                           mean_hi);

  double best_strength = hi;
  double best_mean = mean_hi;
  for (int step = 0; step < kMaxBisection; ++step) {
    const double mid = 0.5 * (lo + hi);
    const double mean_mid = probe_mean_transmission(spec, slices, mid);
    ++cal.evaluations;
    if (std::abs(mean_mid - target) < std::abs(best_mean - target)) {
      best_mean = mean_mid;
      best_strength = mid;
    }
    if (std::abs(mean_mid - target) <= kRelTol * target) break;
    if (mean_mid > target)
      lo = mid;
    else
      hi = mid;
  }
  if (std::abs(best_mean - target) > kRelTol * target)
    throw CalibrationError("slice calibration did not reach " + std::to_string(target) +
                               " within 2% after " + std::to_string(cal.evaluations) +
                               " evaluations",
                           best_mean);
  cal.strength = best_strength;
  cal.achieved_mean_T = best_mean;

  {
    std::lock_guard<std::mutex> lock(g_calibration_mutex);
    const auto key = std::make_tuple(spec.n_modes, spec.ell_over_L, spec.master_seed);
    g_calibration_cache.emplace(key, cal);
  }
  return cal;
}

ScatteringMatrix compose_slices(const EnsembleSpec& spec, const SliceCalibration& cal,
                                std::mt19937_64& rng) {
  return compose_with_strength(spec.n_modes, cal.slice_count, cal.strength, rng);
}

ScatteringMatrix compose_slices(const EnsembleSpec& spec, std::mt19937_64& rng) {
  const SliceCalibration cal = calibrate_slices(spec);
  return compose_slices(spec, cal, rng);
}

ScatteringMatrix generate_realization(const EnsembleSpec& spec, std::mt19937_64& rng) {
  spec.validate();
  if (spec.kind == EnsembleKind::SliceComposition) return compose_slices(spec, rng);
  return assemble_polar(sample_transmission_eigenvalues(spec, rng), rng);
}

}  // namespace qspeckle
