#include "qspeckle/fock_oracle.hpp"

#include <cmath>
#include <string>

namespace qspeckle {

namespace {

Eigen::VectorXd splitting_probabilities(const ComplexMatrix& unitary, int a) {
  const int m = static_cast<int>(unitary.rows());
  if (unitary.cols() != m) throw RangeError("oracle: matrix must be square");
  if (a < 0 || a >= m)
    throw UsageError("oracle: input mode " + std::to_string(a) + " out of range [0, " +
                     std::to_string(m) + ")");
  const double defect =
      (unitary.adjoint() * unitary - ComplexMatrix::Identity(m, m)).cwiseAbs().maxCoeff();
  if (defect > 1e-8)
    throw RangeError("oracle: matrix is not unitary (defect " + std::to_string(defect) + ")");
  return unitary.col(a).cwiseAbs2();
}

// log C(n + m - 1, m - 1), the bosonic Fock-space dimension for n photons
// in m modes; used only for the resource gate.
double log_fock_dimension(int n, int m) {
  return std::lgamma(n + m) - std::lgamma(n + 1.0) - std::lgamma(static_cast<double>(m));
}

void check_budget(int n, int m, const OracleConfig& config) {
  // max_modes counts scattering channels per side; the assembled two-sided
  // matrix has twice as many ports
  if (m > 2 * config.max_modes)
    throw ResourceError("oracle: " + std::to_string(m) + " ports exceeds budget of " +
                        std::to_string(2 * config.max_modes));
  if (n > config.max_photons)
    throw ResourceError("oracle: " + std::to_string(n) + " photons exceeds budget of " +
                        std::to_string(config.max_photons));
  if (log_fock_dimension(n, m) > std::log(1e6))
    throw ResourceError("oracle: Fock-space dimension for " + std::to_string(n) +
                        " photons in " + std::to_string(m) + " modes exceeds 10^6");
}

// Moments of the joint output-count distribution when exactly n photons
// are partitioned multinomially with probabilities p.
OracleMoments multinomial_moments(const Eigen::VectorXd& p, double n_mean,
                                  double n_pairwise /* E[n(n-1)] */) {
  const int m = static_cast<int>(p.size());
  OracleMoments out;
  out.mode_means = n_mean * p;
  out.mode_covariance.resize(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const double joint = n_pairwise * p(i) * p(j);  // E[n_i n_j] for i != j
      if (i == j) {
        const double second = n_mean * p(i) + n_pairwise * p(i) * p(i);
        out.mode_covariance(i, j) = second - out.mode_means(i) * out.mode_means(i);
      } else {
        out.mode_covariance(i, j) = joint - out.mode_means(i) * out.mode_means(j);
      }
    }
  }
  return out;
}

}  // namespace

double OracleMoments::subset_mean(const std::vector<int>& modes) const {
  double sum = 0.0;
  for (int m : modes) sum += mode_means(m);
  return sum;
}

double OracleMoments::subset_variance(const std::vector<int>& modes) const {
  double sum = 0.0;
  for (int i : modes)
    for (int j : modes) sum += mode_covariance(i, j);
  return sum;
}

double OracleMoments::pair_second_moment(int m0, int m1) const {
  return mode_covariance(m0, m1) + mode_means(m0) * mode_means(m1);
}

OracleMoments oracle_fock(const ComplexMatrix& unitary, int a, int n,
                          const OracleConfig& config) {
  if (n < 0) throw RangeError("oracle_fock: photon number must be >= 0");
  const Eigen::VectorXd p = splitting_probabilities(unitary, a);
  check_budget(n, static_cast<int>(p.size()), config);
  const double dn = static_cast<double>(n);
  return multinomial_moments(p, dn, dn * (dn - 1.0));
}

OracleMoments oracle_coherent(const ComplexMatrix& unitary, int a, double mean) {
  if (!(mean >= 0.0)) throw RangeError("oracle_coherent: mean must be >= 0");
  const Eigen::VectorXd p = splitting_probabilities(unitary, a);
  OracleMoments out;
  out.mode_means = mean * p;
  // independent Poisson outputs: diagonal covariance equal to the means
  out.mode_covariance = out.mode_means.asDiagonal();
  return out;
}

double thermal_tail_mass(double mean, int cutoff) {
  if (mean <= 0.0) return 0.0;
  const double q = mean / (1.0 + mean);
  return std::pow(q, cutoff + 1);
}

OracleMoments oracle_thermal(const ComplexMatrix& unitary, int a, double mean,
                             const OracleConfig& config) {
  if (!(mean >= 0.0)) throw RangeError("oracle_thermal: mean must be >= 0");
  const Eigen::VectorXd p = splitting_probabilities(unitary, a);
  const int cutoff = config.thermal_truncation;

  const double tail = thermal_tail_mass(mean, cutoff);
  if (tail > config.thermal_tail_bound)
    throw TruncationError("oracle_thermal: tail mass " + std::to_string(tail) +
                              " at cutoff " + std::to_string(cutoff) + " exceeds bound",
                          tail);

  // Bose-Einstein mixture over photon number: w_n = q^n / (1 + mu).
  // Only E[n] and E[n(n-1)] of the truncated weights enter the multinomial
  // moment assembly.
  const double q = mean / (1.0 + mean);
  double w = 1.0 / (1.0 + mean);
  long double mean_trunc = 0.0L;
  long double pairwise_trunc = 0.0L;
  for (int n = 0; n <= cutoff; ++n) {
    mean_trunc += static_cast<long double>(w) * n;
    pairwise_trunc += static_cast<long double>(w) * n * (n - 1);
    w *= q;
  }

  // Rigorous bounds on the neglected tails of E[n] and E[n(n-1)]: sum a
  // block of terms explicitly, then bound the geometric remainder.
  long double tail_mean = 0.0L, tail_pairwise = 0.0L;
  long double wt = w;  // weight of n = cutoff + 1
  int n = cutoff + 1;
  constexpr int kTailBlock = 600;
  for (int k = 0; k < kTailBlock; ++k, ++n) {
    tail_mean += wt * n;
    tail_pairwise += wt * n * (n - 1);
    wt *= q;
  }
  // bounds term(n+1)/term(n) for both tails: the mean-term ratio is
  // q(n+1)/n and the pairwise-term ratio q(n+1)/(n-1), both decreasing in n
  const long double ratio = q * (n + 1.0L) / (n - 1.0L);
  if (ratio < 1.0L) {
    tail_mean += wt * n * ratio / (1.0L - ratio);
    tail_pairwise += wt * n * (n - 1) * ratio / (1.0L - ratio);
  }

  OracleMoments out = multinomial_moments(p, static_cast<double>(mean_trunc),
                                          static_cast<double>(pairwise_trunc));
  const double d1 = static_cast<double>(tail_mean);
  const double d2 = static_cast<double>(tail_pairwise);
  // covers means (d1), pair moments (d2), second moments (d1 + d2) and the
  // mean-squared subtraction in variances (2 mu d1)
  out.truncation_error = d1 * (2.0 * mean + 2.0) + d2;
  return out;
}

OracleMoments oracle_moments(const ComplexMatrix& unitary, int a, const InputState& state,
                             const OracleConfig& config) {
  switch (state.kind()) {
    case StateKind::Fock:
      return oracle_fock(unitary, a, static_cast<int>(std::llround(state.mean_photons())),
                         config);
    case StateKind::Coherent:
      return oracle_coherent(unitary, a, state.mean_photons());
    case StateKind::Thermal:
      return oracle_thermal(unitary, a, state.mean_photons(), config);
  }
  throw UsageError("oracle_moments: unknown state kind");
}

}  // namespace qspeckle
