#ifndef ECHOFORGE_TESTS_SUPPORT_ORACLES_H_
#define ECHOFORGE_TESTS_SUPPORT_ORACLES_H_

// Reference computations that share no code with the library. Slow on
// purpose: plain DFTs, adaptive quadrature, textbook statistics.

#include <cstddef>
#include <span>
#include <vector>

namespace echoforge::testing {

// E1(v) = int_v^inf e^-t / t dt, by adaptive Simpson on the substitution
// t = v / u, which maps the tail onto u in (0, 1].
double QuadratureE1(double v, double tol = 1e-13);

// xi / (1 + xi) * exp(E1(v) / 2), v = xi gamma / (1 + xi), v floored at 1e-10.
double QuadratureLsaGain(double xi, double gamma);

// Mean per-bin periodogram |X_k|^2 over frames of a half-sample sine
// window, computed with a direct DFT. Bins 0..frame_len/2.
std::vector<double> WelchPeriodogram(std::span<const double> x, std::size_t frame_len,
                                     std::size_t hop);

// Two-sided Kolmogorov-Smirnov distance of samples against U(lo, hi).
double KsStatisticUniform(std::vector<double> samples, double lo, double hi);
// Asymptotic critical value at significance 0.01.
double KsCritical01(std::size_t n);

// Area under the ROC curve (Mann-Whitney, ties count one half).
double RocAuc(std::span<const double> scores, const std::vector<bool>& labels);

// Time-domain NLMS echo canceller, sample by sample. Returns the error.
std::vector<double> NlmsCancel(std::span<const double> x, std::span<const double> y,
                               std::size_t taps, double mu, std::vector<double>* weights = nullptr);

double EnergyOf(std::span<const double> x);
double Db(double ratio);

}  // namespace echoforge::testing

#endif  // ECHOFORGE_TESTS_SUPPORT_ORACLES_H_
