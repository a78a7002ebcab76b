#include "oracles.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace echoforge::testing {
namespace {

double SubstitutedIntegrand(double u, double v) {
  if (u <= 0.0) return 0.0;
  return std::exp(-v / u) / u;
}

double Simpson(double a, double b, double fa, double fm, double fb) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double AdaptiveSimpson(double v, double a, double b, double fa, double fm, double fb,
                       double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = SubstitutedIntegrand(lm, v);
  const double frm = SubstitutedIntegrand(rm, v);
  const double left = Simpson(a, m, fa, flm, fm);
  const double right = Simpson(m, b, fm, frm, fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return AdaptiveSimpson(v, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         AdaptiveSimpson(v, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double QuadratureE1(double v, double tol) {
  if (!(v > 0.0)) throw std::invalid_argument("QuadratureE1 needs v > 0");
  // Split at a few points so the sharp rise near u = v is resolved even
  // for small v; each piece gets its own adaptive refinement.
  std::vector<double> knots{0.0};
  for (double k : {0.25 * v, v, 4.0 * v, 16.0 * v}) {
    if (k > knots.back() && k < 1.0) knots.push_back(k);
  }
  knots.push_back(1.0);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
    const double a = knots[i];
    const double b = knots[i + 1];
    const double fa = SubstitutedIntegrand(a, v);
    const double fb = SubstitutedIntegrand(b, v);
    const double fm = SubstitutedIntegrand(0.5 * (a + b), v);
    total += AdaptiveSimpson(v, a, b, fa, fm, fb, Simpson(a, b, fa, fm, fb), tol, 60);
  }
  return total;
}

double QuadratureLsaGain(double xi, double gamma) {
  const double v = std::max(xi * gamma / (1.0 + xi), 1e-10);
  return xi / (1.0 + xi) * std::exp(0.5 * QuadratureE1(v));
}

std::vector<double> WelchPeriodogram(std::span<const double> x, std::size_t frame_len,
                                     std::size_t hop) {
  const std::size_t bins = frame_len / 2 + 1;
  std::vector<double> window(frame_len);
  for (std::size_t n = 0; n < frame_len; ++n) {
    window[n] = std::sin(std::numbers::pi * (static_cast<double>(n) + 0.5) /
                         static_cast<double>(frame_len));
  }
  std::vector<std::complex<double>> twiddle(frame_len);
  for (std::size_t n = 0; n < frame_len; ++n) {
    twiddle[n] = std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(n) /
                                     static_cast<double>(frame_len));
  }
  std::vector<double> acc(bins, 0.0);
  std::size_t frames = 0;
  std::vector<double> seg(frame_len);
  for (std::size_t start = 0; start + frame_len <= x.size(); start += hop) {
    for (std::size_t n = 0; n < frame_len; ++n) seg[n] = window[n] * x[start + n];
    for (std::size_t k = 0; k < bins; ++k) {
      std::complex<double> s{};
      for (std::size_t n = 0; n < frame_len; ++n) s += seg[n] * twiddle[(k * n) % frame_len];
      acc[k] += std::norm(s);
    }
    ++frames;
  }
  if (frames == 0) throw std::invalid_argument("WelchPeriodogram: signal shorter than a frame");
  for (double& a : acc) a /= static_cast<double>(frames);
  return acc;
}

double KsStatisticUniform(std::vector<double> samples, double lo, double hi) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double f = std::clamp((samples[i] - lo) / (hi - lo), 0.0, 1.0);
    d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

double KsCritical01(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

double RocAuc(std::span<const double> scores, const std::vector<bool>& labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("RocAuc: size mismatch");
  std::vector<double> pos, neg;
  for (std::size_t i = 0; i < scores.size(); ++i) (labels[i] ? pos : neg).push_back(scores[i]);
  if (pos.empty() || neg.empty()) throw std::invalid_argument("RocAuc: need both classes");
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : pos) {
    const auto lo = std::lower_bound(neg.begin(), neg.end(), p);
    const auto hi = std::upper_bound(neg.begin(), neg.end(), p);
    wins += static_cast<double>(lo - neg.begin()) + 0.5 * static_cast<double>(hi - lo);
  }
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

std::vector<double> NlmsCancel(std::span<const double> x, std::span<const double> y,
                               std::size_t taps, double mu, std::vector<double>* weights) {
  std::vector<double> w(taps, 0.0);
  std::vector<double> buf(taps, 0.0);
  std::vector<double> e(y.size());
  double power = 0.0;
  for (std::size_t n = 0; n < y.size(); ++n) {
    power -= buf.back() * buf.back();
    std::copy_backward(buf.begin(), buf.end() - 1, buf.end());
    buf[0] = x[n];
    power += buf[0] * buf[0];
    const double est = std::inner_product(w.begin(), w.end(), buf.begin(), 0.0);
    e[n] = y[n] - est;
    const double g = mu * e[n] / (std::max(power, 0.0) + 1e-6);
    for (std::size_t i = 0; i < taps; ++i) w[i] += g * buf[i];
  }
  if (weights) *weights = std::move(w);
  return e;
}

double EnergyOf(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double Db(double ratio) { return 10.0 * std::log10(ratio); }

}  // namespace echoforge::testing
