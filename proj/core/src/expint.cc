#include "echoforge/expint.h"

#include <cmath>
#include <limits>

namespace echoforge {
namespace {

constexpr double kEulerGamma = 0.57721566490153286061;
constexpr double kTol = 1e-15;
constexpr int kMaxIter = 500;

double Series(double x) {
  // E1(x) = -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
  double sum = 0.0;
  double term = 1.0;
  for (int k = 1; k < kMaxIter; ++k) {
    term *= -x / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < kTol * std::abs(sum)) break;
  }
  return -kEulerGamma - std::log(x) - sum;
}

double ContinuedFraction(double x) {
  // e^-x / (x + 1 - 1/(x + 3 - 4/(x + 5 - ...)))
  const double tiny = std::numeric_limits<double>::min() / kTol;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIter; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < kTol) break;
  }
  return h * std::exp(-x);
}

}  // namespace

double ExpIntE1(double x) {
  if (std::isnan(x) || x < 0.0) return std::numeric_limits<double>::quiet_NaN();
  if (x == 0.0) return std::numeric_limits<double>::infinity();
  if (x > 700.0) return 0.0;
  return x < 1.0 ? Series(x) : ContinuedFraction(x);
}

}  // namespace echoforge
