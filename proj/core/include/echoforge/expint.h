#ifndef ECHOFORGE_EXPINT_H_
#define ECHOFORGE_EXPINT_H_

namespace echoforge {

// Exponential integral E1(x) = int_x^inf e^-t / t dt for x > 0.
// Power series below 1, Lentz continued fraction above; relative error
// around 1e-12 or better. Returns +inf at 0 and NaN for negative x.
double ExpIntE1(double x);

}  // namespace echoforge

#endif  // ECHOFORGE_EXPINT_H_
