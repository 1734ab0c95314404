#include "pinnlab/mms.hpp"

#include <cmath>
#include <numbers>

namespace pinnlab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kSixPi = 6.0 * std::numbers::pi;
constexpr double kThreePi = 3.0 * std::numbers::pi;
}  // namespace

double log_inv_nu(Viscosity nu, LogBase base) {
  return base == LogBase::natural ? std::log(1.0 / nu.value)
                                  : std::log10(1.0 / nu.value);
}

double eval_mms(double x, Viscosity nu, LogBase base) {
  const double amp = log_inv_nu(nu, base);
  return std::sin(kTwoPi * x) + 0.5 * amp * std::sin(kSixPi * x) + amp + 2.0;
}

MmsEval eval_mms_derivs(double x, Viscosity nu, LogBase base) {
  const double amp = log_inv_nu(nu, base);
  MmsEval e;
  e.u = std::sin(kTwoPi * x) + 0.5 * amp * std::sin(kSixPi * x) + amp + 2.0;
  e.du = kTwoPi * std::cos(kTwoPi * x) + kThreePi * amp * std::cos(kSixPi * x);
  e.d2u = -kTwoPi * kTwoPi * std::sin(kTwoPi * x) -
          18.0 * std::numbers::pi * std::numbers::pi * amp * std::sin(kSixPi * x);
  e.source = e.u * e.du - nu.value * e.d2u;
  return e;
}

double residual_of_field(double u, double du, double d2u, double x, Viscosity nu,
                         LogBase base) {
  const MmsEval e = eval_mms_derivs(x, nu, base);
  return u * du - nu.value * d2u - e.source;
}

}  // namespace pinnlab
