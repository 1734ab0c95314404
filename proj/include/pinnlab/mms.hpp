#pragma once

#include <stdexcept>

namespace pinnlab {

/// Base of the logarithm appearing in the manufactured field's log(1/nu)
/// amplitude. Natural log is the calibrated default; base-10 is kept as a
/// configuration option.
enum class LogBase { natural, base10 };

/// Viscosity parameter. Strictly positive; canonical scenarios stay within
/// [1e-6, 1e-1].
struct Viscosity {
  double value;

  explicit Viscosity(double v) : value(v) {
    if (!(v > 0.0)) throw std::invalid_argument("Viscosity must be positive");
  }
};

/// Manufactured field and its x-derivatives at one point, plus the forcing
/// source that makes the field an exact steady solution of the Burgers
/// operator u*u_x - nu*u_xx = S.
struct MmsEval {
  double u;
  double du;
  double d2u;
  double source;
};

double log_inv_nu(Viscosity nu, LogBase base);

/// Manufactured solution u(x; nu) = sin(2*pi*x) + 0.5*log(1/nu)*sin(6*pi*x)
/// + log(1/nu) + 2 on x in [-1, 1].
double eval_mms(double x, Viscosity nu, LogBase base = LogBase::natural);

/// Field value together with analytically hard-coded du/dx, d2u/dx2 and the
/// source term S = u*du - nu*d2u.
MmsEval eval_mms_derivs(double x, Viscosity nu, LogBase base = LogBase::natural);

/// Steady Burgers residual of an arbitrary (u, du, d2u) triple at (x, nu):
/// u*du - nu*d2u - S(x, nu). Zero (to roundoff) for the manufactured field.
double residual_of_field(double u, double du, double d2u, double x, Viscosity nu,
                         LogBase base = LogBase::natural);

}  // namespace pinnlab
