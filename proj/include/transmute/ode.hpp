#pragma once

#include <span>
#include <vector>

#include "transmute/potential.hpp"

namespace transmute {

struct OdeState {
  cplx u;
  cplx du;
};

/// Smallest tolerance the reference integrator accepts.
inline constexpr double kMinOdeTolerance = 1e-13;

/// Integrates y'' = (q(x) - w^2) y from x = 0 with the given initial data and
/// reports (y, y') at every requested abscissa (any sign, any order).
///
/// Embedded Runge-Kutta-Fehlberg 7(8) with error control on each component,
/// carried in extended precision.  For w != 0 the step never exceeds 0.1/|w|
/// so the oscillation is resolved.  Steps stop exactly at the break points of
/// q and one-sided limits are used inside each piece.
///
/// Throws StepUnderflow when error control demands a step below 1e-12.
std::vector<OdeState> integrate_ivp(const Potential& q, cplx omega, cplx y0, cplx dy0,
                                    std::span<const double> xs, double tol);

/// Reference solution u(w, x) with u(w, 0) = 1, u'(w, 0) = i w.
OdeState ode_oracle(const Potential& q, cplx omega, double x_end, double tol = kMinOdeTolerance);
std::vector<OdeState> ode_oracle(const Potential& q, cplx omega, std::span<const double> xs,
                                 double tol = kMinOdeTolerance);

}  // namespace transmute
