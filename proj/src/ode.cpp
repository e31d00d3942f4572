#include "transmute/ode.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include <boost/numeric/odeint.hpp>

#include "transmute/errors.hpp"

namespace transmute {

namespace {

using real_t = long double;
using state_t = std::array<real_t, 4>;  // Re y, Im y, Re y', Im y'
namespace odeint = boost::numeric::odeint;
using stepper_t = odeint::runge_kutta_fehlberg78<state_t, real_t, state_t, real_t>;

constexpr double kMinStep = 1e-12;

class Rhs {
 public:
  Rhs(const Potential& q, cplx omega2) : q_(q), omega2_(omega2) {}

  void set_piece(double lo, double hi) {
    lo_ = std::min(lo, hi);
    hi_ = std::max(lo, hi);
  }

  void operator()(const state_t& s, state_t& ds, real_t t) const {
    const double x = static_cast<double>(t);
    const int side = (x - lo_ < hi_ - x) ? +1 : -1;
    const cplx c = q_.limit(x, side) - omega2_;
    const real_t cr = c.real(), ci = c.imag();
    ds[0] = s[2];
    ds[1] = s[3];
    ds[2] = cr * s[0] - ci * s[1];
    ds[3] = cr * s[1] + ci * s[0];
  }

 private:
  const Potential& q_;
  cplx omega2_;
  double lo_ = 0.0, hi_ = 0.0;
};

OdeState to_state(const state_t& s) {
  return {cplx(static_cast<double>(s[0]), static_cast<double>(s[1])),
          cplx(static_cast<double>(s[2]), static_cast<double>(s[3]))};
}

// Integrates one leg from t0 to t1 (either direction).
void advance(Rhs& rhs, state_t& s, double t0, double t1, double tol, double max_step, double& dt_hint) {
  if (t0 == t1) return;
  rhs.set_piece(t0, t1);
  auto stepper = odeint::make_controlled<stepper_t>(static_cast<real_t>(tol), static_cast<real_t>(tol));
  const double dir = t1 > t0 ? 1.0 : -1.0;
  real_t t = t0;
  real_t dt = dir * std::min({dt_hint, max_step, std::abs(t1 - t0)});
  while (dir * (static_cast<real_t>(t1) - t) > 0) {
    const real_t remaining = static_cast<real_t>(t1) - t;
    if (std::abs(dt) > std::abs(remaining)) dt = remaining;
    if (std::abs(dt) > max_step) dt = dir * max_step;
    const auto result = stepper.try_step(rhs, s, t, dt);
    if (result == odeint::fail) {
      if (std::abs(dt) < kMinStep)
        throw StepUnderflow("ode: step size underflow near x = " + std::to_string(static_cast<double>(t)));
    } else if (std::abs(static_cast<real_t>(t1) - t) < 1e-15L * std::max<real_t>(1, std::abs(t))) {
      t = t1;
    }
  }
  dt_hint = std::max(static_cast<double>(std::abs(dt)), kMinStep);
}

}  // namespace

std::vector<OdeState> integrate_ivp(const Potential& q, cplx omega, cplx y0, cplx dy0,
                                    std::span<const double> xs, double tol) {
  if (!(tol >= kMinOdeTolerance)) throw DomainError("ode: tolerance below 1e-13");
  const double aw = std::abs(omega);
  const double max_step = aw > 0.0 ? std::min(0.1 / aw, 0.1) : 0.1;
  Rhs rhs(q, omega * omega);

  std::vector<OdeState> out(xs.size());
  for (int sign : {+1, -1}) {
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < xs.size(); ++i)
      if ((sign > 0 && xs[i] >= 0.0) || (sign < 0 && xs[i] < 0.0)) order.push_back(i);
    if (order.empty()) continue;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return std::abs(xs[a]) < std::abs(xs[b]); });

    // Stops: requested abscissae plus break points of q on this side.
    std::vector<double> stops;
    for (std::size_t i : order) stops.push_back(xs[i]);
    for (double b : q.breakpoints())
      if (b * sign > 0.0 && std::abs(b) < std::abs(xs[order.back()])) stops.push_back(b);
    std::sort(stops.begin(), stops.end(),
              [](double a, double b) { return std::abs(a) < std::abs(b); });

    state_t s{static_cast<real_t>(y0.real()), static_cast<real_t>(y0.imag()),
              static_cast<real_t>(dy0.real()), static_cast<real_t>(dy0.imag())};
    double t = 0.0, dt_hint = std::min(max_step, 1e-3);
    std::size_t next = 0;
    for (double stop : stops) {
      advance(rhs, s, t, stop, tol, max_step, dt_hint);
      t = stop;
      while (next < order.size() && xs[order[next]] == stop) out[order[next++]] = to_state(s);
    }
  }
  return out;
}

OdeState ode_oracle(const Potential& q, cplx omega, double x_end, double tol) {
  const double xs[1] = {x_end};
  return integrate_ivp(q, omega, 1.0, cplx(0.0, 1.0) * omega, xs, tol)[0];
}

std::vector<OdeState> ode_oracle(const Potential& q, cplx omega, std::span<const double> xs, double tol) {
  return integrate_ivp(q, omega, 1.0, cplx(0.0, 1.0) * omega, xs, tol);
}

}  // namespace transmute
