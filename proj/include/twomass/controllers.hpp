#pragma once

#include <stdexcept>

#include "twomass/hysteron.hpp"

namespace twomass {

/// Discrete PI velocity controller with trapezoidal (Tustin) integrator.
struct PiConfig {
    double kp = 0.0;
    double ki = 0.0;
    double bandwidth_hz = 0.0;
    double integrator = 0.0; ///< accumulated integral of the error (rad)

    void validate() const;
};

/// Periodic triangular velocity reference, zero-mean, rising from zero
/// with +slope; apex value slope*period/4 at t = period/4.
struct TriangleRef {
    double slope = 0.0;  ///< rad/s^2 ramp magnitude
    double period = 0.0; ///< s

    void validate() const;
    double peak() const { return slope * period / 4.0; }
};

/// Pole placement for the lumped one-inertia velocity loop
/// J*vdot = -c*v + u: both closed-loop poles at -2*pi*bandwidth_hz
/// (critically damped double pole). kp = 2*J*w - c, ki = J*w^2.
PiConfig pi_gains_from_bandwidth(double J, double c, double bandwidth_hz);

double triangle_velocity_ref(double t, const TriangleRef& ref);

/// One sample of the PI law: u = kp*(r - v) + ki*I with I accumulated by
/// the trapezoid rule. Updates cfg.integrator.
double pi_controller_step(PiConfig& cfg, double r, double v_m, double T_s);

/// Delayed relay in negative velocity feedback: u = -H[v_m] with the
/// asymmetry pair active at time t per cfg.schedule.
double relay_controller_step(HysteronState& state, double v_m, double t,
                             const RelayConfig& cfg);

} // namespace twomass
