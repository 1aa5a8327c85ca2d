#pragma once

#include <stdexcept>

namespace twomass {

/// Physical parameters of the two-mass drive train. SI rotary units
/// throughout: rad, rad/s, N·m, kg·m².
struct PlantParams {
    double m = 0.0;        ///< motor-side inertia
    double M = 0.0;        ///< load-side inertia
    double d = 0.0;        ///< motor viscous coefficient
    double D = 0.0;        ///< load viscous coefficient
    double f = 0.0;        ///< motor Coulomb level
    double F = 0.0;        ///< load Coulomb level
    double beta = 0.0;     ///< half-gap; total backlash is 2*beta (may be +inf)
    double epsilon = 1.0;  ///< coefficient of restitution in [0,1]
    double v_stick = 1e-4; ///< stiction / contact-settling velocity threshold

    void validate() const;
};

/// Karnopp-style Coulomb friction torque. Kinetic branch when |v| exceeds
/// v_stick; otherwise a static balance against the applied torque, capped
/// at the breakaway level, so the mass does not creep at rest.
double coulomb_force(double v, double applied, double level, double v_stick);

} // namespace twomass
