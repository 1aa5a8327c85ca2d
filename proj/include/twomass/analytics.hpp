#pragma once

#include "twomass/plant.hpp"

namespace twomass {
namespace analytics {

/// Existence conditions for the symmetric limit cycle of the relay loop:
/// e < h/d, h > f, e < 2f/d. d = 0 makes the first and third degenerate
/// (reported true).
struct ConditionCheck {
    bool eq10 = false;
    bool eq11 = false;
    bool eq12 = false;
    bool all = false;
    bool degenerate_damping = false;
};

ConditionCheck check_conditions(const PlantParams& plant, double h, double e);

/// Phase portrait of the deceleration branch under constant relay output
/// -h: x(v) = -0.5*m*v^2 / (d*v + h + f*sign(v)) + x0.
double phase_portrait_position(double v, const PlantParams& plant, double h, double x0);

/// Peak-to-peak position amplitude of the symmetric limit cycle,
/// X = -e^2*h*m / ((f + h + d*e)(f - h + d*e)). This comes from the
/// rational phase-portrait form above, which solves the motion only at
/// d = 0; at Table-1 damping it overestimates the true amplitude by a
/// few percent (see limit_cycle_amplitude_exact).
double limit_cycle_amplitude(const PlantParams& plant, double h, double e);

/// Peak-to-peak amplitude from the exact phase-plane integrals
/// m*int_0^e v/(h-f-d*v) dv + m*int_0^e v/(h+f+d*v) dv, i.e. the value a
/// fine-step simulation of the relay loop converges to.
double limit_cycle_amplitude_exact(const PlantParams& plant, double h, double e);

/// Half-period of the symmetric limit cycle (full period is 2*t*).
double half_period(const PlantParams& plant, double h, double e);

/// Form of the per-period drift of the asymmetric relay cycle.
/// AsPrinted uses the d^2e^2 + 2de + f^2 factors as they appear in the
/// source, which is dimensionally inconsistent and off by orders of
/// magnitude. ConsistentUnits replaces the middle term by 2*d*e*f so
/// each factor becomes (f + d*e)^2 - alpha^2 h0^2, which is what the
/// rational phase-portrait algebra actually produces; it still carries
/// that approximation's few-percent damping error. ExactIntegral
/// evaluates the exact phase-plane integrals of both half-cycles and is
/// what a fine-step simulation converges to (see tests).
enum class DriftForm { AsPrinted, ConsistentUnits, ExactIntegral };

/// Net shift of the limit cycle per period under amplitudes alpha_plus*h0
/// and alpha_minus*h0. Negative when alpha_minus > alpha_plus.
double drift_per_period(const PlantParams& plant, double h0, double e,
                        double alpha_plus, double alpha_minus,
                        DriftForm form = DriftForm::ConsistentUnits);

/// Period of the drifting cycle; reduces to 2*half_period at equal alphas.
double drift_period(const PlantParams& plant, double h0, double e,
                    double alpha_plus, double alpha_minus);

/// Average drifting velocity, drift_per_period / drift_period.
double drift_velocity(const PlantParams& plant, double h0, double e,
                      double alpha_plus, double alpha_minus,
                      DriftForm form = DriftForm::ConsistentUnits);

/// Relative load displacement after a single gap impact, taking the
/// worst-case post-impact velocity bound 2*m*e/(M+m) as initial velocity
/// and integrating the unidirectional load motion to rest.
double load_displacement_after_impact(const PlantParams& plant, double e);

} // namespace analytics
} // namespace twomass
