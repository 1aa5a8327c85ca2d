#pragma once

#include <stdexcept>
#include <utility>
#include <variant>

#include "twomass/controllers.hpp"
#include "twomass/plant.hpp"
#include "twomass/trajectory.hpp"

namespace twomass {

/// Fixed-step integration setup. The controller runs zero-order-hold at
/// T_s; the physics substeps at dt (an integer divisor of T_s) with
/// bisection event localization down to event_tol.
struct SimConfig {
    double T_s = 4e-4;
    double dt = 4e-5;
    double duration = 1.0;
    int loop_delay_samples = 0;
    int encoder_bits = 0;  ///< 0 disables position quantization
    double event_tol = 1e-9;
    /// When true (relay controller only), relay switchings are localized
    /// inside substeps on the true motor velocity instead of being applied
    /// at sample instants; models an ideal continuous relay loop.
    bool relay_continuous = false;

    void validate() const;
    int substeps_per_sample() const;
};

/// PI velocity loop tracking a triangular reference.
struct PiTriangleController {
    PiConfig pi;
    TriangleRef ref;
};

using ControllerSpec = std::variant<RelayConfig, PiTriangleController>;

struct SimulationError : std::runtime_error {
    double t_fail;
    SimulationError(const std::string& what, double t) : std::runtime_error(what), t_fail(t) {}
};

/// Velocity jumps of two colliding masses with restitution epsilon.
/// Conserves total momentum exactly; kinetic energy is non-increasing.
std::pair<double, double> post_impact_velocities(double v_m, double v_L, double m,
                                                 double M, double epsilon);

/// Run the hybrid two-mass simulation: decoupled dynamics in the gap,
/// lumped single-mass dynamics while engaged, restitution impacts at the
/// gap boundaries, Karnopp stiction on both sides.
Trajectory simulate(const PlantParams& plant, const ControllerSpec& controller,
                    const SimConfig& sim, const SimState& init);

} // namespace twomass
