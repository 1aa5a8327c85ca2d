#include "twomass/controllers.hpp"

#include <cmath>
#include <numbers>

namespace twomass {

void PiConfig::validate() const {
    if (!(kp > 0.0) || !(ki > 0.0))
        throw std::invalid_argument("PiConfig: kp, ki must be positive");
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("PiConfig: bandwidth_hz must be positive");
}

void TriangleRef::validate() const {
    if (!(slope > 0.0)) throw std::invalid_argument("TriangleRef: slope must be positive");
    if (!(period > 0.0)) throw std::invalid_argument("TriangleRef: period must be positive");
}

PiConfig pi_gains_from_bandwidth(double J, double c, double bandwidth_hz) {
    if (!(J > 0.0)) throw std::invalid_argument("pi_gains_from_bandwidth: J must be positive");
    if (c < 0.0) throw std::invalid_argument("pi_gains_from_bandwidth: c must be non-negative");
    if (!(bandwidth_hz > 0.0))
        throw std::invalid_argument("pi_gains_from_bandwidth: bandwidth must be positive");
    double w = 2.0 * std::numbers::pi * bandwidth_hz;
    PiConfig cfg;
    cfg.kp = 2.0 * J * w - c;
    cfg.ki = J * w * w;
    cfg.bandwidth_hz = bandwidth_hz;
    if (cfg.kp < 0.0)
        throw std::invalid_argument(
            "pi_gains_from_bandwidth: bandwidth below the open-loop pole (kp < 0)");
    return cfg;
}

double triangle_velocity_ref(double t, const TriangleRef& ref) {
    double phase = std::fmod(t, ref.period);
    if (phase < 0.0) phase += ref.period;
    double q = ref.period / 4.0;
    if (phase <= q) return ref.slope * phase;
    if (phase <= 3.0 * q) return ref.slope * (2.0 * q - phase);
    return ref.slope * (phase - ref.period);
}

double pi_controller_step(PiConfig& cfg, double r, double v_m, double T_s) {
    if (!(T_s > 0.0)) throw std::invalid_argument("pi_controller_step: T_s must be positive");
    double err = r - v_m;
    cfg.integrator += 0.5 * T_s * err; // first half of the trapezoid
    double u = cfg.kp * err + cfg.ki * cfg.integrator;
    cfg.integrator += 0.5 * T_s * err; // second half, carried to the next sample
    return u;
}

double relay_controller_step(HysteronState& state, double v_m, double t,
                             const RelayConfig& cfg) {
    ScheduleSegment seg = cfg.active_at(t);
    return -hysteron_step(state, v_m, cfg, seg.alpha_plus, seg.alpha_minus);
}

} // namespace twomass
