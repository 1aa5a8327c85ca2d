#pragma once

#include <stdexcept>
#include <vector>

namespace twomass {

/// One segment of the relay asymmetry schedule. The (alpha_plus,
/// alpha_minus) pair is active for `duration` seconds, then the next
/// segment takes over; the list cycles.
struct ScheduleSegment {
    double duration = 0.0;
    double alpha_plus = 1.0;
    double alpha_minus = 1.0;
};

/// Delayed-relay (hysteron) parameters: switching threshold e on the
/// velocity input, base output amplitude h0, and the asymmetry schedule.
struct RelayConfig {
    double e = 0.0;
    double h0 = 0.0;
    std::vector<ScheduleSegment> schedule{ScheduleSegment{1.0, 1.0, 1.0}};

    void validate() const;

    /// Active (alpha_plus, alpha_minus) at time t, cycling the schedule.
    ScheduleSegment active_at(double t) const;

    double total_schedule_duration() const;
};

/// Two-state relay memory. `sign` is the committed output sign; the
/// output magnitude is alpha_plus*h0 on the positive branch and
/// alpha_minus*h0 on the negative branch.
struct HysteronState {
    int sign = +1; // in (-e, e) at start the positive branch is chosen

    /// Initialize from the first input sample: committed to sign(z) when
    /// |z| >= e, positive branch otherwise.
    static HysteronState init(double z, double e);
};

/// One evaluation of H(t) = h*min[sign(z+e), max[H(t-), sign(z-e)]] with
/// the branch-dependent amplitude h. Updates the memory in place and
/// returns the output torque.
double hysteron_step(HysteronState& state, double z, const RelayConfig& cfg,
                     double alpha_plus, double alpha_minus);

} // namespace twomass
