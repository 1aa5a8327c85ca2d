#include "twomass/hysteron.hpp"

#include <cmath>

namespace twomass {

void RelayConfig::validate() const {
    if (!(e > 0.0)) throw std::invalid_argument("RelayConfig: e must be positive");
    if (!(h0 > 0.0)) throw std::invalid_argument("RelayConfig: h0 must be positive");
    if (schedule.empty())
        throw std::invalid_argument("RelayConfig: schedule must be nonempty");
    for (const auto& s : schedule) {
        if (!(s.duration > 0.0))
            throw std::invalid_argument("RelayConfig: schedule durations must be positive");
        if (s.alpha_plus < 1.0 || s.alpha_minus < 1.0)
            throw std::invalid_argument("RelayConfig: alpha scalars must be >= 1");
    }
}

double RelayConfig::total_schedule_duration() const {
    double total = 0.0;
    for (const auto& s : schedule) total += s.duration;
    return total;
}

ScheduleSegment RelayConfig::active_at(double t) const {
    double total = total_schedule_duration();
    double phase = std::fmod(t, total);
    if (phase < 0.0) phase += total;
    for (const auto& s : schedule) {
        if (phase < s.duration) return s;
        phase -= s.duration;
    }
    return schedule.back();
}

HysteronState HysteronState::init(double z, double e) {
    HysteronState st;
    st.sign = (z <= -e) ? -1 : +1;
    return st;
}

double hysteron_step(HysteronState& state, double z, const RelayConfig& cfg,
                     double alpha_plus, double alpha_minus) {
    // min[sign(z+e), max[H(t-), sign(z-e)]] collapsed on the sign alone;
    // thresholds are inclusive so a crossing commits exactly at +-e. The
    // branch-dependent amplitude is attached afterwards.
    int s = (z >= cfg.e) ? +1 : (z <= -cfg.e ? -1 : state.sign);
    state.sign = s;
    return s > 0 ? alpha_plus * cfg.h0 : -alpha_minus * cfg.h0;
}

} // namespace twomass
