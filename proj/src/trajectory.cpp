#include "twomass/trajectory.hpp"

#include <ostream>

namespace twomass {

const char* to_string(ContactMode m) {
    switch (m) {
        case ContactMode::Gap: return "gap";
        case ContactMode::EngagedLow: return "engaged_low";
        case ContactMode::EngagedHigh: return "engaged_high";
    }
    return "?";
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::RelaySwitch: return "RelaySwitch";
        case EventKind::Impact: return "Impact";
        case EventKind::Engage: return "Engage";
        case EventKind::Detach: return "Detach";
        case EventKind::ScheduleFlip: return "ScheduleFlip";
    }
    return "?";
}

std::vector<Event> Trajectory::events_of(EventKind k) const {
    std::vector<Event> r;
    for (const auto& e : events)
        if (e.kind == k) r.push_back(e);
    return r;
}

void Trajectory::write_samples_csv(std::ostream& os) const {
    os << "t,x_m,v_m,x_L,v_L,u,tau,mode\n";
    os.precision(17);
    for (std::size_t i = 0; i < size(); ++i) {
        os << t[i] << ',' << x_m[i] << ',' << v_m[i] << ',' << x_L[i] << ','
           << v_L[i] << ',' << u[i] << ',' << tau[i] << ',' << to_string(mode[i])
           << '\n';
    }
}

void Trajectory::write_events_csv(std::ostream& os) const {
    os << "t,kind,payload\n";
    os.precision(17);
    for (const auto& e : events)
        os << e.t << ',' << to_string(e.kind) << ',' << e.value_a << ';' << e.value_b
           << '\n';
}

} // namespace twomass
