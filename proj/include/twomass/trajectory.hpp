#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "twomass/hysteron.hpp"

namespace twomass {

enum class ContactMode : std::uint8_t { Gap = 0, EngagedLow = 1, EngagedHigh = 2 };

const char* to_string(ContactMode m);

/// Full hybrid state of the two-mass system at one instant.
struct SimState {
    double t = 0.0;
    double x_m = 0.0;
    double x_L = 0.0;
    double v_m = 0.0;
    double v_L = 0.0;
    HysteronState hysteron{};
    ContactMode mode = ContactMode::Gap;
    double tau = 0.0; ///< transmitted link torque (zero in gap mode)
};

enum class EventKind : std::uint8_t { RelaySwitch, Impact, Engage, Detach, ScheduleFlip };

const char* to_string(EventKind k);

struct Event {
    double t = 0.0;
    EventKind kind{};
    double value_a = 0.0; ///< kind-dependent payload (see csv docs)
    double value_b = 0.0;
};

/// Uniformly sampled record of a simulation run plus its discrete events.
struct Trajectory {
    double T_s = 0.0;
    std::vector<double> t;
    std::vector<double> x_m;
    std::vector<double> v_m;
    std::vector<double> x_L;
    std::vector<double> v_L;
    std::vector<double> u;
    std::vector<double> tau;
    std::vector<ContactMode> mode;
    std::vector<Event> events;

    std::size_t size() const { return t.size(); }

    std::vector<Event> events_of(EventKind k) const;

    /// CSV with header t,x_m,v_m,x_L,v_L,u,tau,mode (golden-file contract).
    void write_samples_csv(std::ostream& os) const;
    /// CSV with header t,kind,payload.
    void write_events_csv(std::ostream& os) const;
};

} // namespace twomass
