#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "twomass/identification.hpp"
#include "twomass/simulator.hpp"

namespace twomass {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IdentificationConfig {
    IdMethod method = IdMethod::Proposed;
    ProposedOptions proposed{};
    ReferenceOptions reference{};
};

/// One self-contained experiment description (JSON document on disk).
struct ExperimentConfig {
    PlantParams plant{};
    ControllerSpec controller = RelayConfig{};
    double pi_bandwidth_hz = 0.0; ///< set when the PI gains came from a bandwidth
    SimConfig sim{};
    IdentificationConfig ident{};
    std::uint64_t seed = 0;

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig load(const std::string& path);
    nlohmann::json echo() const;

    bool is_relay() const { return std::holds_alternative<RelayConfig>(controller); }
    const RelayConfig& relay() const { return std::get<RelayConfig>(controller); }
    const PiTriangleController& pi_triangle() const {
        return std::get<PiTriangleController>(controller);
    }

    /// Initial state; a nonzero seed randomizes the starting phase inside
    /// the gap.
    SimState initial_state() const;
};

} // namespace twomass
