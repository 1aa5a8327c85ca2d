#pragma once

#include <optional>
#include <string>

#include <json.hpp>

#include "twomass/analytics.hpp"
#include "twomass/config.hpp"
#include "twomass/identification.hpp"
#include "twomass/trajectory.hpp"

namespace twomass {

/// Steady-cycle measurements taken from the relay-switch event log and the
/// sampled motor position after a transient is discarded.
struct CycleMetrics {
    double amplitude = 0.0;        ///< peak-to-peak x_m (symmetric cycles)
    double half_period = 0.0;      ///< mean spacing of consecutive switches
    double drift_per_period = 0.0; ///< mean same-polarity switch displacement
    double drift_period = 0.0;     ///< mean same-polarity switch spacing
    double midline_drift = 0.0;    ///< net displacement over the window
    int switch_count = 0;
};

CycleMetrics measure_cycle(const Trajectory& traj, double t_discard);

/// Everything one run produces: the config echo, the closed-form
/// predictions, the simulated counterparts with relative errors, and the
/// backlash estimate when an identification pipeline ran.
struct RunReport {
    nlohmann::json config_echo;

    // analytic predictions (relay configs)
    bool has_predictions = false;
    analytics::ConditionCheck conditions{};
    double X_xi = 0.0;
    double X_xi_exact = 0.0;
    double t_star = 0.0;
    double X_C_printed = 0.0;
    double X_C_consistent = 0.0;
    double X_C_exact = 0.0;
    double T_C = 0.0;

    // simulation summary
    bool has_simulation = false;
    std::optional<CycleMetrics> cycle;
    std::size_t impact_count = 0;

    // oracle cross-checks (symmetric relay with unbounded gap)
    // The printed amplitude formula is a rational approximation that runs a
    // few percent high at nonzero damping, so the amplitude is checked
    // against both it and the exact phase-plane integral; agreement with
    // either passes, and both errors are reported.
    bool oracle_checked = false;
    double amplitude_rel_err = 0.0;       ///< vs the printed formula
    double amplitude_exact_rel_err = 0.0; ///< vs the exact integral
    double half_period_rel_err = 0.0;
    bool oracle_ok = false;

    // identification
    bool has_estimate = false;
    BacklashEstimate estimate{};
    double ground_truth_2beta = 0.0;
    double estimate_rel_err = 0.0;

    std::string to_text() const;
    nlohmann::json to_json() const;
};

/// Predictions only, no simulation.
RunReport analyze_report(const ExperimentConfig& cfg);

/// Simulate and summarize; the trajectory is returned through out_traj
/// when the caller wants to write CSVs.
RunReport simulate_report(const ExperimentConfig& cfg, Trajectory* out_traj = nullptr);

/// Simulate, run the configured identification pipeline, compare against
/// the configured ground truth. Estimation failures propagate as
/// EstimationError after the report fields built so far are filled in.
RunReport identify_report(const ExperimentConfig& cfg, Trajectory* out_traj = nullptr);

} // namespace twomass
