#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "twomass/analytics.hpp"
#include "twomass/controllers.hpp"
#include "twomass/hysteron.hpp"
#include "twomass/plant.hpp"
#include "twomass/trajectory.hpp"

namespace twomass {

enum class IdMethod { Proposed, Reference, TwoEncoder };

const char* to_string(IdMethod m);

/// One per-interval backlash reading of an estimation pipeline.
struct IntervalReading {
    int interval_id = 0;
    double two_beta = 0.0;       ///< rad
    double breakpoint_time = 0.0; ///< s (t1 for the reference method)
    double gap_slope = 0.0;      ///< rad/s
    double engaged_slope = 0.0;  ///< rad/s
};

struct BacklashEstimate {
    IdMethod method{};
    std::vector<IntervalReading> readings;
    double mean_2beta = 0.0;
    double std_2beta = 0.0;
    std::string diagnostics;
};

/// Best single-breakpoint two-segment linear fit of a series.
struct ChangePointFit {
    std::size_t breakpoint = 0;
    double left_slope = 0.0, left_intercept = 0.0;
    double right_slope = 0.0, right_intercept = 0.0;
    double sse = 0.0;
    double single_line_sse = 0.0;
    bool accepted = false;
};

struct EstimationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Exhaustive single-breakpoint SSE minimization over all interior
/// breakpoints (margin samples kept on each side).
ChangePointFit fit_change_point(const std::vector<double>& t,
                                const std::vector<double>& y, std::size_t begin,
                                std::size_t end, std::size_t margin);

enum class DriftDirection { Both, Backward, Forward };

struct ProposedOptions {
    /// minimum contrast between the steeper and the shallower midline
    /// slope for a breakpoint to count as a gap/engagement transition
    double slope_ratio_min = 1.3;
    DriftDirection direction = DriftDirection::Both;
    /// subtract the analytic cycle amplitude from each reading
    bool amplitude_correction = false;
    /// leading schedule segments dropped (the first drift phase starts from
    /// an unknown position inside the gap, so its travel is not 2*beta)
    int skip_initial_segments = 1;
};

/// Proposed drifting-limit-cycle method. Uses motor channels only
/// (t, x_m) plus the controller-side ScheduleFlip events; the analytic
/// cycle period sizes the smoothing window.
BacklashEstimate propose_identify(const Trajectory& traj, const RelayConfig& relay,
                                  const PlantParams& plant,
                                  const ProposedOptions& opts = {});

struct ReferenceOptions {
    /// impact signature: max |second difference of v_m| in the detection
    /// window must exceed this multiple of the window median
    double jerk_threshold_ratio = 5.0;
    /// validation mode: take t2 from the simulator's Impact events instead
    /// of the jerk detector
    bool use_impact_events = false;
};

/// Reference speed-integration method: per reference apex, detect the
/// decoupling instant t1 (motor acceleration sign change), hold the load
/// velocity estimate at v_m(t1), detect the re-contact instant t2 (jerk
/// maximum), and integrate the relative velocity between them.
BacklashEstimate reference_identify(const Trajectory& traj, const TriangleRef& ref,
                                    const ReferenceOptions& opts = {});

struct CoulombFit {
    double slope_pos = 0.0, intercept_pos = 0.0;
    double slope_neg = 0.0, intercept_neg = 0.0;
    double coulomb_avg = 0.0; ///< mean of the intercept magnitudes
};

/// Least-squares line per velocity sign through steady-state
/// (velocity, torque) samples; the intercepts are the Coulomb levels.
CoulombFit coulomb_identify(const std::vector<std::pair<double, double>>& samples);

/// Two-encoder nominal map (validation only): horizontal width of the
/// (x_m, x_L) play loop, branches separated by the load motion direction.
BacklashEstimate two_encoder_map(const Trajectory& traj);

} // namespace twomass
