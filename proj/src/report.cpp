#include "twomass/report.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twomass/simulator.hpp"

namespace twomass {

CycleMetrics measure_cycle(const Trajectory& traj, double t_discard) {
    CycleMetrics m;

    auto switches = traj.events_of(EventKind::RelaySwitch);
    std::vector<Event> late;
    for (const auto& e : switches)
        if (e.t >= t_discard) late.push_back(e);
    m.switch_count = static_cast<int>(late.size());

    if (late.size() >= 3) {
        double sum_half = 0.0;
        for (std::size_t i = 1; i < late.size(); ++i) sum_half += late[i].t - late[i - 1].t;
        m.half_period = sum_half / static_cast<double>(late.size() - 1);

        // consecutive switches alternate polarity: stride 2 spans one period
        double sum_T = 0.0, sum_X = 0.0;
        std::size_t n_per = 0;
        for (std::size_t i = 2; i < late.size(); ++i) {
            sum_T += late[i].t - late[i - 2].t;
            sum_X += late[i].value_a - late[i - 2].value_a;
            ++n_per;
        }
        if (n_per > 0) {
            m.drift_period = sum_T / static_cast<double>(n_per);
            m.drift_per_period = sum_X / static_cast<double>(n_per);
        }
        m.midline_drift = late.back().value_a - late.front().value_a;
    }

    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (std::size_t k = 0; k < traj.size(); ++k) {
        if (traj.t[k] < t_discard) continue;
        if (first) { lo = hi = traj.x_m[k]; first = false; }
        lo = std::min(lo, traj.x_m[k]);
        hi = std::max(hi, traj.x_m[k]);
    }
    m.amplitude = hi - lo;
    return m;
}

namespace {

void fill_predictions(RunReport& r, const ExperimentConfig& cfg) {
    if (!cfg.is_relay()) return;
    const RelayConfig& rc = cfg.relay();
    const ScheduleSegment& seg = rc.schedule.front();
    double h_sym = rc.h0; // base symmetric amplitude for (10)-(15)
    r.has_predictions = true;
    r.conditions = analytics::check_conditions(cfg.plant, h_sym, rc.e);
    try {
        r.X_xi = analytics::limit_cycle_amplitude(cfg.plant, h_sym, rc.e);
        r.X_xi_exact = analytics::limit_cycle_amplitude_exact(cfg.plant, h_sym, rc.e);
        r.t_star = analytics::half_period(cfg.plant, h_sym, rc.e);
    } catch (const std::domain_error&) {
        // conditions violated; the checks above already say so
    }
    try {
        r.X_C_printed = analytics::drift_per_period(cfg.plant, rc.h0, rc.e,
                                                    seg.alpha_plus, seg.alpha_minus,
                                                    analytics::DriftForm::AsPrinted);
        r.X_C_consistent = analytics::drift_per_period(
            cfg.plant, rc.h0, rc.e, seg.alpha_plus, seg.alpha_minus,
            analytics::DriftForm::ConsistentUnits);
        r.X_C_exact = analytics::drift_per_period(cfg.plant, rc.h0, rc.e,
                                                  seg.alpha_plus, seg.alpha_minus,
                                                  analytics::DriftForm::ExactIntegral);
        r.T_C = analytics::drift_period(cfg.plant, rc.h0, rc.e, seg.alpha_plus,
                                        seg.alpha_minus);
    } catch (const std::domain_error&) {
    }
}

bool relay_is_symmetric(const RelayConfig& rc) {
    for (const auto& s : rc.schedule)
        if (s.alpha_plus != s.alpha_minus || s.alpha_plus != rc.schedule.front().alpha_plus)
            return false;
    return rc.schedule.front().alpha_plus == rc.schedule.front().alpha_minus;
}

} // namespace

RunReport analyze_report(const ExperimentConfig& cfg) {
    RunReport r;
    r.config_echo = cfg.echo();
    fill_predictions(r, cfg);
    return r;
}

RunReport simulate_report(const ExperimentConfig& cfg, Trajectory* out_traj) {
    RunReport r = analyze_report(cfg);
    Trajectory traj = simulate(cfg.plant, cfg.controller, cfg.sim, cfg.initial_state());
    r.has_simulation = true;
    r.impact_count = traj.events_of(EventKind::Impact).size();

    if (cfg.is_relay()) {
        double discard = std::min(0.5, 0.25 * cfg.sim.duration);
        r.cycle = measure_cycle(traj, discard);

        if (!std::isfinite(cfg.plant.beta) && relay_is_symmetric(cfg.relay()) &&
            cfg.sim.loop_delay_samples == 0 && r.has_predictions && r.conditions.all) {
            r.oracle_checked = true;
            r.amplitude_rel_err = std::abs(r.cycle->amplitude - r.X_xi) / r.X_xi;
            r.amplitude_exact_rel_err =
                std::abs(r.cycle->amplitude - r.X_xi_exact) / r.X_xi_exact;
            r.half_period_rel_err = std::abs(r.cycle->half_period - r.t_star) / r.t_star;
            r.oracle_ok = (r.amplitude_rel_err <= 0.01 ||
                           r.amplitude_exact_rel_err <= 0.01) &&
                          r.half_period_rel_err <= 0.01;
        }
    }
    if (out_traj) *out_traj = std::move(traj);
    return r;
}

RunReport identify_report(const ExperimentConfig& cfg, Trajectory* out_traj) {
    Trajectory traj;
    RunReport r = simulate_report(cfg, &traj);
    r.ground_truth_2beta = 2.0 * cfg.plant.beta;

    BacklashEstimate est;
    try {
        switch (cfg.ident.method) {
            case IdMethod::Proposed:
                est = propose_identify(traj, cfg.relay(), cfg.plant, cfg.ident.proposed);
                break;
            case IdMethod::Reference:
                est = reference_identify(traj, cfg.pi_triangle().ref, cfg.ident.reference);
                break;
            case IdMethod::TwoEncoder:
                est = two_encoder_map(traj);
                break;
        }
    } catch (...) {
        if (out_traj) *out_traj = std::move(traj);
        throw;
    }
    r.has_estimate = true;
    r.estimate = est;
    if (std::isfinite(r.ground_truth_2beta) && r.ground_truth_2beta > 0.0)
        r.estimate_rel_err =
            (est.mean_2beta - r.ground_truth_2beta) / r.ground_truth_2beta;
    if (out_traj) *out_traj = std::move(traj);
    return r;
}

std::string RunReport::to_text() const {
    std::ostringstream os;
    os.precision(6);
    auto mrad = [](double rad) { return rad * 1e3; };
    os << "== run report ==\n";
    if (has_predictions) {
        os << "conditions: eq10=" << (conditions.eq10 ? "ok" : "violated")
           << " eq11=" << (conditions.eq11 ? "ok" : "violated")
           << " eq12=" << (conditions.eq12 ? "ok" : "violated")
           << (conditions.degenerate_damping ? " (degenerate d=0)" : "") << "\n";
        os << "predicted cycle amplitude X_xi [mrad]: " << mrad(X_xi)
           << " (exact integral: " << mrad(X_xi_exact) << ")\n";
        os << "predicted half-period t* [ms]: " << t_star * 1e3 << "\n";
        if (T_C > 0.0) {
            os << "predicted drift/period X_C [mrad] (as printed): " << mrad(X_C_printed)
               << "\n";
            os << "predicted drift/period X_C [mrad] (consistent-units): "
               << mrad(X_C_consistent) << "\n";
            os << "predicted drift/period X_C [mrad] (exact integral): "
               << mrad(X_C_exact) << "\n";
            os << "predicted drift cycle period T_C [ms]: " << T_C * 1e3 << "\n";
        }
    }
    if (has_simulation) {
        os << "impacts: " << impact_count << "\n";
        if (cycle) {
            os << "measured amplitude [mrad]: " << mrad(cycle->amplitude) << "\n";
            os << "measured half-period [ms]: " << cycle->half_period * 1e3 << "\n";
            if (cycle->drift_period > 0.0) {
                os << "measured drift/period [mrad]: " << mrad(cycle->drift_per_period)
                   << "\n";
                os << "measured drift cycle period [ms]: " << cycle->drift_period * 1e3
                   << "\n";
            }
        }
        if (oracle_checked) {
            os << "oracle cross-check: amplitude err " << amplitude_rel_err * 1e2
               << "% vs printed formula, " << amplitude_exact_rel_err * 1e2
               << "% vs exact integral; half-period err " << half_period_rel_err * 1e2
               << "% -> " << (oracle_ok ? "PASS" : "FAIL") << "\n";
        }
    }
    if (has_estimate) {
        os << "method: " << to_string(estimate.method) << "\n";
        os << "estimated 2beta [mrad]: " << mrad(estimate.mean_2beta)
           << " (std " << mrad(estimate.std_2beta) << ", n=" << estimate.readings.size()
           << ")\n";
        if (std::isfinite(ground_truth_2beta))
            os << "ground truth 2beta [mrad]: " << mrad(ground_truth_2beta)
               << " (rel err " << estimate_rel_err * 1e2 << "%)\n";
    }
    return os.str();
}

nlohmann::json RunReport::to_json() const {
    nlohmann::json j;
    j["config"] = config_echo;
    if (has_predictions) {
        j["predictions"] = {
            {"conditions",
             {{"eq10", conditions.eq10},
              {"eq11", conditions.eq11},
              {"eq12", conditions.eq12},
              {"all", conditions.all}}},
            {"X_xi", X_xi},
            {"X_xi_exact", X_xi_exact},
            {"t_star", t_star},
            {"X_C_printed", X_C_printed},
            {"X_C_consistent", X_C_consistent},
            {"X_C_exact", X_C_exact},
            {"T_C", T_C}};
    }
    if (has_simulation) {
        j["simulation"]["impacts"] = impact_count;
        if (cycle) {
            j["simulation"]["amplitude"] = cycle->amplitude;
            j["simulation"]["half_period"] = cycle->half_period;
            j["simulation"]["drift_per_period"] = cycle->drift_per_period;
            j["simulation"]["drift_period"] = cycle->drift_period;
            j["simulation"]["switch_count"] = cycle->switch_count;
        }
        if (oracle_checked) {
            j["oracle"] = {{"amplitude_rel_err", amplitude_rel_err},
                           {"amplitude_exact_rel_err", amplitude_exact_rel_err},
                           {"half_period_rel_err", half_period_rel_err},
                           {"pass", oracle_ok}};
        }
    }
    if (has_estimate) {
        nlohmann::json readings = nlohmann::json::array();
        for (const auto& r : estimate.readings)
            readings.push_back({{"interval", r.interval_id},
                                {"two_beta", r.two_beta},
                                {"breakpoint_time", r.breakpoint_time},
                                {"gap_slope", r.gap_slope},
                                {"engaged_slope", r.engaged_slope}});
        j["estimate"] = {{"method", to_string(estimate.method)},
                         {"mean_2beta", estimate.mean_2beta},
                         {"std_2beta", estimate.std_2beta},
                         {"readings", readings}};
        if (std::isfinite(ground_truth_2beta)) {
            j["estimate"]["ground_truth_2beta"] = ground_truth_2beta;
            j["estimate"]["rel_err"] = estimate_rel_err;
        }
    }
    return j;
}

} // namespace twomass
