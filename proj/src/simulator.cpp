#include "twomass/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace twomass {

void SimConfig::validate() const {
    if (!(dt > 0.0) || !(T_s > 0.0) || dt > T_s)
        throw std::invalid_argument("SimConfig: requires 0 < dt <= T_s");
    double ratio = T_s / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio)
        throw std::invalid_argument("SimConfig: T_s must be an integer multiple of dt");
    if (!(duration > 0.0))
        throw std::invalid_argument("SimConfig: duration must be positive");
    if (loop_delay_samples < 0)
        throw std::invalid_argument("SimConfig: loop_delay_samples must be >= 0");
    if (encoder_bits < 0 || encoder_bits > 62)
        throw std::invalid_argument("SimConfig: encoder_bits out of range");
    if (!(event_tol > 0.0) || event_tol >= dt)
        throw std::invalid_argument("SimConfig: requires 0 < event_tol < dt");
}

int SimConfig::substeps_per_sample() const {
    return static_cast<int>(std::llround(T_s / dt));
}

std::pair<double, double> post_impact_velocities(double v_m, double v_L, double m,
                                                 double M, double epsilon) {
    if (!(m > 0.0) || !(M > 0.0))
        throw std::invalid_argument("post_impact_velocities: masses must be positive");
    if (epsilon < 0.0 || epsilon > 1.0)
        throw std::invalid_argument("post_impact_velocities: epsilon must be in [0,1]");
    double sum = M + m;
    double vmp = (v_L * (1.0 + epsilon) * M + v_m * (m - epsilon * M)) / sum;
    double vlp = (v_L * (M - epsilon * m) + v_m * (1.0 + epsilon) * m) / sum;
    return {vmp, vlp};
}

namespace {

int engaged_side(ContactMode m) {
    // +1: contact at delta = +beta (x_L = x_m - beta), -1: delta = -beta
    return m == ContactMode::EngagedLow ? +1 : -1;
}

struct PhysState {
    double t = 0.0;
    double x_m = 0.0, v_m = 0.0;
    double x_L = 0.0, v_L = 0.0;
    double tau = 0.0;
    ContactMode mode = ContactMode::Gap;
};

// One semi-implicit Euler step of size h under constant control torque u.
PhysState advance(const PlantParams& p, const PhysState& s, double u, double h) {
    PhysState r = s;
    r.t = s.t + h;
    if (s.mode == ContactMode::Gap) {
        double app_m = u - p.d * s.v_m;
        if (std::abs(s.v_m) <= p.v_stick && std::abs(app_m) <= p.f) {
            r.v_m = 0.0; // held by stiction
        } else {
            double fr = coulomb_force(s.v_m, app_m, p.f, p.v_stick);
            double a = (u - p.d * s.v_m - fr) / p.m;
            r.v_m = s.v_m + a * h;
            r.x_m = s.x_m + r.v_m * h;
        }
        double app_L = -p.D * s.v_L;
        if (std::abs(s.v_L) <= p.v_stick && std::abs(app_L) <= p.F) {
            r.v_L = 0.0;
        } else {
            double fr = coulomb_force(s.v_L, app_L, p.F, p.v_stick);
            double a = (-p.D * s.v_L - fr) / p.M;
            r.v_L = s.v_L + a * h;
            r.x_L = s.x_L + r.v_L * h;
        }
        r.tau = 0.0;
    } else {
        int side = engaged_side(s.mode);
        double v = s.v_m;
        double app = u - (p.d + p.D) * v;
        double level = p.f + p.F;
        if (std::abs(v) <= p.v_stick && std::abs(app) <= level) {
            r.v_m = r.v_L = 0.0;
            r.tau = 0.0; // static share indeterminate; holds contact
        } else {
            double fr = coulomb_force(v, app, level, p.v_stick);
            double a = (u - (p.d + p.D) * v - fr) / (p.m + p.M);
            r.v_m = r.v_L = v + a * h;
            r.x_m = s.x_m + r.v_m * h;
            r.x_L = r.x_m - side * p.beta;
            double frL = std::abs(r.v_m) > p.v_stick
                             ? p.F * (r.v_m > 0.0 ? 1.0 : -1.0)
                             : 0.0;
            r.tau = p.M * a + p.D * r.v_m + frL;
        }
    }
    return r;
}

struct Engine {
    const PlantParams& p;
    const SimConfig& sim;
    Trajectory& out;
    PhysState cur;
    double u = 0.0;

    // relay bookkeeping (continuous mode switches inside substeps)
    const RelayConfig* relay = nullptr;
    HysteronState hyst{};

    long events_this_sample = 0;

    void log(EventKind k, double t, double a, double b) {
        out.events.push_back(Event{t, k, a, b});
    }

    double relay_output(double t) const {
        ScheduleSegment seg = relay->active_at(t);
        return -(hyst.sign > 0 ? seg.alpha_plus * relay->h0
                               : -seg.alpha_minus * relay->h0);
    }

    void handle_impact(int side, bool force_merge) {
        cur.x_L = cur.x_m - side * p.beta; // snap onto the boundary
        double vm0 = cur.v_m, vl0 = cur.v_L;
        log(EventKind::Impact, cur.t, vm0, vl0);
        auto [vmp, vlp] = post_impact_velocities(vm0, vl0, p.m, p.M, p.epsilon);
        if (force_merge || p.epsilon == 0.0 || std::abs(vmp - vlp) < p.v_stick) {
            double vc = (p.m * vm0 + p.M * vl0) / (p.m + p.M);
            cur.v_m = cur.v_L = vc;
            cur.mode = side > 0 ? ContactMode::EngagedLow : ContactMode::EngagedHigh;
            log(EventKind::Engage, cur.t, vc, static_cast<double>(side));
        } else {
            cur.v_m = vmp;
            cur.v_L = vlp;
        }
    }

    // Earliest crossing fraction of a scalar monitor within a trial step
    // of size h; g0 is the monitor at the current state, gtrial beyond it.
    template <class Monitor>
    double crossing_fraction(Monitor&& g, double h, double g0) {
        double lo = 0.0, hi = 1.0;
        bool pos0 = g0 > 0.0;
        while ((hi - lo) * h > sim.event_tol) {
            double mid = 0.5 * (lo + hi);
            PhysState sm = advance(p, cur, u, mid * h);
            if ((g(sm) > 0.0) == pos0)
                lo = mid;
            else
                hi = mid;
        }
        return hi; // state at hi is just past the crossing
    }

    // Advance the state by h_total, localizing and handling hybrid events.
    void integrate(double h_total) {
        double remaining = h_total;
        int guard = 0;
        while (remaining > sim.event_tol) {
            if (++guard > 100000)
                throw SimulationError("event loop stalled", cur.t);

            if (cur.mode != ContactMode::Gap) {
                // immediate detach when the contact torque already pulls apart
                int side = engaged_side(cur.mode);
                if (cur.tau * side < 0.0) {
                    cur.mode = ContactMode::Gap;
                    cur.tau = 0.0;
                    log(EventKind::Detach, cur.t, cur.v_m, static_cast<double>(side));
                }
            }

            // A crossing that lands inside the bisection tolerance of a step can
            // slip past the interval tests below, so boundary states where the
            // current point is already at or beyond a threshold are handled here.
            if (cur.mode == ContactMode::Gap && std::isfinite(p.beta)) {
                double d0 = cur.x_m - cur.x_L;
                if (d0 >= p.beta && cur.v_m - cur.v_L > 0.0) {
                    ++events_this_sample;
                    handle_impact(+1, events_this_sample > 2000);
                    continue;
                }
                if (d0 <= -p.beta && cur.v_m - cur.v_L < 0.0) {
                    ++events_this_sample;
                    handle_impact(-1, events_this_sample > 2000);
                    continue;
                }
            }
            if (relay && sim.relay_continuous) {
                int flip = 0;
                if (hyst.sign > 0 && cur.v_m <= -relay->e)
                    flip = -1;
                else if (hyst.sign < 0 && cur.v_m >= relay->e)
                    flip = +1;
                if (flip != 0) {
                    hyst.sign = flip;
                    u = relay_output(cur.t);
                    log(EventKind::RelaySwitch, cur.t, cur.x_m, cur.v_m);
                    ++events_this_sample;
                    continue;
                }
            }

            PhysState trial = advance(p, cur, u, remaining);

            double frac = 1.0;
            int event = 0; // 0 none, 1 impact+, 2 impact-, 3 vm zero, 4 vL zero,
                           // 5 relay switch, 6 detach
            int relay_new_sign = 0;

            if (cur.mode == ContactMode::Gap) {
                double d0 = cur.x_m - cur.x_L, d1 = trial.x_m - trial.x_L;
                if (std::isfinite(p.beta)) {
                    if (d0 < p.beta && d1 >= p.beta) {
                        double fr = crossing_fraction(
                            [&](const PhysState& s) { return (s.x_m - s.x_L) - p.beta; },
                            remaining, d0 - p.beta);
                        if (fr < frac) { frac = fr; event = 1; }
                    }
                    if (d0 > -p.beta && d1 <= -p.beta) {
                        double fr = crossing_fraction(
                            [&](const PhysState& s) { return (s.x_m - s.x_L) + p.beta; },
                            remaining, d0 + p.beta);
                        if (fr < frac) { frac = fr; event = 2; }
                    }
                }
                if (std::abs(cur.v_L) > p.v_stick && cur.v_L * trial.v_L < 0.0) {
                    double fr = crossing_fraction(
                        [&](const PhysState& s) { return s.v_L; }, remaining, cur.v_L);
                    if (fr < frac) { frac = fr; event = 4; }
                }
            } else {
                int side = engaged_side(cur.mode);
                if (cur.tau * side > 0.0 && trial.tau * side < 0.0) {
                    double fr = crossing_fraction(
                        [&](const PhysState& s) { return s.tau * side; }, remaining,
                        cur.tau * side);
                    if (fr < frac) { frac = fr; event = 6; }
                }
            }
            if (std::abs(cur.v_m) > p.v_stick && cur.v_m * trial.v_m < 0.0) {
                double fr = crossing_fraction(
                    [&](const PhysState& s) { return s.v_m; }, remaining, cur.v_m);
                if (fr < frac) { frac = fr; event = 3; }
            }
            if (relay && sim.relay_continuous) {
                if (hyst.sign > 0 && cur.v_m > -relay->e && trial.v_m <= -relay->e) {
                    double fr = crossing_fraction(
                        [&](const PhysState& s) { return s.v_m + relay->e; }, remaining,
                        cur.v_m + relay->e);
                    if (fr < frac) { frac = fr; event = 5; relay_new_sign = -1; }
                } else if (hyst.sign < 0 && cur.v_m < relay->e && trial.v_m >= relay->e) {
                    double fr = crossing_fraction(
                        [&](const PhysState& s) { return s.v_m - relay->e; }, remaining,
                        cur.v_m - relay->e);
                    if (fr < frac) { frac = fr; event = 5; relay_new_sign = +1; }
                }
            }

            if (event == 0) {
                cur = trial;
                return;
            }

            double h_ev = frac * remaining;
            cur = advance(p, cur, u, h_ev);
            remaining -= h_ev;
            ++events_this_sample;
            switch (event) {
                case 1: handle_impact(+1, events_this_sample > 2000); break;
                case 2: handle_impact(-1, events_this_sample > 2000); break;
                case 3:
                case 4:
                    break; // friction branch re-evaluated from the new state
                case 5:
                    hyst.sign = relay_new_sign;
                    u = relay_output(cur.t);
                    log(EventKind::RelaySwitch, cur.t, cur.x_m, cur.v_m);
                    break;
                case 6:
                    cur.mode = ContactMode::Gap;
                    cur.tau = 0.0;
                    log(EventKind::Detach, cur.t, cur.v_m, 0.0);
                    break;
            }
        }
    }
};

void validate_init(const PlantParams& p, const SimState& init) {
    double delta = init.x_m - init.x_L;
    if (init.mode == ContactMode::Gap) {
        if (std::isfinite(p.beta) && std::abs(delta) > p.beta * (1.0 + 1e-12) + 1e-15)
            throw std::invalid_argument("simulate: init inconsistent, |x_m - x_L| > beta in gap mode");
    } else {
        int side = engaged_side(init.mode);
        if (!std::isfinite(p.beta))
            throw std::invalid_argument("simulate: engaged init with infinite beta");
        if (std::abs(delta - side * p.beta) > 1e-12 + 1e-9 * p.beta)
            throw std::invalid_argument("simulate: engaged init not on the contact boundary");
        if (std::abs(init.v_m - init.v_L) > p.v_stick)
            throw std::invalid_argument("simulate: engaged init with mismatched velocities");
    }
}

} // namespace

Trajectory simulate(const PlantParams& plant, const ControllerSpec& controller,
                    const SimConfig& sim, const SimState& init) {
    plant.validate();
    sim.validate();
    validate_init(plant, init);

    Trajectory out;
    out.T_s = sim.T_s;

    Engine eng{plant, sim, out};
    eng.cur = PhysState{init.t, init.x_m, init.v_m, init.x_L, init.v_L, init.tau, init.mode};
    eng.hyst = init.hysteron;

    const RelayConfig* relay_cfg = std::get_if<RelayConfig>(&controller);
    PiTriangleController pi_ctl;
    bool is_pi = false;
    if (relay_cfg) {
        relay_cfg->validate();
        eng.relay = relay_cfg;
    } else {
        pi_ctl = std::get<PiTriangleController>(controller);
        pi_ctl.pi.validate();
        pi_ctl.ref.validate();
        is_pi = true;
    }

    const int n_sub = sim.substeps_per_sample();
    const auto n_samples = static_cast<std::size_t>(std::llround(sim.duration / sim.T_s));
    if (n_samples == 0)
        throw std::invalid_argument("simulate: duration shorter than one sample");

    // measured motor velocity: optional encoder quantization + loop delay
    const double qstep = sim.encoder_bits > 0
                             ? 2.0 * std::numbers::pi / std::ldexp(1.0, sim.encoder_bits)
                             : 0.0;
    double prev_q = 0.0;
    std::deque<double> delay_line;

    ScheduleSegment prev_seg{};
    bool have_prev_seg = false;

    auto record = [&](double u_now) {
        out.t.push_back(eng.cur.t);
        out.x_m.push_back(eng.cur.x_m);
        out.v_m.push_back(eng.cur.v_m);
        out.x_L.push_back(eng.cur.x_L);
        out.v_L.push_back(eng.cur.v_L);
        out.u.push_back(u_now);
        out.tau.push_back(eng.cur.tau);
        out.mode.push_back(eng.cur.mode);
    };

    for (std::size_t k = 0; k <= n_samples; ++k) {
        double t = eng.cur.t;
        eng.events_this_sample = 0;

        double v_raw = eng.cur.v_m;
        if (qstep > 0.0) {
            double q = std::round(eng.cur.x_m / qstep) * qstep;
            v_raw = (k == 0) ? eng.cur.v_m : (q - prev_q) / sim.T_s;
            prev_q = q;
        }
        if (delay_line.empty())
            delay_line.assign(static_cast<std::size_t>(sim.loop_delay_samples) + 1, v_raw);
        delay_line.push_back(v_raw);
        double v_meas = delay_line.front();
        delay_line.pop_front();

        if (relay_cfg) {
            ScheduleSegment seg = relay_cfg->active_at(t);
            if (have_prev_seg && (seg.alpha_plus != prev_seg.alpha_plus ||
                                  seg.alpha_minus != prev_seg.alpha_minus))
                eng.log(EventKind::ScheduleFlip, t, seg.alpha_plus, seg.alpha_minus);
            prev_seg = seg;
            have_prev_seg = true;

            if (sim.relay_continuous) {
                eng.u = eng.relay_output(t); // switching handled inside substeps
            } else {
                int old_sign = eng.hyst.sign;
                eng.u = relay_controller_step(eng.hyst, v_meas, t, *relay_cfg);
                if (eng.hyst.sign != old_sign)
                    eng.log(EventKind::RelaySwitch, t, eng.cur.x_m, v_meas);
            }
        } else {
            double r = triangle_velocity_ref(t, pi_ctl.ref);
            eng.u = pi_controller_step(pi_ctl.pi, r, v_meas, sim.T_s);
        }

        record(eng.u);
        if (k == n_samples) break;

        for (int s = 0; s < n_sub; ++s) eng.integrate(sim.dt);
        // land exactly on the sample grid regardless of event rounding
        eng.cur.t = init.t + static_cast<double>(k + 1) * sim.T_s;

        if (!std::isfinite(eng.cur.x_m) || !std::isfinite(eng.cur.v_m) ||
            !std::isfinite(eng.cur.x_L) || !std::isfinite(eng.cur.v_L))
            throw SimulationError("simulate: non-finite state (diverging integration)",
                                  eng.cur.t);
    }
    (void)is_pi;
    return out;
}

} // namespace twomass
