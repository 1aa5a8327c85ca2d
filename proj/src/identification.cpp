#include "twomass/identification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace twomass {

const char* to_string(IdMethod m) {
    switch (m) {
        case IdMethod::Proposed: return "proposed";
        case IdMethod::Reference: return "reference";
        case IdMethod::TwoEncoder: return "two_encoder";
    }
    return "?";
}

namespace {

// Incremental least squares over index ranges, coordinates centered on the
// first point of the range to keep the sums well conditioned.
class RangeFitter {
public:
    RangeFitter(const std::vector<double>& t, const std::vector<double>& y,
                std::size_t begin, std::size_t end)
        : begin_(begin), t0_(t[begin]), y0_(y[begin]) {
        std::size_t n = end - begin;
        ct_.assign(n + 1, 0.0L);
        ctt_.assign(n + 1, 0.0L);
        cy_.assign(n + 1, 0.0L);
        cty_.assign(n + 1, 0.0L);
        cyy_.assign(n + 1, 0.0L);
        for (std::size_t k = 0; k < n; ++k) {
            long double tt = t[begin + k] - t0_;
            long double yy = y[begin + k] - y0_;
            ct_[k + 1] = ct_[k] + tt;
            ctt_[k + 1] = ctt_[k] + tt * tt;
            cy_[k + 1] = cy_[k] + yy;
            cty_[k + 1] = cty_[k] + tt * yy;
            cyy_[k + 1] = cyy_[k] + yy * yy;
        }
    }

    struct Line {
        double slope = 0.0;
        double intercept = 0.0; // absolute intercept at t = 0
        double sse = 0.0;
        bool ok = false;
    };

    // OLS line over absolute index range [i, j)
    Line fit(std::size_t i, std::size_t j) const {
        Line L;
        std::size_t a = i - begin_, b = j - begin_;
        long double n = static_cast<long double>(b - a);
        if (n < 2) return L;
        long double St = ct_[b] - ct_[a];
        long double Stt = ctt_[b] - ctt_[a];
        long double Sy = cy_[b] - cy_[a];
        long double Sty = cty_[b] - cty_[a];
        long double Syy = cyy_[b] - cyy_[a];
        long double den = n * Stt - St * St;
        if (den <= 0.0L) return L;
        long double slope = (n * Sty - St * Sy) / den;
        long double icept = (Sy - slope * St) / n;
        long double sse = Syy - icept * Sy - slope * Sty;
        L.slope = static_cast<double>(slope);
        L.intercept = static_cast<double>(y0_ + icept - slope * t0_);
        L.sse = static_cast<double>(sse < 0.0L ? 0.0L : sse);
        L.ok = true;
        return L;
    }

private:
    std::size_t begin_;
    double t0_, y0_;
    std::vector<long double> ct_, ctt_, cy_, cty_, cyy_;
};

std::vector<double> smooth_segment(const std::vector<double>& y, std::size_t begin,
                                   std::size_t end, std::size_t window) {
    std::size_t half = window / 2;
    std::vector<double> out(end - begin);
    // prefix sums for O(1) truncated centered windows
    std::vector<long double> cs(end - begin + 1, 0.0L);
    for (std::size_t k = begin; k < end; ++k) cs[k - begin + 1] = cs[k - begin] + y[k];
    for (std::size_t k = begin; k < end; ++k) {
        std::size_t lo = (k >= begin + half) ? k - half : begin;
        std::size_t hi = std::min(end, k + half + 1);
        out[k - begin] =
            static_cast<double>((cs[hi - begin] - cs[lo - begin]) / (hi - lo));
    }
    return out;
}

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v, double mean) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

std::size_t index_at_time(const std::vector<double>& t, double when) {
    auto it = std::lower_bound(t.begin(), t.end(), when - 1e-12);
    return static_cast<std::size_t>(it - t.begin());
}

} // namespace

ChangePointFit fit_change_point(const std::vector<double>& t,
                                const std::vector<double>& y, std::size_t begin,
                                std::size_t end, std::size_t margin) {
    if (end > t.size() || begin >= end)
        throw std::invalid_argument("fit_change_point: bad range");
    std::size_t n = end - begin;
    if (margin < 2) margin = 2;
    if (n < 2 * margin + 1)
        throw EstimationError("fit_change_point: range too short for interior breakpoint");

    RangeFitter fitter(t, y, begin, end);
    ChangePointFit best;
    best.sse = std::numeric_limits<double>::infinity();
    for (std::size_t b = begin + margin; b + margin <= end; ++b) {
        auto L = fitter.fit(begin, b);
        auto R = fitter.fit(b, end);
        if (!L.ok || !R.ok) continue;
        double sse = L.sse + R.sse;
        if (sse < best.sse) {
            best.sse = sse;
            best.breakpoint = b;
            best.left_slope = L.slope;
            best.left_intercept = L.intercept;
            best.right_slope = R.slope;
            best.right_intercept = R.intercept;
        }
    }
    if (!std::isfinite(best.sse))
        throw EstimationError("fit_change_point: no admissible breakpoint");
    best.single_line_sse = fitter.fit(begin, end).sse;
    return best;
}

BacklashEstimate propose_identify(const Trajectory& traj, const RelayConfig& relay,
                                  const PlantParams& plant,
                                  const ProposedOptions& opts) {
    relay.validate();
    plant.validate();
    if (traj.size() < 8) throw EstimationError("propose_identify: trajectory too short");
    const double T_s = traj.T_s;

    // segment boundaries at the asymmetry flips
    std::vector<std::size_t> bounds{0};
    for (const auto& ev : traj.events_of(EventKind::ScheduleFlip))
        bounds.push_back(index_at_time(traj.t, ev.t));
    bounds.push_back(traj.size());
    std::vector<std::pair<std::size_t, std::size_t>> segments;
    for (std::size_t i = 0; i + 1 < bounds.size(); ++i)
        if (bounds[i + 1] > bounds[i]) segments.emplace_back(bounds[i], bounds[i + 1]);
    if (segments.size() < 2)
        throw EstimationError("propose_identify: needs at least 2 schedule segments");

    // drop the leading segment(s) and an incomplete trailing one
    std::size_t full_len = segments.size() > 2 ? segments[1].second - segments[1].first
                                               : segments[0].second - segments[0].first;
    for (int i = 0; i < opts.skip_initial_segments && segments.size() > 1; ++i)
        segments.erase(segments.begin());
    if (!segments.empty()) {
        auto& last = segments.back();
        if (last.second - last.first < (9 * full_len) / 10) segments.pop_back();
    }
    if (segments.empty())
        throw EstimationError("propose_identify: no complete segments after trimming");

    BacklashEstimate est;
    est.method = IdMethod::Proposed;
    std::ostringstream diag;
    std::vector<double> values;

    for (std::size_t si = 0; si < segments.size(); ++si) {
        auto [i0, i1] = segments[si];
        double t_mid = traj.t[i0 + (i1 - i0) / 2];
        ScheduleSegment seg = relay.active_at(t_mid);

        double cycle_period;
        try {
            cycle_period = analytics::drift_period(plant, relay.h0, relay.e,
                                                   seg.alpha_plus, seg.alpha_minus);
        } catch (const std::domain_error&) {
            cycle_period = 2.0 * analytics::half_period(plant, relay.h0, relay.e);
        }
        std::size_t window =
            std::max<std::size_t>(3, static_cast<std::size_t>(std::llround(cycle_period / T_s)));
        if (window % 2 == 0) ++window;
        if (window >= (i1 - i0) / 2)
            throw EstimationError("propose_identify: smoothing window longer than segment");

        std::vector<double> ys = smooth_segment(traj.x_m, i0, i1, window);
        std::vector<double> ts(traj.t.begin() + static_cast<long>(i0),
                               traj.t.begin() + static_cast<long>(i1));

        std::size_t margin = std::max<std::size_t>(window, 10);
        ChangePointFit fit;
        try {
            fit = fit_change_point(ts, ys, 0, ts.size(), margin);
        } catch (const EstimationError& e) {
            diag << "segment " << si << ": " << e.what() << "\n";
            continue;
        }

        bool dir_ok = true;
        if (opts.direction == DriftDirection::Backward) dir_ok = fit.left_slope < 0.0;
        if (opts.direction == DriftDirection::Forward) dir_ok = fit.left_slope > 0.0;
        // A genuine engagement changes the drift rate in either direction:
        // a near-stalled load flattens the midline, a compliant one can
        // speed it up. Accept any sufficient contrast between the slopes.
        double lo = std::min(std::abs(fit.left_slope), std::abs(fit.right_slope));
        double hi = std::max(std::abs(fit.left_slope), std::abs(fit.right_slope));
        bool ratio_ok = lo == 0.0 ? hi > 0.0 : hi / lo >= opts.slope_ratio_min;
        fit.accepted = dir_ok && ratio_ok;

        double t_b = ts[fit.breakpoint];
        double reading = std::abs(fit.left_slope) * (t_b - ts.front());
        if (opts.amplitude_correction)
            reading -= analytics::limit_cycle_amplitude(plant, relay.h0, relay.e);

        diag << "segment " << si << ": gap_slope=" << fit.left_slope
             << " engaged_slope=" << fit.right_slope << " break_t=" << t_b
             << " reading=" << reading << (fit.accepted ? " accepted" : " rejected")
             << "\n";
        if (!fit.accepted) continue;

        IntervalReading r;
        r.interval_id = static_cast<int>(si);
        r.two_beta = reading;
        r.breakpoint_time = t_b;
        r.gap_slope = fit.left_slope;
        r.engaged_slope = fit.right_slope;
        est.readings.push_back(r);
        values.push_back(reading);
    }

    est.diagnostics = diag.str();
    if (values.empty())
        throw EstimationError("propose_identify: no change point accepted in any segment\n" +
                              est.diagnostics);
    est.mean_2beta = mean_of(values);
    est.std_2beta = stddev_of(values, est.mean_2beta);
    return est;
}

BacklashEstimate reference_identify(const Trajectory& traj, const TriangleRef& ref,
                                    const ReferenceOptions& opts) {
    ref.validate();
    if (traj.size() < 8) throw EstimationError("reference_identify: trajectory too short");
    const double T_s = traj.T_s;
    const double t_end = traj.t.back();
    const double quarter = ref.period / 4.0;

    std::vector<Event> impacts = traj.events_of(EventKind::Impact);

    BacklashEstimate est;
    est.method = IdMethod::Reference;
    std::ostringstream diag;
    std::vector<double> values;

    int apex_id = 0;
    for (double t_apex = quarter; t_apex + ref.period / 2.0 <= t_end;
         t_apex += ref.period / 2.0, ++apex_id) {

        // reference ramp direction before this apex
        double pre_sign = (apex_id % 2 == 0) ? +1.0 : -1.0;

        std::size_t k_apex = index_at_time(traj.t, t_apex);
        std::size_t k_half = std::min(traj.size() - 1,
                                      index_at_time(traj.t, t_apex + ref.period / 2.0));
        if (k_apex + 4 >= k_half) break;

        auto accel = [&](std::size_t k) {
            return (traj.v_m[k] - traj.v_m[k - 1]) / T_s;
        };
        auto jerk = [&](std::size_t k) { return std::abs(accel(k) - accel(k - 1)); };

        // t1: the motor acceleration flips against the pre-apex ramp. The
        // true mechanical decoupling happens later (the contact force fades
        // to zero with no measurable kink), so a motor-only detector can
        // only anchor on the reversal; the velocity deficit accumulated
        // before decoupling is the method's built-in overestimation.
        std::size_t k1 = 0;
        for (std::size_t k = k_apex + 1; k < k_half; ++k) {
            if (accel(k) * pre_sign < 0.0) { k1 = k; break; }
        }
        if (k1 == 0) {
            diag << "apex " << apex_id << ": no acceleration sign change\n";
            continue;
        }
        double v_hold = traj.v_m[k1];

        // t2: re-contact impact, the dominant velocity kink of the window
        std::size_t k2 = 0;
        if (opts.use_impact_events) {
            double t1 = traj.t[k1];
            for (const auto& ev : impacts) {
                if (ev.t > t1 && ev.t <= t_apex + ref.period / 2.0) {
                    k2 = index_at_time(traj.t, ev.t);
                    break;
                }
            }
            if (k2 == 0) {
                diag << "apex " << apex_id << ": no impact event in window\n";
                continue;
            }
        } else {
            std::vector<double> jerks;
            double jmax = 0.0;
            for (std::size_t k = k1 + 1; k + 1 < k_half; ++k) {
                double j = jerk(k);
                jerks.push_back(j);
                if (j > jmax) { jmax = j; k2 = k; }
            }
            if (jerks.empty()) {
                diag << "apex " << apex_id << ": empty detection window\n";
                continue;
            }
            std::nth_element(jerks.begin(), jerks.begin() + jerks.size() / 2, jerks.end());
            double med = jerks[jerks.size() / 2];
            if (!(jmax > opts.jerk_threshold_ratio * med) || jmax == 0.0) {
                diag << "apex " << apex_id << ": no impact signature above jerk threshold\n";
                continue;
            }
        }
        if (k2 <= k1) {
            diag << "apex " << apex_id << ": t2 <= t1, segment rejected\n";
            continue;
        }

        double acc = 0.0;
        for (std::size_t k = k1; k <= k2; ++k) acc += v_hold - traj.v_m[k];
        double reading = T_s * std::abs(acc);

        IntervalReading r;
        r.interval_id = apex_id;
        r.two_beta = reading;
        r.breakpoint_time = traj.t[k1];
        r.gap_slope = v_hold;
        r.engaged_slope = traj.v_m[k2];
        est.readings.push_back(r);
        values.push_back(reading);
        diag << "apex " << apex_id << ": t1=" << traj.t[k1] << " t2=" << traj.t[k2]
             << " v_hold=" << v_hold << " reading=" << reading << "\n";
    }

    est.diagnostics = diag.str();
    if (values.empty())
        throw EstimationError("reference_identify: no usable apex\n" + est.diagnostics);
    est.mean_2beta = mean_of(values);
    est.std_2beta = stddev_of(values, est.mean_2beta);
    return est;
}

CoulombFit coulomb_identify(const std::vector<std::pair<double, double>>& samples) {
    auto fit_side = [](const std::vector<std::pair<double, double>>& pts,
                       double& slope, double& icept) {
        if (pts.size() < 2)
            throw std::invalid_argument("coulomb_identify: needs >= 2 samples per sign");
        long double n = static_cast<long double>(pts.size());
        long double Sv = 0, Svv = 0, St = 0, Svt = 0;
        for (auto [v, tq] : pts) {
            Sv += v; Svv += static_cast<long double>(v) * v;
            St += tq; Svt += static_cast<long double>(v) * tq;
        }
        long double den = n * Svv - Sv * Sv;
        if (den <= 0.0L)
            throw std::invalid_argument("coulomb_identify: rank-deficient input "
                                        "(needs distinct velocities)");
        slope = static_cast<double>((n * Svt - Sv * St) / den);
        icept = static_cast<double>((St - slope * Sv) / n);
    };

    std::vector<std::pair<double, double>> pos, neg;
    for (const auto& s : samples)
        (s.first > 0.0 ? pos : neg).push_back(s);

    CoulombFit fit;
    bool have_pos = pos.size() >= 2, have_neg = neg.size() >= 2;
    if (!have_pos && !have_neg)
        throw std::invalid_argument("coulomb_identify: needs >= 2 samples per sign");
    if (have_pos) fit_side(pos, fit.slope_pos, fit.intercept_pos);
    if (have_neg) fit_side(neg, fit.slope_neg, fit.intercept_neg);
    if (have_pos && have_neg)
        fit.coulomb_avg = 0.5 * (std::abs(fit.intercept_pos) + std::abs(fit.intercept_neg));
    else
        fit.coulomb_avg = have_pos ? std::abs(fit.intercept_pos) : std::abs(fit.intercept_neg);
    return fit;
}

BacklashEstimate two_encoder_map(const Trajectory& traj) {
    if (traj.size() < 4) throw EstimationError("two_encoder_map: trajectory too short");

    std::vector<std::pair<double, double>> rising, falling; // (x_L, x_m)
    for (std::size_t k = 1; k < traj.size(); ++k) {
        if (traj.x_L[k] > traj.x_L[k - 1])
            rising.emplace_back(traj.x_L[k], traj.x_m[k]);
        else if (traj.x_L[k] < traj.x_L[k - 1])
            falling.emplace_back(traj.x_L[k], traj.x_m[k]);
    }
    bool zero_play = false;
    if (rising.empty() || falling.empty()) {
        // a rigid coupling still traces both branches as x_L == x_m; only a
        // never-engaging drive leaves the load untouched
        throw EstimationError("two_encoder_map: loop degenerate (gap never traversed)");
    }
    auto by_level = [](const auto& a, const auto& b) { return a.first < b.first; };
    std::sort(rising.begin(), rising.end(), by_level);
    std::sort(falling.begin(), falling.end(), by_level);

    double lo = std::max(rising.front().first, falling.front().first);
    double hi = std::min(rising.back().first, falling.back().first);
    if (!(hi > lo)) {
        if (hi == lo) zero_play = true; // single shared level: flat loop
        else throw EstimationError("two_encoder_map: branches do not overlap");
    }

    auto interp = [](const std::vector<std::pair<double, double>>& br, double level) {
        auto it = std::lower_bound(br.begin(), br.end(),
                                   std::make_pair(level, -std::numeric_limits<double>::infinity()));
        if (it == br.begin()) return it->second;
        if (it == br.end()) return (it - 1)->second;
        auto p0 = *(it - 1), p1 = *it;
        if (p1.first == p0.first) return 0.5 * (p0.second + p1.second);
        double w = (level - p0.first) / (p1.first - p0.first);
        return p0.second + w * (p1.second - p0.second);
    };

    double width = 0.0;
    if (!zero_play) {
        const int n_levels = 33;
        for (int i = 1; i <= n_levels; ++i) {
            double level = lo + (hi - lo) * i / (n_levels + 1);
            width = std::max(width, interp(rising, level) - interp(falling, level));
        }
    }

    BacklashEstimate est;
    est.method = IdMethod::TwoEncoder;
    IntervalReading r;
    r.interval_id = 0;
    r.two_beta = width;
    est.readings.push_back(r);
    est.mean_2beta = width;
    est.std_2beta = 0.0;
    est.diagnostics = "play-loop width over interior load levels";
    return est;
}

} // namespace twomass
