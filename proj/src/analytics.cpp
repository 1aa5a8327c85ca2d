#include "twomass/analytics.hpp"

#include <cmath>
#include <stdexcept>

namespace twomass {
namespace analytics {

namespace {
constexpr double kSmallDamping = 1e-9;
// the closed log forms below lose all their digits when the damping term
// is a tiny correction, so they hand over to a series in the ratio
constexpr double kSeriesRatio = 1e-4;

double sgn(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

// int_0^e v/(c - d v) dv, requires c > d*e
double integral_driven(double c, double d, double e) {
    if (std::abs(d) < kSmallDamping) return e * e / (2.0 * c);
    double r = d * e / c;
    if (r < kSeriesRatio)
        return e * e / (2.0 * c) * (1.0 + (2.0 / 3.0) * r + 0.5 * r * r);
    return (c * std::log(c / (c - d * e)) - d * e) / (d * d);
}

// int_0^e v/(c + d v) dv
double integral_coast(double c, double d, double e) {
    if (std::abs(d) < kSmallDamping) return e * e / (2.0 * c);
    double s = d * e / c;
    if (s < kSeriesRatio)
        return e * e / (2.0 * c) * (1.0 - (2.0 / 3.0) * s + 0.5 * s * s);
    return (d * e - c * std::log((c + d * e) / c)) / (d * d);
}

// Half-cycle time under constant relay amplitude h, velocity e -> -e.
double half_time_for_amplitude(const PlantParams& p, double h, double e) {
    if (!(h > p.f + p.d * e))
        throw std::domain_error("half_period: conditions violated, requires h > f + d*e");
    if (std::abs(p.d) < kSmallDamping) {
        // series limit of the log expression as d -> 0
        return 2.0 * p.m * e * h / (h * h - p.f * p.f);
    }
    double de = p.d * e;
    double a1 = 1.0 + de / (p.f - h);
    double a2 = (p.f + h) / (p.f + h + de);
    if (!(a1 > 0.0) || !(a2 > 0.0))
        throw std::domain_error("half_period: non-positive logarithm argument");
    return -(p.m / p.d) * (std::log(a1) + std::log(a2));
}
} // namespace

ConditionCheck check_conditions(const PlantParams& plant, double h, double e) {
    ConditionCheck c;
    if (plant.d > 0.0) {
        c.eq10 = e < h / plant.d;
        c.eq12 = e < 2.0 * plant.f / plant.d;
    } else {
        c.eq10 = true;
        c.eq12 = true;
        c.degenerate_damping = true;
    }
    c.eq11 = h > plant.f;
    c.all = c.eq10 && c.eq11 && c.eq12;
    return c;
}

double phase_portrait_position(double v, const PlantParams& plant, double h, double x0) {
    double den = plant.d * v + h + plant.f * sgn(v);
    if (den == 0.0)
        throw std::domain_error("phase_portrait_position: singular denominator (stall velocity)");
    return -0.5 * plant.m * v * v / den + x0;
}

double limit_cycle_amplitude(const PlantParams& plant, double h, double e) {
    double de = plant.d * e;
    double den = (plant.f + h + de) * (plant.f - h + de);
    if (den == 0.0)
        throw std::domain_error("limit_cycle_amplitude: singular parameters");
    return -e * e * h * plant.m / den;
}

double limit_cycle_amplitude_exact(const PlantParams& plant, double h, double e) {
    double c1 = h - plant.f, c2 = h + plant.f;
    if (!(c1 > plant.d * e))
        throw std::domain_error(
            "limit_cycle_amplitude_exact: conditions violated, requires h > f + d*e");
    return plant.m * (integral_driven(c1, plant.d, e) + integral_coast(c2, plant.d, e));
}

double half_period(const PlantParams& plant, double h, double e) {
    return half_time_for_amplitude(plant, h, e);
}

namespace {
// |Displacement| while |v| runs e -> 0 opposing the relay torque
// (denominator h + f + d|v|) and 0 -> e driven by it (h - f - d|v|).
double overrun_distance(const PlantParams& p, double h, double e) {
    return p.m * integral_coast(h + p.f, p.d, e);
}
double driven_distance(const PlantParams& p, double h, double e) {
    double c = h - p.f;
    if (!(c > p.d * e))
        throw std::domain_error("drift_per_period: conditions violated, requires h > f + d*e");
    return p.m * integral_driven(c, p.d, e);
}
} // namespace

double drift_per_period(const PlantParams& plant, double h0, double e,
                        double alpha_plus, double alpha_minus, DriftForm form) {
    if (form == DriftForm::ExactIntegral) {
        double hp = alpha_plus * h0, hm = alpha_minus * h0;
        // negative-torque phase coasts up then is driven down; the
        // positive-torque phase mirrors it with the other amplitude
        return (overrun_distance(plant, hp, e) - driven_distance(plant, hp, e)) +
               (driven_distance(plant, hm, e) - overrun_distance(plant, hm, e));
    }
    double mid = (form == DriftForm::AsPrinted) ? 2.0 * plant.d * e
                                                : 2.0 * plant.d * e * plant.f;
    double c2 = plant.d * plant.d * e * e + mid + plant.f * plant.f;
    double dm = -alpha_minus * alpha_minus * h0 * h0 + c2;
    double dp = -alpha_plus * alpha_plus * h0 * h0 + c2;
    if (dm == 0.0 || dp == 0.0)
        throw std::domain_error("drift_per_period: singular parameters");
    double num = -e * e * h0 * h0 * plant.m *
                 (alpha_minus * alpha_minus - alpha_plus * alpha_plus) *
                 (plant.f + plant.d * e);
    return num / (dm * dp);
}

double drift_period(const PlantParams& plant, double h0, double e,
                    double alpha_plus, double alpha_minus) {
    return half_time_for_amplitude(plant, alpha_plus * h0, e) +
           half_time_for_amplitude(plant, alpha_minus * h0, e);
}

double drift_velocity(const PlantParams& plant, double h0, double e,
                      double alpha_plus, double alpha_minus, DriftForm form) {
    return drift_per_period(plant, h0, e, alpha_plus, alpha_minus, form) /
           drift_period(plant, h0, e, alpha_plus, alpha_minus);
}

double load_displacement_after_impact(const PlantParams& plant, double e) {
    if (plant.F <= 0.0)
        throw std::domain_error("load_displacement_after_impact: undamped load (F = 0)");
    if (plant.D <= 0.0)
        throw std::domain_error("load_displacement_after_impact: undamped load (D = 0)");
    double m = plant.m, M = plant.M, D = plant.D, F = plant.F;
    double sum = M + m;
    if (2.0 * D * e * m < kSeriesRatio * F * sum) {
        // series in D: Coulomb-only stopping distance plus first correction
        double lead = 2.0 * M * e * e * m * m / (F * sum * sum);
        double corr = 8.0 * M * e * e * e * m * m * m * D / (3.0 * F * F * sum * sum * sum);
        return lead - corr;
    }
    return (F * M / (D * D)) * std::log(F * sum / (F * sum + 2.0 * D * e * m)) +
           2.0 * M * e * m / (D * sum);
}

} // namespace analytics
} // namespace twomass
