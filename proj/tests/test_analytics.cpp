#include "doctest.h"

#include "twomass/analytics.hpp"

#include <cmath>
#include <stdexcept>

using namespace twomass;
using namespace twomass::analytics;

// The drive-train parameters used throughout the closed-form checks.
static PlantParams table_plant() {
  PlantParams p;
  p.m = 8.78e-4;
  p.M = 8.78e-4;
  p.d = 0.062;
  p.D = 0.036;
  p.f = 0.05;
  p.F = 0.05;
  p.beta = 0.009525;
  return p;
}

TEST_CASE("limit cycle amplitude and half-period match the frozen references") {
  PlantParams p = table_plant();
  double h = 0.1, e = 0.1;

  // frozen by independent evaluation of the closed forms
  CHECK(limit_cycle_amplitude(p, h, e) == doctest::Approx(1.2833330410023442e-4).epsilon(1e-12));
  CHECK(limit_cycle_amplitude_exact(p, h, e) == doctest::Approx(1.2429225321786434e-4).epsilon(1e-12));
  CHECK(half_period(p, h, e) == doctest::Approx(2.448361505318651e-3).epsilon(1e-12));

  // published rounded figures: 0.128 mrad, 2.45 ms
  CHECK(std::abs(limit_cycle_amplitude(p, h, e) - 0.128e-3) / 0.128e-3 < 0.01);
  CHECK(std::abs(half_period(p, h, e) - 2.45e-3) / 2.45e-3 < 0.01);

  // the rational form runs high; the exact integral sits below it
  CHECK(limit_cycle_amplitude(p, h, e) > limit_cycle_amplitude_exact(p, h, e));
}

TEST_CASE("amplitude and half-period reduce to the undamped closed forms as d -> 0") {
  PlantParams p = table_plant();
  double h = 0.1, e = 0.1;
  double amp0 = p.m * e * e * h / ((h - p.f) * (h + p.f));
  double t0 = 2.0 * p.m * e * h / (h * h - p.f * p.f);

  p.d = 0.0;
  CHECK(limit_cycle_amplitude(p, h, e) == doctest::Approx(amp0).epsilon(1e-14));
  CHECK(limit_cycle_amplitude_exact(p, h, e) == doctest::Approx(amp0).epsilon(1e-14));
  CHECK(half_period(p, h, e) == doctest::Approx(t0).epsilon(1e-14));

  // at the two forms agree in the limit, and the log branch just above
  // the series switch stays continuous with it
  p.d = 1e-8;
  CHECK(limit_cycle_amplitude_exact(p, h, e) == doctest::Approx(amp0).epsilon(1e-6));
  CHECK(half_period(p, h, e) == doctest::Approx(t0).epsilon(1e-6));
}

TEST_CASE("drift per period: frozen values for the three forms") {
  PlantParams p = table_plant();
  double h0 = 0.12, e = 0.1;

  // asymmetry pair (2, 1): frozen by independent evaluation
  double printed = drift_per_period(p, h0, e, 2.0, 1.0, DriftForm::AsPrinted);
  double consistent = drift_per_period(p, h0, e, 2.0, 1.0, DriftForm::ConsistentUnits);
  double exact = drift_per_period(p, h0, e, 2.0, 1.0, DriftForm::ExactIntegral);
  CHECK(printed == doctest::Approx(-9.279840901595259e-4).epsilon(1e-12));
  CHECK(consistent == doctest::Approx(3.4830317573550726e-5).epsilon(1e-12));
  CHECK(exact == doctest::Approx(3.277491839375503e-5).epsilon(1e-12));

  // the printed factors are dimensionally inconsistent: wrong sign and
  // 30x too large here, while the consistent form lands within a few
  // percent of the exact integral
  CHECK(printed < 0.0);
  CHECK(consistent > 0.0);
  CHECK(exact > 0.0);
  CHECK(std::abs(consistent - exact) / exact < 0.08);

  // swapping the pair mirrors the drift for the odd-symmetric forms
  CHECK(drift_per_period(p, h0, e, 1.0, 2.0, DriftForm::ExactIntegral) ==
        doctest::Approx(-exact).epsilon(1e-12));
  CHECK(drift_per_period(p, h0, e, 1.0, 1.0, DriftForm::ExactIntegral) ==
        doctest::Approx(0.0));
}

TEST_CASE("drift exact form agrees with direct quadrature of the phase plane") {
  PlantParams p = table_plant();
  double h0 = 0.12, e = 0.1, ap = 2.0, am = 1.0;

  // Simpson quadrature of m*v/(h +- (f + d v)) over v in [0, e], the
  // coast-up and driven-down displacement of each half-cycle.
  auto simpson = [&](double h, int sign_f) {
    int n = 2000;
    double dv = e / n, s = 0.0;
    auto g = [&](double v) { return p.m * v / (h + sign_f * (p.f + p.d * v)); };
    for (int i = 0; i < n; i += 2)
      s += dv / 3.0 * (g(i * dv) + 4.0 * g((i + 1) * dv) + g((i + 2) * dv));
    return s;
  };
  double hp = ap * h0, hm = am * h0;
  double quad = (simpson(hp, +1) - simpson(hp, -1)) + (simpson(hm, -1) - simpson(hm, +1));
  double exact = drift_per_period(p, h0, e, ap, am, DriftForm::ExactIntegral);
  CHECK(exact == doctest::Approx(quad).epsilon(1e-9));
}

TEST_CASE("drift period reduces to twice the half-period at equal amplitudes") {
  PlantParams p = table_plant();
  double h0 = 0.12, e = 0.1;
  CHECK(drift_period(p, h0, e, 1.0, 1.0) ==
        doctest::Approx(2.0 * half_period(p, h0, e)).epsilon(1e-14));
  CHECK(drift_period(p, h0, e, 2.0, 1.0) ==
        doctest::Approx(half_period(p, 2.0 * h0, e) + half_period(p, h0, e)).epsilon(1e-14));
  CHECK(drift_velocity(p, h0, e, 2.0, 1.0, DriftForm::ExactIntegral) ==
        doctest::Approx(drift_per_period(p, h0, e, 2.0, 1.0, DriftForm::ExactIntegral) /
                        drift_period(p, h0, e, 2.0, 1.0)).epsilon(1e-14));
}

TEST_CASE("existence conditions: nominal set passes, boundary cases fail") {
  PlantParams p = table_plant();
  double h = 0.1, e = 0.1;

  ConditionCheck c = check_conditions(p, h, e);
  CHECK(c.eq10);
  CHECK(c.eq11);
  CHECK(c.eq12);
  CHECK(c.all);
  CHECK_FALSE(c.degenerate_damping);

  // h = f: the relay can no longer overcome friction (strict inequality)
  c = check_conditions(p, p.f, e);
  CHECK_FALSE(c.eq11);
  CHECK_FALSE(c.all);

  // e = h/d: the switching velocity equals the terminal velocity
  c = check_conditions(p, h, h / p.d);
  CHECK_FALSE(c.eq10);
  CHECK_FALSE(c.all);

  // e = 2f/d boundary of the unimodality condition
  c = check_conditions(p, 1.0, 2.0 * p.f / p.d);
  CHECK_FALSE(c.eq12);
  CHECK_FALSE(c.all);

  // d = 0 degenerates the velocity bounds to vacuous truths
  p.d = 0.0;
  c = check_conditions(p, h, e);
  CHECK(c.all);
  CHECK(c.degenerate_damping);
}

TEST_CASE("formulas reject parameters outside the existence region") {
  PlantParams p = table_plant();
  double e = 0.1;
  // h < f + d*e: the driven phase never reaches the switching velocity
  CHECK_THROWS_AS(half_period(p, p.f + p.d * e, e), std::domain_error);
  CHECK_THROWS_AS(limit_cycle_amplitude_exact(p, p.f + p.d * e, e), std::domain_error);
  CHECK_THROWS_AS(drift_per_period(p, p.f, e, 1.0, 1.0, analytics::DriftForm::ExactIntegral),
                  std::domain_error);
}

TEST_CASE("post-impact load displacement matches quadrature and grows with e") {
  PlantParams p = table_plant();

  // independent oracle: RK4 on M*vdot = -(D v + F) from the worst-case
  // post-impact velocity down to rest, accumulating position
  auto quadrature = [&](double e) {
    double v = 2.0 * p.m * e / (p.M + p.m), x = 0.0, dt = 1e-6;
    auto acc = [&](double vv) { return -(p.D * vv + p.F) / p.M; };
    while (v > 0.0) {
      double k1 = acc(v), k2 = acc(v + 0.5 * dt * k1), k3 = acc(v + 0.5 * dt * k2),
             k4 = acc(v + dt * k3);
      double vn = v + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      x += 0.5 * (v + std::max(vn, 0.0)) * dt;
      v = vn;
    }
    return x;
  };

  for (double e : {0.05, 0.1, 0.2}) {
    CHECK(load_displacement_after_impact(p, e) ==
          doctest::Approx(quadrature(e)).epsilon(1e-4));
  }
  CHECK(load_displacement_after_impact(p, 0.05) < load_displacement_after_impact(p, 0.1));
  CHECK(load_displacement_after_impact(p, 0.1) < load_displacement_after_impact(p, 0.2));

  // frozen value at e = 0.1
  CHECK(load_displacement_after_impact(p, 0.1) ==
        doctest::Approx(8.380080997377358e-5).epsilon(1e-12));

  // the small-D series branch stays continuous with the log branch
  PlantParams q = p;
  q.D = 1e-8;
  double lead = 2.0 * q.M * 0.01 * q.m * q.m / (q.F * (q.M + q.m) * (q.M + q.m));
  CHECK(load_displacement_after_impact(q, 0.1) == doctest::Approx(lead).epsilon(1e-6));

  q.D = 0.0;
  CHECK_THROWS_AS(load_displacement_after_impact(q, 0.1), std::domain_error);
  q.D = p.D;
  q.F = 0.0;
  CHECK_THROWS_AS(load_displacement_after_impact(q, 0.1), std::domain_error);
}
