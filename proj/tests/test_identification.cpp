#include "doctest.h"

#include "twomass/identification.hpp"
#include "twomass/play.hpp"
#include "twomass/trajectory.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace twomass;

TEST_CASE("change-point fit recovers an exact piecewise line") {
  std::vector<double> t, y;
  std::size_t n = 121, bp = 70;
  for (std::size_t k = 0; k < n; ++k) {
    double tk = 0.01 * static_cast<double>(k);
    t.push_back(tk);
    // slope 2 then slope -0.5, continuous at the breakpoint
    double tb = 0.01 * static_cast<double>(bp);
    y.push_back(tk <= tb ? 2.0 * tk + 1.0 : (2.0 * tb + 1.0) - 0.5 * (tk - tb));
  }

  ChangePointFit fit = fit_change_point(t, y, 0, n, 5);
  CHECK(fit.breakpoint >= bp - 1);
  CHECK(fit.breakpoint <= bp + 1);
  CHECK(fit.left_slope == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(fit.right_slope == doctest::Approx(-0.5).epsilon(1e-9));
  CHECK(fit.left_intercept == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(fit.sse < 1e-18);
  CHECK(fit.sse < fit.single_line_sse);

  // noise does not move the breakpoint beyond a couple of samples
  std::mt19937_64 rng(99);
  std::normal_distribution<double> noise(0.0, 1e-3);
  std::vector<double> yn = y;
  for (auto& v : yn) v += noise(rng);
  ChangePointFit nf = fit_change_point(t, yn, 0, n, 5);
  double bp_err = std::abs(static_cast<double>(nf.breakpoint) - static_cast<double>(bp));
  CHECK(bp_err <= 2.0);

  CHECK_THROWS_AS(fit_change_point(t, y, 0, 8, 5), EstimationError);
}

TEST_CASE("Coulomb fit is exact on noiseless lines") {
  // synthetic steady-state (velocity, torque) samples on both signs
  double slope = 0.098, level = 0.0999;
  std::vector<std::pair<double, double>> samples;
  for (double v = 0.5; v <= 3.01; v += 0.25) {
    samples.push_back({v, slope * v + level});
    samples.push_back({-v, -slope * v - level});
  }

  CoulombFit fit = coulomb_identify(samples);
  CHECK(std::abs(fit.slope_pos - slope) / slope < 1e-10);
  CHECK(std::abs(fit.slope_neg - slope) / slope < 1e-10);
  CHECK(std::abs(fit.intercept_pos - level) / level < 1e-10);
  CHECK(std::abs(fit.intercept_neg + level) / level < 1e-10);
  CHECK(std::abs(fit.coulomb_avg - level) / level < 1e-10);

  // asymmetric levels average per the definition
  std::vector<std::pair<double, double>> asym;
  for (double v = 0.5; v <= 2.01; v += 0.5) {
    asym.push_back({v, 0.1 * v + 0.04});
    asym.push_back({-v, -0.1 * v - 0.06});
  }
  CHECK(coulomb_identify(asym).coulomb_avg == doctest::Approx(0.05).epsilon(1e-12));

  CHECK_THROWS_AS(coulomb_identify({}), std::invalid_argument);
  // repeated velocities on one side leave the line underdetermined
  CHECK_THROWS_AS(coulomb_identify({{1.0, 0.1}, {2.0, 0.2}, {-1.0, -0.1}, {-1.0, -0.1}}),
                  std::invalid_argument);
}

TEST_CASE("two-encoder map reads the play-loop width off ideal signals") {
  double beta = 0.009525;
  Trajectory traj;
  traj.T_s = 1e-3;
  double x_m = 0.0, x_L = 0.0;

  // motor sweeps a triangle wide enough to traverse the gap both ways
  int n = 4000;
  for (int k = 0; k < n; ++k) {
    double t = traj.T_s * k;
    double period = 2.0, amp = 0.05;
    double phase = std::fmod(t, period) / period;
    double xm_new = amp * (phase < 0.5 ? 4.0 * phase - 1.0 : 3.0 - 4.0 * phase);
    x_L = play_step(x_L, x_m, xm_new, beta);
    x_m = xm_new;
    traj.t.push_back(t);
    traj.x_m.push_back(x_m);
    traj.v_m.push_back(0.0);
    traj.x_L.push_back(x_L);
    traj.v_L.push_back(0.0);
    traj.u.push_back(0.0);
    traj.tau.push_back(0.0);
    traj.mode.push_back(ContactMode::Gap);
  }

  BacklashEstimate est = two_encoder_map(traj);
  CHECK(est.method == IdMethod::TwoEncoder);
  CHECK(est.mean_2beta == doctest::Approx(2.0 * beta).epsilon(0.02));

  // a sweep that never traverses the gap has no loop to measure
  Trajectory flat = traj;
  for (auto& x : flat.x_m) x *= 1e-3;
  for (std::size_t k = 0; k < flat.size(); ++k) flat.x_L[k] = 0.0;
  CHECK_THROWS_AS(two_encoder_map(flat), EstimationError);
}

TEST_CASE("estimation failures raise instead of returning junk") {
  Trajectory tiny;
  tiny.T_s = 1e-3;
  for (int k = 0; k < 4; ++k) {
    tiny.t.push_back(k * 1e-3);
    tiny.x_m.push_back(0.0);
    tiny.v_m.push_back(0.0);
    tiny.x_L.push_back(0.0);
    tiny.v_L.push_back(0.0);
    tiny.u.push_back(0.0);
    tiny.tau.push_back(0.0);
    tiny.mode.push_back(ContactMode::Gap);
  }
  RelayConfig relay;
  relay.e = 0.1;
  relay.h0 = 0.12;
  relay.schedule = {{5.0, 2.0, 1.0}, {5.0, 1.0, 2.0}};
  PlantParams plant;
  plant.m = 8.78e-4;
  plant.M = 8.78e-4;
  plant.d = 0.062;
  plant.D = 0.036;
  plant.f = 0.05;
  plant.F = 0.05;
  plant.beta = 0.009525;

  CHECK_THROWS_AS(propose_identify(tiny, relay, plant), EstimationError);

  TriangleRef ref;
  ref.slope = 1400.0;
  ref.period = 0.2;
  CHECK_THROWS_AS(reference_identify(tiny, ref), EstimationError);
}
