#include "doctest.h"

#include "twomass/hysteron.hpp"
#include "twomass/play.hpp"
#include "twomass/plant.hpp"

#include <cmath>
#include <random>
#include <vector>

using namespace twomass;

static RelayConfig basic_relay() {
  RelayConfig cfg;
  cfg.e = 0.1;
  cfg.h0 = 0.12;
  cfg.schedule = {{5.0, 2.0, 1.0}, {5.0, 1.0, 2.0}};
  return cfg;
}

TEST_CASE("hysteron holds inside the dead band and commits at the thresholds") {
  RelayConfig cfg = basic_relay();
  HysteronState st;
  st.init(0.0, cfg.e);
  CHECK(st.sign == 1);

  // inclusive thresholds: exactly +e / -e switch
  CHECK(hysteron_step(st, 0.05, cfg, 2.0, 1.0) == doctest::Approx(2.0 * 0.12));
  CHECK(hysteron_step(st, -0.1, cfg, 2.0, 1.0) == doctest::Approx(-1.0 * 0.12));
  CHECK(st.sign == -1);
  // holds low branch strictly inside the band
  CHECK(hysteron_step(st, 0.0999, cfg, 2.0, 1.0) == doctest::Approx(-0.12));
  CHECK(hysteron_step(st, 0.1, cfg, 2.0, 1.0) == doctest::Approx(0.24));
  CHECK(st.sign == 1);
}

TEST_CASE("hysteron output is rate independent") {
  RelayConfig cfg = basic_relay();
  std::vector<double> zs = {0.0, 0.12, 0.05, -0.05, -0.12, 0.0, 0.11, -0.2, 0.3};

  HysteronState a, b;
  a.init(zs.front(), cfg.e);
  b.init(zs.front(), cfg.e);

  std::vector<double> out_a;
  for (double z : zs) out_a.push_back(hysteron_step(a, z, cfg, 1.0, 1.0));

  // replay with each input repeated (slower traversal of the same path)
  std::vector<double> out_b;
  for (double z : zs) {
    double last = 0;
    for (int r = 0; r < 4; ++r) last = hysteron_step(b, z, cfg, 1.0, 1.0);
    out_b.push_back(last);
  }
  CHECK(out_a == out_b);
}

TEST_CASE("relay schedule alternates the active amplitude pair") {
  RelayConfig cfg = basic_relay();
  auto s0 = cfg.active_at(0.0);
  auto s1 = cfg.active_at(5.0);
  auto s2 = cfg.active_at(12.3);
  CHECK(s0.alpha_plus == 2.0);
  CHECK(s0.alpha_minus == 1.0);
  CHECK(s1.alpha_plus == 1.0);
  CHECK(s1.alpha_minus == 2.0);
  CHECK(s2.alpha_plus == 2.0);
  CHECK(cfg.total_schedule_duration() == doctest::Approx(10.0));
}

TEST_CASE("play operator tracks only outside the gap") {
  const double beta = 0.009525;
  double xl = 0.0;
  // motor moves within the gap: load stays put
  xl = play_step(xl, 0.0, 0.004, beta);
  CHECK(xl == 0.0);
  // push past the upper face: load is dragged
  xl = play_step(xl, 0.004, 0.02, beta);
  CHECK(xl == doctest::Approx(0.02 - beta));
  // reverse inside the gap: load stays
  xl = play_step(xl, 0.02, 0.015, beta);
  CHECK(xl == doctest::Approx(0.02 - beta));
  // pull past the lower face
  xl = play_step(xl, 0.015, -0.01, beta);
  CHECK(xl == doctest::Approx(-0.01 + beta));
}

TEST_CASE("play operator is non-expansive") {
  const double beta = 0.005;
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> step(-0.01, 0.01);
  double xm_a = 0.0, xm_b = 0.003;
  double xl_a = 0.0, xl_b = 0.003;
  for (int i = 0; i < 2000; ++i) {
    double prev_a = xm_a, prev_b = xm_b;
    double dx = step(rng);
    xm_a += dx;
    xm_b += dx;
    double gap_before = std::fabs(xl_a - xl_b);
    xl_a = play_step(xl_a, prev_a, xm_a, beta);
    xl_b = play_step(xl_b, prev_b, xm_b, beta);
    CHECK(std::fabs(xl_a - xl_b) <= gap_before + 1e-15);
  }
}

TEST_CASE("play output stays within beta of the input") {
  const double beta = 0.007;
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> step(-0.02, 0.02);
  double xm = 0.0, xl = 0.0;
  for (int i = 0; i < 2000; ++i) {
    double prev = xm;
    xm += step(rng);
    xl = play_step(xl, prev, xm, beta);
    CHECK(std::fabs(xm - xl) <= beta + 1e-15);
  }
}

TEST_CASE("coulomb force: kinetic, static balance, and breakaway") {
  const double f = 0.05, vs = 1e-4;
  CHECK(coulomb_force(1.0, 0.0, f, vs) == doctest::Approx(f));
  CHECK(coulomb_force(-0.5, 0.0, f, vs) == doctest::Approx(-f));
  // stuck: friction balances a sub-breakaway applied force
  CHECK(coulomb_force(0.0, 0.03, f, vs) == doctest::Approx(0.03));
  // stuck: friction saturates at the static level
  CHECK(coulomb_force(0.0, 0.2, f, vs) == doctest::Approx(f));
  CHECK(coulomb_force(0.0, -0.2, f, vs) == doctest::Approx(-f));
}

TEST_CASE("plant parameter validation rejects non-physical values") {
  PlantParams p;
  p.m = 8.78e-4;
  p.M = 8.78e-4;
  p.d = 0.062;
  p.D = 0.036;
  p.f = 0.05;
  p.F = 0.05;
  p.beta = 0.009525;
  p.epsilon = 1.0;
  p.v_stick = 1e-4;
  CHECK_NOTHROW(p.validate());

  auto bad = p;
  bad.m = 0.0;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.epsilon = 1.5;
  CHECK_THROWS(bad.validate());
  bad = p;
  bad.beta = -1.0;
  CHECK_THROWS(bad.validate());
}
