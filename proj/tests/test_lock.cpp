#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "biphoton/detection.hpp"
#include "biphoton/lock.hpp"
#include "oracles.hpp"

using namespace biphoton;
using namespace biphoton::lock;

namespace {
const double pi = std::numbers::pi;

double i1_oracle(double m, double lp) {
  const double c = std::cos(pi * m / lp);
  return c * c;
}

double outside_fraction(const LockTrace& t, double settle, double band) {
  return 1.0 - summarize(t, settle, band).in_band_fraction;
}
}  // namespace

TEST_CASE("mzi_intensities") {
  const auto a = mzi_intensities(0.0, 532.0);
  CHECK(a.i1 == doctest::Approx(1.0));
  CHECK(a.i2 == doctest::Approx(0.0));
  const auto b = mzi_intensities(266.0, 532.0);
  CHECK(b.i1 == doctest::Approx(0.0));
  CHECK(b.i2 == doctest::Approx(1.0));
  const auto c = mzi_intensities(202.5, 532.0);
  CHECK(c.i1 == doctest::Approx(i1_oracle(202.5, 532.0)).epsilon(1e-14));
  CHECK(c.i1 == doctest::Approx(0.13414).epsilon(1e-4));
  CHECK(c.i2 == doctest::Approx(0.86586).epsilon(1e-4));

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> m(-3000.0, 3000.0);
  for (int k = 0; k < 200; ++k) {
    const double x = m(rng);
    const auto p = mzi_intensities(x, 532.0);
    const auto q = mzi_intensities(x + 532.0, 532.0);
    CHECK(std::abs(p.i1 - q.i1) < 1e-12);
    CHECK(std::abs(p.i1 + p.i2 - 1.0) < 1e-12);
  }
}

TEST_CASE("setpoint_for_phi") {
  const auto sp = setpoint_for_phi(-pi / 2, 810.0, 532.0);
  CHECK(sp.mismatch_nm == doctest::Approx(-202.5));
  CHECK(sp.intensities.i1 == doctest::Approx(i1_oracle(-202.5, 532.0)));
  CHECK(sp.slope_per_nm ==
        doctest::Approx(oracle::derivative([](double m) { return i1_oracle(m, 532.0); }, -202.5)).epsilon(1e-6));
  const auto zero = setpoint_for_phi(0.0, 810.0, 532.0);
  CHECK(zero.mismatch_nm == 0.0);
  CHECK(zero.intensities.i1 == doctest::Approx(1.0));
  CHECK(zero.intensities.i2 == doctest::Approx(0.0));
  CHECK(setpoint_for_phi(pi, 810.0, 532.0).mismatch_nm == doctest::Approx(405.0));

  const auto [lo, hi] = capture_range(sp);
  CHECK(lo == doctest::Approx(-329.5));
  CHECK(hi == doctest::Approx(202.5));
}

TEST_CASE("error_signal") {
  const auto sp = setpoint_for_phi(-pi / 2, 810.0, 532.0);
  auto state_at = [](double m) {
    LockState s;
    const auto i = mzi_intensities(m, 532.0);
    s.intensity_1 = i.i1;
    s.intensity_2 = i.i2;
    return s;
  };
  CHECK(std::abs(error_signal(state_at(sp.mismatch_nm), sp)) < 1e-15);
  // The discriminant rises with the mismatch through the setpoint, as the
  // finite difference of the fringe signed by its slope demands.
  const double fd = oracle::derivative([&](double m) { return error_signal(state_at(m), sp); }, sp.mismatch_nm);
  CHECK(fd > 0.0);
  CHECK(error_signal(state_at(sp.mismatch_nm + 10.0), sp) > 0.0);
  CHECK(error_signal(state_at(sp.mismatch_nm - 10.0), sp) < 0.0);

  SUBCASE("10 nm above the setpoint the piezo moves down") {
    LockPlant plant{0.0, 810.0, 1e4};
    LockState s = state_at(sp.mismatch_nm + 10.0);
    s.piezo_position_nm = sp.mismatch_nm + 10.0;
    DriftProcess still({0.0, 0.0, 1.0}, 1);
    const auto next = controller_step(s, plant, sp, PiGains{}, 1e-3, still);
    CHECK(next.piezo_position_nm < s.piezo_position_nm);
  }
  SUBCASE("fringe extremum") {
    CHECK_THROWS_WITH_AS(error_signal(LockState{}, setpoint_for_phi(0.0, 810.0, 532.0)), "unlockable setpoint", Error);
  }
}

TEST_CASE("controller_step") {
  const auto sp = setpoint_for_phi(-pi / 2, 810.0, 532.0);
  const LockPlant plant{sp.mismatch_nm, 810.0, 1e4};
  SUBCASE("fixed point without drift") {
    LockState s;
    s.intensity_1 = sp.intensities.i1;
    s.intensity_2 = sp.intensities.i2;
    DriftProcess still({0.0, 0.0, 1.0}, 1);
    const auto next = controller_step(s, plant, sp, PiGains{}, 1e-3, still);
    CHECK(next.piezo_position_nm == doctest::Approx(0.0));
    CHECK(next.integrator == doctest::Approx(0.0));
    CHECK(next.intensity_1 == doctest::Approx(s.intensity_1));
  }
  SUBCASE("zero gains follow a sine open loop") {
    const DriftModel sine{0.0, 30.0, 0.5};
    DriftProcess drift(sine, 2);
    LockState s;
    for (int k = 1; k <= 300; ++k) {
      s = controller_step(s, plant, sp, PiGains{0.0, 0.0, 1e3}, 1e-3, drift);
      CHECK(plant.net_mismatch(s) == doctest::Approx(sp.mismatch_nm + 30.0 * std::sin(2 * pi * s.time_s / 0.5)));
      CHECK(std::abs(s.intensity_1 + s.intensity_2 - 1.0) < 1e-10);
    }
  }
  SUBCASE("piezo travel is clamped") {
    const LockPlant short_plant{sp.mismatch_nm, 810.0, 5.0};
    LockState s;
    DriftProcess jump({0.0, 0.0, 1.0}, 1, 100.0);
    for (int k = 0; k < 50; ++k) s = controller_step(s, short_plant, sp, PiGains{}, 1e-3, jump);
    CHECK(std::abs(s.piezo_position_nm) <= 5.0);
  }
}

TEST_CASE("run_lock") {
  const source::SourceConfig cfg;
  const PiGains gains;
  const DriftModel drift;

  SUBCASE("default loop holds the phase") {
    const auto trace = run_lock(cfg, gains, drift, 10.0, 1e-3, 7);
    CHECK(trace.samples.size() == 10001);
    CHECK(trace.samples.back().time_s == doctest::Approx(10.0));
    const auto sum = summarize(trace, 1.0, 0.05);
    CHECK(sum.in_band_fraction >= 0.95);
    CHECK(std::abs(sum.mean_phi_rad + pi / 2) < 0.01);
    for (const auto& s : trace.samples) CHECK(std::abs(s.i1 + s.i2 - 1.0) < 1e-10);
  }
  SUBCASE("identical seeds give identical traces") {
    const auto a = run_lock(cfg, gains, drift, 1.0, 1e-3, 3);
    const auto b = run_lock(cfg, gains, drift, 1.0, 1e-3, 3);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t k = 0; k < a.samples.size(); ++k) CHECK(a.samples[k].mismatch_nm == b.samples[k].mismatch_nm);
  }
  SUBCASE("duration equal to dt runs one cycle") {
    const auto t = run_lock(cfg, gains, drift, 1e-3, 1e-3, 3);
    CHECK(t.samples.size() == 2);
    CHECK(t.final_state.time_s == doctest::Approx(1e-3));
  }
  SUBCASE("zero drift settles on the target phase") {
    LockOptions opt;
    opt.initial_offset_nm = 120.0;
    const auto t = run_lock(cfg, gains, DriftModel{0.0, 0.0, 1.0}, 5.0, 1e-3, 1, opt);
    CHECK(std::abs(t.samples.back().phi_rad + pi / 2) < 1e-3);
    CHECK(summarize(t, 1.0, 0.05).stddev_phi_rad < 1e-3);
  }
  SUBCASE("zero gains leave the phase to the drift") {
    const auto t = run_lock(cfg, PiGains{0.0, 0.0, 1e3}, DriftModel{50.0, 0.0, 1.0}, 10.0, 1e-3, 5);
    CHECK(summarize(t, 1.0, 0.05).in_band_fraction < 0.5);
  }
  SUBCASE("property: doubling the walk never shrinks the out-of-band time") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      for (double base : {50.0, 400.0}) {
        const auto a = run_lock(cfg, gains, DriftModel{base, 0.0, 1.0}, 10.0, 1e-3, seed);
        const auto b = run_lock(cfg, gains, DriftModel{2 * base, 0.0, 1.0}, 10.0, 1e-3, seed);
        CHECK(outside_fraction(b, 1.0, 0.05) >= outside_fraction(a, 1.0, 0.05));
      }
    }
  }
  SUBCASE("bad arguments") {
    CHECK_THROWS_AS(run_lock(cfg, gains, drift, 1.0, 0.0, 1), Error);
    CHECK_THROWS_AS(run_lock(cfg, PiGains{-1.0, 5.0, 1e3}, drift, 1.0, 1e-3, 1), Error);
    CHECK_THROWS_AS(run_lock(cfg, gains, DriftModel{50.0, 0.0, 0.0}, 1.0, 1e-3, 1), Error);
  }
}

TEST_CASE("locked phase keeps the D/A fringe visibility") {
  const source::SourceConfig cfg;
  const detection::DetectorConfig det;
  const auto trace = run_lock(cfg, PiGains{}, DriftModel{}, 3.0, 1e-3, 21);
  const auto reference = detection::expected_rates(cfg, det, detection::peak_angle(detection::Port::D));
  const double v_ref = detection::visibility(reference[detection::Port::D].coincidences,
                                             detection::expected_rates(cfg, det, 3 * pi / 8)[detection::Port::D].coincidences);
  for (std::size_t k = 1000; k < trace.samples.size(); k += 100) {
    source::SourceConfig now = cfg;
    now.delta_l_s_nm = trace.samples[k].mismatch_nm;
    now.delta_l_i_nm = 0.0;
    const double peak = detection::expected_rates(now, det, pi / 8)[detection::Port::D].coincidences;
    const double trough = detection::expected_rates(now, det, 3 * pi / 8)[detection::Port::D].coincidences;
    // A 0.05 rad phase error costs at most 1 - cos(0.05) of the contrast.
    CHECK(detection::visibility(peak, trough) > v_ref * std::cos(0.05) - 1e-9);
  }
}
