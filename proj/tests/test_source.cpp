#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "biphoton/optics.hpp"
#include "biphoton/source.hpp"
#include "oracles.hpp"

using namespace biphoton;
using namespace biphoton::source;

namespace {
const double pi = std::numbers::pi;
const double h = 1.0 / std::numbers::sqrt2;

SourceConfig with_mismatch(double m) {
  SourceConfig cfg;
  cfg.delta_l_s_nm = m;
  cfg.delta_l_i_nm = 0.0;
  return cfg;
}

MixedState to_da(const MixedState& s) {
  return apply_idler_transform(apply_signal_transform(s, optics::arms_to_da(), signal_basis({Mode::D, Mode::A})),
                               optics::hv_to_da(), idler_basis({Mode::D, Mode::A}));
}

// Independent Gaussian overlap with FWHM l_c.
double mu_oracle(double m, double lc) { return std::exp(-4.0 * std::log(2.0) * (m / lc) * (m / lc)); }
}  // namespace

TEST_CASE("output_phase") {
  CHECK(output_phase(with_mismatch(0.0)) == 0.0);
  CHECK(output_phase(with_mismatch(-202.5)) == doctest::Approx(-pi / 2).epsilon(1e-14));
  CHECK(std::abs(output_phase(with_mismatch(810.0))) < 1e-12);
  SourceConfig both;
  both.delta_l_s_nm = 1000.0;
  both.delta_l_i_nm = 1000.0;
  CHECK(output_phase(both) == 0.0);

  SUBCASE("wrapping") {
    CHECK(wrap_phase(pi) == doctest::Approx(pi));
    CHECK(wrap_phase(-pi) == doctest::Approx(pi));
    CHECK(wrap_phase(3 * pi / 2) == doctest::Approx(-pi / 2));
  }
  SUBCASE("adding one signal wavelength leaves the phase alone") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> m(-5000.0, 5000.0);
    for (int k = 0; k < 200; ++k) {
      const double x = m(rng);
      const double d = wrap_phase(output_phase(x + 810.0, 810.0) - output_phase(x, 810.0));
      CHECK(std::abs(d) < 1e-12);
    }
  }
  SUBCASE("linear before wrapping") {
    for (double x : {-300.0, -100.0, 0.0, 50.0, 390.0})
      CHECK(output_phase(x, 810.0) == doctest::Approx(2 * pi * x / 810.0).epsilon(1e-14));
  }
}

TEST_CASE("ideal_state") {
  const auto s0 = ideal_state(0.0);
  CHECK(std::abs(s0.amplitude(Mode::H, Mode::H) - h) < 1e-15);
  CHECK(std::abs(s0.amplitude(Mode::V, Mode::V) - h) < 1e-15);
  CHECK(std::abs(s0.amplitude(Mode::H, Mode::V)) == 0.0);
  CHECK(std::abs(s0.amplitude(Mode::V, Mode::H)) == 0.0);
  CHECK(std::abs(ideal_state(pi).amplitude(Mode::V, Mode::V) + h) < 1e-15);

  const auto da = to_da(as_mixed(ideal_state(-pi / 2)));
  CHECK(joint_probability(da, Mode::D, Mode::A) < 1e-24);
  CHECK(joint_probability(da, Mode::A, Mode::D) < 1e-24);
  CHECK(joint_probability(da, Mode::D, Mode::D) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(joint_probability(da, Mode::A, Mode::A) == doctest::Approx(0.5).epsilon(1e-12));

  const auto unbalanced = ideal_state(0.0, pi / 3);
  CHECK(std::abs(unbalanced.amplitude(Mode::H, Mode::H) - 0.5) < 1e-15);
}

TEST_CASE("coherence length and weight") {
  CHECK(coherence_length_nm(1550.0, 0.8) == doctest::Approx(3.003125e6));
  CHECK(coherence_length_nm(1550.0, 1.6) == doctest::Approx(1.5015625e6));
  CHECK(coherence_length_nm(1550.0, 1550.0) == doctest::Approx(1550.0));
  CHECK_THROWS_AS(coherence_length_nm(1550.0, 0.0), Error);

  CHECK(coherence_weight(0.0, 3e6) == 1.0);
  CHECK(coherence_weight(1.5e6, 3e6) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(coherence_weight(-1.5e6, 3e6) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(1.0 - coherence_weight(200.0, 3e6) < 1e-7);
}

TEST_CASE("effective_state") {
  SUBCASE("nominal mismatch is effectively pure") {
    const SourceConfig cfg;
    CHECK(effective_coherence(cfg) > 1.0 - 1e-7);
    const auto da = to_da(effective_state(cfg));
    CHECK(joint_probability(da, Mode::D, Mode::A) < 1e-7);
  }
  SUBCASE("10 mm mismatch decoheres the cross term only") {
    const auto cfg = with_mismatch(1e7);
    CHECK(effective_coherence(cfg) < 1e-4);
    const auto s = effective_state(cfg);
    CHECK(joint_probability(s, Mode::H, Mode::H) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(joint_probability(s, Mode::V, Mode::V) == doctest::Approx(0.5).epsilon(1e-12));
    const auto da = to_da(s);
    for (Mode a : {Mode::D, Mode::A})
      for (Mode b : {Mode::D, Mode::A}) CHECK(joint_probability(da, a, b) == doctest::Approx(0.25).epsilon(1e-4));
  }
  SUBCASE("zero mismatch gives the phi = 0 state") {
    const auto s = effective_state(with_mismatch(0.0));
    REQUIRE(s.components().size() >= 1);
    CHECK(s.components()[0].weight == doctest::Approx(1.0));
    CHECK(equal_up_to_phase(s.components()[0].state, ideal_state(0.0)));
  }
  SUBCASE("property: D/A probabilities follow (1 +- mu)/4 at phi = -pi/2") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> turns(-3.0, 3.0);
    std::uniform_real_distribution<double> bw(0.2, 3.0);
    for (int k = 0; k < 50; ++k) {
      SourceConfig cfg;
      cfg.bandwidth_i_nm = bw(rng);
      const double lc = cfg.lambda_i_nm * cfg.lambda_i_nm / cfg.bandwidth_i_nm;
      // Whole signal wavelengths keep phi at -pi/2 while the mismatch scans l_c.
      const double m = -202.5 + 810.0 * std::round(turns(rng) * lc / 810.0);
      cfg.delta_l_s_nm = m;
      const double mu = mu_oracle(m, lc);
      const auto s = effective_state(cfg);
      CHECK(joint_probability(s, Mode::H, Mode::H) == doctest::Approx(0.5).epsilon(1e-12));
      const auto da = to_da(s);
      CHECK(joint_probability(da, Mode::D, Mode::D) == doctest::Approx((1 + mu) / 4).epsilon(1e-9));
      CHECK(joint_probability(da, Mode::D, Mode::A) == doctest::Approx((1 - mu) / 4).epsilon(1e-9));
    }
  }
}

TEST_CASE("energy conservation") {
  CHECK(std::abs(energy_conservation_residual(532, 810, 1550)) < 5e-8);
  CHECK(energy_conservation_residual(400, 800, 800) == 0.0);
  const double off = energy_conservation_residual(532, 810, 1600);
  CHECK(std::abs(off) == doctest::Approx(2.0e-5).epsilon(0.01));

  SourceConfig cfg;
  cfg.lambda_i_nm = 1600;
  CHECK_THROWS_AS(validate(cfg), Error);
  cfg.strict_energy = false;
  CHECK_NOTHROW(validate(cfg));

  SUBCASE("perturbing pump or signal frequency moves the residual in opposite directions") {
    const double dp = oracle::derivative([](double nu) { return energy_conservation_residual(1.0 / nu, 810, 1550); },
                                         1.0 / 532.0, 1e-7);
    const double ds = oracle::derivative([](double nu) { return energy_conservation_residual(532, 1.0 / nu, 1550); },
                                         1.0 / 810.0, 1e-7);
    const double di = oracle::derivative([](double nu) { return energy_conservation_residual(532, 810, 1.0 / nu); },
                                         1.0 / 1550.0, 1e-7);
    CHECK(dp == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(ds == doctest::Approx(-dp).epsilon(1e-6));
    CHECK(di == doctest::Approx(-dp).epsilon(1e-6));
  }
}

TEST_CASE("rayleigh range") {
  const double z0 = rayleigh_range_mm(125.0, 532.0);
  CHECK(z0 == doctest::Approx(pi * 0.125 * 0.125 / 532e-6).epsilon(1e-12));
  CHECK(z0 == doctest::Approx(92.3).epsilon(0.002));
  CHECK(z0 / 50.0 == doctest::Approx(1.8).epsilon(0.05));
}

TEST_CASE("singles_rate") {
  SourceConfig cfg;
  cfg.pair_rate_coeff = 2.5e5;
  CHECK(singles_rate(cfg) == doctest::Approx(3.0e5));
  cfg.pump_power_mw = 0.6;
  CHECK(singles_rate(cfg) == doctest::Approx(1.5e5));
  cfg.pump_power_mw = 0.0;
  CHECK(singles_rate(cfg) == 0.0);
}

TEST_CASE("validate names the field") {
  SourceConfig cfg;
  cfg.lambda_s_nm = -810;
  try {
    validate(cfg);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("lambda_s_nm") != std::string::npos);
  }
}
