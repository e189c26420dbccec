#include <catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ofdm_radar/analysis.hpp"
#include "ofdm_radar/reconstruction.hpp"
#include "oracles.hpp"

using namespace ofdm_radar;
using Catch::Approx;

namespace {

OfdmPulse pulse(std::size_t n, std::size_t m, std::uint64_t seed, std::size_t q = 20) {
  return design_pulse(DesignConfig{n, m, 4, q, 1.0, 0.05, seed});
}

std::vector<cplx> coeffs(const SwathScene& s) { return {s.coefficients().begin(), s.coefficients().end()}; }

}  // namespace

TEST_CASE("noiseless OFDM reconstruction is exact", "[reconstruction][ofdm]") {
  const auto p = pulse(128, 96, 7);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto scene = random_scene(96, 1.0, 1.0, seed);
    const auto est = ofdm_range_compress(synthesize_received(p, scene, 0.0, 0), p);
    REQUIRE(est.d_hat.size() == 96);
    REQUIRE(est.residual_bins.size() == 32);
    CHECK(oracle::max_abs_diff(est.d_hat, coeffs(scene)) < 1e-10);
    CHECK(oracle::max_abs(est.residual_bins) < 1e-10);
  }
}

TEST_CASE("impulse scene lands in its own cell only", "[reconstruction][ofdm]") {
  const auto p = pulse(64, 40, 3);
  for (std::size_t cell : {0u, 17u, 39u}) {
    const auto est = ofdm_range_compress(synthesize_received(p, sparse_scene(40, {{cell, {0.0, 2.0}}}), 0.0, 0), p);
    for (std::size_t i = 0; i < 40; ++i) {
      const cplx want = i == cell ? cplx{0.0, 2.0} : cplx{};
      CHECK(std::abs(est.d_hat[i] - want) < 1e-12);
    }
  }
}

TEST_CASE("shifted weights are a phase ramp on the weights", "[reconstruction]") {
  const auto p = pulse(48, 30, 1);
  const auto shifted = shifted_weights(p);
  for (std::size_t i = 0; i < 48; ++i) {
    const cplx ramp = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(i * 29) / 48.0);
    CHECK(std::abs(shifted[i] - p.weights[i] * ramp) < 1e-12);
  }
}

TEST_CASE("unusable pulse is refused with the offending bin", "[reconstruction][errors]") {
  const double a = 1.0 / std::sqrt(2.0);
  DesignConfig cfg{4, 2, 4, 1, 1.0, 0.05, 0};
  const auto bad = pulse_from_sequence(TimeSequence({0.0, a, a, 0.0}), cfg);
  const auto rx = synthesize_received(bad, sparse_scene(2, {{0, 1.0}}), 0.0, 0);
  try {
    (void)ofdm_range_compress(rx, bad);
    FAIL("expected UnusablePulseError");
  } catch (const UnusablePulseError& e) {
    CHECK(e.bin() == 2);
    CHECK(std::string(e.what()).find('2') != std::string::npos);
  }

  const auto p = pulse(16, 8, 2);
  ReceivedSignal wrong{TimeSequence::zeros(15), 0.0, 0};
  CHECK_THROWS_AS(ofdm_range_compress(wrong, p), std::invalid_argument);
}

TEST_CASE("OFDM noise propagates as sigma^2 sum|S|^-2 / N^2", "[reconstruction][noise]") {
  const auto p = pulse(64, 48, 11);
  const double sigma_sq = 0.1;
  const auto scene = random_scene(48, 1.0, 1.0, 5);
  double err = 0.0;
  std::size_t count = 0;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    const auto est = ofdm_range_compress(synthesize_received(p, scene, sigma_sq, seed), p);
    for (std::size_t i = 0; i < 48; ++i) err += std::norm(est.d_hat[i] - scene[i]);
    count += 48;
  }
  double inv = 0.0;
  for (const auto& w : p.weights) inv += 1.0 / std::norm(w);
  CHECK(err / static_cast<double>(count) == Approx(sigma_sq * inv / (64.0 * 64.0)).epsilon(0.05));
}

TEST_CASE("LFM matched filter", "[reconstruction][lfm]") {
  SECTION("point target reproduces the autocorrelation around it") {
    const auto l = lfm_sequence(9);
    const auto z = autocorrelation(l);
    const std::size_t m = 30, target = 14;
    const auto est = lfm_range_compress(synthesize_lfm_echo(sparse_scene(m, {{target, 1.0}}), l, 0.0, 0), l, m);
    for (std::size_t c = 0; c < m; ++c) {
      const auto k = static_cast<std::ptrdiff_t>(target) - static_cast<std::ptrdiff_t>(c);
      CHECK(std::abs(est.d_hat[c] - z.at(-k)) < 1e-14);
    }
  }
  SECTION("matches the sidelobe-sum oracle") {
    const auto l = lfm_sequence(5);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto scene = random_scene(8, 1.0, 1.0, seed);
      const auto est = lfm_range_compress(synthesize_lfm_echo(scene, l, 0.0, 0), l, 8);
      CHECK(oracle::max_abs_diff(est.d_hat, oracle::lfm_output(coeffs(scene), l.samples())) < 1e-12);
    }
  }
  SECTION("linear in the echo") {
    const auto l = lfm_sequence(7);
    const auto a = synthesize_lfm_echo(random_scene(20, 1.0, 1.0, 1), l, 0.0, 0);
    const auto b = synthesize_lfm_echo(random_scene(20, 1.0, 1.0, 2), l, 0.0, 0);
    std::vector<cplx> sum(a.size());
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] = 2.0 * a[i] - b[i];
    const auto ya = lfm_range_compress(a, l, 20).d_hat;
    const auto yb = lfm_range_compress(b, l, 20).d_hat;
    const auto ys = lfm_range_compress(TimeSequence(sum), l, 20).d_hat;
    for (std::size_t i = 0; i < 20; ++i) CHECK(std::abs(ys[i] - (2.0 * ya[i] - yb[i])) < 1e-13);
  }
  SECTION("length mismatch") {
    const auto l = lfm_sequence(5);
    CHECK_THROWS_AS(lfm_range_compress(TimeSequence::zeros(11), l, 8), std::invalid_argument);
  }
}

TEST_CASE("LFM leaves sidelobe residue where OFDM is exact", "[reconstruction]") {
  const auto p = pulse(128, 96, 4);
  const auto l = lfm_sequence(33);
  const auto scene = sparse_scene(96, {{40, 1.0}, {44, 0.05}});
  const auto ofdm = ofdm_range_compress(synthesize_received(p, scene, 0.0, 0), p);
  const auto lfm = lfm_range_compress(synthesize_lfm_echo(scene, l, 0.0, 0), l, 96);
  CHECK(std::abs(ofdm.d_hat[44] - 0.05) < 1e-10);
  CHECK(std::abs(lfm.d_hat[44] - 0.05) > 0.01);
}
