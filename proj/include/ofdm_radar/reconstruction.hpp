#pragma once

/**
 * @file reconstruction.hpp
 * @brief Range compression for one range line.
 *
 * The OFDM path is a per-bin zero-forcing equalizer: because the pulse head
 * is zero, the received N samples are a circular convolution of the
 * cyclically shifted pulse with the zero-padded scene, and dividing the
 * spectra recovers every cell with no leakage from its neighbours. The LFM
 * path is the conventional matched filter and inherits the chirp's
 * autocorrelation sidelobes.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "ofdm_radar/errors.hpp"
#include "ofdm_radar/pulse_design.hpp"
#include "ofdm_radar/range_model.hpp"
#include "ofdm_radar/spectral.hpp"

namespace ofdm_radar {

struct RangeEstimate {
  std::vector<cplx> d_hat;          // one estimate per range cell, same scale as d_m
  std::vector<cplx> residual_bins;  // trailing N-M outputs; noise only
};

inline double default_s_min_floor(std::size_t n) { return 1e-6 / std::sqrt(static_cast<double>(n)); }

/// Spectrum of [s_t, 0^{M-1}], the pulse cyclically shifted left by M-1.
inline FrequencySequence shifted_weights(const OfdmPulse& pulse) {
  const std::size_t n = pulse.n();
  const std::size_t shift = pulse.m() - 1;
  std::vector<cplx> rotated(n);
  for (std::size_t i = 0; i < n; ++i) rotated[i] = pulse.s[(i + shift) % n];
  return dft(TimeSequence(std::move(rotated)), n);
}

inline RangeEstimate ofdm_range_compress(const ReceivedSignal& rx, const OfdmPulse& pulse, double s_min_floor) {
  const std::size_t n = pulse.n();
  const std::size_t m = pulse.m();
  if (rx.u.size() != n) {
    throw std::invalid_argument("ofdm_range_compress: received " + std::to_string(rx.u.size()) +
                                " samples, pulse has N = " + std::to_string(n));
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double mag = std::abs(pulse.weights[i]);
    if (mag <= s_min_floor) throw UnusablePulseError(i, mag, s_min_floor);
  }

  const auto received = dft(rx.u, n);
  const auto shifted = shifted_weights(pulse);
  std::vector<cplx> equalized(n);
  for (std::size_t i = 0; i < n; ++i) equalized[i] = received[i] / shifted[i];

  auto profile = idft(FrequencySequence(std::move(equalized)), n).take();
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& v : profile) v *= scale;

  RangeEstimate out;
  out.d_hat.assign(profile.begin(), profile.begin() + static_cast<std::ptrdiff_t>(m));
  out.residual_bins.assign(profile.begin() + static_cast<std::ptrdiff_t>(m), profile.end());
  return out;
}

inline RangeEstimate ofdm_range_compress(const ReceivedSignal& rx, const OfdmPulse& pulse) {
  return ofdm_range_compress(rx, pulse, default_s_min_floor(pulse.n()));
}

/// Matched filter y(m) = Σ_n u(m+n) l*(n), m = 0..M-1, against an echo of
/// M + N_t - 1 samples. Cell m collects d_m z(0) plus Σ_{k≠0} d_{m+k} z(-k).
inline RangeEstimate lfm_range_compress(const TimeSequence& echo, const TimeSequence& l, std::size_t m) {
  const std::size_t nt = l.size();
  if (echo.size() != m + nt - 1) {
    throw std::invalid_argument("lfm_range_compress: echo has " + std::to_string(echo.size()) +
                                " samples, expected M + N_t - 1 = " + std::to_string(m + nt - 1));
  }
  RangeEstimate out;
  out.d_hat.resize(m);
  for (std::size_t cell = 0; cell < m; ++cell) {
    cplx acc{};
    for (std::size_t i = 0; i < nt; ++i) acc += echo[cell + i] * std::conj(l[i]);
    out.d_hat[cell] = acc;
  }
  return out;
}

}  // namespace ofdm_radar
