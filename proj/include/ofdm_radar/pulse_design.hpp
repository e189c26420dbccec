#pragma once

/**
 * @file pulse_design.hpp
 * @brief Iterative design of arbitrary-length OFDM radar pulses.
 *
 * The designed length-N sequence s has M-1 leading zeros, so its periodic
 * extension to N+M-1 samples is zero at both ends and only the N-M+1 middle
 * samples are transmitted. The loop alternates between an L-times
 * oversampled time domain (zero-head masking, amplitude clipping against a
 * PAPR target) and the frequency domain (band limiting, modulus clamping
 * around the mean power), then truncates and renormalizes once at the end.
 */

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ofdm_radar/detail/parallel.hpp"
#include "ofdm_radar/errors.hpp"
#include "ofdm_radar/spectral.hpp"

namespace ofdm_radar {

struct DesignConfig {
  std::size_t n = 128;      // subcarriers
  std::size_t m = 96;       // range cells in the swath
  std::size_t l = 4;        // oversampling factor
  std::size_t q = 40;       // iterations
  double papr_d_db = 1.0;   // clipping target
  double g_f = 0.05;        // frequency clamp half-width, fraction of sqrt(P_fav)
  std::uint64_t seed = 0;

  void validate() const {
    auto fail = [](const std::string& field, const std::string& why) {
      throw std::invalid_argument("invalid design config: " + field + " " + why);
    };
    if (m < 2) fail("m", "must be >= 2");
    if (n < m) fail("n", "must be >= m");
    if (l < 1) fail("l", "must be >= 1");
    if (q < 1) fail("q", "must be >= 1");
    if (!(g_f > 0.0 && g_f < 1.0)) fail("g_f", "must lie in (0, 1)");
    if (!(papr_d_db >= 0.0) || !std::isfinite(papr_d_db)) fail("papr_d_db", "must be finite and >= 0");
  }

  friend bool operator==(const DesignConfig&, const DesignConfig&) = default;
};

struct PulseMetrics {
  double papr_db = 0.0;     // oversampled transmitted segment
  double xi_db = 0.0;       // SNR degradation factor N² / Σ|S_i|⁻²
  double s_min_norm = 0.0;  // min |S_i| in units of 1/sqrt(N)
  double oob_energy = 0.0;  // energy fraction outside bins 0..N-1 after time gating
  bool usable = true;       // false when some |S_i| == 0 (ξ = -inf)

  friend bool operator==(const PulseMetrics&, const PulseMetrics&) = default;
};

struct OfdmPulse {
  DesignConfig config;
  TimeSequence s;              // length N, zero head, unit energy
  FrequencySequence weights;   // dft(s, N)
  PulseMetrics metrics;

  std::size_t n() const noexcept { return s.size(); }
  std::size_t m() const noexcept { return config.m; }
  std::size_t transmitted_length() const noexcept { return n() - m() + 1; }

  friend bool operator==(const OfdmPulse&, const OfdmPulse&) = default;
};

/// S_i = exp(j2πφ_i), φ_i ~ U[0,1), from a seeded 64-bit Mersenne Twister.
inline FrequencySequence init_weights(std::size_t n, std::uint64_t seed) {
  if (n == 0) throw std::invalid_argument("init_weights: n must be >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> phase(0.0, 1.0);
  std::vector<cplx> w(n);
  for (auto& v : w) v = std::polar(1.0, 2.0 * std::numbers::pi * phase(rng));
  return FrequencySequence(std::move(w));
}

/// Zeros the first L(M-1) samples of an L-times oversampled sequence.
inline TimeSequence time_zero_filter(const TimeSequence& x, std::size_t l, std::size_t m) {
  if (l == 0 || m == 0 || x.size() % l != 0 || x.size() / l < m) {
    throw std::invalid_argument("time_zero_filter: length " + std::to_string(x.size()) +
                                " is not L*N with N >= M");
  }
  std::vector<cplx> out = x.samples();
  std::fill_n(out.begin(), l * (m - 1), cplx{});
  return TimeSequence(std::move(out));
}

/// Limits every sample of the non-zero region n >= L(M-1) to modulus
/// T = sqrt(PAPR_d · P_tav), keeping its phase; the head is forced to zero.
inline TimeSequence time_clip(const TimeSequence& x, std::size_t l, std::size_t m, double papr_d_db) {
  if (l == 0 || m == 0 || x.size() % l != 0 || x.size() / l < m) {
    throw std::invalid_argument("time_clip: length " + std::to_string(x.size()) +
                                " is not L*N with N >= M");
  }
  const std::size_t head = l * (m - 1);
  std::vector<cplx> out = x.samples();
  std::fill_n(out.begin(), head, cplx{});

  double power = 0.0;
  for (std::size_t i = head; i < out.size(); ++i) power += std::norm(out[i]);
  if (power == 0.0) throw DegenerateInputError("time_clip: non-zero region is all zero");
  power /= static_cast<double>(out.size() - head);

  const double threshold = std::sqrt(from_db(papr_d_db) * power);
  for (std::size_t i = head; i < out.size(); ++i) {
    const double mag = std::abs(out[i]);
    if (mag > threshold) out[i] *= threshold / mag;
  }
  return TimeSequence(std::move(out));
}

/// Keeps bins 0..N-1 of an LN-point spectrum and zeros the rest.
inline FrequencySequence freq_band_filter(const FrequencySequence& x, std::size_t n) {
  if (n == 0 || x.size() % n != 0) {
    throw std::invalid_argument("freq_band_filter: length " + std::to_string(x.size()) +
                                " is not a multiple of N = " + std::to_string(n));
  }
  std::vector<cplx> out = x.samples();
  std::fill(out.begin() + static_cast<std::ptrdiff_t>(n), out.end(), cplx{});
  return FrequencySequence(std::move(out));
}

/// Clamps every bin modulus into sqrt(P_fav)·[1-g_f, 1+g_f], keeping phase.
/// A bin of exactly zero modulus is lifted to the lower clamp at phase 0.
inline FrequencySequence freq_modulus_clip(const FrequencySequence& x, double g_f) {
  if (!(g_f > 0.0 && g_f < 1.0)) throw std::invalid_argument("freq_modulus_clip: g_f must lie in (0, 1)");
  const double p_fav = x.energy() / static_cast<double>(x.size());
  if (p_fav == 0.0) throw DegenerateInputError("freq_modulus_clip: all bins are zero");

  const double lo = std::sqrt(p_fav) * (1.0 - g_f);
  const double hi = std::sqrt(p_fav) * (1.0 + g_f);
  std::vector<cplx> out = x.samples();
  for (auto& v : out) {
    const double mag = std::abs(v);
    if (mag == 0.0) {
      v = {lo, 0.0};
    } else if (mag > hi) {
      v *= hi / mag;
    } else if (mag < lo) {
      v *= lo / mag;
    }
  }
  return FrequencySequence(std::move(out));
}

/// One pass of the design loop: S^(q) -> S^(q+1).
inline FrequencySequence design_iteration(const FrequencySequence& weights, const DesignConfig& cfg) {
  const std::size_t ln = cfg.l * cfg.n;
  auto x = oversampled_time(weights, cfg.l);
  x = time_zero_filter(x, cfg.l, cfg.m);
  x = time_clip(x, cfg.l, cfg.m, cfg.papr_d_db);
  auto spectrum = freq_band_filter(dft(x, ln), cfg.n);
  std::vector<cplx> band(spectrum.begin(), spectrum.begin() + static_cast<std::ptrdiff_t>(cfg.n));
  return freq_modulus_clip(FrequencySequence(std::move(band)), cfg.g_f);
}

inline PulseMetrics compute_metrics(const TimeSequence& s, std::size_t m, std::size_t l) {
  const std::size_t n = s.size();
  if (m < 1 || m > n || l < 1) throw std::invalid_argument("compute_metrics: need 1 <= M <= N and L >= 1");

  PulseMetrics out;
  const auto weights = dft(s, n);

  double inv_sum = 0.0;
  double min_mag = std::numeric_limits<double>::infinity();
  for (const auto& v : weights) {
    const double p = std::norm(v);
    min_mag = std::min(min_mag, std::sqrt(p));
    if (p == 0.0) {
      out.usable = false;
    } else {
      inv_sum += 1.0 / p;
    }
  }
  const double nd = static_cast<double>(n);
  out.xi_db = out.usable ? to_db(nd * nd / inv_sum) : -std::numeric_limits<double>::infinity();
  out.s_min_norm = min_mag * std::sqrt(nd);

  const auto over = oversampled_time(weights, l);
  const std::size_t head = l * (m - 1);
  out.papr_db = papr_db(over.span().subspan(head));

  // Out-of-band energy of the time-gated oversampled waveform.
  std::vector<cplx> gated = over.samples();
  std::fill_n(gated.begin(), head, cplx{});
  const auto gated_spectrum = dft(TimeSequence(std::move(gated)), l * n);
  double in_band = 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < gated_spectrum.size(); ++i) {
    const double p = std::norm(gated_spectrum[i]);
    total += p;
    if (i < n) in_band += p;
  }
  out.oob_energy = total > 0.0 ? (total - in_band) / total : 0.0;
  return out;
}

/// Truncates the head of idft(S, N), normalizes to unit energy and packages
/// the result with its weights and metrics.
inline OfdmPulse finalize_pulse(const FrequencySequence& weights, const DesignConfig& cfg) {
  std::vector<cplx> s = idft(weights, cfg.n).take();
  std::fill_n(s.begin(), cfg.m - 1, cplx{});
  double energy = 0.0;
  for (std::size_t i = cfg.m - 1; i < s.size(); ++i) energy += std::norm(s[i]);
  if (energy == 0.0) throw DegenerateInputError("finalize_pulse: transmitted segment is all zero");
  const double scale = 1.0 / std::sqrt(energy);
  for (auto& v : s) v *= scale;

  TimeSequence seq(std::move(s));
  auto final_weights = dft(seq, cfg.n);
  auto metrics = compute_metrics(seq, cfg.m, cfg.l);
  return OfdmPulse{cfg, std::move(seq), std::move(final_weights), metrics};
}

inline OfdmPulse design_pulse(const DesignConfig& cfg) {
  cfg.validate();
  auto weights = init_weights(cfg.n, cfg.seed);
  for (std::size_t q = 0; q < cfg.q; ++q) weights = design_iteration(weights, cfg);
  return finalize_pulse(weights, cfg);
}

/// Wraps an externally supplied sequence (for instance one read from disk)
/// after checking the zero-head and unit-energy properties.
inline OfdmPulse pulse_from_sequence(TimeSequence s, const DesignConfig& cfg) {
  if (s.size() != cfg.n) throw std::invalid_argument("pulse length does not match n");
  if (cfg.m < 2 || cfg.m > cfg.n) throw std::invalid_argument("pulse requires 2 <= m <= n");
  for (std::size_t i = 0; i + 1 < cfg.m; ++i) {
    if (s[i] != cplx{}) throw std::invalid_argument("pulse head sample " + std::to_string(i) + " is not zero");
  }
  if (std::abs(s.energy() - 1.0) > 1e-12) throw std::invalid_argument("pulse energy is not 1");
  auto weights = dft(s, cfg.n);
  auto metrics = compute_metrics(s, cfg.m, std::max<std::size_t>(cfg.l, 1));
  return OfdmPulse{cfg, std::move(s), std::move(weights), metrics};
}

struct PulseSearch {
  std::size_t trials = 1000;
  double min_xi_db = -0.4;
  double min_s_min_norm = 0.0;
  unsigned threads = 0;  // 0 = hardware concurrency
};

/// Designs `trials` pulses with seeds cfg.seed, cfg.seed+1, ... and returns
/// the lowest-PAPR one that meets the ξ and S_min constraints. Ties go to
/// the smaller seed. Empty when no trial qualifies.
inline std::optional<OfdmPulse> search_best_pulse(const DesignConfig& cfg, const PulseSearch& search) {
  cfg.validate();
  std::vector<std::optional<PulseMetrics>> results(search.trials);
  detail::parallel_for(search.trials, search.threads, [&](std::size_t t) {
    DesignConfig trial = cfg;
    trial.seed = cfg.seed + t;
    try {
      results[t] = design_pulse(trial).metrics;
    } catch (const DegenerateInputError&) {
      results[t].reset();
    }
  });

  std::optional<std::size_t> best;
  for (std::size_t t = 0; t < results.size(); ++t) {
    const auto& r = results[t];
    if (!r || !r->usable || r->xi_db < search.min_xi_db || r->s_min_norm < search.min_s_min_norm) continue;
    if (!best || r->papr_db < results[*best]->papr_db) best = t;
  }
  if (!best) return std::nullopt;
  DesignConfig winner = cfg;
  winner.seed = cfg.seed + *best;
  return design_pulse(winner);
}

}  // namespace ofdm_radar
