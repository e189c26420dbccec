#pragma once

/**
 * @file range_model.hpp
 * @brief Range-line scenes and the sampled echoes they produce for both the
 *        OFDM pulse and the LFM baseline.
 *
 * A scene holds one complex coefficient per range cell; any azimuth phase is
 * folded into the coefficient.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ofdm_radar/pulse_design.hpp"
#include "ofdm_radar/spectral.hpp"

namespace ofdm_radar {

inline constexpr double kSpeedOfLight = 299'792'458.0;

class SwathScene {
 public:
  explicit SwathScene(std::vector<cplx> d, std::optional<double> sigma_d_sq = std::nullopt)
      : d_(std::move(d)), sigma_d_sq_(sigma_d_sq) {
    if (d_.size() < 2) throw std::invalid_argument("scene needs at least 2 range cells");
    for (std::size_t i = 0; i < d_.size(); ++i) {
      if (!std::isfinite(d_[i].real()) || !std::isfinite(d_[i].imag())) {
        throw std::invalid_argument("scene coefficient " + std::to_string(i) + " is not finite");
      }
    }
  }

  std::size_t cells() const noexcept { return d_.size(); }
  const cplx& operator[](std::size_t m) const { return d_[m]; }
  std::span<const cplx> coefficients() const noexcept { return d_; }
  std::optional<double> sigma_d_sq() const noexcept { return sigma_d_sq_; }

  friend bool operator==(const SwathScene&, const SwathScene&) = default;

 private:
  std::vector<cplx> d_;
  std::optional<double> sigma_d_sq_;
};

struct Target {
  std::size_t cell;
  cplx amplitude;
};

struct ReceivedSignal {
  TimeSequence u;
  double sigma_sq = 0.0;
  std::uint64_t seed = 0;
};

namespace detail {

// Adds CN(0, sigma_sq) to every sample; no draws when sigma_sq == 0.
inline void add_complex_noise(std::vector<cplx>& x, double sigma_sq, std::uint64_t seed) {
  if (sigma_sq < 0.0) throw std::invalid_argument("noise variance must be >= 0");
  if (sigma_sq == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma_sq / 2.0));
  for (auto& v : x) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    v += cplx{re, im};
  }
}

}  // namespace detail

/// A `density` fraction of the M cells (chosen by a seeded shuffle) gets an
/// i.i.d. CN(0, sigma_d_sq) coefficient; the rest are zero.
inline SwathScene random_scene(std::size_t m, double sigma_d_sq, double density, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("random_scene: M must be >= 2");
  if (!(sigma_d_sq > 0.0)) throw std::invalid_argument("random_scene: sigma_d_sq must be > 0");
  if (!(density >= 0.0 && density <= 1.0)) throw std::invalid_argument("random_scene: density must lie in [0, 1]");

  std::mt19937_64 rng(seed);
  const auto occupied = static_cast<std::size_t>(std::llround(density * static_cast<double>(m)));
  std::vector<std::size_t> cells(m);
  for (std::size_t i = 0; i < m; ++i) cells[i] = i;
  if (occupied < m) {
    std::shuffle(cells.begin(), cells.end(), rng);
    cells.resize(occupied);
    std::sort(cells.begin(), cells.end());
  }

  std::normal_distribution<double> gauss(0.0, std::sqrt(sigma_d_sq / 2.0));
  std::vector<cplx> d(m, cplx{});
  for (auto c : cells) {
    const double re = gauss(rng);
    const double im = gauss(rng);
    d[c] = {re, im};
  }
  return SwathScene(std::move(d), sigma_d_sq);
}

inline SwathScene sparse_scene(std::size_t m, const std::vector<Target>& targets) {
  std::vector<cplx> d(m, cplx{});
  std::set<std::size_t> seen;
  for (const auto& t : targets) {
    if (t.cell >= m) throw std::invalid_argument("sparse_scene: cell " + std::to_string(t.cell) + " out of range");
    if (!seen.insert(t.cell).second) throw std::invalid_argument("sparse_scene: duplicate cell " + std::to_string(t.cell));
    d[t.cell] = t.amplitude;
  }
  return SwathScene(std::move(d));
}

/// s_t = [s_{M-1}, ..., s_{N-1}], the samples actually put on air.
inline TimeSequence transmitted_segment(const OfdmPulse& pulse) {
  return TimeSequence(std::vector<cplx>(pulse.s.begin() + static_cast<std::ptrdiff_t>(pulse.m() - 1), pulse.s.end()));
}

/// u_n = Σ_m d_m s_{n-m+M-1} + w_n for n = 0..N-1, where s is extended with
/// zeros before index 0 and periodically past N-1.
inline ReceivedSignal synthesize_received(const OfdmPulse& pulse, const SwathScene& scene, double sigma_sq,
                                          std::uint64_t seed) {
  const std::size_t n = pulse.n();
  const std::size_t m = pulse.m();
  if (scene.cells() != m) {
    throw std::invalid_argument("synthesize_received: scene has " + std::to_string(scene.cells()) +
                                " cells, pulse expects " + std::to_string(m));
  }
  auto extended = [&](std::ptrdiff_t j) -> cplx {
    if (j < 0) return {};
    const auto idx = static_cast<std::size_t>(j);
    return idx < n ? pulse.s[idx] : pulse.s[idx - n];
  };

  std::vector<cplx> u(n, cplx{});
  for (std::size_t cell = 0; cell < m; ++cell) {
    const cplx d = scene[cell];
    if (d == cplx{}) continue;
    for (std::size_t i = 0; i < n; ++i) {
      u[i] += d * extended(static_cast<std::ptrdiff_t>(i + m - 1) - static_cast<std::ptrdiff_t>(cell));
    }
  }
  detail::add_complex_noise(u, sigma_sq, seed);
  return ReceivedSignal{TimeSequence(std::move(u)), sigma_sq, seed};
}

/// Dense row-major complex matrix; only what the channel model needs.
class ComplexMatrix {
 public:
  ComplexMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  cplx& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const cplx& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::vector<cplx> apply(std::span<const cplx> x) const {
    if (x.size() != cols_) throw std::invalid_argument("ComplexMatrix::apply: dimension mismatch");
    std::vector<cplx> y(rows_, cplx{});
    for (std::size_t r = 0; r < rows_; ++r) {
      cplx acc{};
      for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
      y[r] = acc;
    }
    return y;
  }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<cplx> data_;
};

/// N x (N-M+1) banded Toeplitz H with H(i, j) = d_{i-j} for 0 <= i-j <= M-1,
/// so that u = H s_t + w.
inline ComplexMatrix channel_matrix(const SwathScene& scene, std::size_t n) {
  const std::size_t m = scene.cells();
  if (n < m) throw std::invalid_argument("channel_matrix: N must be >= M");
  ComplexMatrix h(n, n - m + 1);
  for (std::size_t j = 0; j < h.cols(); ++j) {
    for (std::size_t k = 0; k < m; ++k) h(j + k, j) = scene[k];
  }
  return h;
}

/// Unit-energy full-band chirp of N_t samples:
/// l(n) = exp(jπ (n - N_t/2)² / N_t) / sqrt(N_t), i.e. a sweep across the
/// whole sampled band over the pulse, centred on the pulse midpoint.
inline TimeSequence lfm_sequence(std::size_t nt) {
  if (nt < 2) throw std::invalid_argument("lfm_sequence: N_t must be >= 2");
  const double ntd = static_cast<double>(nt);
  const double amp = 1.0 / std::sqrt(ntd);
  std::vector<cplx> l(nt);
  for (std::size_t i = 0; i < nt; ++i) {
    const double t = static_cast<double>(i) - ntd / 2.0;
    l[i] = std::polar(amp, std::numbers::pi * t * t / ntd);
  }
  return TimeSequence(std::move(l));
}

/// Linear convolution of the scene with the LFM sequence plus CN(0, σ²)
/// noise; M + N_t - 1 samples.
inline TimeSequence synthesize_lfm_echo(const SwathScene& scene, const TimeSequence& l, double sigma_sq,
                                        std::uint64_t seed) {
  const std::size_t m = scene.cells();
  const std::size_t nt = l.size();
  std::vector<cplx> u(m + nt - 1, cplx{});
  for (std::size_t cell = 0; cell < m; ++cell) {
    const cplx d = scene[cell];
    if (d == cplx{}) continue;
    for (std::size_t i = 0; i < nt; ++i) u[cell + i] += d * l[i];
  }
  detail::add_complex_noise(u, sigma_sq, seed);
  return TimeSequence(std::move(u));
}

struct TimingReport {
  double pulse_duration_s = 0.0;
  double min_range_m = 0.0;
  double max_prf_hz = 0.0;
};

/// Transmitted duration (N-M+1)/f_s, the blind range it implies, and the
/// largest PRF for which one swath echo clears before the next pulse.
inline TimingReport timing_constraints(std::size_t n, std::size_t m, double sample_rate_hz, double swath_width_m) {
  if (m < 2 || n <= m) throw std::invalid_argument("timing_constraints: need N > M >= 2");
  if (!(sample_rate_hz > 0.0)) throw std::invalid_argument("timing_constraints: sample rate must be > 0");
  if (!(swath_width_m >= 0.0)) throw std::invalid_argument("timing_constraints: swath width must be >= 0");
  TimingReport r;
  r.pulse_duration_s = static_cast<double>(n - m + 1) / sample_rate_hz;
  r.min_range_m = kSpeedOfLight * r.pulse_duration_s / 2.0;
  r.max_prf_hz = 1.0 / (2.0 * swath_width_m / kSpeedOfLight + r.pulse_duration_s);
  return r;
}

/// Range cell size c / (2B) for a sampled bandwidth B.
inline double range_resolution(double bandwidth_hz) { return kSpeedOfLight / (2.0 * bandwidth_hz); }

}  // namespace ofdm_radar
