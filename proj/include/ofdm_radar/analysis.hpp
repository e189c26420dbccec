#pragma once

/**
 * @file analysis.hpp
 * @brief Post-compression SNR/SINR figures for the OFDM and LFM paths, the
 *        Monte Carlo harness for pulse-design quality, and SINR sweeps.
 *
 * All ratios are linear unless the name says _db.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ofdm_radar/detail/parallel.hpp"
#include "ofdm_radar/errors.hpp"
#include "ofdm_radar/pulse_design.hpp"
#include "ofdm_radar/range_model.hpp"
#include "ofdm_radar/spectral.hpp"

namespace ofdm_radar {

/// Σ_i |S_i|⁻²; the noise gain of per-bin equalization.
inline double inverse_power_sum(const FrequencySequence& weights) {
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const double p = std::norm(weights[i]);
    if (p == 0.0) throw DegenerateInputError("weight bin " + std::to_string(i) + " is zero");
    acc += 1.0 / p;
  }
  return acc;
}

/// SNR degradation factor N² / Σ|S_i|⁻² (linear, <= 1 for unit-energy weights).
inline double xi_linear(const FrequencySequence& weights) {
  const double n = static_cast<double>(weights.size());
  return n * n / inverse_power_sum(weights);
}

/// SNR_m = N²|d_m|² / (σ² Σ|S_i|⁻²)
inline double snr_after_compression(double d_m_power, double sigma_sq, const FrequencySequence& weights) {
  if (!(sigma_sq > 0.0)) throw std::invalid_argument("snr_after_compression: sigma_sq must be > 0");
  return xi_linear(weights) * d_m_power / sigma_sq;
}

// --- LFM sidelobe interference ------------------------------------------------

/// Lags k != 0 that couple cell m to another cell inside the swath.
struct LagWindow {
  std::ptrdiff_t lo;
  std::ptrdiff_t hi;
};

inline LagWindow interference_window(std::size_t m, std::size_t cells, std::size_t nt) {
  const auto mi = static_cast<std::ptrdiff_t>(m);
  const auto span = static_cast<std::ptrdiff_t>(nt) - 1;
  return {std::max(-mi, -span), std::min(static_cast<std::ptrdiff_t>(cells) - mi - 1, span)};
}

/// E|I_m|² = σ_d² Σ_{k in window, k != 0} |z(k)|²
inline double lfm_mean_interference(double sigma_d_sq, const Autocorrelation& z, std::size_t m, std::size_t cells) {
  if (m >= cells) throw std::invalid_argument("lfm_mean_interference: cell index out of range");
  const auto w = interference_window(m, cells, z.sequence_length());
  double acc = 0.0;
  for (auto k = w.lo; k <= w.hi; ++k) {
    if (k != 0) acc += std::norm(z.at(k));
  }
  return sigma_d_sq * acc;
}

/// How the per-cell interference is reduced to one number for a mean-SINR
/// curve. CenterCell takes the cell at M/2, whose lag window is complete
/// whenever M >= 2N_t - 1; SwathAverage averages E|I_m|² over all M cells.
enum class InterferenceAggregation { CenterCell, SwathAverage };

inline double aggregated_interference(double sigma_d_sq, const Autocorrelation& z, std::size_t cells,
                                      InterferenceAggregation agg) {
  if (agg == InterferenceAggregation::CenterCell) return lfm_mean_interference(sigma_d_sq, z, cells / 2, cells);
  double acc = 0.0;
  for (std::size_t m = 0; m < cells; ++m) acc += lfm_mean_interference(sigma_d_sq, z, m, cells);
  return acc / static_cast<double>(cells);
}

/// σ_d² / (E|I_m|² + σ²)
inline double lfm_mean_sinr(double sigma_d_sq, double sigma_sq, const Autocorrelation& z, std::size_t cells,
                            InterferenceAggregation agg = InterferenceAggregation::CenterCell) {
  return sigma_d_sq / (aggregated_interference(sigma_d_sq, z, cells, agg) + sigma_sq);
}

/// N S_min² σ_d² / σ²; independent of the swath size.
inline double ofdm_sinr_bound(double s_min, std::size_t n, double sigma_d_sq, double sigma_sq) {
  if (!(s_min > 0.0)) throw std::invalid_argument("ofdm_sinr_bound: s_min must be > 0");
  return static_cast<double>(n) * s_min * s_min * sigma_d_sq / sigma_sq;
}

/// N² σ_d² / (σ² Σ|S_i|⁻²) = ξ σ_d² / σ²
inline double ofdm_true_sinr(const FrequencySequence& weights, double sigma_d_sq, double sigma_sq) {
  return xi_linear(weights) * sigma_d_sq / sigma_sq;
}

/// Realized sidelobe interference of the matched filter output,
/// I_m = Σ_{k != 0} d_{m+k} z(-k), lags limited to the swath.
inline std::vector<cplx> lfm_interference_per_cell(const SwathScene& scene, const Autocorrelation& z) {
  const std::size_t cells = scene.cells();
  std::vector<cplx> out(cells, cplx{});
  for (std::size_t m = 0; m < cells; ++m) {
    const auto w = interference_window(m, cells, z.sequence_length());
    cplx acc{};
    for (auto k = w.lo; k <= w.hi; ++k) {
      if (k != 0) acc += scene[static_cast<std::size_t>(static_cast<std::ptrdiff_t>(m) + k)] * z.at(-k);
    }
    out[m] = acc;
  }
  return out;
}

/// |d_m|² / (|I_m|² + σ²) per cell for the LFM matched filter.
inline std::vector<double> realized_sinr_per_cell(const SwathScene& scene, const Autocorrelation& z, double sigma_sq) {
  const auto interference = lfm_interference_per_cell(scene, z);
  std::vector<double> out(scene.cells());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = std::norm(scene[m]) / (std::norm(interference[m]) + sigma_sq);
  return out;
}

/// ξ|d_m|² / σ² per cell for the OFDM path (no interference term).
inline std::vector<double> ofdm_snr_per_cell(const SwathScene& scene, const FrequencySequence& weights,
                                             double sigma_sq) {
  std::vector<double> out(scene.cells());
  for (std::size_t m = 0; m < out.size(); ++m) out[m] = snr_after_compression(std::norm(scene[m]), sigma_sq, weights);
  return out;
}

// --- Monte Carlo over pulse designs --------------------------------------------

struct DesignTrialRecord {
  std::uint64_t seed = 0;
  double papr_db = 0.0;
  double xi_db = 0.0;
  double s_min_norm = 0.0;
  bool degenerate = false;  // design failed or produced a zero weight bin

  friend bool operator==(const DesignTrialRecord&, const DesignTrialRecord&) = default;
};

struct CdfPoint {
  double value;
  double fraction;
};

inline constexpr std::array<double, 3> kPaprGridDb{2.0, 2.5, 3.0};
inline constexpr std::array<double, 3> kXiGridDb{-0.1, -0.2, -0.4};
inline constexpr std::array<double, 4> kSminGridNorm{0.88, 0.85, 0.8, 0.5};

struct MonteCarloSummary {
  std::size_t trials = 0;
  std::size_t degenerate = 0;
  std::vector<CdfPoint> papr_cdf;
  std::vector<CdfPoint> xi_cdf;
  // [papr row][xi column]: PAPR <= row bound and ξ >= column bound.
  std::array<std::array<std::size_t, kXiGridDb.size()>, kPaprGridDb.size()> papr_xi_counts{};
  std::array<std::size_t, kSminGridNorm.size()> s_min_counts{};
};

struct MonteCarloResult {
  std::vector<DesignTrialRecord> records;
  MonteCarloSummary summary;
};

/// Empirical step CDF: the i-th smallest value carries fraction (i+1)/n.
inline std::vector<CdfPoint> empirical_cdf(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  std::vector<CdfPoint> out(values.size());
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out[i] = {values[i], static_cast<double>(i + 1) / n};
  return out;
}

inline MonteCarloSummary summarize(const std::vector<DesignTrialRecord>& records) {
  MonteCarloSummary s;
  s.trials = records.size();
  std::vector<double> paprs;
  std::vector<double> xis;
  for (const auto& r : records) {
    if (r.degenerate) {
      ++s.degenerate;
      continue;
    }
    paprs.push_back(r.papr_db);
    xis.push_back(r.xi_db);
    for (std::size_t a = 0; a < kPaprGridDb.size(); ++a) {
      for (std::size_t b = 0; b < kXiGridDb.size(); ++b) {
        if (r.papr_db <= kPaprGridDb[a] && r.xi_db >= kXiGridDb[b]) ++s.papr_xi_counts[a][b];
      }
    }
    for (std::size_t c = 0; c < kSminGridNorm.size(); ++c) {
      if (r.s_min_norm >= kSminGridNorm[c]) ++s.s_min_counts[c];
    }
  }
  s.papr_cdf = empirical_cdf(std::move(paprs));
  s.xi_cdf = empirical_cdf(std::move(xis));
  return s;
}

/// Runs `trials` independent designs with seeds base_seed + t. Records come
/// back in trial order regardless of how many threads ran them.
inline MonteCarloResult monte_carlo_designs(DesignConfig cfg, std::size_t trials, std::uint64_t base_seed,
                                            unsigned threads = 0) {
  if (trials == 0) throw std::invalid_argument("monte_carlo_designs: trials must be >= 1");
  cfg.validate();
  std::vector<DesignTrialRecord> records(trials);
  detail::parallel_for(trials, threads, [&](std::size_t t) {
    DesignConfig trial = cfg;
    trial.seed = base_seed + t;
    DesignTrialRecord rec;
    rec.seed = trial.seed;
    try {
      const auto metrics = design_pulse(trial).metrics;
      rec.papr_db = metrics.papr_db;
      rec.xi_db = metrics.xi_db;
      rec.s_min_norm = metrics.s_min_norm;
      rec.degenerate = !metrics.usable;
    } catch (const DegenerateInputError&) {
      rec.degenerate = true;
    }
    records[t] = rec;
  });
  auto summary = summarize(records);
  return {std::move(records), std::move(summary)};
}

/// Fraction of CDF samples with value strictly below x.
inline double fraction_below(const std::vector<CdfPoint>& cdf, double x) {
  if (cdf.empty()) return 0.0;
  const auto it = std::lower_bound(cdf.begin(), cdf.end(), x, [](const CdfPoint& p, double v) { return p.value < v; });
  return static_cast<double>(it - cdf.begin()) / static_cast<double>(cdf.size());
}

// --- SINR sweep -----------------------------------------------------------------

struct SinrCurve {
  std::vector<double> snr_in_db;
  std::vector<double> lfm_sinr_db;
  std::vector<double> ofdm_bound_db;
  std::vector<double> ofdm_true_db;
};

/// Evaluates the three mean-SINR curves on a grid of σ_d²/σ² (dB), with σ²
/// fixed to 1. `s_min` is the absolute weight-modulus bound used for the
/// OFDM lower bound; `weights` drives the realized OFDM curve.
inline SinrCurve sinr_sweep(const FrequencySequence& weights, double s_min, const TimeSequence& lfm, std::size_t cells,
                            const std::vector<double>& grid_db,
                            InterferenceAggregation agg = InterferenceAggregation::CenterCell) {
  if (grid_db.empty()) throw std::invalid_argument("sinr_sweep: empty grid");
  for (std::size_t i = 1; i < grid_db.size(); ++i) {
    if (!(grid_db[i] > grid_db[i - 1])) throw std::invalid_argument("sinr_sweep: grid must be strictly increasing");
  }
  const auto z = autocorrelation(lfm);
  const double unit_interference = aggregated_interference(1.0, z, cells, agg);
  const std::size_t n = weights.size();
  const double xi = xi_linear(weights);

  SinrCurve curve;
  for (double g : grid_db) {
    const double sigma_d_sq = from_db(g);
    curve.snr_in_db.push_back(g);
    curve.lfm_sinr_db.push_back(to_db(sigma_d_sq / (unit_interference * sigma_d_sq + 1.0)));
    curve.ofdm_bound_db.push_back(to_db(ofdm_sinr_bound(s_min, n, sigma_d_sq, 1.0)));
    curve.ofdm_true_db.push_back(to_db(xi * sigma_d_sq));
  }
  return curve;
}

/// Input SNR (dB) where the OFDM bound first rises above the LFM curve,
/// linearly interpolated between grid points; NaN if it never does.
inline double bound_crossing_db(const SinrCurve& c) {
  for (std::size_t i = 0; i < c.snr_in_db.size(); ++i) {
    const double diff = c.ofdm_bound_db[i] - c.lfm_sinr_db[i];
    if (diff > 0.0) {
      if (i == 0) return c.snr_in_db[0];
      const double prev = c.ofdm_bound_db[i - 1] - c.lfm_sinr_db[i - 1];
      return c.snr_in_db[i - 1] + (c.snr_in_db[i] - c.snr_in_db[i - 1]) * (-prev) / (diff - prev);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace ofdm_radar
