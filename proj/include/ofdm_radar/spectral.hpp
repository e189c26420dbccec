#pragma once

/**
 * @file spectral.hpp
 * @brief Domain-tagged complex sequences and the unitary transforms used
 *        throughout the pulse design and range reconstruction code.
 *
 * Every transform here uses the unitary 1/sqrt(N) scaling in both directions,
 * so energy is preserved and a pulse with unit-energy weights has a
 * unit-energy time sequence.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ofdm_radar/detail/fft.hpp"
#include "ofdm_radar/errors.hpp"

namespace ofdm_radar {

using cplx = std::complex<double>;

enum class Domain { Time, Frequency };

inline const char* to_string(Domain d) { return d == Domain::Time ? "time" : "frequency"; }

/// Non-empty sequence of finite complex samples, tagged with its domain at
/// compile time so a spectrum cannot be fed where a waveform is expected.
template <Domain D>
class Sequence {
 public:
  static constexpr Domain domain = D;

  explicit Sequence(std::vector<cplx> samples) : samples_(std::move(samples)) {
    if (samples_.empty()) {
      throw std::invalid_argument(std::string(to_string(D)) + " sequence must be non-empty");
    }
    for (std::size_t i = 0; i < samples_.size(); ++i) {
      if (!std::isfinite(samples_[i].real()) || !std::isfinite(samples_[i].imag())) {
        throw std::invalid_argument(std::string(to_string(D)) + " sequence sample " +
                                    std::to_string(i) + " is not finite");
      }
    }
  }

  static Sequence zeros(std::size_t n) { return Sequence(std::vector<cplx>(n, cplx{})); }

  std::size_t size() const noexcept { return samples_.size(); }
  const cplx& operator[](std::size_t i) const { return samples_[i]; }
  std::span<const cplx> span() const noexcept { return samples_; }
  const std::vector<cplx>& samples() const noexcept { return samples_; }
  std::vector<cplx> take() && { return std::move(samples_); }

  auto begin() const noexcept { return samples_.begin(); }
  auto end() const noexcept { return samples_.end(); }

  double energy() const noexcept {
    double e = 0.0;
    for (const auto& v : samples_) e += std::norm(v);
    return e;
  }

  friend bool operator==(const Sequence&, const Sequence&) = default;

 private:
  std::vector<cplx> samples_;
};

using TimeSequence = Sequence<Domain::Time>;
using FrequencySequence = Sequence<Domain::Frequency>;

inline double to_db(double linear) { return 10.0 * std::log10(linear); }
inline double from_db(double db) { return std::pow(10.0, db / 10.0); }

namespace detail {

inline void require_size(std::size_t actual, std::size_t expected, const char* what) {
  if (actual != expected) {
    throw std::invalid_argument(std::string(what) + ": expected " + std::to_string(expected) +
                                " samples, got " + std::to_string(actual));
  }
}

inline std::vector<cplx> unitary(std::span<const cplx> x, int sign) {
  auto out = fft(x, sign);
  const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
  for (auto& v : out) v *= scale;
  return out;
}

}  // namespace detail

/// X_i = (1/sqrt(size)) Σ_n x_n exp(-j2πin/size)
inline FrequencySequence dft(const TimeSequence& x, std::size_t size) {
  detail::require_size(x.size(), size, "dft");
  return FrequencySequence(detail::unitary(x.span(), -1));
}

inline FrequencySequence dft(const TimeSequence& x) { return dft(x, x.size()); }

/// x_n = (1/sqrt(size)) Σ_i X_i exp(+j2πin/size)
inline TimeSequence idft(const FrequencySequence& X, std::size_t size) {
  detail::require_size(X.size(), size, "idft");
  return TimeSequence(detail::unitary(X.span(), +1));
}

inline TimeSequence idft(const FrequencySequence& X) { return idft(X, X.size()); }

/// L-times oversampled waveform of the weights S: the LN-point unitary
/// inverse transform of S followed by (L-1)N zeros.
inline TimeSequence oversampled_time(const FrequencySequence& S, std::size_t L) {
  if (L == 0) throw std::invalid_argument("oversampled_time: L must be >= 1");
  std::vector<cplx> padded(L * S.size(), cplx{});
  std::copy(S.begin(), S.end(), padded.begin());
  return TimeSequence(detail::unitary(padded, +1));
}

/// Peak-to-average power ratio (linear) of a run of samples.
inline double papr(std::span<const cplx> x) {
  if (x.empty()) throw std::invalid_argument("papr: empty input");
  double peak = 0.0;
  double total = 0.0;
  for (const auto& v : x) {
    const double p = std::norm(v);
    peak = std::max(peak, p);
    total += p;
  }
  if (total == 0.0) throw DegenerateInputError("papr: all-zero sequence");
  return peak / (total / static_cast<double>(x.size()));
}

inline double papr(const TimeSequence& x) { return papr(x.span()); }
inline double papr_db(std::span<const cplx> x) { return to_db(papr(x)); }

/// Aperiodic autocorrelation z(k) = Σ_n l(n) l*(n-k) over lags
/// -(N_t-1)..(N_t-1).
class Autocorrelation {
 public:
  explicit Autocorrelation(std::vector<cplx> values) : values_(std::move(values)) {
    if (values_.size() % 2 == 0) throw std::invalid_argument("autocorrelation: even lag count");
  }

  std::ptrdiff_t max_lag() const noexcept { return static_cast<std::ptrdiff_t>(values_.size() / 2); }
  /// Length of the sequence this was computed from.
  std::size_t sequence_length() const noexcept { return values_.size() / 2 + 1; }

  cplx at(std::ptrdiff_t k) const {
    if (k < -max_lag() || k > max_lag()) return {};
    return values_[static_cast<std::size_t>(k + max_lag())];
  }

  std::span<const cplx> values() const noexcept { return values_; }

  /// Largest |z(k)| over k != 0.
  double peak_sidelobe() const {
    double peak = 0.0;
    for (std::ptrdiff_t k = -max_lag(); k <= max_lag(); ++k) {
      if (k != 0) peak = std::max(peak, std::abs(at(k)));
    }
    return peak;
  }

 private:
  std::vector<cplx> values_;
};

inline Autocorrelation autocorrelation(const TimeSequence& l) {
  const auto n = static_cast<std::ptrdiff_t>(l.size());
  std::vector<cplx> z(static_cast<std::size_t>(2 * n - 1));
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    cplx acc{};
    for (std::ptrdiff_t i = k; i < n; ++i) acc += l[i] * std::conj(l[i - k]);
    z[static_cast<std::size_t>(n - 1 + k)] = acc;
    z[static_cast<std::size_t>(n - 1 - k)] = std::conj(acc);
  }
  return Autocorrelation(std::move(z));
}

}  // namespace ofdm_radar
