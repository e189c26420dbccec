#pragma once

// Unnormalized complex FFT of any length, backed by FFTW. Plans are cached
// per (length, direction); planning goes through a mutex because the FFTW
// planner is not thread-safe, execution on fresh arrays is.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <new>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ofdm_radar::detail {

using cplx = std::complex<double>;

struct FftwBuffer {
  explicit FftwBuffer(std::size_t n) : data(fftw_alloc_complex(n)) {
    if (!data) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(data); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;

  fftw_complex* data;
};

inline fftw_plan cached_plan(std::size_t n, int sign) {
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, fftw_plan> plans;
  std::lock_guard lock(mu);
  auto it = plans.find({n, sign});
  if (it != plans.end()) return it->second;
  // FFTW_ESTIMATE leaves the arrays untouched and is deterministic.
  FftwBuffer in(n), out(n);
  fftw_plan p = fftw_plan_dft_1d(static_cast<int>(n), in.data, out.data, sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                                 FFTW_ESTIMATE);
  if (!p) throw std::runtime_error("FFTW could not plan a transform");
  plans.emplace(std::pair{n, sign}, p);
  return p;
}

// sign = -1 for the forward kernel exp(-j2πkn/N), +1 for the inverse.
inline std::vector<cplx> fft(std::span<const cplx> x, int sign) {
  const std::size_t n = x.size();
  if (n == 0) return {};
  const fftw_plan plan = cached_plan(n, sign);
  FftwBuffer in(n), out(n);
  // std::complex<double> is layout-compatible with fftw_complex.
  std::copy(x.begin(), x.end(), reinterpret_cast<cplx*>(in.data));
  fftw_execute_dft(plan, in.data, out.data);
  const auto* first = reinterpret_cast<const cplx*>(out.data);
  return std::vector<cplx>(first, first + n);
}

}  // namespace ofdm_radar::detail
