#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ofdm_radar {

// Raised when an input is well-formed but admits no meaningful result
// (all-zero sequences where a power ratio is needed, and similar).
class DegenerateInputError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A pulse whose weight moduli fall at or below the reconstruction floor.
class UnusablePulseError : public std::runtime_error {
 public:
  UnusablePulseError(std::size_t bin, double modulus, double floor)
      : std::runtime_error("pulse unusable for reconstruction: |S_" + std::to_string(bin) +
                           "| = " + std::to_string(modulus) + " <= floor " +
                           std::to_string(floor)),
        bin_(bin) {}

  std::size_t bin() const noexcept { return bin_; }

 private:
  std::size_t bin_;
};

}  // namespace ofdm_radar
