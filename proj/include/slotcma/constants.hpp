#pragma once

#include <cmath>

namespace slotcma::constants {

inline constexpr double pi = 3.14159265358979323846;

// Free-space medium parameters.
inline constexpr double mu0 = 4.0 * pi * 1e-7;    // H/m
inline constexpr double eps0 = 8.8541878128e-12;  // F/m

inline const double c0 = 1.0 / std::sqrt(mu0 * eps0);  // m/s
inline const double eta0 = std::sqrt(mu0 / eps0);      // ohm

inline double wavenumber(double freq_hz) {
  return 2.0 * pi * freq_hz * std::sqrt(mu0 * eps0);
}

inline double wavelength(double freq_hz) { return c0 / freq_hz; }

}  // namespace slotcma::constants
