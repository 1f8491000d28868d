#pragma once

// Hand-written closed forms used as reference values. Long double where the
// library works in double so cancellation shows up on the library side.

#include <cmath>

namespace oracle {

inline constexpr long double kE = 1.602176634e-19L;
inline constexpr long double kEps0 = 8.8541878128e-12L;
inline constexpr long double kH = 6.62607015e-34L;
inline constexpr long double kC = 299792458.0L;
inline constexpr long double kNA = 6.02214076e23L;
inline constexpr long double kKB = 8.617333262e-5L;  // eV/K
inline constexpr double kPi = 3.14159265358979323846;

// d = sqrt(2 eps0 eps_r V / (e N_d)), V = E_BB / e in volts.
inline double depletion_depth(double e_bb_eV, double eps_r, double n_d) {
  return static_cast<double>(std::sqrt(2.0L * kEps0 * eps_r * e_bb_eV / (kE * n_d)));
}

inline double parabola(double e_bb, double d, double z) {
  if (z <= -d) return 0.0;
  const long double s = (z + d) / static_cast<long double>(d);
  return static_cast<double>(e_bb * s * s);
}

inline double photon_flux_mol(double power_W, double wavelength_nm) {
  return static_cast<double>(power_W * wavelength_nm * 1e-9L / (kH * kC * kNA));
}

// Positive root of a h^2 + b h - s = 0 in the cancellation-free form.
inline double positive_root(double a, double b, double s) {
  const long double A = a, B = b, S = s;
  if (A == 0.0L) return static_cast<double>(S / B);
  return static_cast<double>(2.0L * S / (B + std::sqrt(B * B + 4.0L * A * S)));
}

inline double fermi(double offset_eV, double kT_eV) {
  return static_cast<double>(1.0L / (1.0L + std::exp(static_cast<long double>(offset_eV) / kT_eV)));
}

// Trace model written out directly.
inline double trace(double t, double A, double B, double k, double D) {
  return static_cast<double>(D / (1.0L + std::exp(A + B * std::exp(-static_cast<long double>(k) * t))));
}

}  // namespace oracle
