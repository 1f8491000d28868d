#pragma once

// CODATA 2018 exact / recommended values. Energies are in eV throughout the
// library, everything else is SI.
namespace chargetune::constants {

inline constexpr double elementary_charge = 1.602176634e-19;     // C
inline constexpr double avogadro = 6.02214076e23;                 // 1/mol
inline constexpr double planck = 6.62607015e-34;                  // J s
inline constexpr double speed_of_light = 299792458.0;             // m/s
inline constexpr double boltzmann_eV = 8.617333262e-5;            // eV/K
inline constexpr double vacuum_permittivity = 8.8541878128e-12;   // F/m
inline constexpr double pi = 3.14159265358979323846;

inline constexpr double room_temperature_K = 295.0;
inline constexpr double low_temperature_K = 7.0;

}  // namespace chargetune::constants
