#pragma once

namespace torsim::constants {

inline constexpr double boltzmann = 1.380649e-23;      // J/K
inline constexpr double hbar = 1.054571817e-34;        // J s
inline constexpr double speed_of_light = 299792458.0;  // m/s
inline constexpr double planck = 6.62607015e-34;       // J s
inline constexpr double atomic_mass_unit = 1.66e-27;   // kg, value used in the CSL torque model
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;

}  // namespace torsim::constants
