#pragma once

namespace tlsdd {

/// Exact SI constants (2019 redefinition).
struct PhysicalConstants {
  double h;     ///< Planck constant, J s
  double phi0;  ///< flux quantum h/2e, Wb
  double kb;    ///< Boltzmann constant, J/K

  static constexpr PhysicalConstants si();
};

namespace constants {
inline constexpr double planck = 6.62607015e-34;
inline constexpr double elementary_charge = 1.602176634e-19;
inline constexpr double boltzmann = 1.380649e-23;
inline constexpr double flux_quantum = planck / (2.0 * elementary_charge);
inline constexpr double pi = 3.14159265358979323846;
inline constexpr double two_pi = 2.0 * pi;
}  // namespace constants

constexpr PhysicalConstants PhysicalConstants::si() {
  return {constants::planck, constants::flux_quantum, constants::boltzmann};
}

}  // namespace tlsdd
