#pragma once

namespace kljn {

/// Boltzmann constant, joules per kelvin (exact SI value).
inline constexpr double k_boltzmann = 1.380649e-23;

}  // namespace kljn
