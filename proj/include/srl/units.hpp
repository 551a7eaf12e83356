#pragma once

#include <cmath>

namespace srl {

inline constexpr double two_pi = 6.283185307179586476925286766559;
inline constexpr double pi = 3.14159265358979323846264338328;

inline constexpr double planck_h = 6.62607015e-34;       // J s
inline constexpr double speed_of_light = 2.99792458e8;   // m / s

// All internal rates are angular (rad/s). Configuration and reports use
// ordinary frequency in Hz; these two functions are the only conversion point.
inline double hz_to_angular(double f_hz) { return two_pi * f_hz; }
inline double angular_to_hz(double w) { return w / two_pi; }

}  // namespace srl
