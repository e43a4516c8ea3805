#pragma once

#include <cmath>
#include <numbers>

// Unit conventions used throughout the library:
//   wavelengths   µm at API boundaries (nm where a field says so)
//   angular freq  rad/fs internally for all spectral math
//   wavevectors   rad/µm
//   GVD           fs²/mm at API boundaries
// Converting at the edges keeps the nm-vs-THz arithmetic in one place.

namespace lnspdc::units {

inline constexpr double pi = std::numbers::pi;
inline constexpr double c_um_per_fs = 0.299792458;     // speed of light, µm/fs
inline constexpr double eps0_F_per_m = 8.8541878128e-12;
inline constexpr double c_m_per_s = 2.99792458e8;

// λ in µm <-> ω in rad/fs
inline double omega_from_lambda(double lambda_um) {
    return 2.0 * pi * c_um_per_fs / lambda_um;
}
inline double lambda_from_omega(double omega_rad_fs) {
    return 2.0 * pi * c_um_per_fs / omega_rad_fs;
}

// ω in rad/fs <-> ν in THz  (1/fs = 1000 THz)
inline double thz_from_omega(double omega_rad_fs) {
    return omega_rad_fs / (2.0 * pi) * 1.0e3;
}
inline double omega_from_thz(double nu_thz) {
    return nu_thz * 1.0e-3 * 2.0 * pi;
}

// Energy conservation 1/λ_i = 1/λ_p − 1/λ_s (all µm).
inline double idler_lambda(double lambda_p_um, double lambda_s_um) {
    return 1.0 / (1.0 / lambda_p_um - 1.0 / lambda_s_um);
}

inline double sinc(double x) {
    return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x;
}

} // namespace lnspdc::units
