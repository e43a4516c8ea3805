#pragma once

#include "lnspdc/qpm.hpp"

#include <vector>

namespace lnspdc {

enum class PumpShape { Gaussian, Lorentzian };

// CW pump line: the stated bandwidth is the intensity FWHM of the optical
// spectrum. Unit peak at the center.
struct PumpEnvelope {
    double center_nm = 810.6;
    double bandwidth_nm = 1.1; // FWHM
    PumpShape shape = PumpShape::Gaussian;

    void validate() const;
    // |envelope|² at the two-photon sum frequency, rad/fs.
    double intensity(double omega_sum_rad_fs) const;
};

// Joint spectral intensity over (ω_s, ω_i), normalized to unit peak.
struct JsiGrid {
    std::vector<double> omega_s; // rad/fs, ascending
    std::vector<double> omega_i;
    std::vector<double> intensity; // [ii * omega_s.size() + is]
    QpmDesign design;
    PumpEnvelope pump;

    double at(std::size_t is, std::size_t ii) const { return intensity[ii * omega_s.size() + is]; }
};

struct JsiSpec {
    int n_points = 201;       // per axis, odd keeps degeneracy on-grid
    double span_thz = 0.0;    // full span per axis; 0 = auto from the sinc nulls
    double margin_factor = 1.5; // auto span = margin × null-to-null bandwidth
};

// intensity(ω_s, ω_i) = |envelope(ω_s + ω_i)|² · sinc²(Δk L / 2).
JsiGrid jsi(const QpmDesign& design, const DispersionCurve& pump_curve,
            const DispersionCurve& signal_curve, const DispersionCurve& idler_curve,
            const PumpEnvelope& pump, const JsiSpec& spec);

// −3 dB extent (THz) along the on-grid energy-conservation antidiagonal
// ω_s + ω_i = ω_p, linear interpolation between cells.
double jsi_antidiagonal_bandwidth_thz(const JsiGrid& grid);

struct MarginalSpectrum {
    std::vector<double> lambda_nm; // signal wavelength axis
    std::vector<double> intensity; // unit peak
    double full_bandwidth_thz = 0.0; // −3 dB full width
    double half_bandwidth_thz = 0.0;
    double half_bandwidth_nm = 0.0;
};
MarginalSpectrum marginal_signal_spectrum(const JsiGrid& grid);

// Energy conservation doubles the one-sided bandwidth.
inline double spdc_total_bandwidth_thz(double signal_half_bandwidth_thz) {
    return 2.0 * signal_half_bandwidth_thz;
}

// Normalized SHG efficiency model:
//   η = 8 d33² / (ε0 c n_ω² n_2ω λ_2ω²) · ζ²/A_eff · sinc²(ΔkL/2),
// reported in %/W/cm².
struct ShgModelInput {
    double d33_pm_per_v = 27.0;
    double n_omega = 1.92;
    double n_2omega = 2.099;
    double lambda_2omega_nm = 810.0;
    double a_eff_um2 = 1.106;
    double zeta = 0.93; // spatial overlap factor
    double delta_k_rad_per_m = 0.0;
    double length_cm = 0.57;

    void validate() const;
};
double shg_efficiency(const ShgModelInput& in);

// η = P_2ω / (L² P_ω²), %/W/cm²; reduces measured power pairs.
double shg_efficiency_from_power(double p_omega_w, double p_2omega_w, double length_cm);

} // namespace lnspdc
