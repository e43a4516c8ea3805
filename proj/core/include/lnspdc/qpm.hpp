#pragma once

#include "lnspdc/dispersion.hpp"

namespace lnspdc {

class ConfigFile;

struct QpmDesign {
    double poling_period_um = 4.5;
    int order = 1;          // QPM order m
    double length_mm = 5.7; // device length L
    double duty = 0.5;
    double pump_lambda_nm = 810.6;

    void validate() const;
};

// Sign convention, fixed here and used everywhere:
//   Δk = k_p − k_s − k_i − 2πm/Λ.
struct PhaseMismatch {
    double delta_k_rad_per_m = 0.0;
    double normalized = 0.0; // ΔkL/2π; ±1 at the first sinc nulls
};

// Λ = 2πm / (k_p − k_s − k_i), with λ_i fixed by energy conservation.
// A non-positive denominator (no QPM needed, or inverted design) is an error
// that reports the sign.
double solve_poling_period(const DispersionCurve& pump, const DispersionCurve& signal,
                           const DispersionCurve& idler, double lambda_p_nm, double lambda_s_nm,
                           int order);

PhaseMismatch phase_mismatch(const QpmDesign& design, const DispersionCurve& pump,
                             const DispersionCurve& signal, const DispersionCurve& idler,
                             double lambda_s_nm);

// Full width between the first sinc nulls (ΔkL/2π = ±1) around degeneracy.
struct QpmBandwidth {
    double bandwidth_thz = 0.0;
    double lambda_null_low_nm = 0.0;  // short-λ side
    double lambda_null_high_nm = 0.0; // long-λ side
};
QpmBandwidth phase_matching_bandwidth(const QpmDesign& design, const DispersionCurve& pump,
                                      const DispersionCurve& signal, const DispersionCurve& idler);

// |sin(mπ·duty)|: 1 at the 50% duty / first-order point, 0 at duty → 0 or 1.
double qpm_efficiency_factor(double duty, int order);

} // namespace lnspdc
