#include "lnspdc/qpm.hpp"

#include "lnspdc/errors.hpp"
#include "lnspdc/units.hpp"

#include <cmath>
#include <sstream>

namespace lnspdc {

void QpmDesign::validate() const {
    if (poling_period_um <= 0.0) throw ConfigError("qpm: poling period must be > 0");
    if (order < 1) throw ConfigError("qpm: order must be >= 1");
    if (length_mm <= 0.0) throw ConfigError("qpm: device length must be > 0");
    if (duty <= 0.0 || duty >= 1.0) throw ConfigError("qpm: duty must be in (0, 1)");
    if (pump_lambda_nm <= 0.0) throw ConfigError("qpm: pump wavelength must be > 0");
}

namespace {

// k_p − k_s − k_i in rad/µm at (λ_p, λ_s), λ_i from energy conservation.
// k_s + k_i is grouped before subtracting so the result is bit-exact under
// signal↔idler exchange when both use the same curve.
double k_imbalance(const DispersionCurve& pump, const DispersionCurve& signal,
                   const DispersionCurve& idler, double lambda_p_um, double lambda_s_um) {
    if (lambda_s_um <= lambda_p_um)
        throw RangeError("signal wavelength must exceed the pump wavelength");
    const double lambda_i_um = units::idler_lambda(lambda_p_um, lambda_s_um);
    return pump.k(lambda_p_um) - (signal.k(lambda_s_um) + idler.k(lambda_i_um));
}

} // namespace

double solve_poling_period(const DispersionCurve& pump, const DispersionCurve& signal,
                           const DispersionCurve& idler, double lambda_p_nm, double lambda_s_nm,
                           int order) {
    if (order < 1) throw ConfigError("qpm order must be >= 1");
    const double denom =
        k_imbalance(pump, signal, idler, lambda_p_nm * 1e-3, lambda_s_nm * 1e-3);
    if (denom <= 0.0) {
        std::ostringstream msg;
        msg << "k_p - k_s - k_i = " << denom
            << " rad/um is not positive: no first-order poling period exists "
               "(dispersionless or inverted design)";
        throw NumericError(msg.str());
    }
    return 2.0 * units::pi * order / denom;
}

PhaseMismatch phase_mismatch(const QpmDesign& design, const DispersionCurve& pump,
                             const DispersionCurve& signal, const DispersionCurve& idler,
                             double lambda_s_nm) {
    design.validate();
    const double dk_rad_um =
        k_imbalance(pump, signal, idler, design.pump_lambda_nm * 1e-3, lambda_s_nm * 1e-3) -
        2.0 * units::pi * design.order / design.poling_period_um;
    PhaseMismatch out;
    out.delta_k_rad_per_m = dk_rad_um * 1e6;
    out.normalized = dk_rad_um * (design.length_mm * 1e3) / (2.0 * units::pi);
    return out;
}

QpmBandwidth phase_matching_bandwidth(const QpmDesign& design, const DispersionCurve& pump,
                                      const DispersionCurve& signal, const DispersionCurve& idler) {
    design.validate();
    const double omega_p = units::omega_from_lambda(design.pump_lambda_nm * 1e-3);
    const double omega_deg = omega_p / 2.0;

    auto normalized = [&](double omega_s) {
        return phase_mismatch(design, pump, signal, idler,
                              units::lambda_from_omega(omega_s) * 1e3)
            .normalized;
    };

    // March outward from degeneracy until |ΔkL/2π| crosses 1, then bisect.
    auto find_null = [&](double direction) {
        const double step = direction * units::omega_from_thz(0.25);
        double prev = omega_deg + step; // skip the exact degeneracy point
        if (std::abs(normalized(prev)) - 1.0 >= 0.0)
            throw NumericError("phase mismatch already beyond the first null one step from "
                               "degeneracy; curves too coarse");
        for (int i = 2; i < 4000; ++i) {
            const double omega = omega_deg + step * i;
            double f;
            try {
                f = std::abs(normalized(omega)) - 1.0;
            } catch (const RangeError&) {
                throw RangeError("dispersion curves end before the first phase-matching null");
            }
            if (f >= 0.0) {
                double lo = prev, hi = omega; // f(lo) < 0 <= f(hi)
                for (int it = 0; it < 80; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    if (std::abs(normalized(mid)) - 1.0 < 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                return 0.5 * (lo + hi);
            }
            prev = omega;
        }
        throw NumericError("no phase-matching null found within the search span");
    };

    const double omega_hi = find_null(+1.0);
    const double omega_lo = find_null(-1.0);

    QpmBandwidth out;
    out.bandwidth_thz = units::thz_from_omega(omega_hi - omega_lo);
    out.lambda_null_low_nm = units::lambda_from_omega(omega_hi) * 1e3;
    out.lambda_null_high_nm = units::lambda_from_omega(omega_lo) * 1e3;
    return out;
}

double qpm_efficiency_factor(double duty, int order) {
    if (duty <= 0.0 || duty >= 1.0) throw ConfigError("duty must be in (0, 1)");
    if (order < 1) throw ConfigError("order must be >= 1");
    return std::abs(std::sin(order * units::pi * duty));
}

} // namespace lnspdc
