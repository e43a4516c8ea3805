#include "lnspdc/spdc.hpp"

#include "lnspdc/errors.hpp"
#include "lnspdc/units.hpp"

#include <algorithm>
#include <cmath>

namespace lnspdc {

void PumpEnvelope::validate() const {
    if (center_nm <= 0.0) throw ConfigError("pump: center wavelength must be > 0");
    if (bandwidth_nm <= 0.0) throw ConfigError("pump: bandwidth must be > 0");
}

double PumpEnvelope::intensity(double omega_sum) const {
    const double omega0 = units::omega_from_lambda(center_nm * 1e-3);
    // FWHM in ω from the wavelength FWHM (narrow-line conversion)
    const double dw = 2.0 * units::pi * units::c_um_per_fs * (bandwidth_nm * 1e-3) /
                      (center_nm * 1e-3 * center_nm * 1e-3);
    const double x = omega_sum - omega0;
    if (shape == PumpShape::Gaussian) {
        const double ln2 = 0.6931471805599453;
        return std::exp(-4.0 * ln2 * x * x / (dw * dw));
    }
    const double u = 2.0 * x / dw;
    return 1.0 / (1.0 + u * u);
}

JsiGrid jsi(const QpmDesign& design, const DispersionCurve& pump_curve,
            const DispersionCurve& signal_curve, const DispersionCurve& idler_curve,
            const PumpEnvelope& pump, const JsiSpec& spec) {
    design.validate();
    pump.validate();
    if (spec.n_points < 11) throw ConfigError("jsi: need at least 11 grid points per axis");

    const double omega_p = units::omega_from_lambda(design.pump_lambda_nm * 1e-3);
    const double omega_deg = omega_p / 2.0;

    double span_rad;
    if (spec.span_thz > 0.0) {
        span_rad = units::omega_from_thz(spec.span_thz);
    } else {
        const auto bw =
            phase_matching_bandwidth(design, pump_curve, signal_curve, idler_curve);
        span_rad = units::omega_from_thz(bw.bandwidth_thz) * spec.margin_factor;
    }

    JsiGrid grid;
    grid.design = design;
    grid.pump = pump;
    const int n = spec.n_points;
    grid.omega_s.resize(n);
    grid.omega_i.resize(n);
    for (int q = 0; q < n; ++q) {
        const double off = span_rad * (static_cast<double>(q) / (n - 1) - 0.5);
        grid.omega_s[q] = omega_deg + off;
        grid.omega_i[q] = omega_deg + off;
    }

    const double L_um = design.length_mm * 1e3;
    const double g_qpm = 2.0 * units::pi * design.order / design.poling_period_um;

    // Cache per-axis wavevectors; k_s + k_i is grouped before subtracting so
    // the degenerate-grid JSI is bit-exact symmetric under s↔i.
    std::vector<double> k_s(n), k_i(n);
    for (int q = 0; q < n; ++q) {
        k_s[q] = signal_curve.k(units::lambda_from_omega(grid.omega_s[q])); // throws outside validity
        k_i[q] = idler_curve.k(units::lambda_from_omega(grid.omega_i[q]));
    }

    grid.intensity.assign(static_cast<std::size_t>(n) * n, 0.0);
    double peak = 0.0;
    for (int ii = 0; ii < n; ++ii) {
        const double w_i = grid.omega_i[ii];
        for (int is = 0; is < n; ++is) {
            const double w_s = grid.omega_s[is];
            // Cells with the envelope below double-precision noise stay
            // zero without touching the curves; everything that can
            // contribute still demands curve coverage (range error).
            const double env = pump.intensity(w_s + w_i);
            if (env < 1e-15) continue;
            const double dk =
                pump_curve.k(units::lambda_from_omega(w_s + w_i)) - (k_s[is] + k_i[ii]) - g_qpm;
            const double s = units::sinc(dk * L_um / 2.0);
            const double v = env * s * s;
            grid.intensity[static_cast<std::size_t>(ii) * n + is] = v;
            peak = std::max(peak, v);
        }
    }
    if (peak <= 0.0) throw NumericError("jsi: grid has zero intensity everywhere");
    for (double& v : grid.intensity) v /= peak;
    return grid;
}

namespace {

// −3 dB full width of a sampled profile by linear interpolation around the
// peak; x need not be uniform.
double full_width_3db(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = y.size();
    std::size_t ipk = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (y[i] > y[ipk]) ipk = i;
    const double half = 0.5 * y[ipk];
    if (y[ipk] <= 0.0) throw NumericError("bandwidth: zero profile");

    double lo = x.front(), hi = x.back();
    bool lo_found = false, hi_found = false;
    for (std::size_t i = ipk; i-- > 0;) {
        if (y[i] <= half) {
            lo = x[i] + (x[i + 1] - x[i]) * (half - y[i]) / (y[i + 1] - y[i]);
            lo_found = true;
            break;
        }
    }
    for (std::size_t i = ipk + 1; i < n; ++i) {
        if (y[i] <= half) {
            hi = x[i - 1] + (x[i] - x[i - 1]) * (half - y[i - 1]) / (y[i] - y[i - 1]);
            hi_found = true;
            break;
        }
    }
    if (!lo_found || !hi_found)
        throw NumericError("bandwidth: -3 dB point lies outside the sampled span");
    return hi - lo;
}

} // namespace

double jsi_antidiagonal_bandwidth_thz(const JsiGrid& grid) {
    const std::size_t n = grid.omega_s.size();
    if (grid.omega_i.size() != n) throw NumericError("jsi bandwidth: grid must be square");
    // cells (is, n-1-is) satisfy ω_s + ω_i = ω_p exactly by construction
    std::vector<double> nu_s(n), prof(n);
    for (std::size_t is = 0; is < n; ++is) {
        nu_s[is] = units::thz_from_omega(grid.omega_s[is]);
        prof[is] = grid.at(is, n - 1 - is);
    }
    return full_width_3db(nu_s, prof);
}

MarginalSpectrum marginal_signal_spectrum(const JsiGrid& grid) {
    const std::size_t ns = grid.omega_s.size(), ni = grid.omega_i.size();
    std::vector<double> marg(ns, 0.0);
    for (std::size_t ii = 0; ii < ni; ++ii)
        for (std::size_t is = 0; is < ns; ++is) marg[is] += grid.at(is, ii);
    const double peak = *std::max_element(marg.begin(), marg.end());
    if (peak <= 0.0) throw NumericError("marginal spectrum: zero grid");
    for (double& v : marg) v /= peak;

    std::vector<double> nu(ns);
    for (std::size_t is = 0; is < ns; ++is) nu[is] = units::thz_from_omega(grid.omega_s[is]);

    MarginalSpectrum out;
    out.full_bandwidth_thz = full_width_3db(nu, marg);
    out.half_bandwidth_thz = out.full_bandwidth_thz / 2.0;

    // Convert the half-bandwidth to nm at the spectrum center.
    std::size_t ipk = 0;
    for (std::size_t i = 1; i < ns; ++i)
        if (marg[i] > marg[ipk]) ipk = i;
    const double lam_c_um = units::lambda_from_omega(grid.omega_s[ipk]);
    out.half_bandwidth_nm = out.half_bandwidth_thz * 1e-3 * lam_c_um * lam_c_um /
                            units::c_um_per_fs * 1e3; // Δλ = λ²Δν/c

    out.lambda_nm.resize(ns);
    out.intensity = marg;
    for (std::size_t is = 0; is < ns; ++is)
        out.lambda_nm[is] = units::lambda_from_omega(grid.omega_s[is]) * 1e3;
    return out;
}

void ShgModelInput::validate() const {
    if (d33_pm_per_v <= 0.0 || n_omega <= 0.0 || n_2omega <= 0.0 || lambda_2omega_nm <= 0.0 ||
        a_eff_um2 <= 0.0 || length_cm <= 0.0)
        throw ConfigError("shg: all model parameters must be positive");
    if (zeta < 0.0 || zeta > 1.0) throw ConfigError("shg: overlap factor must be in [0, 1]");
}

double shg_efficiency(const ShgModelInput& in) {
    in.validate();
    const double d33 = in.d33_pm_per_v * 1e-12;           // m/V
    const double lam = in.lambda_2omega_nm * 1e-9;        // m
    const double a_eff = in.a_eff_um2 * 1e-12;            // m²
    const double L = in.length_cm * 1e-2;                 // m
    const double arg = in.delta_k_rad_per_m * L / 2.0;
    const double s = units::sinc(arg);
    const double eta_si = 8.0 * d33 * d33 /
                          (units::eps0_F_per_m * units::c_m_per_s * in.n_omega * in.n_omega *
                           in.n_2omega * lam * lam) *
                          in.zeta * in.zeta / a_eff * s * s; // 1/(W·m²)
    return eta_si * 1e-2;                                    // %/W/cm²
}

double shg_efficiency_from_power(double p_omega_w, double p_2omega_w, double length_cm) {
    if (p_omega_w <= 0.0 || length_cm <= 0.0)
        throw ConfigError("shg: pump power and length must be > 0");
    if (p_2omega_w < 0.0) throw ConfigError("shg: second-harmonic power must be >= 0");
    return p_2omega_w / (length_cm * length_cm * p_omega_w * p_omega_w) * 100.0;
}

} // namespace lnspdc
