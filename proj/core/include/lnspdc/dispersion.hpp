#pragma once

#include "lnspdc/mode_solver.hpp"

#include <vector>

namespace lnspdc {

// Not-a-knot cubic spline. Reproduces any single cubic exactly; small dense
// solve at construction (sample counts here are O(100)).
class CubicSpline {
public:
    CubicSpline() = default;
    CubicSpline(std::vector<double> x, std::vector<double> y); // x strictly ascending, size >= 4

    double value(double x) const;
    double deriv1(double x) const;
    double deriv2(double x) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }

private:
    int segment(double x) const;
    std::vector<double> x_, y_, b_, c_, d_; // piece i: y + b t + c t² + d t³
};

// n_eff(λ) samples with a spline interpolant in angular frequency. All
// derivative quantities come from the spline, not from raw differences of
// the (noise-amplifying) samples. The interpolant can overshoot the
// neighboring samples slightly between nodes, as cubics do; on solver-built
// curves the overshoot stays far below the sample spacing in effect (checked
// by the property tests).
class DispersionCurve {
public:
    // λ in µm, ascending or descending; needs >= 7 samples.
    static DispersionCurve from_samples(std::vector<double> lambda_um, std::vector<double> n_eff);

    // Samples the fundamental TE mode over [λ_min, λ_max] at the given
    // spacing. One grid window is sized from the geometry once and reused
    // for every wavelength, so n_eff(λ) is smooth enough to differentiate.
    static DispersionCurve solve_te(const WaveguideGeometry& g, const MaterialCatalog& materials,
                                    double lambda_min_um, double lambda_max_um, double spacing_um,
                                    const GridSpec& grid, int threads = 0);

    double n_eff(double lambda_um) const;
    double n_eff_omega(double omega_rad_fs) const;

    // k = 2π n_eff / λ, rad/µm
    double k(double lambda_um) const;
    double k_omega(double omega_rad_fs) const;

    // dk/dω, fs/µm
    double k_prime_omega(double omega_rad_fs) const;

    // d²k/dω² in fs²/mm; λ must sit two samples inside the range.
    double gvd(double lambda_um) const;

    double lambda_min_um() const;
    double lambda_max_um() const;
    bool covers(double lambda_um) const;

    const std::vector<double>& sample_lambda_um() const { return lambda_samples_; }
    const std::vector<double>& sample_n_eff() const { return n_samples_; }

private:
    void require_margin(double omega) const;
    std::vector<double> lambda_samples_; // ascending λ
    std::vector<double> n_samples_;
    std::vector<double> omega_samples_; // ascending ω
    CubicSpline spline_;                // n_eff over ω
};

} // namespace lnspdc
