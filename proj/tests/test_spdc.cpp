#include <doctest.h>

#include "lnspdc/spdc.hpp"
#include "lnspdc/units.hpp"

#include <cmath>
#include <vector>

using namespace lnspdc;

namespace {

GridSpec coarse() {
    GridSpec g;
    g.dx_nm = 40.0;
    g.dy_nm = 40.0;
    return g;
}

struct RefChain {
    DispersionCurve pump, signal;
    QpmDesign design;
};

// One coarse-grid reference-design chain shared by the JSI tests.
const RefChain& chain() {
    static const RefChain c = [] {
        const auto cat = MaterialCatalog::builtin();
        const auto g = reference_geometry();
        RefChain out{
            DispersionCurve::solve_te(g, cat, 0.77, 0.85, 0.01, coarse(), 1),
            DispersionCurve::solve_te(g, cat, 1.30, 2.00, 0.05, coarse(), 1),
            {},
        };
        out.design.pump_lambda_nm = 810.6;
        out.design.poling_period_um =
            solve_poling_period(out.pump, out.signal, out.signal, 810.6, 1621.2, 1);
        out.design.order = 1;
        out.design.length_mm = 5.7;
        out.design.duty = 0.5;
        return out;
    }();
    return c;
}

} // namespace

TEST_CASE("pump envelope peak and FWHM") {
    for (PumpShape shape : {PumpShape::Gaussian, PumpShape::Lorentzian}) {
        PumpEnvelope p;
        p.center_nm = 810.6;
        p.bandwidth_nm = 1.1;
        p.shape = shape;
        const double w0 = units::omega_from_lambda(p.center_nm * 1e-3);
        CHECK(p.intensity(w0) == doctest::Approx(1.0).epsilon(1e-12));
        const double dw = 2.0 * units::pi * units::c_um_per_fs * (1.1e-3) / (0.8106 * 0.8106);
        CHECK(p.intensity(w0 + dw / 2.0) == doctest::Approx(0.5).epsilon(1e-9));
        CHECK(p.intensity(w0 - dw / 2.0) == doctest::Approx(0.5).epsilon(1e-9));
    }
    PumpEnvelope bad;
    bad.bandwidth_nm = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("jsi peak sits at the degenerate cell and equals one") {
    const auto& c = chain();
    PumpEnvelope pump;
    pump.center_nm = 810.6;
    pump.bandwidth_nm = 1.1;
    JsiSpec spec;
    spec.n_points = 101;
    const auto grid = jsi(c.design, c.pump, c.signal, c.signal, pump, spec);

    const std::size_t n = grid.omega_s.size();
    REQUIRE(n == 101);
    CHECK(grid.at(n / 2, n / 2) == 1.0); // exact degeneracy cell, normalized peak

    // all intensities in [0, 1]
    for (double v : grid.intensity) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // peak on the energy-conservation antidiagonal within one cell
    std::size_t best = 0;
    for (std::size_t q = 1; q < grid.intensity.size(); ++q)
        if (grid.intensity[q] > grid.intensity[best]) best = q;
    const std::size_t is = best % n, ii = best / n;
    CHECK(std::abs(static_cast<long>(is + ii) - static_cast<long>(n - 1)) <= 1);
}

TEST_CASE("jsi is exactly symmetric for the degenerate type-0 design") {
    const auto& c = chain();
    PumpEnvelope pump;
    pump.center_nm = 810.6;
    pump.bandwidth_nm = 1.1;
    JsiSpec spec;
    spec.n_points = 61;
    const auto grid = jsi(c.design, c.pump, c.signal, c.signal, pump, spec);
    const std::size_t n = grid.omega_s.size();
    for (std::size_t ii = 0; ii < n; ++ii)
        for (std::size_t is = 0; is < ii; ++is)
            CHECK(grid.at(is, ii) == grid.at(ii, is)); // bit-identical
}

TEST_CASE("monochromatic pump collapses the jsi onto the antidiagonal") {
    const auto& c = chain();
    PumpEnvelope pump;
    pump.center_nm = 810.6;
    pump.bandwidth_nm = 1e-6;
    JsiSpec spec;
    spec.n_points = 61;
    const auto grid = jsi(c.design, c.pump, c.signal, c.signal, pump, spec);
    const std::size_t n = grid.omega_s.size();
    for (std::size_t ii = 0; ii < n; ++ii)
        for (std::size_t is = 0; is < n; ++is)
            if (is + ii != n - 1) CHECK(grid.at(is, ii) < 1e-12);
}

TEST_CASE("reference-design two-photon bandwidth tracks the quadratic sinc width") {
    // With this material set k″(deg) ≈ +96 fs²/mm, so the −3 dB antidiagonal
    // extent is ≈ 0.666 × the null-to-null bandwidth (quadratic regime).
    const auto& c = chain();
    PumpEnvelope pump;
    pump.center_nm = 810.6;
    pump.bandwidth_nm = 1.1;
    JsiSpec spec;
    spec.n_points = 401;
    const auto grid = jsi(c.design, c.pump, c.signal, c.signal, pump, spec);
    const double bw3db = jsi_antidiagonal_bandwidth_thz(grid);
    const auto nulls = phase_matching_bandwidth(c.design, c.pump, c.signal, c.signal);
    CHECK(nulls.bandwidth_thz == doctest::Approx(34.0).epsilon(0.10));
    CHECK(bw3db == doctest::Approx(0.666 * nulls.bandwidth_thz).epsilon(0.03));
}

TEST_CASE("separable synthetic jsi marginalizes to its signal factor") {
    JsiGrid grid;
    const int n = 41;
    grid.omega_s.resize(n);
    grid.omega_i.resize(n);
    std::vector<double> f(n), g(n);
    for (int q = 0; q < n; ++q) {
        grid.omega_s[q] = 1.0 + 0.01 * q;
        grid.omega_i[q] = 1.0 + 0.01 * q;
        f[q] = std::exp(-0.5 * (q - 17.0) * (q - 17.0) / 36.0);
        g[q] = 0.2 + 0.8 * std::exp(-0.5 * (q - 23.0) * (q - 23.0) / 16.0);
    }
    grid.intensity.resize(static_cast<std::size_t>(n) * n);
    for (int ii = 0; ii < n; ++ii)
        for (int is = 0; is < n; ++is)
            grid.intensity[static_cast<std::size_t>(ii) * n + is] = f[is] * g[ii];

    const auto marg = marginal_signal_spectrum(grid);
    double fpk = 0.0;
    for (double v : f) fpk = std::max(fpk, v);
    for (int q = 0; q < n; ++q)
        CHECK(marg.intensity[q] == doctest::Approx(f[q] / fpk).epsilon(1e-12));
}

TEST_CASE("marginal of the reference design is symmetric about degeneracy") {
    const auto& c = chain();
    PumpEnvelope pump;
    pump.center_nm = 810.6;
    pump.bandwidth_nm = 1.1;
    JsiSpec spec;
    spec.n_points = 201;
    const auto grid = jsi(c.design, c.pump, c.signal, c.signal, pump, spec);
    const auto marg = marginal_signal_spectrum(grid);
    const std::size_t n = marg.intensity.size();
    // reflection symmetry holds exactly on the antidiagonal; the sinc wings
    // pick up a small real asymmetry from the pump-curve dispersion
    for (std::size_t q = 0; q < n / 2; ++q)
        CHECK(std::abs(marg.intensity[q] - marg.intensity[n - 1 - q]) < 0.02);
    CHECK(marg.half_bandwidth_thz == doctest::Approx(marg.full_bandwidth_thz / 2).epsilon(1e-12));
    // sanity: the marginal width matches the antidiagonal width for a
    // narrow pump
    CHECK(marg.full_bandwidth_thz ==
          doctest::Approx(jsi_antidiagonal_bandwidth_thz(grid)).epsilon(0.05));
}

TEST_CASE("widening the pump never narrows the antidiagonal ridge thickness") {
    const auto& c = chain();
    JsiSpec spec;
    spec.n_points = 201;
    double prev = 0.0;
    for (double bw_nm : {0.5, 1.1, 3.0}) {
        PumpEnvelope pump;
        pump.center_nm = 810.6;
        pump.bandwidth_nm = bw_nm;
        const auto grid = jsi(c.design, c.pump, c.signal, c.signal, pump, spec);
        // thickness: -3 dB extent of the profile along the main diagonal
        // ω_s = ω_i (the sum frequency varies, the envelope cuts it off)
        const std::size_t n = grid.omega_s.size();
        std::vector<double> nu(n), prof(n);
        for (std::size_t q = 0; q < n; ++q) {
            nu[q] = units::thz_from_omega(grid.omega_s[q]);
            prof[q] = grid.at(q, q);
        }
        std::size_t pk = 0;
        for (std::size_t q = 1; q < n; ++q)
            if (prof[q] > prof[pk]) pk = q;
        double lo = nu.front(), hi = nu.back();
        for (std::size_t q = pk; q-- > 0;)
            if (prof[q] <= 0.5 * prof[pk]) {
                lo = nu[q];
                break;
            }
        for (std::size_t q = pk + 1; q < n; ++q)
            if (prof[q] <= 0.5 * prof[pk]) {
                hi = nu[q];
                break;
            }
        const double thickness = hi - lo;
        CHECK(thickness >= prev);
        prev = thickness;
    }
}

TEST_CASE("bandwidth doubling by energy conservation") {
    CHECK(spdc_total_bandwidth_thz(11.0) == 22.0);
    CHECK(spdc_total_bandwidth_thz(0.0) == 0.0);
    CHECK(spdc_total_bandwidth_thz(17.0) == 34.0);
}

TEST_CASE("shg efficiency with the reference constants") {
    ShgModelInput in; // defaults are the reference constants, Δk = 0
    const double eta = shg_efficiency(in);
    // frozen: hand evaluation of Eq. with d33=27 pm/V, n=1.92/2.099,
    // λ=810 nm, A_eff=1.106 µm², ζ=0.93
    CHECK(eta == doctest::Approx(3384.33946951241).epsilon(1e-9));
    // the reference value 3364 was computed from rounded inputs; stay within 2%
    CHECK(eta == doctest::Approx(3364.0).epsilon(0.02));
}

TEST_CASE("shg closed form, null and scaling behavior") {
    ShgModelInput in;
    const double peak = shg_efficiency(in);

    // Δk = 0 equals the closed-form prefactor to machine precision
    const double d33 = 27e-12, lam = 810e-9, aeff = 1.106e-12;
    const double want = 8.0 * d33 * d33 /
                        (units::eps0_F_per_m * units::c_m_per_s * 1.92 * 1.92 * 2.099 * lam * lam) *
                        0.93 * 0.93 / aeff * 1e-2;
    CHECK(peak == doctest::Approx(want).epsilon(1e-14));

    // sinc null at ΔkL/2 = π
    ShgModelInput null = in;
    null.delta_k_rad_per_m = 2.0 * units::pi / (in.length_cm * 1e-2);
    CHECK(shg_efficiency(null) < 1e-10 * peak);

    // doubling A_eff halves the efficiency
    ShgModelInput twice = in;
    twice.a_eff_um2 *= 2.0;
    CHECK(shg_efficiency(twice) == doctest::Approx(peak / 2.0).epsilon(1e-12));
}

TEST_CASE("shg efficiency from measured powers") {
    // powers back-computed so the reference 975 %/W/cm² at L = 0.57 cm comes out
    const double p1 = 1e-3;
    const double p2 = 975.0 / 100.0 * 0.57 * 0.57 * p1 * p1;
    CHECK(shg_efficiency_from_power(p1, p2, 0.57) == doctest::Approx(975.0).epsilon(1e-12));
    CHECK(shg_efficiency_from_power(p1, 0.0, 0.57) == 0.0);
    // quadratic pump dependence: doubling P_ω at fixed P_2ω divides η by 4
    CHECK(shg_efficiency_from_power(2.0 * p1, p2, 0.57) ==
          doctest::Approx(975.0 / 4.0).epsilon(1e-12));
    CHECK_THROWS_AS(shg_efficiency_from_power(0.0, p2, 0.57), ConfigError);
}
