#pragma once

#include "lnspdc/dispersion.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace lnspdc {

// Sweep of k″ over (w, h1) at a fixed wavelength. Each cell builds a short
// local dispersion curve and differentiates it; cells whose mode solve fails
// are marked missing, never zero.
struct GvdSweepSpec {
    double w_min_nm = 1600.0, w_max_nm = 2000.0, w_step_nm = 25.0;
    double h1_min_nm = 165.0, h1_max_nm = 165.0, h1_step_nm = 5.0;
    double lambda_um = 1.62;
    double local_half_span_um = 0.12; // λ half-span of the per-cell curve
    int local_samples = 9;            // >= 7 so gvd() has its edge margin
    GridSpec grid;
    int threads = 0; // 0 = hardware concurrency
};

struct GvdMap {
    std::vector<double> w_nm;  // sweep axes
    std::vector<double> h1_nm;
    std::vector<double> k2_fs2_mm; // [ih1 * w_nm.size() + iw]
    std::vector<std::uint8_t> ok;  // cell solved
    std::vector<std::string> cell_error;
    // k″ = 0 crossings found by linear interpolation of sign changes along
    // rows and columns, as (w_nm, h1_nm) points.
    std::vector<std::array<double, 2>> zero_contour;

    double at(std::size_t iw, std::size_t ih1) const { return k2_fs2_mm[ih1 * w_nm.size() + iw]; }
    bool cell_ok(std::size_t iw, std::size_t ih1) const { return ok[ih1 * w_nm.size() + iw] != 0; }
};

GvdMap gvd_map(const WaveguideGeometry& base, const MaterialCatalog& materials,
               const GvdSweepSpec& spec);

} // namespace lnspdc
