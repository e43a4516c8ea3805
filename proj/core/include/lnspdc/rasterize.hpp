#pragma once

#include "lnspdc/geometry.hpp"
#include "lnspdc/materials.hpp"
#include "lnspdc/slab.hpp"

#include <vector>

namespace lnspdc {

// Grid spacing and window margins for the 2-D cross-section solve.
// The window is the ridge base plus lateral_margin on each side, top_margin
// of cladding above the ridge and bottom_margin of oxide below the film
// (clamped to the physical oxide thickness: the carrier below it is out of
// model). Zero field at the window edge; callers widen the margins when the
// reported boundary field ratio is too large.
struct GridSpec {
    double dx_nm = 20.0;
    double dy_nm = 20.0;
    double lateral_margin_um = 3.0;
    double top_margin_um = 1.2;
    double bottom_margin_um = 2.0;
};

// Cell-centered permittivity map. eps[j*nx + i] with x = x0 + i*dx,
// y = y0 + j*dy at cell centers; x = 0 is the ridge axis, y = 0 the
// film/oxide interface.
struct IndexMap {
    int nx = 0, ny = 0;
    double dx_um = 0.0, dy_um = 0.0;
    double x0_um = 0.0, y0_um = 0.0;
    std::vector<double> eps;
    double eps_core = 0.0; // bulk core permittivity at this λ and polarization
    double n_core = 0.0;

    double& at(int i, int j) { return eps[static_cast<std::size_t>(j) * nx + i]; }
    double at(int i, int j) const { return eps[static_cast<std::size_t>(j) * nx + i]; }
};

// Rasterizes the trapezoidal ridge onto the grid with exact area-weighted
// averaging of n² per cell (the sidewall is a straight line, so the clipped
// area integral is piecewise linear and evaluated exactly).
IndexMap rasterize(const WaveguideGeometry& g, const MaterialCatalog& materials,
                   Polarization pol, double lambda_um, const GridSpec& grid);

// Exact ∫ clamp(a + b·y, lo, hi) dy over [y0, y1]; exposed for tests.
double integrate_clamped_linear(double a, double b, double lo, double hi, double y0, double y1);

} // namespace lnspdc
