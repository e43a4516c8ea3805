#include "lnspdc/rasterize.hpp"

#include "lnspdc/config.hpp"
#include "lnspdc/errors.hpp"
#include "lnspdc/units.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace lnspdc {

WaveguideGeometry WaveguideGeometry::from_config(const ConfigFile& cfg, const std::string& section) {
    WaveguideGeometry g;
    g.top_width_nm = cfg.get_double(section, "top_width_nm", g.top_width_nm);
    g.etch_depth_nm = cfg.get_double(section, "etch_depth_nm", g.etch_depth_nm);
    g.film_thickness_nm = cfg.get_double(section, "film_thickness_nm", g.film_thickness_nm);
    g.sidewall_angle_deg = cfg.get_double(section, "sidewall_angle_deg", g.sidewall_angle_deg);
    g.oxide_thickness_nm = cfg.get_double(section, "oxide_thickness_nm", g.oxide_thickness_nm);
    g.validate();
    return g;
}

double integrate_clamped_linear(double a, double b, double lo, double hi, double y0, double y1) {
    if (y1 <= y0) return 0.0;
    // Breakpoints where a + b*y crosses lo or hi.
    std::array<double, 4> pts = {y0, y1, y0, y1};
    int n = 2;
    if (b != 0.0) {
        pts[n++] = (lo - a) / b;
        pts[n++] = (hi - a) / b;
    }
    std::sort(pts.begin(), pts.begin() + n);
    double sum = 0.0;
    for (int k = 0; k + 1 < n; ++k) {
        const double s0 = std::clamp(pts[k], y0, y1);
        const double s1 = std::clamp(pts[k + 1], y0, y1);
        if (s1 <= s0) continue;
        const double mid = 0.5 * (s0 + s1);
        sum += std::clamp(a + b * mid, lo, hi) * (s1 - s0); // linear piece: midpoint exact
    }
    return sum;
}

namespace {

// LN area of cell [xl,xr]×[yl,yr] within the ridge zone yf <= y <= h2.
// The core region is |x| <= hw(y), hw(y) = w/2 + (h2 - y)/tanθ.
double ridge_core_area(double xl, double xr, double yl, double yr, double half_top, double inv_tan,
                       double h2) {
    // width(y) = min(xr, hw(y)) - max(xl, -hw(y)), clamped at 0.
    // Split the min/max by integrating clamp(hw - xl, 0, xr - xl) when the
    // cell is right of the axis, and mirror otherwise; a cell spanning the
    // axis (xl < 0 < xr) is handled by splitting at x = 0.
    if (xl < 0.0 && xr > 0.0)
        return ridge_core_area(xl, 0.0, yl, yr, half_top, inv_tan, h2) +
               ridge_core_area(0.0, xr, yl, yr, half_top, inv_tan, h2);
    if (xr <= 0.0) // mirror
        return ridge_core_area(-xr, -xl, yl, yr, half_top, inv_tan, h2);
    // hw(y) = half_top + (h2 - y)*inv_tan = a + b*y
    const double a = half_top + h2 * inv_tan;
    const double b = -inv_tan;
    // covered width = clamp(hw - xl, 0, xr - xl)
    return integrate_clamped_linear(a - xl, b, 0.0, xr - xl, yl, yr);
}

} // namespace

IndexMap rasterize(const WaveguideGeometry& g, const MaterialCatalog& materials, Polarization pol,
                   double lambda_um, const GridSpec& grid) {
    g.validate();
    if (grid.dx_nm <= 0.0 || grid.dy_nm <= 0.0) throw ConfigError("grid spacing must be > 0");

    const double w = g.top_width_nm * 1e-3;
    const double h1 = g.etch_depth_nm * 1e-3;
    const double h2 = g.film_thickness_nm * 1e-3;
    const double t_ox = g.oxide_thickness_nm * 1e-3;
    const double inv_tan = 1.0 / std::tan(g.sidewall_angle_deg * units::pi / 180.0);
    const double yf = h2 - h1; // etch floor

    const std::string& core_name =
        (pol == Polarization::TE) ? g.core_te_material : g.core_tm_material;
    const double n_core = materials.at(core_name).index(lambda_um);
    const double n_ox = materials.at(g.oxide_material).index(lambda_um);
    const double n_clad = materials.at(g.cladding_material).index(lambda_um);
    const double eps_core = n_core * n_core;
    const double eps_ox = n_ox * n_ox;
    const double eps_clad = n_clad * n_clad;

    const double base_half = w / 2.0 + h1 * inv_tan;
    const double x_half = base_half + grid.lateral_margin_um;
    // Anchor the film/oxide interface (y = 0) and the ridge axis (x = 0) on
    // cell boundaries: grid refinement then converges cleanly instead of
    // wobbling with the interface-to-cell alignment.
    const double y_min = -std::ceil(std::min(grid.bottom_margin_um, t_ox) / (grid.dy_nm * 1e-3)) *
                         (grid.dy_nm * 1e-3);
    const double y_max = h2 + grid.top_margin_um;

    IndexMap map;
    map.dx_um = grid.dx_nm * 1e-3;
    map.dy_um = grid.dy_nm * 1e-3;
    map.nx = static_cast<int>(std::ceil(2.0 * x_half / map.dx_um));
    map.nx += map.nx % 2; // even: x = 0 is a cell boundary
    map.ny = static_cast<int>(std::ceil((y_max - y_min) / map.dy_um));
    if (map.nx < 10 || map.ny < 10) throw ConfigError("grid too coarse for the window");
    map.x0_um = -0.5 * map.dx_um * (map.nx - 1); // window centered on the ridge axis
    map.y0_um = y_min + 0.5 * map.dy_um;
    map.eps.assign(static_cast<std::size_t>(map.nx) * map.ny, eps_clad);
    map.eps_core = eps_core;
    map.n_core = n_core;

    const double cell_area = map.dx_um * map.dy_um;
    for (int j = 0; j < map.ny; ++j) {
        const double yl = map.y0_um + (j - 0.5) * map.dy_um;
        const double yr = yl + map.dy_um;
        for (int i = 0; i < map.nx; ++i) {
            const double xl = map.x0_um + (i - 0.5) * map.dx_um;
            const double xr = xl + map.dx_um;

            // Vertical decomposition: oxide below 0, slab LN in [0, yf],
            // ridge zone in [yf, h2], cladding above.
            const double ox_h = std::clamp(0.0, yl, yr) - yl;
            const double slab_h = std::clamp(yf, yl, yr) - std::clamp(0.0, yl, yr);
            const double ridge_y0 = std::clamp(yf, yl, yr);
            const double ridge_y1 = std::clamp(h2, yl, yr);

            double a_ox = ox_h * (xr - xl);
            double a_core = slab_h * (xr - xl);
            if (ridge_y1 > ridge_y0)
                a_core += ridge_core_area(xl, xr, ridge_y0, ridge_y1, w / 2.0, inv_tan, h2);
            double a_clad = cell_area - a_ox - a_core;
            a_clad = std::max(a_clad, 0.0);

            map.at(i, j) = (a_ox * eps_ox + a_core * eps_core + a_clad * eps_clad) / cell_area;
        }
    }
    return map;
}

} // namespace lnspdc
