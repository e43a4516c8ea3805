#pragma once

#include "lnspdc/rasterize.hpp"

#include <optional>
#include <string>
#include <vector>

namespace lnspdc {

// One guided eigenmode of the cross-section. field holds the dominant
// transverse E component on the solve grid, normalized so Σ|f|²·dA = 1.
struct ModeSolution {
    double n_eff = 0.0;
    double lambda_um = 0.0;
    Polarization pol = Polarization::TE;
    double te_fraction = 0.0; // 1 for quasi-TE solutions, 0 for quasi-TM
    bool guided = false;
    double a_eff_um2 = 0.0;

    int nx = 0, ny = 0;
    double dx_um = 0.0, dy_um = 0.0, x0_um = 0.0, y0_um = 0.0;
    std::vector<double> field;

    double n_core = 0.0;     // bulk core index at λ (upper bracket)
    double n_slab_max = 0.0; // largest lateral slab mode index (lower bracket)
    double boundary_field_ratio = 0.0; // max |f| on window edge / max |f|
    double residual = 0.0;             // ‖Aφ − β²φ‖ / ‖β²φ‖

    bool same_grid(const ModeSolution& other, double tol = 1e-12) const;
};

// Semivectorial finite-difference eigenmode solve. Quasi-TE and quasi-TM are
// separate scalar eigenproblems; both are solved and the solutions merged,
// sorted by descending n_eff. Non-convergence raises ConvergenceError; no
// guided mode found returns an empty list and fills *diagnostic.
std::vector<ModeSolution> solve_modes(const WaveguideGeometry& g, const MaterialCatalog& materials,
                                      double lambda_um, int n_modes, const GridSpec& grid,
                                      std::string* diagnostic = nullptr);

// Fundamental TE: the highest-n_eff solution with TE fraction > 0.5 (exact
// ties classify as TE). Throws NumericError when none exists.
ModeSolution fundamental_te(const WaveguideGeometry& g, const MaterialCatalog& materials,
                            double lambda_um, const GridSpec& grid);

// A_eff = (∫|E|² dA)² / ∫|E|⁴ dA on the discrete grid, µm².
double effective_area(const ModeSolution& m);

// Normalized intensity overlap (power-coupling form)
//   [∫|E_a||E_b| dA]² / (∫|E_a|² dA · ∫|E_b|² dA)
// in [0,1]; symmetric; 1 only for proportional profiles, 0 for disjoint
// supports. Both modes must share a grid.
double mode_overlap(const ModeSolution& a, const ModeSolution& b);

// Lateral-leakage criterion: TE ridge fundamental vs the TM mode of the
// remaining (etched) slab. Positive margin means no leakage. The full-film
// slab index is reported alongside, since the criterion's one-line
// description leaves the thickness choice ambiguous.
struct LeakageReport {
    double margin = 0.0; // n_eff(TE ridge) − n_eff(TM slab), or vs. cutoff
    double te_ridge_n_eff = 0.0;
    std::optional<double> tm_slab_n_eff;           // etched slab (h2 − h1)
    std::optional<double> tm_slab_full_film_n_eff; // full film (h2)
    bool slab_mode_exists = false;
    double slab_thickness_nm = 0.0;
};
LeakageReport leakage_margin(const WaveguideGeometry& g, const MaterialCatalog& materials,
                             double lambda_um, const GridSpec& grid);

// Largest slab-mode index of the lateral stack (TE and TM), used as the
// lower guidance bracket. Falls back to max cladding/oxide index when the
// slab has no guided mode.
double lateral_slab_max_index(const WaveguideGeometry& g, const MaterialCatalog& materials,
                              double lambda_um);
double lateral_slab_cutoff(const WaveguideGeometry& g, const MaterialCatalog& materials,
                           Polarization pol, double lambda_um);

// CSV grid of the field plus a JSON sidecar (λ, n_eff, A_eff, grid spacing).
// Returns the paths written: {csv, json}.
std::vector<std::string> export_mode(const ModeSolution& m, const std::string& basename);

} // namespace lnspdc
