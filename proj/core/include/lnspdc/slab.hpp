#pragma once

#include <string>
#include <vector>

namespace lnspdc {

// 1-D multilayer slab mode solver (transfer matrix + bracketed bisection).
// Used for the lateral-leakage criterion and for the guided-mode bracketing
// checks; the 2-D solver is never in this code path.

enum class Polarization { TE, TM };

struct SlabStack {
    // Layer indices bottom to top; first and last are semi-infinite.
    std::vector<double> n;
    // Thicknesses of the interior layers, µm (size = n.size() - 2).
    std::vector<double> thickness_um;
};

// All guided n_eff of the stack at λ, descending. Empty when no mode is
// guided. Roots are found by scanning the dispersion function between the
// cladding maximum and the core maximum, then bisecting each bracket.
std::vector<double> slab_modes(const SlabStack& stack, Polarization pol, double lambda_um);

} // namespace lnspdc
