#include "lnspdc/slab.hpp"

#include "lnspdc/errors.hpp"
#include "lnspdc/units.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace lnspdc {

namespace {

// Propagates (F, F') through the interior layers starting from the decaying
// solution in the bottom half-space and returns the mismatch against the
// decaying solution in the top half-space. TM propagates (F, F'/n²).
// The state is renormalized after each layer; scaling does not move roots.
double dispersion_mismatch(const SlabStack& stack, Polarization pol, double k0, double ne) {
    const std::size_t n_layers = stack.n.size();
    const double ne2 = ne * ne;

    const double n_bot = stack.n.front();
    const double n_top = stack.n.back();
    const double g_bot = k0 * std::sqrt(std::max(ne2 - n_bot * n_bot, 0.0));
    const double g_top = k0 * std::sqrt(std::max(ne2 - n_top * n_top, 0.0));

    double F = 1.0;
    double D = (pol == Polarization::TE) ? g_bot : g_bot / (n_bot * n_bot); // F' or F'/n²

    for (std::size_t l = 1; l + 1 < n_layers; ++l) {
        const double n = stack.n[l];
        const double t = stack.thickness_um[l - 1];
        const double kappa2 = k0 * k0 * n * n - k0 * k0 * ne2;
        const double w = (pol == Polarization::TE) ? 1.0 : n * n; // F' = w * D
        double Fp = w * D;
        double Fn, Fpn;
        if (kappa2 > 0.0) {
            const double kap = std::sqrt(kappa2);
            Fn = F * std::cos(kap * t) + Fp / kap * std::sin(kap * t);
            Fpn = -F * kap * std::sin(kap * t) + Fp * std::cos(kap * t);
        } else if (kappa2 < 0.0) {
            const double gam = std::sqrt(-kappa2);
            Fn = F * std::cosh(gam * t) + Fp / gam * std::sinh(gam * t);
            Fpn = F * gam * std::sinh(gam * t) + Fp * std::cosh(gam * t);
        } else {
            Fn = F + Fp * t;
            Fpn = Fp;
        }
        F = Fn;
        D = Fpn / w;
        const double scale = std::max(std::abs(F), std::abs(D));
        if (scale > 0.0) {
            F /= scale;
            D /= scale;
        }
    }

    // Decaying top solution satisfies D/F = -g_top/w_top with w = 1 (TE), n² (TM).
    const double w_top = (pol == Polarization::TE) ? 1.0 : n_top * n_top;
    return D + g_top / w_top * F;
}

} // namespace

std::vector<double> slab_modes(const SlabStack& stack, Polarization pol, double lambda_um) {
    if (stack.n.size() < 3 || stack.thickness_um.size() != stack.n.size() - 2)
        throw ConfigError("slab stack needs >= 3 layers with interior thicknesses");
    for (double t : stack.thickness_um)
        if (t <= 0.0) throw ConfigError("slab layer thickness must be > 0");

    const double k0 = 2.0 * units::pi / lambda_um;
    const double ne_min = std::max(stack.n.front(), stack.n.back());
    double ne_max = 0.0;
    for (std::size_t l = 1; l + 1 < stack.n.size(); ++l) ne_max = std::max(ne_max, stack.n[l]);
    if (ne_max <= ne_min) return {};

    auto f = [&](double ne) { return dispersion_mismatch(stack, pol, k0, ne); };

    // Scan from the core index downward; bisect each sign change.
    const int n_scan = 4000;
    const double eps = (ne_max - ne_min) * 1e-9;
    std::vector<double> roots;
    double x_prev = ne_max - eps;
    double f_prev = f(x_prev);
    for (int i = 1; i <= n_scan; ++i) {
        const double x = ne_max - (ne_max - ne_min - 2.0 * eps) * i / n_scan - eps;
        const double fx = f(x);
        if (f_prev == 0.0) {
            roots.push_back(x_prev);
        } else if (f_prev * fx < 0.0) {
            double a = x, b = x_prev, fa = fx;
            for (int it = 0; it < 100 && (b - a) > 1e-14; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = f(m);
                if (fm == 0.0) {
                    a = b = m;
                    break;
                }
                if (fa * fm < 0.0)
                    b = m;
                else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        x_prev = x;
        f_prev = fx;
    }
    std::sort(roots.begin(), roots.end(), std::greater<>());
    return roots;
}

} // namespace lnspdc
