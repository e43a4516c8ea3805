#include "lnspdc/gvd_map.hpp"

#include "lnspdc/errors.hpp"

#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace lnspdc {

namespace {

std::vector<double> axis(double lo, double hi, double step) {
    if (step <= 0.0 || hi < lo) throw ConfigError("sweep axis: require min <= max, step > 0");
    std::vector<double> v;
    for (double x = lo; x <= hi + 1e-9; x += step) v.push_back(x);
    return v;
}

} // namespace

GvdMap gvd_map(const WaveguideGeometry& base, const MaterialCatalog& materials,
               const GvdSweepSpec& spec) {
    if (spec.local_samples < 7)
        throw ConfigError("gvd sweep: local_samples must be >= 7 for second derivatives");
    if (spec.local_half_span_um <= 0.0)
        throw ConfigError("gvd sweep: local_half_span must be > 0");

    GvdMap map;
    map.w_nm = axis(spec.w_min_nm, spec.w_max_nm, spec.w_step_nm);
    map.h1_nm = axis(spec.h1_min_nm, spec.h1_max_nm, spec.h1_step_nm);
    const std::size_t nw = map.w_nm.size(), nh = map.h1_nm.size();
    map.k2_fs2_mm.assign(nw * nh, std::numeric_limits<double>::quiet_NaN());
    map.ok.assign(nw * nh, 0);
    map.cell_error.assign(nw * nh, "");

    const double span = spec.local_half_span_um;
    const double spacing = 2.0 * span / (spec.local_samples - 1);

    std::atomic<std::size_t> next{0};
    int n_threads =
        spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
    n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(nw * nh)));

    auto worker = [&]() {
        for (;;) {
            const std::size_t cell = next.fetch_add(1);
            if (cell >= nw * nh) return;
            const std::size_t iw = cell % nw, ih = cell / nw;
            WaveguideGeometry g = base;
            g.top_width_nm = map.w_nm[iw];
            g.etch_depth_nm = map.h1_nm[ih];
            try {
                // Per-cell curves are sampled sequentially; the sweep itself
                // is the parallel axis.
                const auto curve = DispersionCurve::solve_te(
                    g, materials, spec.lambda_um - span, spec.lambda_um + span, spacing, spec.grid,
                    /*threads=*/1);
                map.k2_fs2_mm[cell] = curve.gvd(spec.lambda_um);
                map.ok[cell] = 1;
            } catch (const std::exception& e) {
                map.cell_error[cell] = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    // Zero contour: sign changes between adjacent solved cells.
    auto interp = [](double a, double b, double fa, double fb) {
        return a + (b - a) * (0.0 - fa) / (fb - fa);
    };
    for (std::size_t ih = 0; ih < nh; ++ih)
        for (std::size_t iw = 0; iw + 1 < nw; ++iw) {
            if (!map.cell_ok(iw, ih) || !map.cell_ok(iw + 1, ih)) continue;
            const double fa = map.at(iw, ih), fb = map.at(iw + 1, ih);
            if (fa == 0.0)
                map.zero_contour.push_back({map.w_nm[iw], map.h1_nm[ih]});
            else if (fa * fb < 0.0)
                map.zero_contour.push_back({interp(map.w_nm[iw], map.w_nm[iw + 1], fa, fb),
                                            map.h1_nm[ih]});
        }
    for (std::size_t iw = 0; iw < nw; ++iw)
        for (std::size_t ih = 0; ih + 1 < nh; ++ih) {
            if (!map.cell_ok(iw, ih) || !map.cell_ok(iw, ih + 1)) continue;
            const double fa = map.at(iw, ih), fb = map.at(iw, ih + 1);
            if (fa * fb < 0.0)
                map.zero_contour.push_back({map.w_nm[iw],
                                            interp(map.h1_nm[ih], map.h1_nm[ih + 1], fa, fb)});
        }
    return map;
}

} // namespace lnspdc
