// Acceptance suite: drives the reference-device checks end to end at the
// stated tolerances and prints one pass/fail line per criterion. Exit code
// is the number of failed criteria.

#include "lnspdc/dispersion.hpp"
#include "lnspdc/gvd_map.hpp"
#include "lnspdc/mode_solver.hpp"
#include "lnspdc/qpm.hpp"
#include "lnspdc/spdc.hpp"
#include "lnspdc/tags.hpp"
#include "lnspdc/units.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace lnspdc;

int failures = 0;

void report(const std::string& name, bool pass, const std::string& detail) {
    std::printf("%s criterion %s: %s\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

double elapsed_s(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(LNSPDC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    return WEXITSTATUS(std::system(cmd.c_str()));
}

json slurp_json(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return json::parse(ss.str());
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("lnspdc_acceptance_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

const std::string kPaperCfg = std::string(LNSPDC_SOURCE_DIR) + "/tools/paper.cfg";

char buf[512];

// 1. Poling period from the bundled materials and reference geometry.
void criterion_1() {
    const auto dir = fresh_dir("qpm");
    const auto t0 = std::chrono::steady_clock::now();
    const int rc = run_cli("qpm --config " + kPaperCfg + " --out-dir " + dir.string());
    const double dt = elapsed_s(t0);
    if (rc != 0) {
        report("1 (qpm poling period)", false, "qpm exited with code " + std::to_string(rc));
        return;
    }
    const json q = slurp_json(dir / "qpm.json");
    const double period = q["poling_period_um"].get<double>();
    const bool pass = period >= 4.2 && period <= 4.8 && dt < 120.0;
    std::snprintf(buf, sizeof(buf), "poling period %.4f um (band [4.2, 4.8]), runtime %.0f s (< 120)",
                  period, dt);
    report("1 (qpm poling period)", pass, buf);
}

// 2+3. Effective indices, areas and overlap at the two design wavelengths.
void criteria_2_3() {
    const auto cat = MaterialCatalog::builtin();
    const auto g = reference_geometry();
    const GridSpec grid; // default 20 nm

    const auto t0 = std::chrono::steady_clock::now();
    const auto m810 = fundamental_te(g, cat, 0.810, grid);
    const double t810 = elapsed_s(t0);
    const auto t1 = std::chrono::steady_clock::now();
    const auto m1620 = fundamental_te(g, cat, 1.620, grid);
    const double t1620 = elapsed_s(t1);

    const bool pass2 = std::abs(m810.n_eff - 2.099) <= 0.03 &&
                       std::abs(m1620.n_eff - 1.92) <= 0.03 && t810 < 60.0 && t1620 < 60.0;
    std::snprintf(buf, sizeof(buf),
                  "n_eff(810) = %.4f (2.099±0.03), n_eff(1620) = %.4f (1.92±0.03), "
                  "runtimes %.1f s / %.1f s (< 60)",
                  m810.n_eff, m1620.n_eff, t810, t1620);
    report("2 (effective indices)", pass2, buf);

    const double overlap = mode_overlap(m810, m1620);
    const bool pass3 = std::abs(m810.a_eff_um2 - 0.8) <= 0.15 &&
                       std::abs(m1620.a_eff_um2 - 1.3) <= 0.2 && std::abs(overlap - 0.93) <= 0.04;
    std::snprintf(buf, sizeof(buf),
                  "A_eff(810) = %.3f um^2 (0.8±0.15), A_eff(1620) = %.3f um^2 (1.3±0.2), "
                  "overlap = %.4f (0.93±0.04)",
                  m810.a_eff_um2, m1620.a_eff_um2, overlap);
    report("3 (mode metrics)", pass3, buf);
}

// 4. GVD engineering: zero contour in the shallow-etch band and the |k''|
// bound across the transmission band.
void criterion_4() {
    const auto cat = MaterialCatalog::builtin();
    const auto t0 = std::chrono::steady_clock::now();

    GvdSweepSpec spec;
    spec.w_min_nm = 1600.0;
    spec.w_max_nm = 2000.0;
    spec.w_step_nm = 25.0;
    spec.h1_min_nm = spec.h1_max_nm = 165.0;
    spec.lambda_um = 1.62;
    spec.local_samples = 7;
    spec.local_half_span_um = 0.12;
    const auto map = gvd_map(reference_geometry(), cat, spec);

    bool crossing = false;
    for (const auto& pt : map.zero_contour)
        if (pt[1] == 165.0 && pt[0] >= 1600.0 && pt[0] <= 2000.0) crossing = true;
    double k2_min = 1e30, k2_max = -1e30;
    for (std::size_t iw = 0; iw < map.w_nm.size(); ++iw) {
        if (!map.cell_ok(iw, 0)) continue;
        k2_min = std::min(k2_min, map.at(iw, 0));
        k2_max = std::max(k2_max, map.at(iw, 0));
    }

    const auto curve =
        DispersionCurve::solve_te(reference_geometry(), cat, 1.14, 1.86, 0.02, GridSpec{}, 1);
    double band_max = 0.0;
    for (double lam = 1.20; lam <= 1.80 + 1e-9; lam += 0.01)
        band_max = std::max(band_max, std::abs(curve.gvd(lam)));
    const double dt = elapsed_s(t0);

    const bool pass = crossing && band_max <= 150.0 && dt < 1800.0;
    std::snprintf(buf, sizeof(buf),
                  "zero contour %s w in [1600,2000] at h1 = 165 (row k'' in [%+.0f, %+.0f] fs^2/mm); "
                  "max |k''| over [1.2,1.8] um = %.0f fs^2/mm (<= 150); runtime %.0f s (< 1800)",
                  crossing ? "crosses" : "does not cross", k2_min, k2_max, band_max, dt);
    report("4 (gvd engineering)", pass, buf);
}

// 5+6. Phase-matching bandwidth and two-photon spectrum bandwidth.
void criteria_5_6() {
    const auto cat = MaterialCatalog::builtin();
    const auto g = reference_geometry();
    const GridSpec grid;
    const auto pump_curve = DispersionCurve::solve_te(g, cat, 0.77, 0.87, 0.01, grid, 1);
    const auto signal_curve = DispersionCurve::solve_te(g, cat, 1.15, 1.97, 0.025, grid, 1);

    QpmDesign design;
    design.pump_lambda_nm = 810.6;
    design.order = 1;
    design.length_mm = 5.7;
    design.duty = 0.5;
    design.poling_period_um =
        solve_poling_period(pump_curve, signal_curve, signal_curve, 810.6, 1621.2, 1);

    const auto bw = phase_matching_bandwidth(design, pump_curve, signal_curve, signal_curve);
    const bool pass5 = std::abs(bw.bandwidth_thz - 34.0) <= 0.15 * 34.0;
    std::snprintf(buf, sizeof(buf), "sinc-null bandwidth %.2f THz (34 ± 15%% -> [28.9, 39.1])",
                  bw.bandwidth_thz);
    report("5 (phase-matching bandwidth)", pass5, buf);

    PumpEnvelope pump;
    pump.center_nm = 810.6;
    pump.bandwidth_nm = 1.1;
    JsiSpec spec;
    spec.n_points = 401;
    const auto grid_jsi = jsi(design, pump_curve, signal_curve, signal_curve, pump, spec);
    const double bw3 = jsi_antidiagonal_bandwidth_thz(grid_jsi);
    const bool pass_bw = std::abs(bw3 - 28.0) <= 0.15 * 28.0;
    const bool pass_double = spdc_total_bandwidth_thz(11.0) == 22.0;
    std::snprintf(buf, sizeof(buf),
                  "two-photon -3 dB bandwidth %.2f THz (28 ± 15%% -> [23.8, 32.2]) %s; "
                  "doubling 11 -> %.0f THz %s",
                  bw3, pass_bw ? "ok" : "out of band", spdc_total_bandwidth_thz(11.0),
                  pass_double ? "exact" : "broken");
    report("6 (jsi bandwidth)", pass_bw && pass_double, buf);
}

// 7. SHG normalized efficiency: formula value and sinc null.
void criterion_7() {
    ShgModelInput in; // reference constants, Δk = 0
    const double eta = shg_efficiency(in);
    ShgModelInput null = in;
    null.delta_k_rad_per_m = 2.0 * units::pi / (in.length_cm * 1e-2);
    const double eta_null = shg_efficiency(null);
    const bool pass = std::abs(eta - 3364.0) <= 0.02 * 3364.0 && eta_null < 1e-10 * eta;
    std::snprintf(buf, sizeof(buf),
                  "eta(Δk=0) = %.1f %%/W/cm^2 (3364 ± 2%%), eta at sinc null / peak = %.1e (< 1e-10)",
                  eta, eta_null / eta);
    report("7 (shg efficiency)", pass, buf);
}

// 8. Statistics oracle equivalence on synthetic streams.
void criterion_8() {
    const auto t0 = std::chrono::steady_clock::now();
    bool pass = true;
    std::string notes;

    // PCR recovers the configured pair rate (3σ), 10^6-10^8 tags.
    {
        SourceConfig cfg;
        cfg.pair_rate_hz = 1e6;
        cfg.duration_s = 4.0;
        cfg.eta_s = cfg.eta_i = 0.35;
        cfg.jitter_sigma_ps = 40.0;
        cfg.splitter = true;
        cfg.seed = 801;
        const auto stream = simulate_tags(cfg);
        AnalyzeParams params;
        params.splitter_factor = 1;
        params.duration_s = cfg.duration_s;
        const auto rep = analyze_stream(stream, params);
        const double c_si_counts = rep.c_si_hz * cfg.duration_s;
        const double sigma_rel = std::sqrt(1.0 / c_si_counts +
                                           1.0 / (rep.c_s_hz * cfg.duration_s) +
                                           1.0 / (rep.c_i_hz * cfg.duration_s));
        const bool ok = std::abs(rep.pcr_hz - cfg.pair_rate_hz) <
                        3.0 * sigma_rel * cfg.pair_rate_hz + 0.002 * cfg.pair_rate_hz;
        char b[160];
        std::snprintf(b, sizeof(b), "pcr %.0f Hz vs configured 1e6 (%zu tags) %s", rep.pcr_hz,
                      stream.records.size(), ok ? "ok" : "off");
        notes += b;
        pass = pass && ok;
    }

    // CAR matches the hand-derived closed form η²R/(C_s C_i W) = 1000 (3σ).
    {
        SourceConfig cfg;
        cfg.pair_rate_hz = 2e5;
        cfg.duration_s = 20.0;
        cfg.eta_s = cfg.eta_i = 0.25;
        cfg.jitter_sigma_ps = 40.0;
        cfg.seed = 802;
        const auto stream = simulate_tags(cfg);
        const auto hist = coincidence_histogram(stream, 0, 1, 50, 80000);
        const auto c = car(hist, 5000, 10000);
        const bool ok = !c.lower_bound && std::abs(c.car - 1000.0) < 3.0 * c.sigma;
        char b[96];
        std::snprintf(b, sizeof(b), "; car %.0f vs closed form 1000 (sigma %.0f) %s", c.car,
                      c.sigma, ok ? "ok" : "off");
        notes += b;
        pass = pass && ok;
    }

    // Ideal single-pair source: g_H2(0) < 0.01.
    {
        SourceConfig cfg;
        cfg.pair_rate_hz = 2e4;
        cfg.duration_s = 2.0;
        cfg.eta_s = cfg.eta_i = 1.0;
        cfg.splitter = true;
        cfg.seed = 803;
        const auto res = heralded_g2(simulate_tags(cfg), 500, true, 100, 1);
        const bool ok = res.g2 < 0.01;
        char b[64];
        std::snprintf(b, sizeof(b), "; heralded g2 %.4f (< 0.01) %s", res.g2, ok ? "ok" : "off");
        notes += b;
        pass = pass && ok;
    }

    // Brute-force quadratic window counter agrees exactly on a 10^4-tag stream.
    {
        SourceConfig cfg;
        cfg.pair_rate_hz = 3e5;
        cfg.duration_s = 0.01;
        cfg.eta_s = 0.8;
        cfg.eta_i = 0.9;
        cfg.dark_s_hz = 1e5;
        cfg.dark_i_hz = 1e5;
        cfg.jitter_sigma_ps = 100.0;
        cfg.splitter = true;
        cfg.seed = 804;
        const auto stream = simulate_tags(cfg);
        const auto fast = heralded_g2(stream, 700, true, 1, 1);

        std::vector<std::int64_t> ts, t1, t2;
        for (const auto& r : stream.records) {
            if (r.channel == 0) ts.push_back(r.timestamp_ps);
            if (r.channel == 1) t1.push_back(r.timestamp_ps);
            if (r.channel == 2) t2.push_back(r.timestamp_ps);
        }
        std::int64_t c1 = 0, c2 = 0, c12 = 0;
        for (const std::int64_t s : ts) {
            std::int64_t n1 = 0, n2 = 0;
            for (const std::int64_t t : t1)
                if (std::llabs(t - s) <= 700) ++n1;
            for (const std::int64_t t : t2)
                if (std::llabs(t - s) <= 700) ++n2;
            c1 += n1;
            c2 += n2;
            c12 += n1 * n2;
        }
        const double brute =
            static_cast<double>(c12) * ts.size() / (2.0 * static_cast<double>(c1) * c2);
        const bool ok = fast.c_si1 == c1 && fast.c_si2 == c2 && fast.c_si1i2 == c12 &&
                        fast.g2 == brute;
        char b[96];
        std::snprintf(b, sizeof(b), "; brute-force g2 match on %zu tags %s",
                      stream.records.size(), ok ? "exact" : "MISMATCH");
        notes += b;
        pass = pass && ok;
    }

    // CAR·PCR invariant under pair-rate scaling (3σ).
    {
        auto one = [](double rate, std::uint64_t seed) {
            SourceConfig cfg;
            cfg.pair_rate_hz = rate;
            cfg.duration_s = 15.0;
            cfg.eta_s = cfg.eta_i = 0.25;
            cfg.jitter_sigma_ps = 40.0;
            cfg.seed = seed;
            AnalyzeParams params;
            params.splitter_factor = 1;
            params.duration_s = cfg.duration_s;
            params.span_ps = 80000;
            params.peak_window_ps = 5000;
            return analyze_stream(simulate_tags(cfg), params);
        };
        const auto a = one(1e5, 805);
        const auto b2 = one(3e5, 806);
        const double pa = a.car.car * a.pcr_hz, pb = b2.car.car * b2.pcr_hz;
        const double sa = a.car.sigma * a.pcr_hz, sb = b2.car.sigma * b2.pcr_hz;
        const bool ok = std::abs(pa - pb) < 3.0 * std::sqrt(sa * sa + sb * sb);
        char b[128];
        std::snprintf(b, sizeof(b), "; car*pcr %.3g vs %.3g under 3x rate scaling %s", pa, pb,
                      ok ? "ok" : "off");
        notes += b;
        pass = pass && ok;
    }

    const double dt = elapsed_s(t0);
    char b[64];
    std::snprintf(b, sizeof(b), "; runtime %.0f s (< 600)", dt);
    notes += b;
    pass = pass && dt < 600.0;
    report("8 (statistics oracles)", pass, notes);
}

// 9. reproduce-paper determinism: byte-identical data artifacts.
void criterion_9() {
    const auto d1 = fresh_dir("repro1");
    const auto d2 = fresh_dir("repro2");
    int rc = run_cli("reproduce-paper --out-dir " + d1.string());
    rc += run_cli("reproduce-paper --out-dir " + d2.string());
    if (rc != 0) {
        report("9 (determinism)", false, "reproduce-paper exited nonzero");
        return;
    }
    bool identical = true;
    std::string first_diff;
    for (const auto& entry : fs::directory_iterator(d1)) {
        const std::string name = entry.path().filename().string();
        if (name == "manifest.json") continue; // timestamps live here
        std::ifstream f1(entry.path(), std::ios::binary);
        std::ifstream f2(d2 / name, std::ios::binary);
        std::stringstream s1, s2;
        s1 << f1.rdbuf();
        s2 << f2.rdbuf();
        if (s1.str() != s2.str()) {
            identical = false;
            if (first_diff.empty()) first_diff = name;
        }
    }
    std::snprintf(buf, sizeof(buf), "two runs byte-identical%s%s",
                  identical ? "" : ", first difference: ", first_diff.c_str());
    report("9 (determinism)", identical, buf);
}

} // namespace

int main() {
    std::printf("acceptance suite, tool sources at %s\n", LNSPDC_SOURCE_DIR);
    criterion_1();
    criteria_2_3();
    criterion_4();
    criteria_5_6();
    criterion_7();
    criterion_8();
    criterion_9();
    std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
