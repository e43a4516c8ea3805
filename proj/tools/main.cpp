// lnspdc: design and analysis toolkit for thin-film LN SPDC devices.
//
// Subcommands map onto the library modules: `modes` (cross-section
// eigenmodes), `sweep-gvd` (k″ map + zero contour), `qpm` (poling period,
// phase mismatch, bandwidth), `jsi` (two-photon spectra), `shg` (normalized
// efficiency model), `tags simulate|analyze` (time-tag statistics) and
// `reproduce-paper` (the full reference-device chain from the bundled
// config). Every run writes its artifacts atomically plus a manifest with
// content hashes; reruns with the same config and seed are byte-identical
// except for manifest timestamps.

#include "lnspdc/config.hpp"
#include "lnspdc/dispersion.hpp"
#include "lnspdc/errors.hpp"
#include "lnspdc/gvd_map.hpp"
#include "lnspdc/manifest.hpp"
#include "lnspdc/mode_solver.hpp"
#include "lnspdc/qpm.hpp"
#include "lnspdc/spdc.hpp"
#include "lnspdc/tags.hpp"
#include "lnspdc/units.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

namespace lnspdc_cli {
const char* bundled_paper_cfg();
}

namespace {

using nlohmann::json;
using namespace lnspdc;

constexpr const char* kVersion = LNSPDC_VERSION;

// Whole-file schema: an unknown section or key anywhere is a hard error, so
// a typo never turns into a silent default.
const std::map<std::string, std::set<std::string>>& config_schema() {
    static const std::map<std::string, std::set<std::string>> schema{
        {"geometry",
         {"top_width_nm", "etch_depth_nm", "film_thickness_nm", "sidewall_angle_deg",
          "oxide_thickness_nm"}},
        {"solver",
         {"grid_nm", "lateral_margin_um", "top_margin_um", "bottom_margin_um", "n_modes"}},
        {"dispersion",
         {"pump_lambda_min_um", "pump_lambda_max_um", "pump_spacing_nm", "signal_lambda_min_um",
          "signal_lambda_max_um", "signal_spacing_nm"}},
        {"qpm", {"pump_wavelength_nm", "signal_wavelength_nm", "order", "length_mm", "duty"}},
        {"sweep",
         {"width_min_nm", "width_max_nm", "width_step_nm", "etch_min_nm", "etch_max_nm",
          "etch_step_nm", "lambda_um", "local_half_span_um", "local_samples"}},
        {"pump", {"center_nm", "bandwidth_nm", "shape"}},
        {"jsi", {"grid_points", "span_thz", "margin_factor"}},
        {"shg",
         {"d33_pm_per_v", "n_omega", "n_2omega", "lambda_2omega_nm", "a_eff_um2", "zeta",
          "delta_k_rad_per_m", "length_cm"}},
        {"tags",
         {"pair_rate_hz", "duration_s", "eta_s", "eta_i", "dark_s_hz", "dark_i_hz",
          "jitter_sigma_ps", "splitter", "seed"}},
        {"analyze",
         {"bin_ps", "span_ps", "window_ps", "floor_min_ps", "splitter_factor", "duration_s",
          "g2_resamples", "g2_factor_2"}},
        {"materials", {"file"}},
    };
    return schema;
}

struct Ctx {
    ConfigFile cfg;
    MaterialCatalog materials;
    std::string out_dir = ".";
    int threads = 0;
    std::optional<std::uint64_t> seed;
    RunManifest manifest;
};

std::string join_path(const std::string& dir, const std::string& name) {
    return (std::filesystem::path(dir) / name).string();
}

void write_artifact(Ctx& ctx, const std::string& name, const std::string& content) {
    const std::string path = join_path(ctx.out_dir, name);
    atomic_write_file(path, content);
    ctx.manifest.add_output(path);
}

void finish(Ctx& ctx) {
    ctx.manifest.finished_utc = utc_timestamp_now();
    ctx.manifest.write(join_path(ctx.out_dir, "manifest.json"));
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Ctx make_ctx(const std::string& config_path, const std::string& config_text,
             const std::string& materials_path, const std::string& out_dir, int threads,
             std::optional<std::uint64_t> seed, const std::string& command) {
    Ctx ctx;
    ctx.cfg = config_path.empty() ? ConfigFile::parse_text(config_text, "<bundled paper.cfg>")
                                  : ConfigFile::parse_file(config_path);
    ctx.cfg.validate_schema(config_schema());
    std::string mat_file = materials_path;
    if (mat_file.empty()) mat_file = ctx.cfg.get_str("materials", "file", "");
    ctx.materials =
        mat_file.empty() ? MaterialCatalog::builtin() : MaterialCatalog::from_file(mat_file);
    ctx.out_dir = out_dir;
    std::filesystem::create_directories(ctx.out_dir);
    ctx.threads = threads;
    ctx.seed = seed;
    ctx.manifest.tool_version = kVersion;
    ctx.manifest.command = command;
    ctx.manifest.config_hash = to_hex(ctx.cfg.hash());
    ctx.manifest.started_utc = utc_timestamp_now();
    return ctx;
}

GridSpec grid_from(const ConfigFile& cfg, double grid_override_nm = 0.0) {
    GridSpec g;
    g.dx_nm = g.dy_nm = cfg.get_double("solver", "grid_nm", 20.0);
    if (grid_override_nm > 0.0) g.dx_nm = g.dy_nm = grid_override_nm;
    g.lateral_margin_um = cfg.get_double("solver", "lateral_margin_um", g.lateral_margin_um);
    g.top_margin_um = cfg.get_double("solver", "top_margin_um", g.top_margin_um);
    g.bottom_margin_um = cfg.get_double("solver", "bottom_margin_um", g.bottom_margin_um);
    return g;
}

json mode_json(const ModeSolution& m) {
    return json{{"lambda_um", m.lambda_um},
                {"n_eff", m.n_eff},
                {"polarization", m.pol == Polarization::TE ? "TE" : "TM"},
                {"te_fraction", m.te_fraction},
                {"a_eff_um2", m.a_eff_um2},
                {"guided", m.guided},
                {"n_core", m.n_core},
                {"n_slab_max", m.n_slab_max},
                {"boundary_field_ratio", m.boundary_field_ratio}};
}

json leakage_json(const LeakageReport& rep) {
    json j{{"margin", rep.margin},
           {"te_ridge_n_eff", rep.te_ridge_n_eff},
           {"slab_mode_exists", rep.slab_mode_exists},
           {"slab_thickness_nm", rep.slab_thickness_nm}};
    if (rep.tm_slab_n_eff) j["tm_slab_n_eff"] = *rep.tm_slab_n_eff;
    if (rep.tm_slab_full_film_n_eff) j["tm_slab_full_film_n_eff"] = *rep.tm_slab_full_film_n_eff;
    return j;
}

struct CurvePair {
    DispersionCurve pump;
    DispersionCurve signal;
};

CurvePair build_curves(const Ctx& ctx, const WaveguideGeometry& g, const GridSpec& grid) {
    const auto& cfg = ctx.cfg;
    const double p_lo = cfg.get_double("dispersion", "pump_lambda_min_um", 0.77);
    const double p_hi = cfg.get_double("dispersion", "pump_lambda_max_um", 0.87);
    const double p_step = cfg.get_double("dispersion", "pump_spacing_nm", 10.0) * 1e-3;
    const double s_lo = cfg.get_double("dispersion", "signal_lambda_min_um", 1.15);
    const double s_hi = cfg.get_double("dispersion", "signal_lambda_max_um", 1.97);
    const double s_step = cfg.get_double("dispersion", "signal_spacing_nm", 25.0) * 1e-3;
    return {DispersionCurve::solve_te(g, ctx.materials, p_lo, p_hi, p_step, grid, ctx.threads),
            DispersionCurve::solve_te(g, ctx.materials, s_lo, s_hi, s_step, grid, ctx.threads)};
}

QpmDesign design_from(const Ctx& ctx, const CurvePair& curves) {
    const auto& cfg = ctx.cfg;
    QpmDesign d;
    d.pump_lambda_nm = cfg.get_double("qpm", "pump_wavelength_nm", 810.6);
    d.order = static_cast<int>(cfg.get_int("qpm", "order", 1));
    d.length_mm = cfg.get_double("qpm", "length_mm", 5.7);
    d.duty = cfg.get_double("qpm", "duty", 0.5);
    const double lam_s = cfg.get_double("qpm", "signal_wavelength_nm", 2.0 * d.pump_lambda_nm);
    d.poling_period_um = solve_poling_period(curves.pump, curves.signal, curves.signal,
                                             d.pump_lambda_nm, lam_s, d.order);
    return d;
}

PumpEnvelope pump_from(const ConfigFile& cfg) {
    PumpEnvelope p;
    p.center_nm = cfg.get_double("pump", "center_nm", 810.6);
    p.bandwidth_nm = cfg.get_double("pump", "bandwidth_nm", 1.1);
    const std::string shape = cfg.get_str("pump", "shape", "gaussian");
    if (shape == "gaussian")
        p.shape = PumpShape::Gaussian;
    else if (shape == "lorentzian")
        p.shape = PumpShape::Lorentzian;
    else
        throw ConfigError("pump shape must be 'gaussian' or 'lorentzian', got '" + shape + "'");
    p.validate();
    return p;
}

// ---- subcommand bodies ----------------------------------------------------

void cmd_modes(Ctx& ctx, double lambda_um, double grid_override_nm) {
    const auto g = WaveguideGeometry::from_config(ctx.cfg);
    const auto grid = grid_from(ctx.cfg, grid_override_nm);
    const int n_modes = static_cast<int>(ctx.cfg.get_int("solver", "n_modes", 4));

    std::string diag;
    const auto modes = solve_modes(g, ctx.materials, lambda_um, n_modes, grid, &diag);

    json summary;
    summary["lambda_um"] = lambda_um;
    summary["modes"] = json::array();
    int index = 0;
    for (const auto& m : modes) {
        json entry = mode_json(m);
        char tag[64];
        std::snprintf(tag, sizeof(tag), "mode_%04.0fnm_%d_%s", lambda_um * 1e3, index,
                      m.pol == Polarization::TE ? "te" : "tm");
        for (const auto& path : export_mode(m, join_path(ctx.out_dir, tag)))
            ctx.manifest.add_output(path);
        entry["field_csv"] = std::string(tag) + ".csv";
        summary["modes"].push_back(entry);
        ++index;
    }
    if (modes.empty()) summary["diagnostic"] = diag;
    summary["leakage"] = leakage_json(leakage_margin(g, ctx.materials, lambda_um, grid));
    write_artifact(ctx, "modes.json", summary.dump(2) + "\n");
    finish(ctx);
}

void cmd_sweep_gvd(Ctx& ctx) {
    const auto g = WaveguideGeometry::from_config(ctx.cfg);
    GvdSweepSpec spec;
    spec.w_min_nm = ctx.cfg.get_double("sweep", "width_min_nm", 1600.0);
    spec.w_max_nm = ctx.cfg.get_double("sweep", "width_max_nm", 2000.0);
    spec.w_step_nm = ctx.cfg.get_double("sweep", "width_step_nm", 25.0);
    spec.h1_min_nm = ctx.cfg.get_double("sweep", "etch_min_nm", 165.0);
    spec.h1_max_nm = ctx.cfg.get_double("sweep", "etch_max_nm", 165.0);
    spec.h1_step_nm = ctx.cfg.get_double("sweep", "etch_step_nm", 5.0);
    spec.lambda_um = ctx.cfg.get_double("sweep", "lambda_um", 1.62);
    spec.local_half_span_um = ctx.cfg.get_double("sweep", "local_half_span_um", 0.12);
    spec.local_samples = static_cast<int>(ctx.cfg.get_int("sweep", "local_samples", 7));
    spec.grid = grid_from(ctx.cfg);
    spec.threads = ctx.threads;

    const auto map = gvd_map(g, ctx.materials, spec);

    std::string csv = "w_nm,h1_nm,k2_fs2_mm,ok\n";
    for (std::size_t ih = 0; ih < map.h1_nm.size(); ++ih)
        for (std::size_t iw = 0; iw < map.w_nm.size(); ++iw) {
            csv += fmt(map.w_nm[iw]) + "," + fmt(map.h1_nm[ih]) + ",";
            csv += map.cell_ok(iw, ih) ? fmt(map.at(iw, ih)) : "nan";
            csv += map.cell_ok(iw, ih) ? ",1\n" : ",0\n";
        }
    write_artifact(ctx, "gvd_map.csv", csv);

    json contour;
    contour["lambda_um"] = spec.lambda_um;
    contour["zero_contour"] = json::array();
    for (const auto& pt : map.zero_contour)
        contour["zero_contour"].push_back({{"w_nm", pt[0]}, {"h1_nm", pt[1]}});
    std::size_t failed = 0;
    for (auto ok : map.ok)
        if (!ok) ++failed;
    contour["cells_total"] = map.ok.size();
    contour["cells_failed"] = failed;
    write_artifact(ctx, "gvd_contour.json", contour.dump(2) + "\n");
    finish(ctx);
}

json qpm_report(const Ctx& ctx, const CurvePair& curves, const QpmDesign& design) {
    const double lam_p_um = design.pump_lambda_nm * 1e-3;
    const double lam_s_nm =
        ctx.cfg.get_double("qpm", "signal_wavelength_nm", 2.0 * design.pump_lambda_nm);
    const double lam_i_nm = units::idler_lambda(lam_p_um, lam_s_nm * 1e-3) * 1e3;
    const auto bw = phase_matching_bandwidth(design, curves.pump, curves.signal, curves.signal);
    const auto at_design =
        phase_mismatch(design, curves.pump, curves.signal, curves.signal, lam_s_nm);
    return json{{"poling_period_um", design.poling_period_um},
                {"order", design.order},
                {"length_mm", design.length_mm},
                {"duty", design.duty},
                {"duty_efficiency_factor", qpm_efficiency_factor(design.duty, design.order)},
                {"pump_wavelength_nm", design.pump_lambda_nm},
                {"signal_wavelength_nm", lam_s_nm},
                {"idler_wavelength_nm", lam_i_nm},
                {"n_eff_pump", curves.pump.n_eff(lam_p_um)},
                {"n_eff_signal", curves.signal.n_eff(lam_s_nm * 1e-3)},
                {"n_eff_idler", curves.signal.n_eff(lam_i_nm * 1e-3)},
                {"normalized_mismatch_at_design", at_design.normalized},
                {"bandwidth_thz", bw.bandwidth_thz},
                {"null_low_nm", bw.lambda_null_low_nm},
                {"null_high_nm", bw.lambda_null_high_nm}};
}

std::string phase_mismatch_csv(const CurvePair& curves, const QpmDesign& design,
                               const QpmBandwidth& bw) {
    // sample between 1.6x the first nulls; points past the curve ends skip
    const double omega_p = units::omega_from_lambda(design.pump_lambda_nm * 1e-3);
    const double omega_lo = units::omega_from_lambda(bw.lambda_null_high_nm * 1e-3);
    const double omega_hi = units::omega_from_lambda(bw.lambda_null_low_nm * 1e-3);
    const double half = 1.6 * std::max(omega_hi - omega_p / 2.0, omega_p / 2.0 - omega_lo);
    std::string csv = "lambda_s_nm,delta_k_rad_per_m,normalized_mismatch,sinc2\n";
    const int samples = 241;
    for (int i = 0; i < samples; ++i) {
        const double omega = omega_p / 2.0 - half + 2.0 * half * i / (samples - 1);
        const double lam_s_nm = units::lambda_from_omega(omega) * 1e3;
        try {
            const auto pm =
                phase_mismatch(design, curves.pump, curves.signal, curves.signal, lam_s_nm);
            const double s = units::sinc(pm.normalized * units::pi);
            csv += fmt(lam_s_nm) + "," + fmt(pm.delta_k_rad_per_m) + "," + fmt(pm.normalized) +
                   "," + fmt(s * s) + "\n";
        } catch (const RangeError&) {
        }
    }
    return csv;
}

void cmd_qpm(Ctx& ctx) {
    const auto g = WaveguideGeometry::from_config(ctx.cfg);
    const auto grid = grid_from(ctx.cfg);
    const auto curves = build_curves(ctx, g, grid);
    const auto design = design_from(ctx, curves);
    const auto report = qpm_report(ctx, curves, design);
    write_artifact(ctx, "qpm.json", report.dump(2) + "\n");

    QpmBandwidth bw;
    bw.bandwidth_thz = report["bandwidth_thz"];
    bw.lambda_null_low_nm = report["null_low_nm"];
    bw.lambda_null_high_nm = report["null_high_nm"];
    write_artifact(ctx, "phase_mismatch.csv", phase_mismatch_csv(curves, design, bw));
    finish(ctx);
}

json jsi_summary(const JsiGrid& grid) {
    const auto marg = marginal_signal_spectrum(grid);
    const double bw3 = jsi_antidiagonal_bandwidth_thz(grid);
    return json{{"two_photon_bandwidth_3db_thz", bw3},
                {"marginal_full_bandwidth_thz", marg.full_bandwidth_thz},
                {"marginal_half_bandwidth_thz", marg.half_bandwidth_thz},
                {"marginal_half_bandwidth_nm", marg.half_bandwidth_nm},
                {"total_bandwidth_from_half_thz",
                 spdc_total_bandwidth_thz(marg.half_bandwidth_thz)},
                {"grid_points", grid.omega_s.size()},
                {"pump_center_nm", grid.pump.center_nm},
                {"pump_bandwidth_nm", grid.pump.bandwidth_nm}};
}

std::string jsi_csv(const JsiGrid& grid) {
    // first row/column carry the frequency axes in THz
    std::string csv = "nu_i_thz\\nu_s_thz";
    for (double w : grid.omega_s) csv += "," + fmt(units::thz_from_omega(w));
    csv += "\n";
    const std::size_t n = grid.omega_s.size();
    for (std::size_t ii = 0; ii < n; ++ii) {
        csv += fmt(units::thz_from_omega(grid.omega_i[ii]));
        for (std::size_t is = 0; is < n; ++is) csv += "," + fmt(grid.at(is, ii));
        csv += "\n";
    }
    return csv;
}

std::string marginal_csv(const JsiGrid& grid) {
    const auto marg = marginal_signal_spectrum(grid);
    std::string csv = "lambda_s_nm,intensity\n";
    for (std::size_t q = 0; q < marg.lambda_nm.size(); ++q)
        csv += fmt(marg.lambda_nm[q]) + "," + fmt(marg.intensity[q]) + "\n";
    return csv;
}

void cmd_jsi(Ctx& ctx) {
    const auto g = WaveguideGeometry::from_config(ctx.cfg);
    const auto grid_spec = grid_from(ctx.cfg);
    const auto curves = build_curves(ctx, g, grid_spec);
    const auto design = design_from(ctx, curves);
    const auto pump = pump_from(ctx.cfg);

    JsiSpec spec;
    spec.n_points = static_cast<int>(ctx.cfg.get_int("jsi", "grid_points", 401));
    spec.span_thz = ctx.cfg.get_double("jsi", "span_thz", 0.0);
    spec.margin_factor = ctx.cfg.get_double("jsi", "margin_factor", 1.5);

    const auto grid = jsi(design, curves.pump, curves.signal, curves.signal, pump, spec);
    write_artifact(ctx, "jsi.csv", jsi_csv(grid));
    write_artifact(ctx, "jsi_marginal_signal.csv", marginal_csv(grid));
    json summary = jsi_summary(grid);
    summary["design"] = qpm_report(ctx, curves, design);
    write_artifact(ctx, "jsi.json", summary.dump(2) + "\n");
    finish(ctx);
}

ShgModelInput shg_from(const ConfigFile& cfg) {
    ShgModelInput in;
    in.d33_pm_per_v = cfg.get_double("shg", "d33_pm_per_v", in.d33_pm_per_v);
    in.n_omega = cfg.get_double("shg", "n_omega", in.n_omega);
    in.n_2omega = cfg.get_double("shg", "n_2omega", in.n_2omega);
    in.lambda_2omega_nm = cfg.get_double("shg", "lambda_2omega_nm", in.lambda_2omega_nm);
    in.a_eff_um2 = cfg.get_double("shg", "a_eff_um2", in.a_eff_um2);
    in.zeta = cfg.get_double("shg", "zeta", in.zeta);
    in.delta_k_rad_per_m = cfg.get_double("shg", "delta_k_rad_per_m", 0.0);
    in.length_cm = cfg.get_double("shg", "length_cm", in.length_cm);
    return in;
}

void cmd_shg(Ctx& ctx) {
    const auto in = shg_from(ctx.cfg);
    ShgModelInput matched = in;
    matched.delta_k_rad_per_m = 0.0;
    const double eta_peak = shg_efficiency(matched);
    const double eta_at = shg_efficiency(in);

    json out{{"eta_theory_pct_per_w_cm2", eta_peak},
             {"eta_at_delta_k_pct_per_w_cm2", eta_at},
             {"delta_k_rad_per_m", in.delta_k_rad_per_m},
             {"inputs",
              {{"d33_pm_per_v", in.d33_pm_per_v},
               {"n_omega", in.n_omega},
               {"n_2omega", in.n_2omega},
               {"lambda_2omega_nm", in.lambda_2omega_nm},
               {"a_eff_um2", in.a_eff_um2},
               {"zeta", in.zeta},
               {"length_cm", in.length_cm}}}};
    write_artifact(ctx, "shg.json", out.dump(2) + "\n");

    // Constant-index tuning curve: Δk(λ_2ω) = 2π(n_2ω − n_ω)/λ_2ω − 2πm/Λ,
    // with Λ chosen to phase-match the design wavelength.
    const double dn = in.n_2omega - in.n_omega;
    if (dn > 0.0) {
        const double period_um = in.lambda_2omega_nm * 1e-3 / dn;
        std::string csv = "lambda_omega_nm,lambda_2omega_nm,delta_k_rad_per_m,eta_pct_per_w_cm2\n";
        for (int i = 0; i <= 240; ++i) {
            const double lam2_nm = in.lambda_2omega_nm - 6.0 + 0.05 * i;
            const double dk_um =
                2.0 * units::pi * dn / (lam2_nm * 1e-3) - 2.0 * units::pi / period_um;
            ShgModelInput pt = in;
            pt.lambda_2omega_nm = lam2_nm;
            pt.delta_k_rad_per_m = dk_um * 1e6;
            csv += fmt(2.0 * lam2_nm) + "," + fmt(lam2_nm) + "," + fmt(pt.delta_k_rad_per_m) +
                   "," + fmt(shg_efficiency(pt)) + "\n";
        }
        write_artifact(ctx, "shg_tuning.csv", csv);
    }
    finish(ctx);
}

SourceConfig source_from(const Ctx& ctx) {
    const auto& cfg = ctx.cfg;
    SourceConfig s;
    s.pair_rate_hz = cfg.get_double("tags", "pair_rate_hz", s.pair_rate_hz);
    s.duration_s = cfg.get_double("tags", "duration_s", s.duration_s);
    s.eta_s = cfg.get_double("tags", "eta_s", s.eta_s);
    s.eta_i = cfg.get_double("tags", "eta_i", s.eta_i);
    s.dark_s_hz = cfg.get_double("tags", "dark_s_hz", s.dark_s_hz);
    s.dark_i_hz = cfg.get_double("tags", "dark_i_hz", s.dark_i_hz);
    s.jitter_sigma_ps = cfg.get_double("tags", "jitter_sigma_ps", s.jitter_sigma_ps);
    s.splitter = cfg.get_bool("tags", "splitter", s.splitter);
    s.seed = static_cast<std::uint64_t>(cfg.get_int("tags", "seed", 1));
    if (ctx.seed) s.seed = *ctx.seed;
    s.validate();
    return s;
}

void cmd_tags_simulate(Ctx& ctx, const std::string& out_path) {
    const auto src = source_from(ctx);
    const auto stream = simulate_tags(src);
    const std::string path = out_path.empty() ? join_path(ctx.out_dir, "tags.ttag") : out_path;
    write_tag_file(path, stream);
    ctx.manifest.add_output(path);

    json info{{"records", stream.records.size()},
              {"channel_count", stream.channel_count},
              {"pair_rate_hz", src.pair_rate_hz},
              {"duration_s", src.duration_s},
              {"seed", src.seed}};
    write_artifact(ctx, "tags_simulate.json", info.dump(2) + "\n");
    finish(ctx);
}

AnalyzeParams analyze_from(const ConfigFile& cfg) {
    AnalyzeParams p;
    p.bin_ps = cfg.get_int("analyze", "bin_ps", p.bin_ps);
    p.span_ps = cfg.get_int("analyze", "span_ps", p.span_ps);
    p.peak_window_ps = cfg.get_int("analyze", "window_ps", p.peak_window_ps);
    p.floor_min_ps = cfg.get_int("analyze", "floor_min_ps", p.floor_min_ps);
    p.splitter_factor = static_cast<int>(cfg.get_int("analyze", "splitter_factor", 2));
    p.duration_s = cfg.get_double("analyze", "duration_s", 0.0);
    p.g2_resamples = static_cast<int>(cfg.get_int("analyze", "g2_resamples", 1000));
    p.g2_factor_2 = cfg.get_bool("analyze", "g2_factor_2", true);
    return p;
}

void cmd_tags_analyze(Ctx& ctx, const std::string& tag_path, std::int64_t window_override_ps,
                      const std::string& report_path) {
    const auto stream = read_tag_file(tag_path);
    AnalyzeParams params = analyze_from(ctx.cfg);
    if (window_override_ps > 0) params.peak_window_ps = window_override_ps;
    if (ctx.seed) params.g2_seed = *ctx.seed;
    const auto rep = analyze_stream(stream, params);

    std::string hist_csv = "delay_ps,counts\n";
    for (std::size_t k = 0; k < rep.histogram.counts.size(); ++k)
        hist_csv += fmt(rep.histogram.delay_of_bin_ps(k)) + "," +
                    std::to_string(rep.histogram.counts[k]) + "\n";
    write_artifact(ctx, "coincidence_histogram.csv", hist_csv);

    json out{{"input", tag_path},
             {"duration_s", rep.duration_s},
             {"singles_signal_hz", rep.c_s_hz},
             {"singles_idler_hz", rep.c_i_hz},
             {"coincidence_rate_hz", rep.c_si_hz},
             {"accidental_floor_per_bin", rep.accidental_floor_per_bin},
             {"car", rep.car.car},
             {"car_sigma", rep.car.sigma},
             {"car_lower_bound_only", rep.car.lower_bound},
             {"pcr_hz", rep.pcr_hz},
             {"window_ps", params.peak_window_ps},
             {"bin_ps", params.bin_ps},
             {"span_ps", params.span_ps},
             {"floor_min_ps", params.floor_min_ps},
             {"splitter_factor", params.splitter_factor}};
    if (rep.g2) {
        out["g2_heralded"] = {{"value", rep.g2->g2},
                              {"sigma", rep.g2->sigma},
                              {"n_signal", rep.g2->n_signal},
                              {"c_si1", rep.g2->c_si1},
                              {"c_si2", rep.g2->c_si2},
                              {"c_si1i2", rep.g2->c_si1i2},
                              {"factor_2_convention", params.g2_factor_2}};
    }
    const std::string text = out.dump(2) + "\n";
    if (report_path.empty()) {
        write_artifact(ctx, "tags_report.json", text);
    } else {
        atomic_write_file(report_path, text);
        ctx.manifest.add_output(report_path);
    }
    finish(ctx);
}

void cmd_reproduce(Ctx& ctx) {
    const auto g = WaveguideGeometry::from_config(ctx.cfg);
    const auto grid = grid_from(ctx.cfg);
    json summary;

    // cross-section modes at the pump and degenerate signal wavelengths
    const double lam_p_um = ctx.cfg.get_double("qpm", "pump_wavelength_nm", 810.6) * 1e-3;
    const double lam_s_um = ctx.cfg.get_double("qpm", "signal_wavelength_nm", 1621.2) * 1e-3;
    const auto m_pump = fundamental_te(g, ctx.materials, lam_p_um, grid);
    const auto m_sig = fundamental_te(g, ctx.materials, lam_s_um, grid);
    for (const auto& p : export_mode(m_pump, join_path(ctx.out_dir, "mode_pump_te")))
        ctx.manifest.add_output(p);
    for (const auto& p : export_mode(m_sig, join_path(ctx.out_dir, "mode_signal_te")))
        ctx.manifest.add_output(p);
    summary["mode_pump"] = mode_json(m_pump);
    summary["mode_signal"] = mode_json(m_sig);
    summary["mode_overlap"] = mode_overlap(m_pump, m_sig);
    summary["leakage"] = leakage_json(leakage_margin(g, ctx.materials, lam_p_um, grid));

    // dispersion + GVD across the transmission band
    const auto curves = build_curves(ctx, g, grid);
    {
        std::string csv = "lambda_um,n_eff,k2_fs2_mm\n";
        for (double lam = 1.20; lam <= 1.80 + 1e-9; lam += 0.02)
            csv += fmt(lam) + "," + fmt(curves.signal.n_eff(lam)) + "," +
                   fmt(curves.signal.gvd(lam)) + "\n";
        write_artifact(ctx, "gvd_reference.csv", csv);
        summary["gvd_at_1620_fs2_mm"] = curves.signal.gvd(1.62);
    }

    // QPM design and phase-matching bandwidth
    const auto design = design_from(ctx, curves);
    const json qpm = qpm_report(ctx, curves, design);
    write_artifact(ctx, "qpm.json", qpm.dump(2) + "\n");
    QpmBandwidth bw;
    bw.bandwidth_thz = qpm["bandwidth_thz"];
    bw.lambda_null_low_nm = qpm["null_low_nm"];
    bw.lambda_null_high_nm = qpm["null_high_nm"];
    write_artifact(ctx, "phase_mismatch.csv", phase_mismatch_csv(curves, design, bw));
    summary["qpm"] = qpm;

    // two-photon spectra
    const auto pump = pump_from(ctx.cfg);
    JsiSpec jspec;
    jspec.n_points = static_cast<int>(ctx.cfg.get_int("jsi", "grid_points", 401));
    jspec.span_thz = ctx.cfg.get_double("jsi", "span_thz", 0.0);
    jspec.margin_factor = ctx.cfg.get_double("jsi", "margin_factor", 1.5);
    const auto grid_jsi = jsi(design, curves.pump, curves.signal, curves.signal, pump, jspec);
    write_artifact(ctx, "jsi.csv", jsi_csv(grid_jsi));
    write_artifact(ctx, "jsi_marginal_signal.csv", marginal_csv(grid_jsi));
    summary["jsi"] = jsi_summary(grid_jsi);

    // SHG efficiency, both from the bundled constants and from this chain
    const auto shg_ref = shg_from(ctx.cfg);
    summary["shg_eta_reference_constants"] = shg_efficiency(shg_ref);
    ShgModelInput shg_chain = shg_ref;
    shg_chain.n_omega = m_sig.n_eff;
    shg_chain.n_2omega = m_pump.n_eff;
    shg_chain.a_eff_um2 = std::cbrt(m_sig.a_eff_um2 * m_sig.a_eff_um2 * m_pump.a_eff_um2);
    shg_chain.zeta = mode_overlap(m_pump, m_sig);
    summary["shg_eta_chain"] = shg_efficiency(shg_chain);
    summary["shg_chain_inputs"] = {{"n_omega", shg_chain.n_omega},
                                   {"n_2omega", shg_chain.n_2omega},
                                   {"a_eff_um2", shg_chain.a_eff_um2},
                                   {"zeta", shg_chain.zeta}};

    write_artifact(ctx, "summary.json", summary.dump(2) + "\n");
    finish(ctx);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"thin-film LN SPDC design toolkit"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    std::string config_path, materials_path, out_dir = ".";
    int threads = 0;
    std::uint64_t seed_value = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "sectioned key-value config file");
    app.add_option("--materials", materials_path, "material table override");
    app.add_option("--out-dir", out_dir, "artifact output directory");
    app.add_option("--threads", threads, "worker threads for sweeps (0 = hardware)");
    app.add_option("--seed", seed_value, "override the tag-simulation seed")
        ->each([&](const std::string&) { seed_set = true; });

    auto* modes = app.add_subcommand("modes", "solve cross-section eigenmodes");
    std::string geometry_path;
    double lambda_um = 0.0, grid_override = 0.0;
    modes->add_option("--geometry", geometry_path, "config file with [geometry]")->required();
    modes->add_option("--lambda", lambda_um, "wavelength in um")->required();
    modes->add_option("--grid", grid_override, "grid spacing override in nm");

    auto* sweep = app.add_subcommand("sweep-gvd", "k'' map over (w, h1) with zero contour");
    auto* qpm_cmd = app.add_subcommand("qpm", "poling period, mismatch curve and bandwidth");
    auto* jsi_cmd = app.add_subcommand("jsi", "joint spectral intensity and marginals");
    auto* shg_cmd = app.add_subcommand("shg", "normalized SHG efficiency model");

    auto* tags = app.add_subcommand("tags", "time-tag simulation and analysis");
    tags->require_subcommand(1);
    auto* tsim = tags->add_subcommand("simulate", "generate a synthetic tag stream");
    std::string tag_out;
    tsim->add_option("--out", tag_out, "output tag file (default <out-dir>/tags.ttag)");
    auto* tana = tags->add_subcommand("analyze", "coincidence statistics of a tag file");
    std::string tag_in, report_path;
    std::int64_t window_ps = 0;
    tana->add_option("path", tag_in, "tag file")->required();
    tana->add_option("--window-ps", window_ps, "peak coincidence window (total width, ps)");
    tana->add_option("--report", report_path, "report JSON path");

    auto* repro = app.add_subcommand(
        "reproduce-paper", "run the full reference-device chain from the bundled config");

    // global options may appear after the subcommand name
    for (auto* sub : app.get_subcommands({})) {
        sub->fallthrough();
        for (auto* nested : sub->get_subcommands({})) nested->fallthrough();
    }

    CLI11_PARSE(app, argc, argv);

    try {
        std::optional<std::uint64_t> seed;
        if (seed_set) seed = seed_value;

        if (modes->parsed()) {
            Ctx ctx = make_ctx(geometry_path, "", materials_path, out_dir, threads, seed, "modes");
            cmd_modes(ctx, lambda_um, grid_override);
        } else if (sweep->parsed() || qpm_cmd->parsed() || jsi_cmd->parsed() ||
                   shg_cmd->parsed()) {
            const std::string name = app.get_subcommands().front()->get_name();
            if (config_path.empty()) throw ConfigError(name + ": --config is required");
            Ctx ctx = make_ctx(config_path, "", materials_path, out_dir, threads, seed, name);
            if (sweep->parsed())
                cmd_sweep_gvd(ctx);
            else if (qpm_cmd->parsed())
                cmd_qpm(ctx);
            else if (jsi_cmd->parsed())
                cmd_jsi(ctx);
            else
                cmd_shg(ctx);
        } else if (tags->parsed()) {
            if (config_path.empty() && tsim->parsed())
                throw ConfigError("tags simulate: --config is required");
            const std::string cmd = tsim->parsed() ? "tags simulate" : "tags analyze";
            Ctx ctx = make_ctx(config_path, config_path.empty() ? "[analyze]\n" : "",
                               materials_path, out_dir, threads, seed, cmd);
            if (tsim->parsed())
                cmd_tags_simulate(ctx, tag_out);
            else
                cmd_tags_analyze(ctx, tag_in, window_ps, report_path);
        } else if (repro->parsed()) {
            Ctx ctx = make_ctx(config_path, lnspdc_cli::bundled_paper_cfg(), materials_path,
                               out_dir, threads, seed, "reproduce-paper");
            cmd_reproduce(ctx);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric error: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
