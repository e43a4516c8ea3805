// Integration tests that drive the installed CLI binary end to end:
// artifact layout, determinism, exit-code contract, config strictness.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = LNSPDC_CLI_PATH;

struct RunResult {
    int exit_code;
};

RunResult run(const std::string& args) {
    const std::string cmd = kCli + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return {WEXITSTATUS(raw)};
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("lnspdc_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json slurp_json(const fs::path& p) { return json::parse(slurp(p)); }

void write(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

// Small geometry/solver config: coarse grid keeps each CLI solve fast.
const char* kFastConfig = R"(
[geometry]
top_width_nm = 1800
etch_depth_nm = 165
film_thickness_nm = 600
sidewall_angle_deg = 60
oxide_thickness_nm = 2000

[solver]
grid_nm = 40

[dispersion]
pump_lambda_min_um = 0.78
pump_lambda_max_um = 0.84
pump_spacing_nm = 10
signal_lambda_min_um = 1.38
signal_lambda_max_um = 1.90
signal_spacing_nm = 40

[qpm]
pump_wavelength_nm = 810.6
signal_wavelength_nm = 1621.2
order = 1
length_mm = 5.7
duty = 0.5

[pump]
center_nm = 810.6
bandwidth_nm = 1.1
shape = gaussian

[jsi]
grid_points = 101

[tags]
pair_rate_hz = 2e5
duration_s = 0.5
eta_s = 0.5
eta_i = 0.5
dark_s_hz = 50
dark_i_hz = 50
jitter_sigma_ps = 40
splitter = true
seed = 777

[analyze]
splitter_factor = 1
)";

} // namespace

TEST_CASE("qpm command emits the design json and mismatch curve") {
    const auto dir = fresh_dir("qpm");
    write(dir / "cfg.cfg", kFastConfig);
    const auto r = run("qpm --config " + (dir / "cfg.cfg").string() + " --out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);

    const json q = slurp_json(dir / "qpm.json");
    CHECK(q["poling_period_um"].get<double>() > 4.0);
    CHECK(q["poling_period_um"].get<double>() < 5.0);
    CHECK(std::abs(q["normalized_mismatch_at_design"].get<double>()) < 1e-9);
    CHECK(q["bandwidth_thz"].get<double>() > 20.0);

    const std::string mismatch = slurp(dir / "phase_mismatch.csv");
    CHECK(mismatch.rfind("lambda_s_nm,", 0) == 0);

    // manifest lists every artifact with its content hash
    const json m = slurp_json(dir / "manifest.json");
    CHECK(m["outputs"].size() == 2);
    CHECK(m["config_hash"].get<std::string>().size() == 16);
}

TEST_CASE("modes command writes field grids with sidecars") {
    const auto dir = fresh_dir("modes");
    write(dir / "geom.cfg", kFastConfig);
    const auto r = run("modes --geometry " + (dir / "geom.cfg").string() +
                       " --lambda 1.62 --grid 40 --out-dir " + dir.string());
    REQUIRE(r.exit_code == 0);

    const json modes = slurp_json(dir / "modes.json");
    REQUIRE(modes["modes"].size() >= 1);
    CHECK(modes["modes"][0]["n_eff"].get<double>() > 1.8);
    CHECK(modes["modes"][0]["guided"].get<bool>());
    CHECK(modes["leakage"]["margin"].get<double>() > -0.05);

    const std::string field_csv = modes["modes"][0]["field_csv"].get<std::string>();
    CHECK(fs::exists(dir / field_csv));
    const json sidecar = slurp_json(dir / (field_csv.substr(0, field_csv.size() - 4) + ".json"));
    CHECK(sidecar["n_eff"].get<double>() == modes["modes"][0]["n_eff"].get<double>());
}

TEST_CASE("tags pipeline round-trips and is seed-deterministic") {
    const auto dir = fresh_dir("tags");
    write(dir / "cfg.cfg", kFastConfig);
    const std::string cfg = (dir / "cfg.cfg").string();

    REQUIRE(run("tags simulate --config " + cfg + " --out " + (dir / "a.ttag").string() +
                " --out-dir " + dir.string()).exit_code == 0);
    REQUIRE(run("tags analyze " + (dir / "a.ttag").string() + " --config " + cfg +
                " --window-ps 1000 --report " + (dir / "ra.json").string() + " --out-dir " +
                dir.string()).exit_code == 0);

    // identical seed: identical stream and identical report
    REQUIRE(run("tags simulate --config " + cfg + " --out " + (dir / "b.ttag").string() +
                " --out-dir " + dir.string()).exit_code == 0);
    CHECK(slurp(dir / "a.ttag") == slurp(dir / "b.ttag"));
    REQUIRE(run("tags analyze " + (dir / "b.ttag").string() + " --config " + cfg +
                " --window-ps 1000 --report " + (dir / "rb.json").string() + " --out-dir " +
                dir.string()).exit_code == 0);
    json ra = slurp_json(dir / "ra.json");
    json rb = slurp_json(dir / "rb.json");
    ra.erase("input");
    rb.erase("input");
    CHECK(ra == rb);

    // overriding the seed changes the stream
    REQUIRE(run("tags simulate --config " + cfg + " --seed 31337 --out " +
                (dir / "c.ttag").string() + " --out-dir " + dir.string()).exit_code == 0);
    CHECK(slurp(dir / "a.ttag") != slurp(dir / "c.ttag"));

    // report carries the statistics blocks
    CHECK(ra["pcr_hz"].get<double>() > 0.0);
    CHECK(ra.contains("g2_heralded"));
}

TEST_CASE("exit codes separate config errors from numeric failures") {
    const auto dir = fresh_dir("exitcodes");

    // unknown key in a known section: config error, exit 2
    write(dir / "typo.cfg", "[geometry]\ntop_wdith_nm = 1800\n");
    CHECK(run("qpm --config " + (dir / "typo.cfg").string() + " --out-dir " + dir.string())
              .exit_code == 2);

    // unknown section: exit 2
    write(dir / "badsec.cfg", "[geometri]\ntop_width_nm = 1800\n");
    CHECK(run("qpm --config " + (dir / "badsec.cfg").string() + " --out-dir " + dir.string())
              .exit_code == 2);

    // missing config file: exit 2
    CHECK(run("qpm --config " + (dir / "absent.cfg").string() + " --out-dir " + dir.string())
              .exit_code == 2);

    // numeric failure: analyze a nonexistent-tag-format file -> config error
    write(dir / "junk.ttag", "this is not a tag file");
    CHECK(run("tags analyze " + (dir / "junk.ttag").string() + " --out-dir " + dir.string())
              .exit_code == 2);

    // numeric failure class: the curves build but end before the first
    // sinc null, so the bandwidth search walks off the sampled range
    std::string narrow = kFastConfig;
    const auto pos = narrow.find("signal_lambda_min_um = 1.38");
    narrow.replace(pos, 27, "signal_lambda_min_um = 1.50");
    const auto pos2 = narrow.find("signal_lambda_max_um = 1.90");
    narrow.replace(pos2, 27, "signal_lambda_max_um = 1.75");
    const auto pos3 = narrow.find("signal_spacing_nm = 40");
    narrow.replace(pos3, 22, "signal_spacing_nm = 25");
    write(dir / "narrow.cfg", narrow);
    CHECK(run("qpm --config " + (dir / "narrow.cfg").string() + " --out-dir " + dir.string())
              .exit_code == 3);

    // partial outputs are never left behind on failure
    CHECK_FALSE(fs::exists(dir / "qpm.json"));
}

TEST_CASE("shg command honors the config and emits the tuning curve") {
    const auto dir = fresh_dir("shg");
    write(dir / "cfg.cfg",
          "[shg]\nd33_pm_per_v = 27\nn_omega = 1.92\nn_2omega = 2.099\n"
          "lambda_2omega_nm = 810\na_eff_um2 = 1.106\nzeta = 0.93\n"
          "delta_k_rad_per_m = 0\nlength_cm = 0.57\n");
    REQUIRE(run("shg --config " + (dir / "cfg.cfg").string() + " --out-dir " + dir.string())
                .exit_code == 0);
    const json s = slurp_json(dir / "shg.json");
    CHECK(s["eta_theory_pct_per_w_cm2"].get<double>() ==
          doctest::Approx(3384.339469512408).epsilon(1e-12));
    CHECK(fs::exists(dir / "shg_tuning.csv"));
}

TEST_CASE("sweep-gvd emits the map and contour artifacts") {
    const auto dir = fresh_dir("sweep");
    std::string cfg = kFastConfig;
    cfg += "\n[sweep]\nwidth_min_nm = 1800\nwidth_max_nm = 1800\n"
           "etch_min_nm = 330\netch_max_nm = 430\netch_step_nm = 100\n"
           "lambda_um = 1.62\nlocal_half_span_um = 0.12\nlocal_samples = 7\n";
    write(dir / "cfg.cfg", cfg);
    REQUIRE(run("sweep-gvd --config " + (dir / "cfg.cfg").string() + " --out-dir " + dir.string())
                .exit_code == 0);
    const std::string map = slurp(dir / "gvd_map.csv");
    CHECK(map.rfind("w_nm,h1_nm,k2_fs2_mm,ok", 0) == 0);
    const json contour = slurp_json(dir / "gvd_contour.json");
    CHECK(contour["cells_total"].get<int>() == 2);
    CHECK(contour["cells_failed"].get<int>() == 0);
    REQUIRE(contour["zero_contour"].size() == 1); // the real zero sits in this etch band
}
