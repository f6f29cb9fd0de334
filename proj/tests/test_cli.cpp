#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "bedrecon/cli/commands.hpp"
#include "bedrecon/io/picks_io.hpp"
#include "bedrecon/io/raster_io.hpp"

using namespace bedrecon;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path fresh_dir(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "bedrecon_cli_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

// Desk-scale configuration: a 48x48 scene, short schedules, wide-open split.
json desk_config(const fs::path& out_dir) {
    json j;
    j["seed"] = 7;
    j["paths"] = {{"output_dir", out_dir.string()}};
    j["synth"] = {{"rows", 48},        {"cols", 48},          {"spacing", 150.0},
                  {"line_spacing", 8}, {"flow_speed", 120.0}, {"prior_bias_amplitude", 25.0},
                  {"trough_width", 10.0}};
    j["split"] = {{"axis", "vertical"}, {"delta_px", 8}};
    j["loss"] = {{"scales", {1, 2}},
                 {"smooth_early_size", 5},
                 {"smooth_early_sigma", 1.5},
                 {"smooth_late_size", 5},
                 {"smooth_late_sigma", 1.5}};
    j["schedule"] = {{"epochs", 120}};
    j["solver"] = {{"max_epochs", 120}, {"lr", 0.02}, {"monitor_every", 10}, {"patience", 120},
                   {"cosine_t0", 60}};
    j["tile"] = {{"patch", 32}, {"stride", 8}, {"border", 8}};
    return j;
}

json with_scene_paths(json j, const fs::path& scene_dir) {
    j["paths"]["surface"] = (scene_dir / "surface.asc").string();
    j["paths"]["vx"] = (scene_dir / "vx.asc").string();
    j["paths"]["vy"] = (scene_dir / "vy.asc").string();
    j["paths"]["smb"] = (scene_dir / "smb.asc").string();
    j["paths"]["dhdt"] = (scene_dir / "dhdt.asc").string();
    j["paths"]["prior_bed"] = (scene_dir / "prior_bed.asc").string();
    j["paths"]["picks"] = (scene_dir / "picks.csv").string();
    j["paths"]["bed_true"] = (scene_dir / "bed_true.asc").string();
    return j;
}

RunConfig config_from(const json& j) { return run_config_from_json(j); }

}  // namespace

TEST_CASE("config parsing, overrides and validation") {
    const json base = desk_config("/tmp");
    RunConfig cfg = config_from(base);
    CHECK(cfg.seed == 7);
    CHECK(cfg.solver.lr == doctest::Approx(0.02));
    CHECK(cfg.loss.lambda_data == doctest::Approx(2.0));  // defaults expand

    // Unknown keys are rejected.
    json bad = base;
    bad["losss"] = json::object();
    CHECK_THROWS_AS((void)config_from(bad), ParameterError);

    json bad_nested = base;
    bad_nested["solver"]["learning_rate"] = 0.1;
    CHECK_THROWS_AS((void)config_from(bad_nested), ParameterError);

    // Invariants are enforced at load time.
    json bad_beta = base;
    bad_beta["loss"]["beta_par"] = 2.0;
    CHECK_THROWS_AS((void)config_from(bad_beta), ParameterError);

    // --set style overrides go through the dotted-path writer.
    const fs::path dir = fresh_dir("config");
    const fs::path cfg_path = dir / "config.json";
    std::ofstream(cfg_path) << base.dump();
    const RunConfig overridden =
        load_run_config(cfg_path.string(), {"solver.lr=0.5", "split.axis=horizontal"});
    CHECK(overridden.solver.lr == doctest::Approx(0.5));
    CHECK(overridden.split.axis == SplitAxis::Horizontal);
}

TEST_CASE("synth command: determinism, manifest, scene invariants") {
    const fs::path dir_a = fresh_dir("synth_a");
    const fs::path dir_b = fresh_dir("synth_b");

    run_synth(config_from(desk_config(dir_a)));
    run_synth(config_from(desk_config(dir_b)));

    for (const char* name : {"surface.asc", "vx.asc", "vy.asc", "smb.asc", "dhdt.asc",
                             "prior_bed.asc", "bed_true.asc", "picks.csv"}) {
        CHECK(fs::exists(dir_a / name));
        CHECK(read_file(dir_a / name) == read_file(dir_b / name));  // byte-identical
    }

    // The manifest lists every output with its content hash.
    const json manifest = json::parse(read_file(dir_a / "manifest.json"));
    CHECK(manifest["command"] == "synth");
    CHECK(manifest["outputs"].size() == 8);
    for (const auto& out : manifest["outputs"]) {
        const fs::path p = dir_a / out["path"].get<std::string>();
        CHECK(file_hash(p.string()) == out["fnv1a64"].get<std::string>());
    }
    CHECK(manifest["config"]["solver"]["lr"] == doctest::Approx(0.02));

    // Re-read scene satisfies the prior-thickness identity.
    const Field s = read_raster(dir_a / "surface.asc");
    const Field b_p = read_raster(dir_a / "prior_bed.asc");
    CHECK(s.geom.same_grid(b_p.geom));
    CHECK((s.values - b_p.values).minCoeff() > 0.0);  // positive prior thickness
}

TEST_CASE("reconstruct command: outputs, identity, determinism") {
    const fs::path scene_dir = fresh_dir("rec_scene");
    run_synth(config_from(desk_config(scene_dir)));

    const fs::path out_a = fresh_dir("rec_a");
    json ja = with_scene_paths(desk_config(out_a), scene_dir);
    run_reconstruct(config_from(ja));

    for (const char* name : {"r_hat.asc", "h_hat.asc", "b_hat.asc", "history.csv", "manifest.json"})
        CHECK(fs::exists(out_a / name));

    // s - b_hat == h_hat within the 9-significant-digit format precision.
    const Field s = read_raster(scene_dir / "surface.asc");
    const Field b_hat = read_raster(out_a / "b_hat.asc");
    const Field h_hat = read_raster(out_a / "h_hat.asc");
    CHECK((s.values - b_hat.values - h_hat.values).abs().maxCoeff() < 1e-4);

    // History has one row per epoch plus a header.
    std::ifstream hist(out_a / "history.csv");
    std::string line;
    long rows = 0;
    std::getline(hist, line);
    CHECK(line == "epoch,radar,mass,flow_tv,laplacian,nonneg,prior,total,lr,monitor");
    while (std::getline(hist, line))
        if (!line.empty()) ++rows;
    CHECK(rows == 120);

    // Bit-identical rerun.
    const fs::path out_b = fresh_dir("rec_b");
    run_reconstruct(config_from(with_scene_paths(desk_config(out_b), scene_dir)));
    CHECK(read_file(out_a / "r_hat.asc") == read_file(out_b / "r_hat.asc"));

    // Tiled mode with dihedral averaging also runs end to end.
    const fs::path out_c = fresh_dir("rec_c");
    json jc = with_scene_paths(desk_config(out_c), scene_dir);
    jc["reconstruct"] = {{"mode", "tiled"}, {"jobs", 2}};
    jc["schedule"]["epochs"] = 30;
    jc["solver"]["max_epochs"] = 30;
    run_reconstruct(config_from(jc));
    CHECK(fs::exists(out_c / "b_hat.asc"));
    const json mc = json::parse(read_file(out_c / "manifest.json"));
    CHECK(mc.contains("train_tiles"));
}

TEST_CASE("baseline command writes rasters and the variogram log") {
    const fs::path scene_dir = fresh_dir("base_scene");
    run_synth(config_from(desk_config(scene_dir)));

    const fs::path out = fresh_dir("base_out");
    const json j = with_scene_paths(desk_config(out), scene_dir);

    run_baseline(config_from(j), "idw");
    CHECK(fs::exists(out / "idw_bed.asc"));

    // IDW reproduces pick values at in-core pick cells (exact hit).
    const Field idw_bed = read_raster(out / "idw_bed.asc");
    const Field bed_true = read_raster(scene_dir / "bed_true.asc");
    const RadarPicks picks = read_picks(scene_dir / "picks.csv");
    const BlockSplit split = block_split(idw_bed.geom, config_from(j).split);
    long checked = 0;
    for (const Pick& p : picks.records) {
        const auto [i, jcol] = idw_bed.geom.cell_of(p.x, p.y);
        if (!split.train_core(i, jcol)) continue;
        CHECK(idw_bed(i, jcol) == doctest::Approx(p.bed).epsilon(1e-6));
        ++checked;
    }
    CHECK(checked > 0);

    run_baseline(config_from(j), "kriging");
    CHECK(fs::exists(out / "kriging_bed.asc"));
    const json vario = json::parse(read_file(out / "kriging_variogram.json"));
    CHECK(vario.contains("nugget"));
    CHECK(vario.contains("sill"));
    CHECK(vario.contains("range_m"));

    CHECK_THROWS_AS(run_baseline(config_from(j), "spline"), ParameterError);
}

TEST_CASE("eval command: self-evaluation and stable report keys") {
    const fs::path scene_dir = fresh_dir("eval_scene");
    run_synth(config_from(desk_config(scene_dir)));

    const fs::path out = fresh_dir("eval_out");
    const json j = with_scene_paths(desk_config(out), scene_dir);
    const RunConfig cfg = config_from(j);

    const std::string ref = (scene_dir / "bed_true.asc").string();
    const MetricsReport report = run_eval(cfg, ref, ref);

    CHECK(report.orientation.is_identity());
    CHECK(report.reference.mae == 0.0);
    CHECK(report.reference.rmse == 0.0);
    CHECK(report.reference.r2 == doctest::Approx(1.0));
    CHECK(report.ssim_value == doctest::Approx(1.0));
    CHECK(std::isinf(report.psnr_value.db));
    REQUIRE(report.stratified.size() == 3);
    CHECK(report.stratified[0].label == "[0,2]");
    CHECK(report.stratified[1].label == "(2,6]");
    CHECK(report.stratified[2].label == "(6,inf)");

    const json mj = json::parse(read_file(out / "metrics.json"));
    CHECK(mj["reference"]["rmse_m"] == 0.0);
    CHECK(mj["reference"]["psnr_db"] == "inf");
    CHECK(mj["stratified_rmse"].size() == 3);
    CHECK(fs::exists(out / "metrics.txt"));

    // Geometry mismatch is a dimension error.
    const fs::path small = fresh_dir("eval_small");
    json js = desk_config(small);
    js["synth"]["rows"] = 32;
    js["synth"]["cols"] = 32;
    run_synth(config_from(js));
    CHECK_THROWS_AS((void)run_eval(cfg, (small / "bed_true.asc").string(), ref), DimensionError);
}

#ifdef BEDRECON_CLI_PATH
TEST_CASE("command-line binary smoke test") {
    const fs::path dir = fresh_dir("cli_bin");
    const fs::path cfg_path = dir / "config.json";
    std::ofstream(cfg_path) << desk_config(dir / "out").dump();

    const std::string cmd = std::string(BEDRECON_CLI_PATH) + " synth --config " +
                            cfg_path.string() + " --set synth.rows=24 --set synth.cols=24 > " +
                            (dir / "stdout.txt").string() + " 2>&1";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(fs::exists(dir / "out" / "bed_true.asc"));

    const Field bed = read_raster(dir / "out" / "bed_true.asc");
    CHECK(bed.rows() == 24);  // the --set override took effect

    // Unknown subcommands exit nonzero.
    const std::string bad = std::string(BEDRECON_CLI_PATH) + " frobnicate > /dev/null 2>&1";
    CHECK(std::system(bad.c_str()) != 0);
}
#endif
