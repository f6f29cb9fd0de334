#include "bedrecon/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "bedrecon/baselines/idw.hpp"
#include "bedrecon/grid/distance.hpp"
#include "bedrecon/io/picks_io.hpp"
#include "bedrecon/io/raster_io.hpp"
#include "bedrecon/solve/tta.hpp"

namespace bedrecon {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string fnv1a64(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot hash missing file " + path);
    std::uint64_t h = 1469598103934665603ull;
    char buf[8192];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

class Manifest {
  public:
    Manifest(std::string command, const RunConfig& cfg, fs::path dir)
        : dir_(std::move(dir)) {
        j_["command"] = std::move(command);
        j_["seed"] = cfg.seed;
        j_["config"] = to_json(cfg);
        j_["outputs"] = json::array();
    }

    void add_output(const fs::path& path) {
        j_["outputs"].push_back({{"path", path.filename().string()}, {"fnv1a64", file_hash(path.string())}});
    }

    json& extra() { return j_; }

    void write() const {
        const fs::path p = dir_ / "manifest.json";
        std::ofstream out(p);
        if (!out) throw IoError("cannot write manifest " + p.string());
        out << j_.dump(2) << "\n";
    }

  private:
    fs::path dir_;
    json j_;
};

fs::path ensure_output_dir(const RunConfig& cfg) {
    const fs::path dir = cfg.resolved_output_dir();
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw IoError("cannot create output directory " + dir.string());
    return dir;
}

void write_field(const fs::path& dir, const char* name, const Field& f, Manifest& manifest) {
    const fs::path p = dir / name;
    write_raster(p, f);
    manifest.add_output(p);
}

struct LoadedScene {
    Scene scene;
    RadarPicks picks;
    size_t dropped = 0;
};

LoadedScene load_scene(const RunConfig& cfg) {
    const auto need = [](const std::string& p, const char* what) {
        if (p.empty()) throw ParameterError(std::string("config paths.") + what + " is required");
        if (!fs::exists(p)) throw IoError("input file does not exist: " + p);
        return p;
    };
    Field s = read_raster(need(cfg.paths.surface, "surface"));
    Field vx = read_raster(need(cfg.paths.vx, "vx"));
    Field vy = read_raster(need(cfg.paths.vy, "vy"));
    Field smb = read_raster(need(cfg.paths.smb, "smb"));
    Field dhdt = read_raster(need(cfg.paths.dhdt, "dhdt"));
    Field b_p = read_raster(need(cfg.paths.prior_bed, "prior_bed"));
    for (const Field* f : {&vx, &vy, &smb, &dhdt, &b_p})
        if (!f->geom.same_grid(s.geom)) throw DimensionError("scene rasters disagree on geometry");

    Mask valid = valid_mask(s);
    for (const Field* f : {&vx, &vy, &smb, &dhdt, &b_p}) {
        const Mask m = valid_mask(*f);
        for (Eigen::Index i = 0; i < valid.rows(); ++i)
            for (Eigen::Index j = 0; j < valid.cols(); ++j)
                if (!m(i, j)) valid(i, j) = 0;
    }

    LoadedScene out{make_scene(std::move(s), VectorField(std::move(vx), std::move(vy)),
                               std::move(smb), std::move(dhdt), std::move(b_p), std::move(valid)),
                    {}, 0};
    const RadarPicks raw = read_picks(need(cfg.paths.picks, "picks"));
    PickClipResult clipped = clip_picks(raw, out.scene.geom());
    out.picks = std::move(clipped.picks);
    out.dropped = clipped.dropped;
    return out;
}

RadarPicks picks_in_mask(const RadarPicks& picks, const GridGeometry& geom, const Mask& mask) {
    RadarPicks out;
    for (const Pick& p : picks.records) {
        const auto [i, j] = geom.cell_of(p.x, p.y);
        if (mask(i, j)) out.records.push_back(p);
    }
    return out;
}

json pixel_metrics_json(const PixelMetrics& m) {
    json j;
    j["mae_m"] = m.mae;
    j["rmse_m"] = m.rmse;
    j["r2"] = m.r2_defined ? json(m.r2) : json(nullptr);
    j["count"] = m.count;
    return j;
}

}  // namespace

std::string file_hash(const std::string& path) { return fnv1a64(path); }

void run_synth(const RunConfig& cfg) {
    const fs::path dir = ensure_output_dir(cfg);
    const SynthScene sc = synth_scene(cfg.seed, cfg.synth.rows, cfg.synth.cols, cfg.synth.spacing,
                                      cfg.synth.params);

    Manifest manifest("synth", cfg, dir);
    write_field(dir, "surface.asc", sc.scene.s, manifest);
    write_field(dir, "vx.asc", sc.scene.v.x, manifest);
    write_field(dir, "vy.asc", sc.scene.v.y, manifest);
    write_field(dir, "smb.asc", sc.scene.smb, manifest);
    write_field(dir, "dhdt.asc", sc.scene.dhdt, manifest);
    write_field(dir, "prior_bed.asc", sc.scene.b_p, manifest);
    write_field(dir, "bed_true.asc", sc.bed_true, manifest);

    const fs::path picks_path = dir / "picks.csv";
    write_picks(picks_path, sc.picks);
    manifest.add_output(picks_path);

    manifest.extra()["pick_count"] = sc.picks.count();
    manifest.write();
}

void run_reconstruct(const RunConfig& cfg) {
    const fs::path dir = ensure_output_dir(cfg);
    LoadedScene in = load_scene(cfg);
    const Scene& scene = in.scene;
    const GridGeometry& geom = scene.geom();

    const BlockSplit split = block_split(geom, cfg.split);
    const RadarPicks solve_picks = cfg.reconstruct.restrict_picks_to_train_core
                                       ? picks_in_mask(in.picks, geom, split.train_core)
                                       : in.picks;

    ObservationLayer obs = ObservationLayer::empty(geom, cfg.data.tau_px);
    NormStats norm;
    if (!solve_picks.empty()) {
        obs = build_observation_layer(solve_picks, scene.s, cfg.data);
        norm = residual_norm_stats(obs, scene, split.train_core, cfg.sigma_floor);
    } else if (cfg.loss.lambda_data > 0.0) {
        throw EmptyObservationsError("no picks available for the data term");
    }

    const Mask region = full_mask(geom);
    const Mask& monitor = split.train_core;

    Manifest manifest("reconstruct", cfg, dir);
    manifest.extra()["dropped_picks"] = in.dropped;
    manifest.extra()["solve_picks"] = solve_picks.count();
    manifest.extra()["norm"] = {{"mu", norm.mu}, {"sigma", norm.sigma}};

    ReconState state{Field(geom, 0.0), norm};
    std::vector<EpochStats> history;

    const bool tiled = cfg.reconstruct.mode == "tiled";
    if (cfg.reconstruct.tta) {
        TtaProblem problem{scene, obs, region, monitor};
        if (tiled) {
            const Field r_hat = tta_solve(problem, [&](const TtaProblem& p) {
                return solve_tiled(p.scene, p.obs, norm, cfg.loss, cfg.schedule, cfg.solver,
                                   cfg.tile, p.region, p.monitor_region, cfg.reconstruct.jobs)
                    .state.r_hat;
            });
            state = ReconState{r_hat, norm};
        } else {
            state = tta_solve_variational(problem, norm, cfg.loss, cfg.schedule, cfg.solver);
        }
    } else if (tiled) {
        TiledSolveResult r = solve_tiled(scene, obs, norm, cfg.loss, cfg.schedule, cfg.solver,
                                         cfg.tile, region, monitor, cfg.reconstruct.jobs);
        state = std::move(r.state);
        const LeakageReport leak =
            check_tile_leakage(tiles_for_region(geom, cfg.tile, split.train_core), cfg.tile,
                               split.train_core);
        manifest.extra()["train_tiles"] = leak.tiles_checked;
        manifest.extra()["train_tile_violations"] = leak.violators.size();
    } else {
        SolveResult r = solve_variational(scene, obs, norm, cfg.loss, cfg.schedule, cfg.solver,
                                          region, monitor);
        history = std::move(r.history);
        manifest.extra()["best_monitor"] = r.best_monitor;
        manifest.extra()["best_epoch"] = r.best_epoch;
        state = std::move(r.state);
    }

    const Reconstruction rec = reconstruct(state, scene);
    write_field(dir, "r_hat.asc", state.r_hat, manifest);
    write_field(dir, "h_hat.asc", rec.h_hat, manifest);
    write_field(dir, "b_hat.asc", rec.b_hat, manifest);

    if (!history.empty()) {
        const fs::path hp = dir / "history.csv";
        std::ofstream out(hp);
        if (!out) throw IoError("cannot write history " + hp.string());
        out << "epoch,radar,mass,flow_tv,laplacian,nonneg,prior,total,lr,monitor\n";
        char line[320];
        for (const EpochStats& e : history) {
            std::snprintf(line, sizeof line, "%d,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n",
                          e.epoch, e.radar, e.mass, e.flow_tv, e.laplacian, e.nonneg, e.prior,
                          e.total, e.lr, e.monitor);
            out << line;
        }
        out.close();
        manifest.add_output(hp);
    }
    manifest.write();
}

void run_baseline(const RunConfig& cfg, const std::string& which) {
    if (which != "idw" && which != "kriging")
        throw ParameterError("baseline must be 'idw' or 'kriging', got '" + which + "'");
    const fs::path dir = ensure_output_dir(cfg);
    LoadedScene in = load_scene(cfg);
    const GridGeometry& geom = in.scene.geom();

    const BlockSplit split = block_split(geom, cfg.split);
    const RadarPicks train_picks = picks_in_mask(in.picks, geom, split.train_core);
    if (train_picks.empty()) throw EmptyObservationsError("no picks inside the train core");

    Manifest manifest("baseline", cfg, dir);
    manifest.extra()["which"] = which;
    manifest.extra()["dropped_picks"] = in.dropped;
    manifest.extra()["fit_picks"] = train_picks.count();

    if (which == "idw") {
        const Field bed =
            idw_interpolate(train_picks, geom, cfg.baseline.idw.k, cfg.baseline.idw.power);
        write_field(dir, "idw_bed.asc", bed, manifest);
    } else {
        KrigingParams params = cfg.baseline.kriging;
        if (!(params.max_lag > 0.0)) {
            // Half the train-core diagonal, in meters.
            Eigen::Index i0 = geom.rows, i1 = -1, j0 = geom.cols, j1 = -1;
            for (Eigen::Index i = 0; i < geom.rows; ++i)
                for (Eigen::Index j = 0; j < geom.cols; ++j)
                    if (split.train_core(i, j)) {
                        i0 = std::min(i0, i);
                        i1 = std::max(i1, i);
                        j0 = std::min(j0, j);
                        j1 = std::max(j1, j);
                    }
            params.max_lag = 0.5 * geom.spacing *
                             std::hypot(static_cast<double>(i1 - i0 + 1), static_cast<double>(j1 - j0 + 1));
        }
        const KrigingResult result = krige_residual(train_picks, in.scene.b_p, params);
        write_field(dir, "kriging_bed.asc", result.bed, manifest);

        const fs::path vp = dir / "kriging_variogram.json";
        std::ofstream out(vp);
        if (!out) throw IoError("cannot write " + vp.string());
        const json vj = {{"nugget", result.model.nugget},
                         {"sill", result.model.sill},
                         {"range_m", result.model.range},
                         {"degenerate", result.model.degenerate},
                         {"max_lag_m", params.max_lag},
                         {"fallback_cells", result.fallback_cells}};
        out << vj.dump(2) << "\n";
        out.close();
        manifest.add_output(vp);
        manifest.extra()["variogram"] = vj;
    }
    manifest.write();
}

json metrics_to_json(const MetricsReport& report) {
    json j;
    j["orientation"] = {{"rotation_deg", 90 * report.orientation.quarter_turns},
                        {"hflip", report.orientation.hflip}};
    j["reference"] = pixel_metrics_json(report.reference);
    j["reference"]["ssim"] = report.ssim_value;
    if (!report.psnr_value.defined)
        j["reference"]["psnr_db"] = nullptr;
    else if (std::isinf(report.psnr_value.db))
        j["reference"]["psnr_db"] = "inf";
    else
        j["reference"]["psnr_db"] = report.psnr_value.db;
    j["reference"]["tri_diff_m"] = report.tri_difference;

    j["radar"] = pixel_metrics_json(report.radar.errors);
    if (report.radar.errors.count == 0) {
        j["radar"]["mae_m"] = nullptr;
        j["radar"]["rmse_m"] = nullptr;
    }
    j["radar"]["excluded"] = report.radar.excluded;

    j["stratified_rmse"] = json::array();
    for (const StratifiedBin& b : report.stratified)
        j["stratified_rmse"].push_back(
            {{"bin", b.label}, {"rmse_m", b.count > 0 ? json(b.rmse) : json(nullptr)}, {"count", b.count}});
    j["core_cells"] = report.core_cells;
    return j;
}

MetricsReport run_eval(const RunConfig& cfg, const std::string& pred_path,
                       const std::string& ref_path) {
    const fs::path dir = ensure_output_dir(cfg);
    const Field pred = read_raster(pred_path);
    const Field ref = read_raster(ref_path);
    if (!pred.geom.same_grid(ref.geom))
        throw DimensionError("prediction and reference must share one geometry");

    const BlockSplit split = block_split(pred.geom, cfg.split);
    const Mask& core = split.test_core;

    MetricsReport report;
    auto [element, aligned] = align_orientation(pred, ref, core);
    report.orientation = element;
    report.reference = pixel_metrics(aligned, ref, core);
    report.core_cells = report.reference.count;
    report.ssim_value = ssim(aligned, ref, core);
    report.psnr_value = psnr(aligned, ref, core);
    report.tri_difference = tri_diff(aligned, ref, core);

    if (!cfg.paths.picks.empty()) {
        const RadarPicks picks = clip_picks(read_picks(cfg.paths.picks), pred.geom).picks;
        if (!picks.empty()) {
            report.radar = radar_errors(aligned, picks, core);
            const SplatResult splat =
                splat_picks(picks, pred.geom, cfg.data.splat_k, cfg.data.splat_radius_px);
            const Field d_rad = distance_transform(splat.mask);
            report.stratified = stratified_rmse(aligned, ref, core, d_rad);
        }
    }

    Manifest manifest("eval", cfg, dir);
    manifest.extra()["pred"] = pred_path;
    manifest.extra()["ref"] = ref_path;

    const fs::path jp = dir / "metrics.json";
    {
        std::ofstream out(jp);
        if (!out) throw IoError("cannot write " + jp.string());
        out << metrics_to_json(report).dump(2) << "\n";
    }
    manifest.add_output(jp);

    const fs::path tp = dir / "metrics.txt";
    {
        std::ofstream out(tp);
        if (!out) throw IoError("cannot write " + tp.string());
        out << render_table(report);
    }
    manifest.add_output(tp);
    manifest.write();

    std::cout << render_table(report);
    return report;
}

}  // namespace bedrecon
