#include "bedrecon/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace bedrecon {

namespace {

using nlohmann::json;

void check_keys(const json& j, const std::string& section, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) throw ParameterError("config section '" + section + "' must be an object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (std::find_if(allowed.begin(), allowed.end(),
                         [&](const char* a) { return key == a; }) == allowed.end())
            throw ParameterError("unknown config key '" + section + "." + key + "'");
    }
}

template <typename T>
T get_or(const json& j, const char* key, T def) {
    if (!j.contains(key)) return def;
    return j.at(key).get<T>();
}

SplitAxis parse_axis(const std::string& s) {
    if (s == "vertical") return SplitAxis::Vertical;
    if (s == "horizontal") return SplitAxis::Horizontal;
    throw ParameterError("split axis must be 'vertical' or 'horizontal'");
}

LinePattern parse_lines(const std::string& s) {
    if (s == "vertical") return LinePattern::Vertical;
    if (s == "horizontal") return LinePattern::Horizontal;
    if (s == "both") return LinePattern::Both;
    throw ParameterError("line pattern must be 'vertical', 'horizontal' or 'both'");
}

KrigingMode parse_kriging_mode(const std::string& s) {
    if (s == "simple") return KrigingMode::Simple;
    if (s == "ordinary") return KrigingMode::Ordinary;
    throw ParameterError("kriging mode must be 'simple' or 'ordinary'");
}

}  // namespace

std::string RunConfig::resolved_output_dir() const {
    if (!paths.output_dir.empty()) return paths.output_dir;
    if (const char* env = std::getenv("BEDRECON_OUT"); env && *env) return env;
    return ".";
}

void RunConfig::validate() const {
    loss.validate();
    schedule.validate();
    solver.validate();
    tile.validate();
    if (split.delta_px < 0) throw ParameterError("split.delta_px must be nonnegative");
    if (!(sigma_floor > 0.0)) throw ParameterError("sigma_floor must be positive");
    if (reconstruct.mode != "whole-grid" && reconstruct.mode != "tiled")
        throw ParameterError("reconstruct.mode must be 'whole-grid' or 'tiled'");
    if (reconstruct.jobs < 1) throw ParameterError("reconstruct.jobs must be >= 1");
    if (baseline.idw.k < 1 || !(baseline.idw.power > 0.0))
        throw ParameterError("baseline.idw requires k >= 1 and power > 0");
}

RunConfig run_config_from_json(const json& j) {
    check_keys(j, "<root>",
               {"seed", "paths", "synth", "data", "sigma_floor", "split", "loss", "schedule",
                "solver", "tile", "baseline", "reconstruct"});
    RunConfig cfg;
    cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
    cfg.sigma_floor = get_or<double>(j, "sigma_floor", cfg.sigma_floor);

    if (j.contains("paths")) {
        const json& p = j.at("paths");
        check_keys(p, "paths",
                   {"surface", "vx", "vy", "smb", "dhdt", "prior_bed", "picks", "bed_true",
                    "output_dir"});
        cfg.paths.surface = get_or<std::string>(p, "surface", "");
        cfg.paths.vx = get_or<std::string>(p, "vx", "");
        cfg.paths.vy = get_or<std::string>(p, "vy", "");
        cfg.paths.smb = get_or<std::string>(p, "smb", "");
        cfg.paths.dhdt = get_or<std::string>(p, "dhdt", "");
        cfg.paths.prior_bed = get_or<std::string>(p, "prior_bed", "");
        cfg.paths.picks = get_or<std::string>(p, "picks", "");
        cfg.paths.bed_true = get_or<std::string>(p, "bed_true", "");
        cfg.paths.output_dir = get_or<std::string>(p, "output_dir", "");
    }

    if (j.contains("synth")) {
        const json& s = j.at("synth");
        check_keys(s, "synth",
                   {"rows", "cols", "spacing", "trough_count", "trough_depth", "trough_width",
                    "bed_base", "bed_relief", "surface_base", "surface_drop", "surface_relief",
                    "min_thickness", "flow_speed", "smb_base", "smb_gradient",
                    "prior_bias_amplitude", "prior_bias_length", "line_pattern", "line_spacing",
                    "line_step", "pick_noise_sd", "pick_jitter"});
        cfg.synth.rows = get_or<Eigen::Index>(s, "rows", cfg.synth.rows);
        cfg.synth.cols = get_or<Eigen::Index>(s, "cols", cfg.synth.cols);
        cfg.synth.spacing = get_or<double>(s, "spacing", cfg.synth.spacing);
        SynthParams& sp = cfg.synth.params;
        sp.trough_count = get_or<int>(s, "trough_count", sp.trough_count);
        sp.trough_depth = get_or<double>(s, "trough_depth", sp.trough_depth);
        sp.trough_width = get_or<double>(s, "trough_width", sp.trough_width);
        sp.bed_base = get_or<double>(s, "bed_base", sp.bed_base);
        sp.bed_relief = get_or<double>(s, "bed_relief", sp.bed_relief);
        sp.surface_base = get_or<double>(s, "surface_base", sp.surface_base);
        sp.surface_drop = get_or<double>(s, "surface_drop", sp.surface_drop);
        sp.surface_relief = get_or<double>(s, "surface_relief", sp.surface_relief);
        sp.min_thickness = get_or<double>(s, "min_thickness", sp.min_thickness);
        sp.flow_speed = get_or<double>(s, "flow_speed", sp.flow_speed);
        sp.smb_base = get_or<double>(s, "smb_base", sp.smb_base);
        sp.smb_gradient = get_or<double>(s, "smb_gradient", sp.smb_gradient);
        sp.prior_bias_amplitude = get_or<double>(s, "prior_bias_amplitude", sp.prior_bias_amplitude);
        sp.prior_bias_length = get_or<double>(s, "prior_bias_length", sp.prior_bias_length);
        sp.line_pattern = parse_lines(get_or<std::string>(s, "line_pattern", "vertical"));
        sp.line_spacing = get_or<int>(s, "line_spacing", sp.line_spacing);
        sp.line_step = get_or<int>(s, "line_step", sp.line_step);
        sp.pick_noise_sd = get_or<double>(s, "pick_noise_sd", sp.pick_noise_sd);
        sp.pick_jitter = get_or<double>(s, "pick_jitter", sp.pick_jitter);
    }

    if (j.contains("data")) {
        const json& d = j.at("data");
        check_keys(d, "data", {"splat_k", "splat_radius_px", "tau_px"});
        cfg.data.splat_k = get_or<int>(d, "splat_k", cfg.data.splat_k);
        cfg.data.splat_radius_px = get_or<double>(d, "splat_radius_px", cfg.data.splat_radius_px);
        cfg.data.tau_px = get_or<double>(d, "tau_px", cfg.data.tau_px);
    }

    if (j.contains("split")) {
        const json& s = j.at("split");
        check_keys(s, "split", {"axis", "delta_px", "erode_all_boundaries"});
        cfg.split.axis = parse_axis(get_or<std::string>(s, "axis", "vertical"));
        cfg.split.delta_px = get_or<int>(s, "delta_px", cfg.split.delta_px);
        cfg.split.erode_all_boundaries =
            get_or<bool>(s, "erode_all_boundaries", cfg.split.erode_all_boundaries);
    }

    if (j.contains("loss")) {
        const json& l = j.at("loss");
        check_keys(l, "loss",
                   {"lambda_data", "lambda_phys", "lambda_tv", "lambda_lap", "lambda_nonneg",
                    "lambda_prior", "delta_radar", "delta_mass", "delta_prior", "beta_perp",
                    "beta_par", "conf_exponent", "radar_weight_floor", "flow_eps",
                    "smooth_abs_eta", "slope_s90_floor", "scales", "scale_weights",
                    "smooth_early_size", "smooth_early_sigma", "smooth_late_size",
                    "smooth_late_sigma"});
        LossConfig& c = cfg.loss;
        c.lambda_data = get_or<double>(l, "lambda_data", c.lambda_data);
        c.lambda_phys = get_or<double>(l, "lambda_phys", c.lambda_phys);
        c.lambda_tv = get_or<double>(l, "lambda_tv", c.lambda_tv);
        c.lambda_lap = get_or<double>(l, "lambda_lap", c.lambda_lap);
        c.lambda_nonneg = get_or<double>(l, "lambda_nonneg", c.lambda_nonneg);
        c.lambda_prior = get_or<double>(l, "lambda_prior", c.lambda_prior);
        c.delta_radar = get_or<double>(l, "delta_radar", c.delta_radar);
        c.delta_mass = get_or<double>(l, "delta_mass", c.delta_mass);
        c.delta_prior = get_or<double>(l, "delta_prior", c.delta_prior);
        c.beta_perp = get_or<double>(l, "beta_perp", c.beta_perp);
        c.beta_par = get_or<double>(l, "beta_par", c.beta_par);
        c.conf_exponent = get_or<double>(l, "conf_exponent", c.conf_exponent);
        c.radar_weight_floor = get_or<double>(l, "radar_weight_floor", c.radar_weight_floor);
        c.flow_eps = get_or<double>(l, "flow_eps", c.flow_eps);
        c.smooth_abs_eta = get_or<double>(l, "smooth_abs_eta", c.smooth_abs_eta);
        c.slope_s90_floor = get_or<double>(l, "slope_s90_floor", c.slope_s90_floor);
        c.scales = get_or<std::vector<int>>(l, "scales", c.scales);
        c.scale_weights = get_or<std::vector<double>>(l, "scale_weights", c.scale_weights);
        c.smooth_early.size = get_or<int>(l, "smooth_early_size", c.smooth_early.size);
        c.smooth_early.sigma = get_or<double>(l, "smooth_early_sigma", c.smooth_early.sigma);
        c.smooth_late.size = get_or<int>(l, "smooth_late_size", c.smooth_late.size);
        c.smooth_late.sigma = get_or<double>(l, "smooth_late_sigma", c.smooth_late.sigma);
    }

    if (j.contains("schedule")) {
        const json& s = j.at("schedule");
        check_keys(s, "schedule",
                   {"epochs", "phys_ramp_start", "phys_ramp_end", "prior_ramp_start",
                    "prior_ramp_end"});
        cfg.schedule.total_epochs = get_or<int>(s, "epochs", cfg.schedule.total_epochs);
        cfg.schedule.phys_ramp_start = get_or<double>(s, "phys_ramp_start", cfg.schedule.phys_ramp_start);
        cfg.schedule.phys_ramp_end = get_or<double>(s, "phys_ramp_end", cfg.schedule.phys_ramp_end);
        cfg.schedule.prior_ramp_start =
            get_or<double>(s, "prior_ramp_start", cfg.schedule.prior_ramp_start);
        cfg.schedule.prior_ramp_end = get_or<double>(s, "prior_ramp_end", cfg.schedule.prior_ramp_end);
    }

    if (j.contains("solver")) {
        const json& s = j.at("solver");
        check_keys(s, "solver",
                   {"max_epochs", "lr", "weight_decay", "beta1", "beta2", "adam_eps", "cosine_t0",
                    "cosine_t_mult", "ema_decay", "patience", "monitor_every", "seed"});
        SolverConfig& c = cfg.solver;
        c.max_epochs = get_or<int>(s, "max_epochs", c.max_epochs);
        c.lr = get_or<double>(s, "lr", c.lr);
        c.weight_decay = get_or<double>(s, "weight_decay", c.weight_decay);
        c.beta1 = get_or<double>(s, "beta1", c.beta1);
        c.beta2 = get_or<double>(s, "beta2", c.beta2);
        c.adam_eps = get_or<double>(s, "adam_eps", c.adam_eps);
        c.cosine_t0 = get_or<int>(s, "cosine_t0", c.cosine_t0);
        c.cosine_t_mult = get_or<int>(s, "cosine_t_mult", c.cosine_t_mult);
        c.ema_decay = get_or<double>(s, "ema_decay", c.ema_decay);
        c.patience = get_or<int>(s, "patience", c.patience);
        c.monitor_every = get_or<int>(s, "monitor_every", c.monitor_every);
        c.seed = get_or<std::uint64_t>(s, "seed", c.seed);
    }

    if (j.contains("tile")) {
        const json& t = j.at("tile");
        check_keys(t, "tile", {"patch", "stride", "border"});
        cfg.tile.patch = get_or<int>(t, "patch", cfg.tile.patch);
        cfg.tile.stride = get_or<int>(t, "stride", cfg.tile.stride);
        cfg.tile.border = get_or<int>(t, "border", cfg.tile.border);
    }

    if (j.contains("baseline")) {
        const json& b = j.at("baseline");
        check_keys(b, "baseline", {"idw", "kriging"});
        if (b.contains("idw")) {
            const json& i = b.at("idw");
            check_keys(i, "baseline.idw", {"k", "power"});
            cfg.baseline.idw.k = get_or<int>(i, "k", cfg.baseline.idw.k);
            cfg.baseline.idw.power = get_or<double>(i, "power", cfg.baseline.idw.power);
        }
        if (b.contains("kriging")) {
            const json& k = b.at("kriging");
            check_keys(k, "baseline.kriging", {"k", "mode", "variogram_bins", "max_lag"});
            cfg.baseline.kriging.k = get_or<int>(k, "k", cfg.baseline.kriging.k);
            cfg.baseline.kriging.mode =
                parse_kriging_mode(get_or<std::string>(k, "mode", "ordinary"));
            cfg.baseline.kriging.variogram_bins =
                get_or<int>(k, "variogram_bins", cfg.baseline.kriging.variogram_bins);
            cfg.baseline.kriging.max_lag = get_or<double>(k, "max_lag", cfg.baseline.kriging.max_lag);
        }
    }

    if (j.contains("reconstruct")) {
        const json& r = j.at("reconstruct");
        check_keys(r, "reconstruct", {"mode", "tta", "jobs", "restrict_picks_to_train_core"});
        cfg.reconstruct.mode = get_or<std::string>(r, "mode", cfg.reconstruct.mode);
        cfg.reconstruct.tta = get_or<bool>(r, "tta", cfg.reconstruct.tta);
        cfg.reconstruct.jobs = get_or<int>(r, "jobs", cfg.reconstruct.jobs);
        cfg.reconstruct.restrict_picks_to_train_core =
            get_or<bool>(r, "restrict_picks_to_train_core", cfg.reconstruct.restrict_picks_to_train_core);
    }

    cfg.validate();
    return cfg;
}

RunConfig load_run_config(const std::string& path, const std::vector<std::string>& overrides) {
    json j = json::object();
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw IoError("cannot open config file " + path);
        try {
            in >> j;
        } catch (const json::exception& e) {
            throw ParseError(path, 0, std::string("invalid JSON: ") + e.what());
        }
    }
    for (const std::string& ov : overrides) {
        const auto eq = ov.find('=');
        if (eq == std::string::npos) throw ParameterError("--set expects key=value, got '" + ov + "'");
        std::string key = ov.substr(0, eq);
        const std::string value = ov.substr(eq + 1);
        std::replace(key.begin(), key.end(), '.', '/');
        json parsed;
        try {
            parsed = json::parse(value);
        } catch (const json::exception&) {
            parsed = value;  // plain string
        }
        j[json::json_pointer("/" + key)] = parsed;
    }
    return run_config_from_json(j);
}

nlohmann::json to_json(const RunConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["sigma_floor"] = cfg.sigma_floor;
    j["paths"] = {{"surface", cfg.paths.surface}, {"vx", cfg.paths.vx},
                  {"vy", cfg.paths.vy},           {"smb", cfg.paths.smb},
                  {"dhdt", cfg.paths.dhdt},       {"prior_bed", cfg.paths.prior_bed},
                  {"picks", cfg.paths.picks},     {"bed_true", cfg.paths.bed_true},
                  {"output_dir", cfg.resolved_output_dir()}};
    const SynthParams& sp = cfg.synth.params;
    j["synth"] = {{"rows", cfg.synth.rows},
                  {"cols", cfg.synth.cols},
                  {"spacing", cfg.synth.spacing},
                  {"trough_count", sp.trough_count},
                  {"trough_depth", sp.trough_depth},
                  {"trough_width", sp.trough_width},
                  {"bed_base", sp.bed_base},
                  {"bed_relief", sp.bed_relief},
                  {"surface_base", sp.surface_base},
                  {"surface_drop", sp.surface_drop},
                  {"surface_relief", sp.surface_relief},
                  {"min_thickness", sp.min_thickness},
                  {"flow_speed", sp.flow_speed},
                  {"smb_base", sp.smb_base},
                  {"smb_gradient", sp.smb_gradient},
                  {"prior_bias_amplitude", sp.prior_bias_amplitude},
                  {"prior_bias_length", sp.prior_bias_length},
                  {"line_pattern", sp.line_pattern == LinePattern::Vertical   ? "vertical"
                                   : sp.line_pattern == LinePattern::Horizontal ? "horizontal"
                                                                                : "both"},
                  {"line_spacing", sp.line_spacing},
                  {"line_step", sp.line_step},
                  {"pick_noise_sd", sp.pick_noise_sd},
                  {"pick_jitter", sp.pick_jitter}};
    j["data"] = {{"splat_k", cfg.data.splat_k},
                 {"splat_radius_px", cfg.data.splat_radius_px},
                 {"tau_px", cfg.data.tau_px}};
    j["split"] = {{"axis", cfg.split.axis == SplitAxis::Vertical ? "vertical" : "horizontal"},
                  {"delta_px", cfg.split.delta_px},
                  {"erode_all_boundaries", cfg.split.erode_all_boundaries}};
    const LossConfig& l = cfg.loss;
    j["loss"] = {{"lambda_data", l.lambda_data},
                 {"lambda_phys", l.lambda_phys},
                 {"lambda_tv", l.lambda_tv},
                 {"lambda_lap", l.lambda_lap},
                 {"lambda_nonneg", l.lambda_nonneg},
                 {"lambda_prior", l.lambda_prior},
                 {"delta_radar", l.delta_radar},
                 {"delta_mass", l.delta_mass},
                 {"delta_prior", l.delta_prior},
                 {"beta_perp", l.beta_perp},
                 {"beta_par", l.beta_par},
                 {"conf_exponent", l.conf_exponent},
                 {"radar_weight_floor", l.radar_weight_floor},
                 {"flow_eps", l.flow_eps},
                 {"smooth_abs_eta", l.smooth_abs_eta},
                 {"slope_s90_floor", l.slope_s90_floor},
                 {"scales", l.scales},
                 {"scale_weights", l.scale_weights},
                 {"smooth_early_size", l.smooth_early.size},
                 {"smooth_early_sigma", l.smooth_early.sigma},
                 {"smooth_late_size", l.smooth_late.size},
                 {"smooth_late_sigma", l.smooth_late.sigma}};
    j["schedule"] = {{"epochs", cfg.schedule.total_epochs},
                     {"phys_ramp_start", cfg.schedule.phys_ramp_start},
                     {"phys_ramp_end", cfg.schedule.phys_ramp_end},
                     {"prior_ramp_start", cfg.schedule.prior_ramp_start},
                     {"prior_ramp_end", cfg.schedule.prior_ramp_end}};
    const SolverConfig& s = cfg.solver;
    j["solver"] = {{"max_epochs", s.max_epochs}, {"lr", s.lr},
                   {"weight_decay", s.weight_decay}, {"beta1", s.beta1},
                   {"beta2", s.beta2}, {"adam_eps", s.adam_eps},
                   {"cosine_t0", s.cosine_t0}, {"cosine_t_mult", s.cosine_t_mult},
                   {"ema_decay", s.ema_decay}, {"patience", s.patience},
                   {"monitor_every", s.monitor_every}, {"seed", s.seed}};
    j["tile"] = {{"patch", cfg.tile.patch}, {"stride", cfg.tile.stride}, {"border", cfg.tile.border}};
    j["baseline"] = {{"idw", {{"k", cfg.baseline.idw.k}, {"power", cfg.baseline.idw.power}}},
                     {"kriging",
                      {{"k", cfg.baseline.kriging.k},
                       {"mode", cfg.baseline.kriging.mode == KrigingMode::Simple ? "simple" : "ordinary"},
                       {"variogram_bins", cfg.baseline.kriging.variogram_bins},
                       {"max_lag", cfg.baseline.kriging.max_lag}}}};
    j["reconstruct"] = {{"mode", cfg.reconstruct.mode},
                        {"tta", cfg.reconstruct.tta},
                        {"jobs", cfg.reconstruct.jobs},
                        {"restrict_picks_to_train_core", cfg.reconstruct.restrict_picks_to_train_core}};
    return j;
}

}  // namespace bedrecon
