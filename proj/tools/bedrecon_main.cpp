#include <CLI11.hpp>

#include <exception>
#include <iostream>

#include "bedrecon/cli/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Physics-guided bed topography reconstruction"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    std::string mode;
    bool tta = false;
    int jobs = 0;
    std::string which;
    std::string pred_path, ref_path;

    const auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--set", overrides, "Override a config key, e.g. --set solver.lr=0.01");
    };

    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic scene");
    add_common(synth);

    CLI::App* rec = app.add_subcommand("reconstruct", "Variational bed reconstruction");
    add_common(rec);
    rec->add_option("--mode", mode, "whole-grid or tiled")
        ->check(CLI::IsMember({"whole-grid", "tiled"}));
    rec->add_flag("--tta", tta, "Average the 8 dihedral variants");
    rec->add_option("--jobs", jobs, "Parallel tile workers")->check(CLI::PositiveNumber);

    CLI::App* base = app.add_subcommand("baseline", "Classical interpolation baselines");
    add_common(base);
    base->add_option("--which", which, "idw or kriging")
        ->required()
        ->check(CLI::IsMember({"idw", "kriging"}));

    CLI::App* eval = app.add_subcommand("eval", "Evaluate a prediction on the held-out core");
    add_common(eval);
    eval->add_option("--pred", pred_path, "Prediction raster")->required();
    eval->add_option("--ref", ref_path, "Reference raster")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        bedrecon::RunConfig cfg = bedrecon::load_run_config(config_path, overrides);
        if (rec->parsed()) {
            if (!mode.empty()) cfg.reconstruct.mode = mode;
            if (tta) cfg.reconstruct.tta = true;
            if (jobs > 0) cfg.reconstruct.jobs = jobs;
            cfg.validate();
        }

        if (synth->parsed()) bedrecon::run_synth(cfg);
        else if (rec->parsed()) bedrecon::run_reconstruct(cfg);
        else if (base->parsed()) bedrecon::run_baseline(cfg, which);
        else if (eval->parsed()) bedrecon::run_eval(cfg, pred_path, ref_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
