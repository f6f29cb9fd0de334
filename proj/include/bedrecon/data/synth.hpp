#pragma once

#include <cstdint>

#include "bedrecon/data/scene.hpp"

namespace bedrecon {

enum class LinePattern { Vertical, Horizontal, Both };

// Parameters of the synthetic verification scenes: a smooth trough-carved bed
// under a gently sloping surface, velocity aligned with -grad(s), a thickness
// tendency constructed so the discrete mass balance of the truth closes
// exactly, a long-wavelength prior bias, and picks along synthetic flight
// lines.
struct SynthParams {
    int trough_count = 3;
    double trough_depth = 220.0;   // m
    double trough_width = 28.0;    // cells (Gaussian sigma)
    double bed_base = -50.0;       // m
    double bed_relief = 250.0;     // m drop west -> east

    double surface_base = 1500.0;  // m at the west edge
    double surface_drop = 600.0;   // m across the grid
    double surface_relief = 60.0;  // m of smooth undulation
    double min_thickness = 50.0;   // m

    double flow_speed = 300.0;     // m/yr peak speed
    double smb_base = 0.3;         // m/yr
    double smb_gradient = 0.4;     // m/yr south -> north

    double prior_bias_amplitude = 30.0;  // m
    double prior_bias_length = 120.0;    // cells

    LinePattern line_pattern = LinePattern::Vertical;
    int line_spacing = 24;         // cells between flight lines
    int line_step = 1;             // along-line step in cells
    double pick_noise_sd = 0.0;    // m
    double pick_jitter = 0.0;      // sub-cell jitter, in cells
};

struct SynthScene {
    Scene scene;     // prior-bed scene handed to reconstruction
    Field bed_true;  // ground-truth bed the prior deviates from
    RadarPicks picks;
};

/// Deterministic for a fixed seed. Throws ParameterError if the requested
/// parameters produce thickness below min_thickness anywhere.
SynthScene synth_scene(std::uint64_t seed, Eigen::Index rows, Eigen::Index cols, double spacing,
                       const SynthParams& params);

/// Bilinear sample of a field at map coordinates, clamped to the cell-center hull.
double sample_bilinear(const Field& f, double x, double y);

}  // namespace bedrecon
