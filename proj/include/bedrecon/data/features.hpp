#pragma once

#include <string>
#include <utility>
#include <vector>

#include "bedrecon/data/scene.hpp"

namespace bedrecon {

struct ChannelStats {
    double mean = 0.0;
    double stddev = 1.0;
    bool degenerate = false;  // zero spread replaced by 1
};

struct FeatureStack {
    std::vector<Field> channels;
    std::vector<std::string> names;
    std::vector<std::pair<int, int>> vector_pairs;  // (x, y) channel indices
    std::vector<ChannelStats> stats;                // one per standardized channel
};

/// Fixed channel order: s, vx, vy, smb, dhdt, ds/dx, ds/dy, h_p, then
/// 4*bands Fourier coordinate channels. The eight scalar channels are
/// standardized with mean/std over valid cells of `train_region`.
FeatureStack build_feature_stack(const Scene& scene, const Mask& train_region, int bands);

}  // namespace bedrecon
