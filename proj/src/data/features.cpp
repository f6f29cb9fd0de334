#include "bedrecon/data/features.hpp"

#include <cmath>

#include "bedrecon/grid/fourier.hpp"
#include "bedrecon/grid/stencils.hpp"

namespace bedrecon {

namespace {

ChannelStats region_stats(const Array2d& v, const Mask& region, const Mask& valid) {
    double sum = 0.0, sum2 = 0.0;
    long n = 0;
    for (Eigen::Index i = 0; i < v.rows(); ++i)
        for (Eigen::Index j = 0; j < v.cols(); ++j)
            if (region(i, j) && valid(i, j)) {
                sum += v(i, j);
                sum2 += v(i, j) * v(i, j);
                ++n;
            }
    ChannelStats s;
    if (n == 0) {
        s.degenerate = true;
        return s;
    }
    s.mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum2 / static_cast<double>(n) - s.mean * s.mean);
    s.stddev = std::sqrt(var);
    if (!(s.stddev > 0.0)) {
        s.stddev = 1.0;
        s.degenerate = true;
    }
    return s;
}

}  // namespace

FeatureStack build_feature_stack(const Scene& scene, const Mask& train_region, int bands) {
    require_same_shape(train_region.geom, scene.geom(), "build_feature_stack");

    const VectorField grad_s = gradient(scene.s);
    FeatureStack out;
    out.channels = {scene.s, scene.v.x, scene.v.y,  scene.smb,
                    scene.dhdt, grad_s.x, grad_s.y, scene.h_p};
    out.names = {"s", "vx", "vy", "smb", "dhdt", "ds_dx", "ds_dy", "h_p"};
    out.vector_pairs = {{1, 2}, {5, 6}};

    for (Field& ch : out.channels) {
        const ChannelStats s = region_stats(ch.values, train_region, scene.valid);
        ch.values = (ch.values - s.mean) / s.stddev;
        out.stats.push_back(s);
    }

    for (Field& f : fourier_coords(scene.geom(), bands)) out.channels.push_back(std::move(f));
    for (int l = 0; l < bands; ++l)
        for (const char* n : {"sin_x", "cos_x", "sin_y", "cos_y"})
            out.names.push_back(std::string(n) + "_b" + std::to_string(l));
    return out;
}

}  // namespace bedrecon
