#include "bedrecon/grid/distance.hpp"

#include <cmath>
#include <vector>

namespace bedrecon {

namespace {

constexpr double kFar = 1.0e30;

// 1-D squared-distance transform of a sampled function (Felzenszwalb &
// Huttenlocher lower envelope): out[q] = min_p (f[p] + (q-p)^2). Samples at
// kFar mark absent sites and never enter the envelope.
void dt_1d(const double* f, int n, double* out, std::vector<int>& v, std::vector<double>& z) {
    int k = -1;
    for (int q = 0; q < n; ++q) {
        if (f[q] >= kFar) continue;
        double s = 0.0;
        while (k >= 0) {
            const int p = v[static_cast<size_t>(k)];
            s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                (2.0 * q - 2.0 * p);
            if (s > z[static_cast<size_t>(k)]) break;
            --k;
        }
        ++k;
        v[static_cast<size_t>(k)] = q;
        z[static_cast<size_t>(k)] = k == 0 ? -kFar : s;
        z[static_cast<size_t>(k) + 1] = kFar;
    }
    if (k < 0) {
        for (int q = 0; q < n; ++q) out[q] = kFar;
        return;
    }
    int j = 0;
    for (int q = 0; q < n; ++q) {
        while (z[static_cast<size_t>(j) + 1] < q) ++j;
        const int p = v[static_cast<size_t>(j)];
        out[q] = f[p] + static_cast<double>(q - p) * (q - p);
    }
}

}  // namespace

Field distance_transform(const Mask& mask) {
    if (count_true(mask) == 0) throw EmptyObservationsError("distance transform of an empty mask");
    const Eigen::Index h = mask.rows(), w = mask.cols();
    Array2d sq(h, w);

    const auto nmax = static_cast<size_t>(std::max(h, w));
    std::vector<double> f(nmax), out(nmax);
    std::vector<int> v(nmax);
    std::vector<double> z(nmax + 1);

    for (Eigen::Index j = 0; j < w; ++j) {
        for (Eigen::Index i = 0; i < h; ++i) f[static_cast<size_t>(i)] = mask(i, j) ? 0.0 : kFar;
        dt_1d(f.data(), static_cast<int>(h), out.data(), v, z);
        for (Eigen::Index i = 0; i < h; ++i) sq(i, j) = out[static_cast<size_t>(i)];
    }
    for (Eigen::Index i = 0; i < h; ++i) {
        for (Eigen::Index j = 0; j < w; ++j) f[static_cast<size_t>(j)] = sq(i, j);
        dt_1d(f.data(), static_cast<int>(w), out.data(), v, z);
        for (Eigen::Index j = 0; j < w; ++j) sq(i, j) = out[static_cast<size_t>(j)];
    }

    return Field(mask.geom, sq.sqrt());
}

}  // namespace bedrecon
