#include "bedrecon/grid/dihedral.hpp"

namespace bedrecon {

std::array<DihedralElement, 8> dihedral_elements() {
    std::array<DihedralElement, 8> e{};
    int n = 0;
    for (int flip = 0; flip < 2; ++flip)
        for (int k = 0; k < 4; ++k) e[static_cast<size_t>(n++)] = DihedralElement{k, flip != 0};
    return e;
}

DihedralElement dihedral_compose(const DihedralElement& a, const DihedralElement& b) {
    // Point maps: T_g = Flip^f o Rot^k. Applying a then b composes T_b o T_a,
    // using Rot Flip = Flip Rot^-1.
    DihedralElement out;
    if (!a.hflip) {
        out.quarter_turns = (a.quarter_turns + b.quarter_turns) % 4;
        out.hflip = b.hflip;
    } else {
        out.quarter_turns = ((a.quarter_turns - b.quarter_turns) % 4 + 4) % 4;
        out.hflip = !b.hflip;
    }
    return out;
}

DihedralElement dihedral_inverse(const DihedralElement& g) {
    if (g.hflip) return g;  // flip elements are involutions
    return DihedralElement{(4 - g.quarter_turns) % 4, false};
}

template <typename Scalar>
Raster<Scalar> dihedral_apply_scalar(const Raster<Scalar>& f, const DihedralElement& g) {
    const Eigen::Index h = f.rows(), w = f.cols();
    if ((g.quarter_turns % 2) != 0 && h != w)
        throw DimensionError("quarter-turn rotation needs a square grid");

    Array2<Scalar> a;
    switch (g.quarter_turns) {
        case 0: a = f.values; break;
        case 1: a = f.values.transpose().rowwise().reverse(); break;
        case 2: a = f.values.reverse(); break;
        default: a = f.values.transpose().colwise().reverse(); break;
    }
    if (g.hflip) a = a.rowwise().reverse().eval();
    return f.with_values(std::move(a));
}

template Raster<double> dihedral_apply_scalar(const Raster<double>&, const DihedralElement&);
template Raster<std::uint8_t> dihedral_apply_scalar(const Raster<std::uint8_t>&, const DihedralElement&);

std::pair<double, double> dihedral_apply_vector(double vx, double vy, const DihedralElement& g) {
    for (int t = 0; t < g.quarter_turns; ++t) {
        const double nx = -vy, ny = vx;
        vx = nx;
        vy = ny;
    }
    if (g.hflip) vx = -vx;
    return {vx, vy};
}

std::vector<Field> dihedral_apply(const std::vector<Field>& stack,
                                  const std::vector<std::pair<int, int>>& vector_pairs,
                                  const DihedralElement& g) {
    std::vector<Field> out;
    out.reserve(stack.size());
    for (const Field& f : stack) out.push_back(dihedral_apply_scalar(f, g));

    const auto [mxx, myx] = dihedral_apply_vector(1.0, 0.0, g);
    const auto [mxy, myy] = dihedral_apply_vector(0.0, 1.0, g);
    for (const auto& [ix, iy] : vector_pairs) {
        const Array2d vx = out[static_cast<size_t>(ix)].values;
        const Array2d vy = out[static_cast<size_t>(iy)].values;
        out[static_cast<size_t>(ix)].values = mxx * vx + mxy * vy;
        out[static_cast<size_t>(iy)].values = myx * vx + myy * vy;
    }
    return out;
}

VectorField dihedral_apply(const VectorField& v, const DihedralElement& g) {
    auto channels = dihedral_apply({v.x, v.y}, {{0, 1}}, g);
    return VectorField(std::move(channels[0]), std::move(channels[1]));
}

}  // namespace bedrecon
