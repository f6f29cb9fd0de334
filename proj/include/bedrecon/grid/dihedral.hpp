#pragma once

#include <array>
#include <utility>
#include <vector>

#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

// Element of the dihedral group D4 acting on square rasters: rotate by
// quarter turns counter-clockwise first, then flip horizontally (x -> -x)
// if hflip is set.
struct DihedralElement {
    int quarter_turns = 0;  // 0..3, CCW
    bool hflip = false;

    bool is_identity() const { return quarter_turns == 0 && !hflip; }
    bool operator==(const DihedralElement& o) const {
        return quarter_turns == o.quarter_turns && hflip == o.hflip;
    }
};

std::array<DihedralElement, 8> dihedral_elements();

/// Composition: apply `a` first, then `b`.
DihedralElement dihedral_compose(const DihedralElement& a, const DihedralElement& b);

DihedralElement dihedral_inverse(const DihedralElement& g);

/// Spatial permutation of a scalar raster. Quarter turns require a square
/// grid; 180 degrees and flips work on any shape.
template <typename Scalar>
Raster<Scalar> dihedral_apply_scalar(const Raster<Scalar>& f, const DihedralElement& g);

/// Mix vector components by the element's 2x2 matrix: a quarter turn CCW maps
/// (vx, vy) -> (-vy, vx) and a horizontal flip negates vx.
std::pair<double, double> dihedral_apply_vector(double vx, double vy, const DihedralElement& g);

/// Transform a channel stack: every channel is spatially permuted, and the
/// channels named in `vector_pairs` additionally get their components mixed.
std::vector<Field> dihedral_apply(const std::vector<Field>& stack,
                                  const std::vector<std::pair<int, int>>& vector_pairs,
                                  const DihedralElement& g);

VectorField dihedral_apply(const VectorField& v, const DihedralElement& g);

}  // namespace bedrecon
