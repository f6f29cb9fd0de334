#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bedrecon/core/rng.hpp"
#include "bedrecon/grid/distance.hpp"
#include "bedrecon/grid/dihedral.hpp"
#include "bedrecon/grid/filters.hpp"
#include "bedrecon/grid/fourier.hpp"
#include "bedrecon/grid/stencils.hpp"

using namespace bedrecon;

namespace {

GridGeometry geom(Eigen::Index rows, Eigen::Index cols, double spacing = 1.0) {
    return GridGeometry{rows, cols, spacing, 0.0, 0.0};
}

Field random_field(Rng& rng, Eigen::Index rows, Eigen::Index cols, double spacing = 1.0) {
    Array2d v(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) v(i, j) = rng.normal();
    return Field(geom(rows, cols, spacing), std::move(v));
}

double dot(const Array2d& a, const Array2d& b) { return (a * b).sum(); }

}  // namespace

TEST_CASE("gradient of a constant field is zero") {
    const Field f(geom(6, 7), 3.25);
    const VectorField g = gradient(f);
    CHECK(g.x.values.abs().maxCoeff() == 0.0);
    CHECK(g.y.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("gradient is exact on linear and quadratic fields") {
    const GridGeometry g0 = geom(8, 9);
    Array2d lin(8, 9), quad(8, 9);
    for (Eigen::Index i = 0; i < 8; ++i)
        for (Eigen::Index j = 0; j < 9; ++j) {
            lin(i, j) = 2.0 * g0.cell_x(j);
            quad(i, j) = g0.cell_x(j) * g0.cell_x(j);
        }
    const VectorField gl = gradient(Field(g0, lin));
    CHECK(gl.x.values.maxCoeff() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gl.x.values.minCoeff() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(gl.y.values.abs().maxCoeff() < 1e-12);

    const VectorField gq = gradient(Field(g0, quad));
    for (Eigen::Index j = 1; j < 8; ++j)
        CHECK(gq.x(3, j) == doctest::Approx(2.0 * g0.cell_x(j)).epsilon(1e-12));
}

TEST_CASE("gradient and divergence reject tiny grids") {
    CHECK_THROWS_AS((void)gradient(Field(geom(2, 5), 1.0)), DimensionError);
    const Field f(geom(5, 2), 1.0);
    CHECK_THROWS_AS((void)divergence(VectorField(f, f)), DimensionError);
}

TEST_CASE("gradient and divergence are linear operators") {
    Rng rng(11);
    const Field f = random_field(rng, 10, 12), g = random_field(rng, 10, 12);
    const double a = 1.7, b = -0.4;
    const Field combo = f.with_values(a * f.values + b * g.values);
    const VectorField gc = gradient(combo), gf = gradient(f), gg = gradient(g);
    CHECK((gc.x.values - a * gf.x.values - b * gg.x.values).abs().maxCoeff() < 1e-12);
    CHECK((gc.y.values - a * gf.y.values - b * gg.y.values).abs().maxCoeff() < 1e-12);
}

TEST_CASE("divergence of a linear flux is exact everywhere") {
    const GridGeometry g0 = geom(6, 8);
    Array2d fx(6, 8);
    for (Eigen::Index i = 0; i < 6; ++i)
        for (Eigen::Index j = 0; j < 8; ++j) fx(i, j) = 3.5 * g0.cell_x(j);
    const Field zero(g0, 0.0);
    const Field d = divergence(VectorField(Field(g0, fx), zero));
    CHECK(d.values.maxCoeff() == doctest::Approx(3.5).epsilon(1e-12));
    CHECK(d.values.minCoeff() == doctest::Approx(3.5).epsilon(1e-12));

    const Field dc = divergence(VectorField(Field(g0, 2.0), Field(g0, -1.0)));
    CHECK(dc.values.abs().maxCoeff() == 0.0);
}

TEST_CASE("laplacian kernel identities") {
    const Field c(geom(5, 5), 4.0);
    CHECK(laplacian(c).values.abs().maxCoeff() == 0.0);

    const GridGeometry g0 = geom(7, 7, 2.0);
    Array2d ramp(7, 7);
    for (Eigen::Index i = 0; i < 7; ++i)
        for (Eigen::Index j = 0; j < 7; ++j) ramp(i, j) = g0.cell_x(j);
    const Field lr = laplacian(Field(g0, ramp));
    for (Eigen::Index i = 1; i < 6; ++i)
        for (Eigen::Index j = 1; j < 6; ++j) CHECK(std::abs(lr(i, j)) < 1e-12);

    Field impulse(geom(7, 7), 0.0);
    impulse(3, 3) = 1.0;
    const Field li = laplacian(impulse);
    CHECK(li(3, 3) == 4.0);
    CHECK(li(2, 3) == -1.0);
    CHECK(li(4, 3) == -1.0);
    CHECK(li(3, 2) == -1.0);
    CHECK(li(3, 4) == -1.0);
    CHECK(li(2, 2) == 0.0);
}

TEST_CASE("laplacian equals -divergence(gradient)*spacing^2 on random cubic fields") {
    // Both stencils are exact on cubic polynomials, so the identity holds to
    // round-off on cells two steps from the boundary.
    Rng rng(7);
    const double spacing = 2.5;
    const GridGeometry g0 = geom(9, 10, spacing);
    for (int trial = 0; trial < 5; ++trial) {
        double c[10];
        for (double& x : c) x = rng.uniform(-2.0, 2.0);
        Array2d v(9, 10);
        for (Eigen::Index i = 0; i < 9; ++i)
            for (Eigen::Index j = 0; j < 10; ++j) {
                const double x = g0.cell_x(j) / 10.0, y = g0.cell_y(i) / 10.0;
                v(i, j) = c[0] + c[1] * x + c[2] * y + c[3] * x * y + c[4] * x * x +
                          c[5] * y * y + c[6] * x * x * y + c[7] * x * y * y + c[8] * x * x * x +
                          c[9] * y * y * y;
            }
        const Field f(g0, v);
        const Field lap = laplacian(f);
        const Field divgrad = divergence(gradient(f));
        for (Eigen::Index i = 2; i < 7; ++i)
            for (Eigen::Index j = 2; j < 8; ++j) {
                const double lhs = lap(i, j);
                const double rhs = -divgrad(i, j) * spacing * spacing;
                CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
            }
    }
}

TEST_CASE("stencil adjoints satisfy the inner-product identity") {
    Rng rng(23);
    const Field f = random_field(rng, 9, 11, 1.5);
    const Field cx = random_field(rng, 9, 11), cy = random_field(rng, 9, 11);

    const VectorField g = gradient(f);
    const Array2d back = gradient_adjoint(f.geom, cx.values, cy.values);
    CHECK(dot(g.x.values, cx.values) + dot(g.y.values, cy.values) ==
          doctest::Approx(dot(f.values, back)).epsilon(1e-12));

    const Field fy = random_field(rng, 9, 11, 1.5);
    const Field co = random_field(rng, 9, 11);
    const Field div = divergence(VectorField(f.with_values(f.values), f.with_values(fy.values)));
    const auto [ax, ay] = divergence_adjoint(f.geom, co.values);
    CHECK(dot(div.values, co.values) ==
          doctest::Approx(dot(f.values, ax) + dot(fy.values, ay)).epsilon(1e-12));

    const Field lap = laplacian(f);
    const Array2d lback = laplacian_adjoint(f.geom, co.values);
    CHECK(dot(lap.values, co.values) == doctest::Approx(dot(f.values, lback)).epsilon(1e-12));

    const Field sm = gaussian_smooth(f, 7, 2.0);
    const Array2d sback = gaussian_smooth_adjoint(co.values, 7, 2.0);
    CHECK(dot(sm.values, co.values) == doctest::Approx(dot(f.values, sback)).epsilon(1e-12));

    const Field pooled = avg_pool(f, 2);
    Array2d co_small(pooled.rows(), pooled.cols());
    for (Eigen::Index i = 0; i < co_small.rows(); ++i)
        for (Eigen::Index j = 0; j < co_small.cols(); ++j) co_small(i, j) = rng.normal();
    const Array2d pback = avg_pool_adjoint(co_small, f.geom, 2);
    CHECK(dot(pooled.values, co_small) == doctest::Approx(dot(f.values, pback)).epsilon(1e-12));
}

TEST_CASE("gaussian smoothing basics") {
    const Field c(geom(12, 12), 2.5);
    const Field sc = gaussian_smooth(c, 11, 3.5);
    CHECK((sc.values - 2.5).abs().maxCoeff() < 1e-12);
    CHECK(std::abs(sc.values.mean() - 2.5) / 2.5 < 1e-9);

    Rng rng(3);
    const Field f = random_field(rng, 8, 8);
    const Field id = gaussian_smooth(f, 1, 1.0);
    CHECK((id.values - f.values).abs().maxCoeff() == 0.0);

    CHECK_THROWS_AS((void)gaussian_smooth(f, 4, 1.0), ParameterError);

    // Away from boundaries the normalized kernel redistributes an impulse
    // without losing mass.
    Field impulse(geom(31, 31), 0.0);
    impulse(15, 15) = 1.0;
    const Field si = gaussian_smooth(impulse, 11, 3.5);
    CHECK(si.values.sum() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("average pooling") {
    Rng rng(5);
    const Field f = random_field(rng, 8, 12, 3.0);
    const Field p1 = avg_pool(f, 1);
    CHECK((p1.values - f.values).abs().maxCoeff() == 0.0);

    Array2d block(2, 2);
    block << 1.0, 2.0, 3.0, 4.0;
    const Field pb = avg_pool(Field(geom(2, 2), block), 2);
    CHECK(pb.rows() == 1);
    CHECK(pb.cols() == 1);
    CHECK(pb(0, 0) == doctest::Approx(2.5));

    const Field p2 = avg_pool(f, 2);
    CHECK(p2.geom.spacing == doctest::Approx(6.0));
    // Mean preservation for divisible shapes, against a direct total.
    CHECK(p2.values.mean() == doctest::Approx(f.values.mean()).epsilon(1e-12));

    CHECK_THROWS_AS((void)avg_pool(f, 0), ParameterError);

    // Trailing partial windows average their actual cells.
    const Field p5 = avg_pool(f, 5);
    CHECK(p5.rows() == 2);
    CHECK(p5.cols() == 3);
    CHECK(p5(1, 2) == doctest::Approx(f.values.block(5, 10, 3, 2).mean()));
}

TEST_CASE("distance transform is exact") {
    Mask m(geom(8, 8), static_cast<std::uint8_t>(0));
    m(0, 0) = 1;
    const Field d = distance_transform(m);
    CHECK(d(0, 0) == 0.0);
    CHECK(d(3, 4) == doctest::Approx(5.0));  // 3-4-5 triangle, in pixels

    CHECK_THROWS_AS((void)distance_transform(Mask(geom(4, 4), static_cast<std::uint8_t>(0))),
                    EmptyObservationsError);

    Rng rng(17);
    for (int trial = 0; trial < 8; ++trial) {
        const Eigen::Index n = 16 + trial * 6;
        Mask mask(geom(n, n), static_cast<std::uint8_t>(0));
        std::vector<std::pair<Eigen::Index, Eigen::Index>> sites;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                if (rng.uniform() < 0.03) {
                    mask(i, j) = 1;
                    sites.emplace_back(i, j);
                }
        if (sites.empty()) {
            mask(n / 2, n / 2) = 1;
            sites.emplace_back(n / 2, n / 2);
        }
        const Field d2 = distance_transform(mask);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j) {
                double best = 1e300;
                for (const auto& [si, sj] : sites) {
                    const double dd = static_cast<double>((i - si) * (i - si) + (j - sj) * (j - sj));
                    best = std::min(best, dd);
                }
                CHECK(d2(i, j) == std::sqrt(best));  // bit-exact against brute force
            }
    }
}

TEST_CASE("dihedral group structure") {
    const auto elements = dihedral_elements();
    CHECK(elements.size() == 8);

    // Closure and inverses.
    for (const auto& a : elements) {
        const DihedralElement inv = dihedral_inverse(a);
        CHECK(dihedral_compose(a, inv).is_identity());
        CHECK(dihedral_compose(inv, a).is_identity());
        for (const auto& b : elements) {
            const DihedralElement c = dihedral_compose(a, b);
            CHECK(c.quarter_turns >= 0);
            CHECK(c.quarter_turns < 4);
        }
    }

    const auto [vx, vy] = dihedral_apply_vector(1.0, 0.0, DihedralElement{1, false});
    CHECK(vx == 0.0);
    CHECK(vy == 1.0);

    const auto [fx, fy] = dihedral_apply_vector(1.0, 0.5, DihedralElement{0, true});
    CHECK(fx == -1.0);
    CHECK(fy == 0.5);
}

TEST_CASE("dihedral apply round trip is bit-identical") {
    Rng rng(29);
    std::vector<Field> stack = {random_field(rng, 9, 9), random_field(rng, 9, 9),
                                random_field(rng, 9, 9)};
    const std::vector<std::pair<int, int>> pairs = {{1, 2}};

    for (const auto& g : dihedral_elements()) {
        const auto fwd = dihedral_apply(stack, pairs, g);
        const auto back = dihedral_apply(fwd, pairs, dihedral_inverse(g));
        for (size_t ch = 0; ch < stack.size(); ++ch)
            CHECK((back[ch].values == stack[ch].values).all());
    }

    // Identity leaves the stack untouched.
    const auto same = dihedral_apply(stack, pairs, DihedralElement{});
    CHECK((same[0].values == stack[0].values).all());

    // 180 degrees twice is also exact on non-square stacks.
    std::vector<Field> wide = {random_field(rng, 5, 9)};
    const auto w2 = dihedral_apply(dihedral_apply(wide, {}, DihedralElement{2, false}), {},
                                   DihedralElement{2, false});
    CHECK((w2[0].values == wide[0].values).all());

    CHECK_THROWS_AS((void)dihedral_apply(wide, {}, DihedralElement{1, false}), DimensionError);
}

TEST_CASE("rotating a field rotates its gradient") {
    Rng rng(31);
    const Field f = random_field(rng, 12, 12);
    const DihedralElement g{1, false};

    const VectorField grad_f = gradient(f);
    const auto rotated_grad = dihedral_apply({grad_f.x, grad_f.y}, {{0, 1}}, g);
    const VectorField grad_rot = gradient(dihedral_apply_scalar(f, g));
    CHECK((grad_rot.x.values - rotated_grad[0].values).abs().maxCoeff() < 1e-12);
    CHECK((grad_rot.y.values - rotated_grad[1].values).abs().maxCoeff() < 1e-12);
}

TEST_CASE("fourier coordinate channels") {
    const auto channels = fourier_coords(geom(5, 5), 3);
    CHECK(channels.size() == 12);

    // Center cell has normalized coordinates (0, 0).
    for (int l = 0; l < 3; ++l) {
        CHECK(std::abs(channels[4 * l + 0](2, 2)) < 1e-12);       // sin x
        CHECK(channels[4 * l + 1](2, 2) == doctest::Approx(1.0)); // cos x
        CHECK(std::abs(channels[4 * l + 2](2, 2)) < 1e-12);       // sin y
        CHECK(channels[4 * l + 3](2, 2) == doctest::Approx(1.0)); // cos y
    }

    // East edge is x = 1: band 0 has sin(pi) = 0, cos(pi) = -1.
    CHECK(std::abs(channels[0](2, 4)) < 1e-12);
    CHECK(channels[1](2, 4) == doctest::Approx(-1.0));

    CHECK_THROWS_AS((void)fourier_coords(geom(5, 5), 0), ParameterError);
}
