#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "bedrecon/core/rng.hpp"
#include "bedrecon/io/picks_io.hpp"
#include "bedrecon/io/raster_io.hpp"

using namespace bedrecon;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const char* name) {
    const fs::path dir = fs::temp_directory_path() / "bedrecon_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

}  // namespace

TEST_CASE("raster round trip") {
    Rng rng(1);
    GridGeometry g{4, 5, 25.0, -100.0, 300.0};
    Array2d v(4, 5);
    for (Eigen::Index i = 0; i < 4; ++i)
        for (Eigen::Index j = 0; j < 5; ++j) v(i, j) = rng.uniform(-1.0, 1.0);
    Field f(g, v);

    const fs::path p = temp_file("roundtrip.asc");
    write_raster(p, f);
    const Field r = read_raster(p);

    CHECK(r.rows() == 4);
    CHECK(r.cols() == 5);
    CHECK(r.geom.spacing == doctest::Approx(25.0));
    CHECK(r.geom.x0 == doctest::Approx(-100.0));
    CHECK(r.geom.y0 == doctest::Approx(300.0));
    CHECK((r.values - f.values).abs().maxCoeff() < 1e-6);
}

TEST_CASE("raster writes the north row first") {
    GridGeometry g{3, 3, 1.0, 0.0, 0.0};
    Array2d v(3, 3);
    v.setZero();
    v(2, 0) = 7.0;  // northmost row, in-memory row 2
    const fs::path p = temp_file("north.asc");
    write_raster(p, Field(g, v));

    std::ifstream in(p);
    std::string line;
    for (int skip = 0; skip < 5; ++skip) std::getline(in, line);  // header
    std::getline(in, line);
    CHECK(line.substr(0, 1) == "7");
}

TEST_CASE("nodata cells are invalid") {
    GridGeometry g{3, 3, 1.0, 0.0, 0.0};
    Field f(g, 1.0);
    f.nodata = -9999.0;
    f(1, 1) = -9999.0;

    const fs::path p = temp_file("nodata.asc");
    write_raster(p, f);
    const Field r = read_raster(p);
    CHECK(r.nodata.has_value());
    const Mask m = valid_mask(r);
    CHECK(m(1, 1) == 0);
    CHECK(m(0, 0) == 1);
    CHECK(count_true(m) == 8);
}

TEST_CASE("raster parse errors carry line numbers") {
    const fs::path bad_header = temp_file("bad_header.asc");
    write_text(bad_header, "ncols x\nnrows 2\n");
    CHECK_THROWS_AS((void)read_raster(bad_header), ParseError);
    try {
        (void)read_raster(bad_header);
    } catch (const ParseError& e) {
        CHECK(e.line_number == 1);
    }

    const fs::path short_row = temp_file("short_row.asc");
    write_text(short_row,
               "ncols 3\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2 3\n1 2\n");
    try {
        (void)read_raster(short_row);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line_number == 7);
    }

    const fs::path non_numeric = temp_file("non_numeric.asc");
    write_text(non_numeric,
               "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n1 abc\n");
    try {
        (void)read_raster(non_numeric);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line_number == 7);
    }

    const fs::path missing_rows = temp_file("missing_rows.asc");
    write_text(missing_rows, "ncols 2\nnrows 3\nxllcorner 0\nyllcorner 0\ncellsize 1\n1 2\n");
    CHECK_THROWS_AS((void)read_raster(missing_rows), ParseError);
}

TEST_CASE("picks round trip and clipping") {
    RadarPicks picks;
    picks.records = {{10.0, 20.0, -55.5}, {90.0, 80.0, 12.25}, {-5.0, 1.0, 3.0}};
    const fs::path p = temp_file("picks.csv");
    write_picks(p, picks);
    const RadarPicks r = read_picks(p);
    REQUIRE(r.count() == 3);
    CHECK(r.records[0].x == doctest::Approx(10.0));
    CHECK(r.records[1].bed == doctest::Approx(12.25));

    // Out-of-extent picks are dropped with a count.
    GridGeometry g{10, 10, 10.0, 0.0, 0.0};  // covers [0,100]x[0,100]
    const PickClipResult clipped = clip_picks(r, g);
    CHECK(clipped.picks.count() == 2);
    CHECK(clipped.dropped == 1);
}

TEST_CASE("pick parse errors") {
    const fs::path bad_header = temp_file("bad_picks_header.csv");
    write_text(bad_header, "x,y,z\n1,2,3\n");
    CHECK_THROWS_AS((void)read_picks(bad_header), ParseError);

    const fs::path bad_row = temp_file("bad_picks_row.csv");
    write_text(bad_row, "x,y,bed\n1,2,3\n4,oops,6\n");
    try {
        (void)read_picks(bad_row);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line_number == 3);
    }

    const fs::path wide_row = temp_file("wide_picks_row.csv");
    write_text(wide_row, "x,y,bed\n1,2,3,4\n");
    CHECK_THROWS_AS((void)read_picks(wide_row), ParseError);
}
