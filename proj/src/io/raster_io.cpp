#include "bedrecon/io/raster_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace bedrecon {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

double parse_number(const std::string& path, long line_no, const std::string& token) {
    try {
        size_t used = 0;
        const double v = std::stod(token, &used);
        if (used != token.size()) throw std::invalid_argument("trailing characters");
        return v;
    } catch (const std::exception&) {
        throw ParseError(path, line_no, "expected a number, got '" + token + "'");
    }
}

}  // namespace

Field read_raster(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open raster file " + path.string());
    const std::string name = path.string();

    long ncols = -1, nrows = -1;
    double xll = 0.0, yll = 0.0, cellsize = 0.0;
    std::optional<double> nodata;

    Array2d values;
    long row = 0;
    bool in_header = true;
    long line_no = 0;
    std::string line;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string tok;
        if (!(ls >> tok)) continue;  // blank line

        if (in_header) {
            const std::string k = lower(tok);
            const bool known = k == "ncols" || k == "nrows" || k == "xllcorner" ||
                               k == "yllcorner" || k == "cellsize" || k == "nodata_value";
            if (known) {
                std::string value;
                if (!(ls >> value)) throw ParseError(name, line_no, "header key '" + tok + "' has no value");
                const double v = parse_number(name, line_no, value);
                if (k == "ncols") ncols = static_cast<long>(v);
                else if (k == "nrows") nrows = static_cast<long>(v);
                else if (k == "xllcorner") xll = v;
                else if (k == "yllcorner") yll = v;
                else if (k == "cellsize") cellsize = v;
                else nodata = v;
                continue;
            }
            if (ncols <= 0 || nrows <= 0)
                throw ParseError(name, line_no, "header must declare positive ncols and nrows before data");
            if (!(cellsize > 0.0))
                throw ParseError(name, line_no, "header must declare positive cellsize before data");
            values.resize(nrows, ncols);
            in_header = false;
        }

        if (row >= nrows)
            throw ParseError(name, line_no, "more data rows than nrows=" + std::to_string(nrows));
        long col = 0;
        do {
            if (col >= ncols)
                throw ParseError(name, line_no, "row has more than ncols=" + std::to_string(ncols) + " values");
            // File rows run north to south; memory rows run south to north.
            values(nrows - 1 - row, col) = parse_number(name, line_no, tok);
            ++col;
        } while (ls >> tok);
        if (col != ncols)
            throw ParseError(name, line_no,
                             "row has " + std::to_string(col) + " values, expected " + std::to_string(ncols));
        ++row;
    }

    if (in_header) throw ParseError(name, line_no, "file ended inside the header");
    if (row != nrows)
        throw ParseError(name, line_no, "expected " + std::to_string(nrows) + " data rows, got " +
                                            std::to_string(row));

    Field f(GridGeometry{nrows, ncols, cellsize, xll, yll}, std::move(values));
    f.nodata = nodata;
    return f;
}

void write_raster(const std::filesystem::path& path, const Field& f) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write raster file " + path.string());
    char buf[64];

    out << "ncols " << f.cols() << "\n";
    out << "nrows " << f.rows() << "\n";
    std::snprintf(buf, sizeof buf, "%.9g", f.geom.x0);
    out << "xllcorner " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.9g", f.geom.y0);
    out << "yllcorner " << buf << "\n";
    std::snprintf(buf, sizeof buf, "%.9g", f.geom.spacing);
    out << "cellsize " << buf << "\n";
    if (f.nodata) {
        std::snprintf(buf, sizeof buf, "%.9g", *f.nodata);
        out << "NODATA_value " << buf << "\n";
    }
    for (Eigen::Index i = f.rows() - 1; i >= 0; --i) {
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.9g", f(i, j));
            out << buf << (j + 1 < f.cols() ? " " : "");
        }
        out << "\n";
    }
    if (!out) throw IoError("failed while writing raster file " + path.string());
}

Mask valid_mask(const Field& f) {
    Mask m(f.geom, static_cast<std::uint8_t>(1));
    for (Eigen::Index i = 0; i < f.rows(); ++i)
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            const double v = f(i, j);
            if (!std::isfinite(v) || (f.nodata && v == *f.nodata)) m(i, j) = 0;
        }
    return m;
}

}  // namespace bedrecon
