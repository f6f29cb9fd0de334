#include "bedrecon/io/picks_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace bedrecon {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) {
        const auto b = cell.find_first_not_of(" \t\r");
        const auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

RadarPicks read_picks(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open picks file " + path.string());
    const std::string name = path.string();

    std::string line;
    long line_no = 0;
    if (!std::getline(in, line)) throw ParseError(name, 1, "empty picks file");
    ++line_no;
    const auto header = split_csv(line);
    if (header.size() != 3 || header[0] != "x" || header[1] != "y" || header[2] != "bed")
        throw ParseError(name, 1, "picks header must be 'x,y,bed'");

    RadarPicks picks;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 3)
            throw ParseError(name, line_no, "expected 3 comma-separated values");
        Pick p;
        try {
            size_t used = 0;
            p.x = std::stod(cells[0], &used);
            if (used != cells[0].size()) throw std::invalid_argument("x");
            p.y = std::stod(cells[1], &used);
            if (used != cells[1].size()) throw std::invalid_argument("y");
            p.bed = std::stod(cells[2], &used);
            if (used != cells[2].size()) throw std::invalid_argument("bed");
        } catch (const std::exception&) {
            throw ParseError(name, line_no, "non-numeric value in picks row");
        }
        picks.records.push_back(p);
    }
    return picks;
}

void write_picks(const std::filesystem::path& path, const RadarPicks& picks) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write picks file " + path.string());
    out << "x,y,bed\n";
    char buf[96];
    for (const Pick& p : picks.records) {
        std::snprintf(buf, sizeof buf, "%.9g,%.9g,%.9g", p.x, p.y, p.bed);
        out << buf << "\n";
    }
    if (!out) throw IoError("failed while writing picks file " + path.string());
}

}  // namespace bedrecon
