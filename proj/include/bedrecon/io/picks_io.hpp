#pragma once

#include <filesystem>

#include "bedrecon/data/scene.hpp"

namespace bedrecon {

/// Reads a pick CSV with header `x,y,bed`.
RadarPicks read_picks(const std::filesystem::path& path);

void write_picks(const std::filesystem::path& path, const RadarPicks& picks);

}  // namespace bedrecon
