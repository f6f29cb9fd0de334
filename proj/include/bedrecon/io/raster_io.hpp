#pragma once

#include <filesystem>

#include "bedrecon/grid/raster.hpp"

namespace bedrecon {

/// Reads an ESRI ASCII grid: ncols/nrows/xllcorner/yllcorner/cellsize header,
/// optional NODATA_value, then nrows rows of ncols values with the top row
/// northmost. In memory row 0 is the southmost row.
Field read_raster(const std::filesystem::path& path);

/// Writes the field in the same format with 9 significant digits.
void write_raster(const std::filesystem::path& path, const Field& f);

/// True where the cell carries data (finite and not the nodata sentinel).
Mask valid_mask(const Field& f);

}  // namespace bedrecon
