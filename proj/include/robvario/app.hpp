#ifndef ROBVARIO_APP_HPP
#define ROBVARIO_APP_HPP

#include "robvario/grid.hpp"

#include <filesystem>
#include <iosfwd>
#include <set>
#include <string>
#include <string_view>
#include <utility>

namespace robvario {

/// Georeferencing header of an ESRI ASCII grid.
struct AscHeader {
    double xllcorner = 0.0;
    double yllcorner = 0.0;
    double cellsize = 1.0;
    double nodata_value = -9999.0;
};

struct AscRaster {
    Grid grid;
    AscHeader header;
};

/// Reads an ESRI ASCII grid. The first data row in the file is the northernmost,
/// so rows are reversed into the south-first Grid layout. Nodata cells are masked.
AscRaster read_asc(std::istream& is);
AscRaster load_asc(const std::filesystem::path& path);

/// Masked cells are written as the header's nodata value.
void write_asc(std::ostream& os, const Grid& g, const AscHeader& header = {});
void save_asc(const std::filesystem::path& path, const Grid& g, const AscHeader& header = {});

/// Masks every cell whose quality code is not in clear_codes.
Grid apply_quality_mask(const Grid& g, const Grid& quality, const std::set<int>& clear_codes);

inline constexpr double kMadConsistency = 1.4826;

/// Raw median absolute deviation from the median.
double mad_raw(std::vector<double> values);

/// Divides observed cells by 1.4826 * MAD; returns the grid and that scale.
std::pair<Grid, double> standardize(const Grid& g);

/// Shortest text that reads back to the same double (at most 17 significant digits).
std::string format_real(double v);

/// Locale-independent parse of the whole string; ParseError carries line/column.
double parse_real(std::string_view text, int line = 0, int column = 0);

std::set<int> parse_int_set(std::string_view text);

} // namespace robvario

#endif // ROBVARIO_APP_HPP
