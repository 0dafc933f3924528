#ifndef ROBVARIO_GRID_HPP
#define ROBVARIO_GRID_HPP

#include <Eigen/Core>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace robvario {

/// Grid coordinate, 1-based: x grows eastward, y grows northward.
struct Cell {
    int x = 1;
    int y = 1;

    friend bool operator==(const Cell&, const Cell&) = default;
    friend auto operator<=>(const Cell&, const Cell&) = default;
};

/// Rectangular raster with a missing-value mask (true = missing).
///
/// Storage is row-major with the southernmost row first, so the cell (x, y)
/// lives at index (y - 1) * nx + (x - 1).
class Grid {
public:
    Grid(int nx, int ny, double fill = 0.0);
    Grid(int nx, int ny, std::vector<double> values, std::vector<std::uint8_t> mask = {});

    int nx() const noexcept { return nx_; }
    int ny() const noexcept { return ny_; }
    std::size_t size() const noexcept { return values_.size(); }

    bool contains(int x, int y) const noexcept { return x >= 1 && x <= nx_ && y >= 1 && y <= ny_; }
    std::size_t index(int x, int y) const noexcept
    {
        return static_cast<std::size_t>(y - 1) * nx_ + static_cast<std::size_t>(x - 1);
    }
    Cell cell(std::size_t index) const noexcept
    {
        return {static_cast<int>(index % nx_) + 1, static_cast<int>(index / nx_) + 1};
    }

    double& operator()(int x, int y) { return values_[index(x, y)]; }
    double operator()(int x, int y) const { return values_[index(x, y)]; }

    bool missing(int x, int y) const { return mask_[index(x, y)] != 0; }
    bool observed(int x, int y) const { return contains(x, y) && mask_[index(x, y)] == 0; }
    void set_missing(int x, int y, bool m) { mask_[index(x, y)] = m ? 1 : 0; }

    const std::vector<double>& values() const noexcept { return values_; }
    std::vector<double>& values() noexcept { return values_; }
    const std::vector<std::uint8_t>& mask() const noexcept { return mask_; }

    std::size_t missing_count() const;
    std::vector<double> observed_values() const;

private:
    int nx_;
    int ny_;
    std::vector<double> values_;
    std::vector<std::uint8_t> mask_;
};

enum class Direction { EW, SN, SWNE, SENW };

inline constexpr Direction kAllDirections[] = {Direction::EW, Direction::SN, Direction::SWNE, Direction::SENW};

std::string to_string(Direction d);
Direction parse_direction(std::string_view text);

/// Integer lag vector.
struct Lag {
    int dx = 0;
    int dy = 0;

    double norm() const;
    friend bool operator==(const Lag&, const Lag&) = default;
};

/// Direction plus the lags h_1..h_{h_max} estimated jointly.
struct LagSet {
    Direction direction = Direction::EW;
    std::vector<Lag> lags;

    int h_max() const noexcept { return static_cast<int>(lags.size()); }
};

/// Unit step of a direction: EW (1,0), SN (0,1), SWNE (1,1), SENW (1,-1).
Lag direction_step(Direction d);

LagSet build_lag_set(Direction direction, int h_max);

/// Multivariate sample built from a grid: one row per base location.
struct VectorSample {
    Eigen::MatrixXd rows;
    std::vector<Cell> origins;

    Eigen::Index count() const noexcept { return rows.rows(); }
    Eigen::Index dim() const noexcept { return rows.cols(); }
};

/// Base locations s such that s + h_l is inside the grid for l = 0..h_max,
/// scanned y outer, x inner. Masking is not considered here.
std::vector<Cell> base_locations(int nx, int ny, const LagSet& lags);

/// Rows (Z(s), Z(s+h_1), ..., Z(s+h_hmax)); rows with any missing value are dropped.
VectorSample extract_org_vectors(const Grid& g, const LagSet& lags);

/// Rows (Z(s)-Z(s+h_1), ..., Z(s)-Z(s+h_hmax)); rows with any missing value are dropped.
VectorSample extract_diff_vectors(const Grid& g, const LagSet& lags);

/// Assemble org or diff rows for an explicit list of base locations.
VectorSample extract_vectors_at(const Grid& g, const LagSet& lags, const std::vector<Cell>& bases, bool differences);

} // namespace robvario

#endif // ROBVARIO_GRID_HPP
