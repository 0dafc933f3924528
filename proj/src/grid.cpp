#include "robvario/grid.hpp"

#include "robvario/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace robvario {

Grid::Grid(int nx, int ny, double fill)
    : Grid(nx, ny, std::vector<double>(static_cast<std::size_t>(std::max(nx, 0)) * std::max(ny, 0), fill))
{
}

Grid::Grid(int nx, int ny, std::vector<double> values, std::vector<std::uint8_t> mask)
    : nx_(nx), ny_(ny), values_(std::move(values)), mask_(std::move(mask))
{
    if (nx < 1 || ny < 1)
        throw DomainError("Grid: dimensions must be at least 1x1");
    const std::size_t n = static_cast<std::size_t>(nx) * ny;
    if (values_.size() != n)
        throw DimensionMismatch("Grid: expected " + std::to_string(n) + " values, got " + std::to_string(values_.size()));
    if (mask_.empty())
        mask_.assign(n, 0);
    if (mask_.size() != n)
        throw DimensionMismatch("Grid: mask size does not match grid");
}

std::size_t Grid::missing_count() const
{
    return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](std::uint8_t m) { return m != 0; }));
}

std::vector<double> Grid::observed_values() const
{
    std::vector<double> out;
    out.reserve(values_.size());
    for (std::size_t i = 0; i < values_.size(); ++i)
        if (!mask_[i])
            out.push_back(values_[i]);
    return out;
}

std::string to_string(Direction d)
{
    switch (d) {
    case Direction::EW: return "ew";
    case Direction::SN: return "sn";
    case Direction::SWNE: return "swne";
    case Direction::SENW: return "senw";
    }
    return "?";
}

Direction parse_direction(std::string_view text)
{
    std::string s;
    for (char c : text)
        if (c != '-' && c != '_')
            s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    if (s == "ew" || s == "we")
        return Direction::EW;
    if (s == "sn" || s == "ns")
        return Direction::SN;
    if (s == "swne")
        return Direction::SWNE;
    if (s == "senw")
        return Direction::SENW;
    throw ParseError("unknown direction '" + std::string(text) + "'");
}

double Lag::norm() const
{
    return std::hypot(static_cast<double>(dx), static_cast<double>(dy));
}

Lag direction_step(Direction d)
{
    switch (d) {
    case Direction::EW: return {1, 0};
    case Direction::SN: return {0, 1};
    case Direction::SWNE: return {1, 1};
    case Direction::SENW: return {1, -1};
    }
    return {1, 0};
}

LagSet build_lag_set(Direction direction, int h_max)
{
    if (h_max < 1)
        throw DomainError("build_lag_set: h_max must be at least 1");
    LagSet set{direction, {}};
    const Lag step = direction_step(direction);
    for (int l = 1; l <= h_max; ++l)
        set.lags.push_back({step.dx * l, step.dy * l});
    return set;
}

std::vector<Cell> base_locations(int nx, int ny, const LagSet& lags)
{
    const Lag last = lags.lags.empty() ? Lag{} : lags.lags.back();
    // Lags are collinear multiples of the step, so the extreme lag bounds the range.
    const int x_lo = 1 + std::max(0, -last.dx);
    const int x_hi = nx - std::max(0, last.dx);
    const int y_lo = 1 + std::max(0, -last.dy);
    const int y_hi = ny - std::max(0, last.dy);
    std::vector<Cell> out;
    if (x_lo > x_hi || y_lo > y_hi)
        return out;
    out.reserve(static_cast<std::size_t>(x_hi - x_lo + 1) * (y_hi - y_lo + 1));
    for (int y = y_lo; y <= y_hi; ++y)
        for (int x = x_lo; x <= x_hi; ++x)
            out.push_back({x, y});
    return out;
}

VectorSample extract_vectors_at(const Grid& g, const LagSet& lags, const std::vector<Cell>& bases, bool differences)
{
    const int h = lags.h_max();
    const int dim = differences ? h : h + 1;
    if (dim < 1)
        throw DomainError("extract_vectors: empty lag set");

    std::vector<Cell> kept;
    kept.reserve(bases.size());
    for (const Cell& s : bases) {
        bool ok = g.observed(s.x, s.y);
        for (int l = 0; ok && l < h; ++l)
            ok = g.observed(s.x + lags.lags[l].dx, s.y + lags.lags[l].dy);
        if (ok)
            kept.push_back(s);
    }
    if (kept.empty())
        throw EmptySample("extract_vectors: no complete vectors in direction " + to_string(lags.direction));

    VectorSample out;
    out.rows.resize(static_cast<Eigen::Index>(kept.size()), dim);
    for (std::size_t r = 0; r < kept.size(); ++r) {
        const Cell s = kept[r];
        const double z0 = g(s.x, s.y);
        if (differences) {
            for (int l = 0; l < h; ++l)
                out.rows(r, l) = z0 - g(s.x + lags.lags[l].dx, s.y + lags.lags[l].dy);
        } else {
            out.rows(r, 0) = z0;
            for (int l = 0; l < h; ++l)
                out.rows(r, l + 1) = g(s.x + lags.lags[l].dx, s.y + lags.lags[l].dy);
        }
    }
    out.origins = std::move(kept);
    return out;
}

VectorSample extract_org_vectors(const Grid& g, const LagSet& lags)
{
    return extract_vectors_at(g, lags, base_locations(g.nx(), g.ny(), lags), false);
}

VectorSample extract_diff_vectors(const Grid& g, const LagSet& lags)
{
    return extract_vectors_at(g, lags, base_locations(g.nx(), g.ny(), lags), true);
}

} // namespace robvario
