#include "robvario/contamination.hpp"

#include "robvario/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <tuple>

namespace robvario {

std::size_t contaminated_count(double epsilon, std::size_t n)
{
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw DomainError("contamination: epsilon must lie in [0, 1)");
    const double v = epsilon * static_cast<double>(n);
    const double r = std::round(v);
    if (std::abs(v - r) < 1e-9)
        return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(v));
}

std::vector<Cell> block_cells(int nx, int ny, std::size_t m, Cell center, BlockOrientation orientation)
{
    if (orientation == BlockOrientation::Tall) {
        std::vector<Cell> cells = block_cells(ny, nx, m, {center.y, center.x}, BlockOrientation::Wide);
        for (Cell& c : cells)
            std::swap(c.x, c.y);
        std::sort(cells.begin(), cells.end(), [](Cell a, Cell b) { return std::tie(a.y, a.x) < std::tie(b.y, b.x); });
        return cells;
    }

    std::vector<Cell> cells;
    if (m == 0)
        return cells;
    if (m > static_cast<std::size_t>(nx) * ny)
        throw DomainError("block_cells: block larger than grid");

    const auto ceil_div = [](std::size_t a, std::size_t b) { return (a + b - 1) / b; };
    auto w = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(m))));
    while (w * w < m)
        ++w;
    std::size_t rows = ceil_div(m, w);
    if (w > static_cast<std::size_t>(nx)) {
        w = nx;
        rows = ceil_div(m, w);
    }
    if (rows > static_cast<std::size_t>(ny)) {
        rows = ny;
        w = ceil_div(m, rows);
    }

    int x0 = center.x - static_cast<int>(ceil_div(w, 2) - 1);
    int y0 = center.y - static_cast<int>(ceil_div(rows, 2) - 1);
    x0 = std::clamp(x0, 1, nx - static_cast<int>(w) + 1);
    y0 = std::clamp(y0, 1, ny - static_cast<int>(rows) + 1);

    cells.reserve(m);
    for (std::size_t r = 0; r < rows && cells.size() < m; ++r)
        for (std::size_t c = 0; c < w && cells.size() < m; ++c)
            cells.push_back({x0 + static_cast<int>(c), y0 + static_cast<int>(r)});
    return cells;
}

Contaminated apply_outliers(const Grid& g, std::vector<Cell> cells, const ContaminationSpec& spec, RngStream& rng)
{
    if (!(spec.sigma0 > 0.0))
        throw DomainError("contamination: sigma0 must be positive");
    Grid out = g;
    for (const Cell& c : cells) {
        const double w = spec.mu0 + spec.sigma0 * rng.normal();
        if (spec.mode == ContaminationMode::Substitutive)
            out(c.x, c.y) = w;
        else
            out(c.x, c.y) += w;
    }
    return {std::move(out), std::move(cells)};
}

Contaminated contaminate_block_at(const Grid& g, const ContaminationSpec& spec, Cell center, RngStream& rng,
                                  BlockOrientation orientation)
{
    const std::size_t m = contaminated_count(spec.epsilon, g.size());
    return apply_outliers(g, block_cells(g.nx(), g.ny(), m, center, orientation), spec, rng);
}

Contaminated contaminate_block(const Grid& g, const ContaminationSpec& spec, RngStream& rng)
{
    const std::size_t m = contaminated_count(spec.epsilon, g.size());
    if (m == 0)
        return {g, {}};
    const Cell center = g.cell(rng.below(g.size()));
    BlockOrientation orientation = BlockOrientation::Wide;
    if (spec.random_orientation && rng.below(2) == 1)
        orientation = BlockOrientation::Tall;
    return apply_outliers(g, block_cells(g.nx(), g.ny(), m, center, orientation), spec, rng);
}

Contaminated contaminate_isolated(const Grid& g, const ContaminationSpec& spec, RngStream& rng)
{
    const std::size_t m = contaminated_count(spec.epsilon, g.size());
    if (m == 0)
        return {g, {}};
    // Partial Fisher-Yates over cell indices.
    std::vector<std::size_t> idx(g.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::vector<Cell> cells;
    cells.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const std::size_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
        cells.push_back(g.cell(idx[i]));
    }
    return apply_outliers(g, std::move(cells), spec, rng);
}

Contaminated contaminate(const Grid& g, const ContaminationSpec& spec, RngStream& rng)
{
    return spec.kind == ContaminationKind::Block ? contaminate_block(g, spec, rng) : contaminate_isolated(g, spec, rng);
}

ContaminationSpec parse_contamination(std::string_view text)
{
    ContaminationSpec spec;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string_view item = text.substr(start, end - start);
        start = end + 1;
        if (item.empty())
            continue;
        const std::size_t eq = item.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("contamination: expected key=value, got '" + std::string(item) + "'");
        const std::string_view key = item.substr(0, eq);
        const std::string_view val = item.substr(eq + 1);
        const auto number = [&] {
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), v);
            if (ec != std::errc() || ptr != val.data() + val.size())
                throw ParseError("contamination: bad number for " + std::string(key));
            return v;
        };
        if (key == "kind") {
            if (val == "block")
                spec.kind = ContaminationKind::Block;
            else if (val == "isolated")
                spec.kind = ContaminationKind::Isolated;
            else
                throw ParseError("contamination: unknown kind '" + std::string(val) + "'");
        } else if (key == "eps" || key == "epsilon") {
            spec.epsilon = number();
        } else if (key == "mu0") {
            spec.mu0 = number();
        } else if (key == "sigma0") {
            spec.sigma0 = number();
        } else if (key == "mode") {
            if (val == "substitutive")
                spec.mode = ContaminationMode::Substitutive;
            else if (val == "additive")
                spec.mode = ContaminationMode::Additive;
            else
                throw ParseError("contamination: unknown mode '" + std::string(val) + "'");
        } else if (key == "orient") {
            if (val == "random")
                spec.random_orientation = true;
            else if (val == "wide")
                spec.random_orientation = false;
            else
                throw ParseError("contamination: unknown orientation '" + std::string(val) + "'");
        } else {
            throw ParseError("contamination: unknown key '" + std::string(key) + "'");
        }
    }
    if (!(spec.epsilon >= 0.0 && spec.epsilon < 1.0) || !(spec.sigma0 > 0.0))
        throw ParseError("contamination: need 0 <= eps < 1 and sigma0 > 0");
    return spec;
}

std::string to_string(const ContaminationSpec& spec)
{
    std::ostringstream os;
    os << "kind=" << (spec.kind == ContaminationKind::Block ? "block" : "isolated") << ",eps=" << spec.epsilon
       << ",mu0=" << spec.mu0 << ",sigma0=" << spec.sigma0
       << ",mode=" << (spec.mode == ContaminationMode::Substitutive ? "substitutive" : "additive")
       << ",orient=" << (spec.random_orientation ? "random" : "wide");
    return os.str();
}

} // namespace robvario
