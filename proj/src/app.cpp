#include "robvario/app.hpp"

#include "robvario/errors.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

namespace robvario {

std::string format_real(double v)
{
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

double parse_real(std::string_view text, int line, int column)
{
    double v = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    if (first != last && *first == '+')
        ++first;
    const auto res = std::from_chars(first, last, v);
    if (res.ec != std::errc{} || res.ptr != last || first == last)
        throw ParseError("cannot parse number '" + std::string(text) + "'", line, column);
    return v;
}

std::set<int> parse_int_set(std::string_view text)
{
    std::set<int> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        const std::string_view tok = text.substr(start, end - start);
        if (!tok.empty()) {
            int v = 0;
            const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
                throw ParseError("cannot parse integer '" + std::string(tok) + "'");
            out.insert(v);
        }
        start = end + 1;
    }
    return out;
}

namespace {

struct Token {
    std::string text;
    int line;
    int column;
};

// Whitespace tokenizer remembering where each token starts.
class Tokens {
public:
    explicit Tokens(std::istream& is) : is_(is) {}

    bool next(Token& t)
    {
        while (true) {
            while (pos_ < cur_.size() && std::isspace(static_cast<unsigned char>(cur_[pos_])))
                ++pos_;
            if (pos_ < cur_.size())
                break;
            if (!std::getline(is_, cur_))
                return false;
            ++line_;
            pos_ = 0;
        }
        const std::size_t start = pos_;
        while (pos_ < cur_.size() && !std::isspace(static_cast<unsigned char>(cur_[pos_])))
            ++pos_;
        t = {cur_.substr(start, pos_ - start), line_, static_cast<int>(start) + 1};
        return true;
    }

    int line() const { return line_; }

private:
    std::istream& is_;
    std::string cur_;
    std::size_t pos_ = 0;
    int line_ = 0;
};

bool iequals(std::string_view a, std::string_view b)
{
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

int parse_count(const Token& t)
{
    int v = 0;
    const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size() || v < 1)
        throw ParseError("expected a positive integer, got '" + t.text + "'", t.line, t.column);
    return v;
}

} // namespace

AscRaster read_asc(std::istream& is)
{
    Tokens tokens(is);
    constexpr std::array<std::string_view, 6> keys{"ncols", "nrows", "xllcorner", "yllcorner", "cellsize",
                                                   "NODATA_value"};
    std::array<Token, 6> values;
    for (std::size_t i = 0; i < keys.size(); ++i) {
        Token key;
        if (!tokens.next(key))
            throw ParseError("asc: missing header key " + std::string(keys[i]), tokens.line() + 1, 1);
        if (!iequals(key.text, keys[i]))
            throw ParseError("asc: expected header key " + std::string(keys[i]) + ", found '" + key.text + "'",
                             key.line, key.column);
        if (!tokens.next(values[i]))
            throw ParseError("asc: missing value for " + std::string(keys[i]), key.line, key.column);
    }
    const int ncols = parse_count(values[0]);
    const int nrows = parse_count(values[1]);
    AscHeader header;
    header.xllcorner = parse_real(values[2].text, values[2].line, values[2].column);
    header.yllcorner = parse_real(values[3].text, values[3].line, values[3].column);
    header.cellsize = parse_real(values[4].text, values[4].line, values[4].column);
    header.nodata_value = parse_real(values[5].text, values[5].line, values[5].column);

    const std::size_t total = static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
    std::vector<double> cells(total);
    std::vector<std::uint8_t> mask(total, 0);
    Token t;
    for (std::size_t i = 0; i < total; ++i) {
        if (!tokens.next(t))
            throw ParseError("asc: expected " + std::to_string(total) + " cells, found " + std::to_string(i),
                             tokens.line(), 1);
        const double v = parse_real(t.text, t.line, t.column);
        // File row 0 is the northernmost grid row.
        const std::size_t file_row = i / static_cast<std::size_t>(ncols);
        const std::size_t col = i % static_cast<std::size_t>(ncols);
        const std::size_t idx = (static_cast<std::size_t>(nrows) - 1 - file_row) * ncols + col;
        cells[idx] = v;
        if (v == header.nodata_value) {
            mask[idx] = 1;
            cells[idx] = 0.0;
        }
    }
    if (tokens.next(t))
        throw ParseError("asc: more than " + std::to_string(total) + " cells", t.line, t.column);
    return {Grid(ncols, nrows, std::move(cells), std::move(mask)), header};
}

AscRaster load_asc(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path.string());
    return read_asc(in);
}

void write_asc(std::ostream& os, const Grid& g, const AscHeader& header)
{
    os << "ncols " << g.nx() << '\n'
       << "nrows " << g.ny() << '\n'
       << "xllcorner " << format_real(header.xllcorner) << '\n'
       << "yllcorner " << format_real(header.yllcorner) << '\n'
       << "cellsize " << format_real(header.cellsize) << '\n'
       << "NODATA_value " << format_real(header.nodata_value) << '\n';
    for (int y = g.ny(); y >= 1; --y) {
        for (int x = 1; x <= g.nx(); ++x) {
            if (x > 1)
                os << ' ';
            os << format_real(g.missing(x, y) ? header.nodata_value : g(x, y));
        }
        os << '\n';
    }
}

void save_asc(const std::filesystem::path& path, const Grid& g, const AscHeader& header)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path.string());
    write_asc(out, g, header);
}

Grid apply_quality_mask(const Grid& g, const Grid& quality, const std::set<int>& clear_codes)
{
    if (g.nx() != quality.nx() || g.ny() != quality.ny())
        throw DimensionMismatch("quality raster is " + std::to_string(quality.nx()) + "x" +
                                std::to_string(quality.ny()) + ", grid is " + std::to_string(g.nx()) + "x" +
                                std::to_string(g.ny()));
    Grid out = g;
    for (int y = 1; y <= g.ny(); ++y)
        for (int x = 1; x <= g.nx(); ++x) {
            const double code = quality(x, y);
            const bool clear = !quality.missing(x, y) && code == std::round(code) &&
                               clear_codes.count(static_cast<int>(code)) > 0;
            if (!clear)
                out.set_missing(x, y, true);
        }
    return out;
}

namespace {

double median_of(std::vector<double>& v)
{
    const std::size_t n = v.size();
    const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
    std::nth_element(v.begin(), mid, v.end());
    const double upper = *mid;
    if (n % 2 == 1)
        return upper;
    const double lower = *std::max_element(v.begin(), mid);
    return 0.5 * (lower + upper);
}

} // namespace

double mad_raw(std::vector<double> values)
{
    if (values.empty())
        throw EmptySample("mad: no values");
    const double med = median_of(values);
    for (double& v : values)
        v = std::abs(v - med);
    return median_of(values);
}

std::pair<Grid, double> standardize(const Grid& g)
{
    const std::vector<double> obs = g.observed_values();
    if (obs.size() < 2)
        throw EmptySample("standardize: fewer than two observed cells");
    const double scale = kMadConsistency * mad_raw(obs);
    if (!(scale > 0.0))
        throw DomainError("standardize: observed cells have zero MAD");
    Grid out = g;
    for (int y = 1; y <= g.ny(); ++y)
        for (int x = 1; x <= g.nx(); ++x)
            if (!g.missing(x, y))
                out(x, y) = g(x, y) / scale;
    return {out, scale};
}

} // namespace robvario
