#include "robvario/variomodel.hpp"

#include "robvario/errors.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>
#include <vector>

namespace robvario {

std::string to_string(Family f)
{
    switch (f) {
    case Family::Spherical: return "spherical";
    case Family::Exponential: return "exponential";
    case Family::Gaussian: return "gaussian";
    }
    return "?";
}

Family parse_family(std::string_view text)
{
    if (text == "spherical" || text == "sph")
        return Family::Spherical;
    if (text == "exponential" || text == "exp")
        return Family::Exponential;
    if (text == "gaussian" || text == "gau")
        return Family::Gaussian;
    throw ParseError("unknown variogram family '" + std::string(text) + "'");
}

double iso_variogram(const IsoModel& m, double d)
{
    if (!(d >= 0.0))
        throw DomainError("iso_variogram: distance must be nonnegative");
    if (d == 0.0)
        return 0.0;
    const double r = d / m.range;
    switch (m.family) {
    case Family::Spherical:
        return r >= 1.0 ? m.sill : m.sill * (1.5 * r - 0.5 * r * r * r);
    case Family::Exponential:
        return m.sill * (1.0 - std::exp(-3.0 * r));
    case Family::Gaussian:
        return m.sill * (1.0 - std::exp(-3.0 * r * r));
    }
    return 0.0;
}

double transformed_norm(const AnisoModel& m, double hx, double hy)
{
    const double c = std::cos(m.theta);
    const double s = std::sin(m.theta);
    const double u = c * hx + s * hy;
    const double v = (-s * hx + c * hy) * std::sqrt(1.0 / m.ratio);
    return std::hypot(u, v);
}

double aniso_variogram(const AnisoModel& m, double hx, double hy)
{
    return iso_variogram(m.iso, transformed_norm(m, hx, hy));
}

double model_covariance(const AnisoModel& m, double hx, double hy)
{
    return 0.5 * (m.iso.sill - aniso_variogram(m, hx, hy));
}

namespace {

double parse_real(std::string_view token, std::string_view what)
{
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size())
        throw ParseError("model: cannot parse " + std::string(what) + " '" + std::string(token) + "'");
    return v;
}

} // namespace

AnisoModel parse_model(std::string_view text)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = text.find(':', start);
        parts.push_back(text.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    if (parts.size() != 3 && parts.size() != 5)
        throw ParseError("model: expected family:R:beta[:theta:b], got '" + std::string(text) + "'");

    AnisoModel m;
    m.iso.family = parse_family(parts[0]);
    m.iso.range = parse_real(parts[1], "range");
    m.iso.sill = parse_real(parts[2], "sill");
    if (parts.size() == 5) {
        m.theta = parse_real(parts[3], "theta");
        m.ratio = parse_real(parts[4], "ratio");
    }
    if (!(m.iso.range > 0.0) || !(m.iso.sill > 0.0) || !(m.ratio > 0.0))
        throw ParseError("model: range, sill and ratio must be positive");
    return m;
}

std::string to_string(const AnisoModel& m)
{
    std::ostringstream os;
    os.precision(17);
    os << to_string(m.iso.family) << ':' << m.iso.range << ':' << m.iso.sill << ':' << m.theta << ':' << m.ratio;
    return os.str();
}

AnisoModel reference_model()
{
    return {{Family::Spherical, 5.0, 2.0}, 3.0 * std::numbers::pi / 8.0, 2.0};
}

} // namespace robvario
