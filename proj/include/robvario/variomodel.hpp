#ifndef ROBVARIO_VARIOMODEL_HPP
#define ROBVARIO_VARIOMODEL_HPP

#include "robvario/grid.hpp"

#include <string>
#include <string_view>

namespace robvario {

enum class Family { Spherical, Exponential, Gaussian };

std::string to_string(Family f);
Family parse_family(std::string_view text);

/// Isotropic variogram 2*gamma0(d). `sill` is the limit of 2*gamma0, so the
/// process variance is sill / 2. Exponential and gaussian use the practical
/// range: 2*gamma0(range) is 95% of the sill.
struct IsoModel {
    Family family = Family::Spherical;
    double range = 1.0;
    double sill = 1.0;
};

/// Geometric anisotropy: lags are rotated by `theta` and the second rotated
/// coordinate is scaled by sqrt(1 / ratio) before the isotropic model applies.
struct AnisoModel {
    IsoModel iso;
    double theta = 0.0;
    double ratio = 1.0;
};

double iso_variogram(const IsoModel& m, double distance);

/// Norm of T * R * h.
double transformed_norm(const AnisoModel& m, double hx, double hy);

double aniso_variogram(const AnisoModel& m, double hx, double hy);
inline double aniso_variogram(const AnisoModel& m, Lag h) { return aniso_variogram(m, h.dx, h.dy); }

/// C(h) = sill/2 - gamma(h).
double model_covariance(const AnisoModel& m, double hx, double hy);
inline double model_covariance(const AnisoModel& m, Lag h) { return model_covariance(m, h.dx, h.dy); }

/// Parses "family:R:beta[:theta:b]"; theta in radians.
AnisoModel parse_model(std::string_view text);
std::string to_string(const AnisoModel& m);

/// Spherical R=5, sill 2, theta=3*pi/8, b=2 on which the simulation study is built.
AnisoModel reference_model();

} // namespace robvario

#endif // ROBVARIO_VARIOMODEL_HPP
