#include "doctest.h"
#include "robvario/app.hpp"
#include "robvario/errors.hpp"
#include "robvario/estimators.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace robvario;

namespace {

Grid random_grid(int nx, int ny, std::uint64_t seed)
{
    RngStream r(seed, 0);
    Grid g(nx, ny);
    for (double& v : g.values())
        v = r.normal() * 0.37 + 1.0 / 3.0;
    return g;
}

int exit_code(const std::string& args)
{
    const std::string cmd = std::string(ROBVARIO_CLI) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path temp_path(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("robvario_test_" + name);
}

} // namespace

TEST_CASE("number formatting round trips")
{
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.125, 0.0})
        CHECK(parse_real(format_real(v)) == v);
    CHECK(parse_real("+1.5") == 1.5);
    CHECK_THROWS_AS(parse_real("1,5"), ParseError);
    CHECK_THROWS_AS(parse_real(""), ParseError);
    CHECK(parse_int_set("0,1,66") == std::set<int>{0, 1, 66});
    CHECK_THROWS_AS(parse_int_set("0,x"), ParseError);
}

TEST_CASE("asc round trip is bit-identical")
{
    Grid g = random_grid(7, 4, 1);
    g.set_missing(3, 2, true);
    const AscHeader h{100.5, -20.25, 30.0, -9999.0};
    std::stringstream ss;
    write_asc(ss, g, h);
    const std::string first = ss.str();
    const AscRaster r = read_asc(ss);
    CHECK(r.grid.nx() == 7);
    CHECK(r.grid.ny() == 4);
    CHECK(r.grid.mask() == g.mask());
    for (int y = 1; y <= 4; ++y)
        for (int x = 1; x <= 7; ++x)
            if (!g.missing(x, y))
                CHECK(r.grid(x, y) == g(x, y));
    CHECK(r.header.xllcorner == h.xllcorner);
    CHECK(r.header.cellsize == h.cellsize);
    std::stringstream again;
    write_asc(again, r.grid, r.header);
    CHECK(again.str() == first);

    const auto path = temp_path("roundtrip.asc");
    save_asc(path, g, h);
    CHECK(load_asc(path).grid.values()[0] == g.values()[0]);
    std::filesystem::remove(path);
}

TEST_CASE("asc orientation and nodata")
{
    std::stringstream ss("NCOLS 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n"
                         "1 2\n3 -9999\n");
    const AscRaster r = read_asc(ss);
    CHECK(r.grid(1, 2) == 1.0);
    CHECK(r.grid(2, 2) == 2.0);
    CHECK(r.grid(1, 1) == 3.0);
    CHECK(r.grid.missing(2, 1));
    CHECK(r.grid.missing_count() == 1);
}

TEST_CASE("asc errors carry positions")
{
    const std::string header = "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n";
    {
        std::stringstream ss(header + "1 2\n3 x4\n");
        try {
            read_asc(ss);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 8);
            CHECK(e.column() == 3);
        }
    }
    {
        std::stringstream ss(header + "1 2\n3\n");
        CHECK_THROWS_AS(read_asc(ss), ParseError);
    }
    {
        std::stringstream ss(header + "1 2\n3 4 5\n");
        try {
            read_asc(ss);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 8);
            CHECK(e.column() == 5);
        }
    }
    {
        std::stringstream ss("nrows 2\nncols 2\n");
        try {
            read_asc(ss);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(e.line() == 1);
        }
    }
    {
        std::stringstream ss("ncols 0\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 1\nNODATA_value -9999\n");
        CHECK_THROWS_AS(read_asc(ss), ParseError);
    }
    CHECK_THROWS_AS(load_asc("/nonexistent/raster.asc"), ParseError);
}

TEST_CASE("quality mask")
{
    const Grid g = random_grid(3, 3, 2);
    CHECK(apply_quality_mask(g, Grid(3, 3, 0.0), {0}).missing_count() == 0);
    CHECK(apply_quality_mask(g, Grid(3, 3, 1.0), {0}).missing_count() == 9);

    Grid q(3, 3, std::vector<double>{0, 1, 0, 0, 0, 2, 0, 0, 0});
    Grid pre = g;
    pre.set_missing(1, 3, true); // disjoint from the cloud codes
    const Grid out = apply_quality_mask(pre, q, {0});
    CHECK(out.missing_count() == 2 + 1);
    CHECK(out.missing(2, 1));
    CHECK(out.missing(3, 2));
    CHECK(apply_quality_mask(g, q, {0, 1, 2}).missing_count() == 0);
    Grid fractional(3, 3, 0.5);
    CHECK(apply_quality_mask(g, fractional, {0}).missing_count() == 9);
    CHECK_THROWS_AS(apply_quality_mask(g, Grid(3, 2), {0}), DimensionMismatch);
}

TEST_CASE("standardize")
{
    CHECK(mad_raw({1, 2, 3, 4, 100}) == 1.0);
    CHECK(mad_raw({1, 2, 3, 4}) == 1.0);
    const Grid five(5, 1, std::vector<double>{1, 2, 3, 4, 100});
    const auto [s, scale] = standardize(five);
    CHECK(scale == doctest::Approx(1.4826));
    CHECK(s(5, 1) == doctest::Approx(100 / 1.4826));

    const Grid g = random_grid(9, 8, 3);
    const auto [u, su] = standardize(g);
    CHECK(kMadConsistency * mad_raw(u.observed_values()) == doctest::Approx(1.0).epsilon(1e-10));
    const auto [again, one] = standardize(u);
    CHECK(one == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(again.values()[i] == doctest::Approx(u.values()[i]).epsilon(1e-12));

    Grid seven = g;
    for (double& v : seven.values())
        v *= 7.0;
    const auto [u7, s7] = standardize(seven);
    CHECK(s7 == doctest::Approx(7.0 * su));
    for (std::size_t i = 0; i < u.size(); ++i)
        CHECK(u7.values()[i] == doctest::Approx(u.values()[i]).epsilon(1e-12));

    Grid masked = g;
    masked.set_missing(1, 1, true);
    masked(1, 1) = 1e9;
    CHECK(standardize(masked).first(1, 1) == 1e9);

    CHECK_THROWS_AS(standardize(Grid(4, 4, 2.0)), DomainError);
    Grid lonely(2, 1, 1.0);
    lonely.set_missing(1, 1, true);
    CHECK_THROWS_AS(standardize(lonely), EmptySample);
}

TEST_CASE("estimates scale back from the standardized grid")
{
    const Grid g = random_grid(15, 15, 4);
    const auto [u, scale] = standardize(g);
    EstimatorOptions opts;
    for (EstimatorId id : {EstimatorId::Matheron, EstimatorId::Genton, EstimatorId::McdOrg, EstimatorId::McdOrgRe,
                           EstimatorId::McdDiff, EstimatorId::McdDiffRe})
        for (Direction d : kAllDirections) {
            const LagSet lags = build_lag_set(d, 3);
            RngStream a(1, 0), b(1, 0);
            const Eigen::VectorXd orig = estimate(id, g, lags, opts, a).values;
            const Eigen::VectorXd back = scale * scale * estimate(id, u, lags, opts, b).values;
            CHECK((orig - back).cwiseAbs().maxCoeff() <= 1e-8 * orig.cwiseAbs().maxCoeff());
        }
}

TEST_CASE("cloud fixture loads")
{
    const AscRaster ndvi = load_asc(std::string(ROBVARIO_DATA_DIR) + "/ndvi_clouds.asc");
    const AscRaster quality = load_asc(std::string(ROBVARIO_DATA_DIR) + "/ndvi_quality.asc");
    CHECK(ndvi.grid.nx() == 60);
    CHECK(ndvi.grid.ny() == 60);
    const Grid clear = apply_quality_mask(ndvi.grid, quality.grid, {0});
    CHECK(clear.missing_count() > 300);
    CHECK(clear.missing_count() < 500);
}

TEST_CASE("command line exit codes")
{
    const auto out = temp_path("cli.asc");
    const auto csv = temp_path("cli.csv");
    CHECK(exit_code("simulate --nx 12 --ny 12 --seed 3 --out " + out.string()) == 0);
    CHECK(exit_code("estimate --in " + out.string() + " --out " + csv.string()) == 0);
    std::ifstream in(csv);
    std::string header;
    std::getline(in, header);
    CHECK(header == "estimator,direction,lag,dx,dy,two_gamma,count,scale");
    CHECK(exit_code("estimate --in /nonexistent.asc") == 2);
    CHECK(exit_code("estimate --in " + out.string() + " --estimators nonsense") == 2);
    CHECK(exit_code("breakdown --scenarios block --estimators mcd.org.mod --m 5 --hmax 6") == 0);
    CHECK(exit_code("frobnicate") == 2);
    std::filesystem::remove(out);
    std::filesystem::remove(csv);
}
