#include "robvario/app.hpp"
#include "robvario/breakdown.hpp"
#include "robvario/contamination.hpp"
#include "robvario/errors.hpp"
#include "robvario/estimators.hpp"
#include "robvario/simfield.hpp"
#include "robvario/study.hpp"
#include "robvario/variomodel.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

namespace rv = robvario;

namespace {

constexpr int kExitInput = 2;
constexpr int kExitNumerical = 3;

// Writes to --out when given, stdout otherwise.
class Output {
public:
    explicit Output(const std::string& path)
    {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path);
            if (!*file_)
                throw rv::ParseError("cannot write " + path);
        }
    }
    std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
    std::unique_ptr<std::ofstream> file_;
};

std::vector<rv::Direction> parse_directions(const std::string& text)
{
    std::vector<rv::Direction> out;
    std::stringstream ss(text);
    for (std::string tok; std::getline(ss, tok, ',');)
        if (!tok.empty())
            out.push_back(rv::parse_direction(tok));
    if (out.empty())
        throw rv::ParseError("empty direction list");
    return out;
}

std::vector<rv::LagSet> lag_sets(const std::string& directions, int hmax, int hmax_diag)
{
    std::vector<rv::LagSet> out;
    for (rv::Direction d : parse_directions(directions)) {
        const bool axis = d == rv::Direction::EW || d == rv::Direction::SN;
        out.push_back(rv::build_lag_set(d, axis ? hmax : hmax_diag));
    }
    return out;
}

struct EstimatorFlags {
    double alpha = 0.5;
    int mx = 0;
    int my = 0;
    bool drop_largest_lag = false;
    bool qn_raw_scale = false;
    std::string reweight = "kept";

    void add(CLI::App* app)
    {
        app->add_option("--alpha", alpha, "MCD subset fraction")->check(CLI::Range(0.5, 1.0));
        app->add_option("--mx", mx, "dependence range along x for .mod estimators")->check(CLI::NonNegativeNumber);
        app->add_option("--my", my, "dependence range along y for .mod estimators")->check(CLI::NonNegativeNumber);
        app->add_flag("--drop-largest-lag", drop_largest_lag, "omit the largest lag of MCD.org variants");
        app->add_flag("--qn-raw-scale", qn_raw_scale, "skip the Qn small-sample factor");
        app->add_option("--reweight", reweight, "reweighted scatter scaling: kept, delta, observed")
            ->check(CLI::IsMember({"kept", "delta", "observed"}));
    }

    rv::EstimatorOptions options() const
    {
        rv::EstimatorOptions o;
        o.mcd.alpha = alpha;
        o.mcd.reweight_scaling = reweight == "delta"      ? rv::ReweightScaling::Delta
                                 : reweight == "observed" ? rv::ReweightScaling::ObservedFraction
                                                          : rv::ReweightScaling::KeptCovariance;
        o.qn.small_sample_correction = !qn_raw_scale;
        o.mod = {mx, my, true};
        o.drop_largest_lag = drop_largest_lag;
        return o;
    }
};

rv::Grid load_grid(const std::string& in, const std::string& quality, const std::string& clear_codes)
{
    rv::Grid g = rv::load_asc(in).grid;
    if (!quality.empty())
        g = rv::apply_quality_mask(g, rv::load_asc(quality).grid, rv::parse_int_set(clear_codes));
    return g;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Robust directional variogram estimation"};
    app.require_subcommand(1);

    // simulate
    std::string model_text = rv::to_string(rv::reference_model());
    int nx = 15, ny = 15;
    double mean = 0.0;
    std::uint64_t seed = 1, stream = 0;
    std::string out_path;
    auto* sim = app.add_subcommand("simulate", "write one Gaussian field realization as an ESRI ASCII grid");
    sim->add_option("--model", model_text, "family:R:beta[:theta:b]");
    sim->add_option("--nx", nx)->check(CLI::PositiveNumber);
    sim->add_option("--ny", ny)->check(CLI::PositiveNumber);
    sim->add_option("--mean", mean);
    sim->add_option("--seed", seed);
    sim->add_option("--stream", stream, "stream id within the seed");
    sim->add_option("--out", out_path, "output .asc (stdout when omitted)");

    // estimate
    std::string in_path, quality_path, clear_codes = "0", directions = "ew,sn,swne,senw";
    std::string estimators = "matheron,genton,mcd.diff.re,mcd.org.re";
    int hmax = 4, hmax_diag = 3;
    bool standardize = false;
    EstimatorFlags est_flags;
    auto* est = app.add_subcommand("estimate", "directional variograms of a raster, written as CSV");
    est->add_option("--in", in_path, "input .asc")->required();
    est->add_option("--quality", quality_path, "quality raster; cells outside --clear-codes are masked");
    est->add_option("--clear-codes", clear_codes, "comma-separated clear quality codes");
    est->add_flag("--standardize", standardize, "divide by 1.4826 * MAD before estimation");
    est->add_option("--hmax", hmax, "h_max for ew and sn")->check(CLI::PositiveNumber);
    est->add_option("--hmax-diag", hmax_diag, "h_max for swne and senw")->check(CLI::PositiveNumber);
    est->add_option("--directions", directions);
    est->add_option("--estimators", estimators);
    est->add_option("--seed", seed);
    est->add_option("--out", out_path, "output CSV (stdout when omitted)");
    est_flags.add(est);

    // contaminate
    std::string contam_text = "kind=block,eps=0.05,mu0=3,sigma0=1";
    std::string quality_in, quality_out;
    std::vector<int> center;
    auto* con = app.add_subcommand("contaminate", "plant outliers in a raster");
    con->add_option("--in", in_path, "input .asc")->required();
    con->add_option("--contam", contam_text, "kind=block|isolated,eps=,mu0=,sigma0=,mode=,orient=");
    con->add_option("--center", center, "block centre x y (1-based)")->expected(2);
    con->add_option("--seed", seed);
    con->add_option("--stream", stream);
    con->add_option("--quality-in", quality_in, "quality raster to extend (default: all clear)");
    con->add_option("--quality-out", quality_out, "write a quality raster with contaminated cells set to 1");
    con->add_option("--out", out_path, "output .asc (stdout when omitted)");

    // studies
    int reps = 1000, threads = 0;
    std::string divisor = "hmax-1", corrfac_path, table_dirs;
    bool table = false;
    EstimatorFlags study_flags;
    std::string study_estimators = "matheron,genton,mcd.diff,mcd.diff.re,mcd.org,mcd.org.re";
    int study_hmax = 7, study_hmax_diag = 5;
    const auto add_study_options = [&](CLI::App* s) {
        s->add_option("--model", model_text, "family:R:beta[:theta:b]");
        s->add_option("--nx", nx)->check(CLI::PositiveNumber);
        s->add_option("--ny", ny)->check(CLI::PositiveNumber);
        s->add_option("--hmax", study_hmax, "h_max for ew and sn")->check(CLI::PositiveNumber);
        s->add_option("--hmax-diag", study_hmax_diag, "h_max for swne and senw")->check(CLI::PositiveNumber);
        s->add_option("--directions", directions);
        s->add_option("--estimators", study_estimators);
        s->add_option("--reps", reps)->check(CLI::Range(2, 100000000));
        s->add_option("--seed", seed);
        s->add_option("--threads", threads, "0 = hardware concurrency");
        s->add_option("--out", out_path, "output CSV (stdout when omitted)");
        study_flags.add(s);
    };
    auto* corr = app.add_subcommand("study-corrfac", "simulated finite-sample correction factors");
    add_study_options(corr);
    corr->add_option("--divisor", divisor, "lag-average divisor")->check(CLI::IsMember({"hmax", "hmax-1"}));
    auto* bias = app.add_subcommand("study-biasrmse", "bias and rMSE under an optional contamination scenario");
    add_study_options(bias);
    bias->add_option("--contam", contam_text, "kind=block|isolated,eps=,mu0=,sigma0=,mode=,orient=");
    bias->add_flag("--clean", "run without contamination");
    bias->add_option("--corrfac", corrfac_path, "correction-factor CSV from study-corrfac");
    bias->add_flag("--table", table, "report variogram (2*gamma) values times 10, as in published tables");

    // breakdown
    std::string scenarios = "block,isolated";
    std::string bd_estimators = "mcd.org,mcd.diff,mcd.org.mod,mcd.diff.mod,genton";
    int bd_nx = 50, bd_hmax = 4, bd_m = 0;
    auto* bd = app.add_subcommand("breakdown", "closed-form explosion breakdown points as exact fractions");
    bd->add_option("--scenarios", scenarios);
    bd->add_option("--estimators", bd_estimators);
    bd->add_option("--nx", bd_nx)->check(CLI::PositiveNumber);
    bd->add_option("--hmax", bd_hmax)->check(CLI::PositiveNumber);
    bd->add_option("--m", bd_m)->check(CLI::NonNegativeNumber);
    bd->add_option("--out", out_path, "output CSV (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitInput;
    }

    try {
        if (*sim) {
            rv::FieldSpec spec;
            spec.model = rv::parse_model(model_text);
            spec.nx = nx;
            spec.ny = ny;
            spec.mean = mean;
            rv::RngStream rng(seed, stream);
            const rv::Grid g = rv::simulate_field(spec, rng);
            Output out(out_path);
            rv::write_asc(out.stream(), g);
        } else if (*est) {
            rv::Grid g = load_grid(in_path, quality_path, clear_codes);
            double scale = 1.0;
            if (standardize)
                std::tie(g, scale) = rv::standardize(g);
            const auto ids = rv::parse_estimator_list(estimators);
            const auto opts = est_flags.options();
            Output out(out_path);
            auto& os = out.stream();
            os << "estimator,direction,lag,dx,dy,two_gamma,count,scale\n";
            for (const rv::LagSet& lags : lag_sets(directions, hmax, hmax_diag)) {
                for (rv::EstimatorId id : ids) {
                    rv::RngStream rng(seed, 0);
                    const rv::VariogramEstimate e = rv::estimate(id, g, lags, opts, rng);
                    for (Eigen::Index l = 0; l < e.values.size(); ++l)
                        os << e.estimator_id << ',' << rv::to_string(lags.direction) << ',' << l + 1 << ','
                           << e.lags.lags[l].dx << ',' << e.lags.lags[l].dy << ',' << rv::format_real(e.values[l])
                           << ',' << e.counts[l] << ',' << rv::format_real(scale) << '\n';
                }
            }
        } else if (*con) {
            const rv::AscRaster raster = rv::load_asc(in_path);
            const rv::ContaminationSpec spec = rv::parse_contamination(contam_text);
            rv::RngStream rng(seed, stream);
            rv::Contaminated c = [&] {
                if (center.empty())
                    return rv::contaminate(raster.grid, spec, rng);
                if (spec.kind != rv::ContaminationKind::Block)
                    throw rv::ParseError("--center applies to block contamination only");
                const rv::Cell at{center[0], center[1]};
                if (!raster.grid.contains(at.x, at.y))
                    throw rv::DomainError("--center lies outside the grid");
                const auto orientation = spec.random_orientation && rng.below(2) == 1 ? rv::BlockOrientation::Tall
                                                                                       : rv::BlockOrientation::Wide;
                return rv::contaminate_block_at(raster.grid, spec, at, rng, orientation);
            }();
            if (!quality_out.empty()) {
                rv::Grid q = quality_in.empty() ? rv::Grid(raster.grid.nx(), raster.grid.ny(), 0.0)
                                                : rv::load_asc(quality_in).grid;
                if (q.nx() != raster.grid.nx() || q.ny() != raster.grid.ny())
                    throw rv::DimensionMismatch("--quality-in does not match the input raster");
                for (const rv::Cell& cell : c.cells)
                    q(cell.x, cell.y) = 1.0;
                rv::save_asc(quality_out, q, raster.header);
            }
            Output out(out_path);
            rv::write_asc(out.stream(), c.grid, raster.header);
        } else if (*corr || *bias) {
            rv::StudySpec spec;
            spec.field.model = rv::parse_model(model_text);
            spec.field.nx = nx;
            spec.field.ny = ny;
            spec.lag_sets = lag_sets(directions, study_hmax, study_hmax_diag);
            spec.estimators = rv::parse_estimator_list(study_estimators);
            spec.replications = reps;
            spec.base_seed = seed;
            spec.threads = threads;
            spec.options = study_flags.options();
            Output out(out_path);
            if (*corr) {
                spec.corrfac_divisor = divisor == "hmax" ? rv::CorrfacDivisor::HMax : rv::CorrfacDivisor::HMaxMinus1;
                rv::write_correction_csv(out.stream(), rv::run_correction_factor_study(spec));
            } else {
                if (bias->count("--clean") == 0)
                    spec.contamination = rv::parse_contamination(contam_text);
                if (!corrfac_path.empty()) {
                    std::ifstream in(corrfac_path);
                    if (!in)
                        throw rv::ParseError("cannot open " + corrfac_path);
                    spec.correction_factors = rv::read_correction_csv(in);
                }
                const rv::StudyResult r = rv::run_bias_rmse_study(spec);
                rv::write_bias_rmse_csv(out.stream(), r.cells, table ? 20.0 : 1.0);
            }
        } else if (*bd) {
            Output out(out_path);
            auto& os = out.stream();
            os << "scenario,estimator,n_x,h_max,m,breakdown,value\n";
            std::stringstream ss_sc(scenarios);
            for (std::string sc; std::getline(ss_sc, sc, ',');) {
                std::stringstream ss_est(bd_estimators);
                for (std::string e; std::getline(ss_est, e, ',');) {
                    rv::BreakdownQuery q{rv::parse_scenario(sc), rv::parse_breakdown_estimator(e), bd_nx, bd_hmax, bd_m};
                    os << sc << ',' << e << ',' << bd_nx << ',' << bd_hmax << ',' << bd_m << ',';
                    try {
                        const rv::Rational r = rv::breakdown_point(q);
                        os << r.str() << ',' << rv::format_real(r.value()) << '\n';
                    } catch (const rv::NotUsable&) {
                        os << "NA,NA\n";
                    }
                }
            }
        }
    } catch (const rv::NumericalFailure& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const rv::NotPositiveDefinite& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const rv::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitInput;
    }
    return 0;
}
