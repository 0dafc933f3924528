#include "robvario/estimators.hpp"

#include "robvario/errors.hpp"

#include <array>
#include <cmath>

namespace robvario {

namespace {

struct IdName {
    EstimatorId id;
    std::string_view name;
};

constexpr std::array<IdName, 10> kNames{{
    {EstimatorId::Matheron, "matheron"},
    {EstimatorId::Genton, "genton"},
    {EstimatorId::McdOrg, "mcd.org"},
    {EstimatorId::McdOrgRe, "mcd.org.re"},
    {EstimatorId::McdDiff, "mcd.diff"},
    {EstimatorId::McdDiffRe, "mcd.diff.re"},
    {EstimatorId::McdOrgMod, "mcd.org.mod"},
    {EstimatorId::McdOrgModRe, "mcd.org.mod.re"},
    {EstimatorId::McdDiffMod, "mcd.diff.mod"},
    {EstimatorId::McdDiffModRe, "mcd.diff.mod.re"},
}};

std::string mcd_name(VectorKind kind, bool mod, bool reweight)
{
    std::string s = kind == VectorKind::Org ? "mcd.org" : "mcd.diff";
    if (mod)
        s += ".mod";
    if (reweight)
        s += ".re";
    return s;
}

VariogramEstimate from_fit(const McdFit& fit, const LagSet& lags, VectorKind kind, long count, std::string id)
{
    VariogramEstimate est;
    est.estimator_id = std::move(id);
    est.lags = lags;
    est.values = variogram_from_scatter(fit.sigma, kind);
    est.counts.assign(lags.lags.size(), count);
    return est;
}

VectorSample extract(const Grid& g, const LagSet& lags, VectorKind kind)
{
    return kind == VectorKind::Org ? extract_org_vectors(g, lags) : extract_diff_vectors(g, lags);
}

} // namespace

std::string to_string(EstimatorId id)
{
    for (const auto& n : kNames)
        if (n.id == id)
            return std::string(n.name);
    return "?";
}

EstimatorId parse_estimator(std::string_view text)
{
    for (const auto& n : kNames)
        if (n.name == text)
            return n.id;
    throw ParseError("unknown estimator '" + std::string(text) + "'");
}

std::vector<EstimatorId> parse_estimator_list(std::string_view text)
{
    std::vector<EstimatorId> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = std::min(text.find(',', start), text.size());
        if (end > start)
            out.push_back(parse_estimator(text.substr(start, end - start)));
        start = end + 1;
    }
    if (out.empty())
        throw ParseError("empty estimator list");
    return out;
}

bool is_mcd(EstimatorId id)
{
    return id != EstimatorId::Matheron && id != EstimatorId::Genton;
}

bool is_reweighted(EstimatorId id)
{
    return id == EstimatorId::McdOrgRe || id == EstimatorId::McdDiffRe || id == EstimatorId::McdOrgModRe ||
           id == EstimatorId::McdDiffModRe;
}

bool is_mod(EstimatorId id)
{
    return id == EstimatorId::McdOrgMod || id == EstimatorId::McdOrgModRe || id == EstimatorId::McdDiffMod ||
           id == EstimatorId::McdDiffModRe;
}

VectorKind vector_kind(EstimatorId id)
{
    switch (id) {
    case EstimatorId::McdOrg:
    case EstimatorId::McdOrgRe:
    case EstimatorId::McdOrgMod:
    case EstimatorId::McdOrgModRe: return VectorKind::Org;
    default: return VectorKind::Diff;
    }
}

VariogramEstimate matheron(const Grid& g, const LagSet& lags)
{
    VariogramEstimate est;
    est.estimator_id = "matheron";
    est.lags = lags;
    est.values.resize(lags.h_max());
    for (int l = 0; l < lags.h_max(); ++l) {
        const Lag h = lags.lags[l];
        double sum = 0.0;
        long count = 0;
        for (int y = 1; y <= g.ny(); ++y)
            for (int x = 1; x <= g.nx(); ++x)
                if (g.observed(x, y) && g.observed(x + h.dx, y + h.dy)) {
                    const double d = g(x, y) - g(x + h.dx, y + h.dy);
                    sum += d * d;
                    ++count;
                }
        if (count == 0)
            throw EmptySample("matheron: no observed pairs at lag " + std::to_string(l + 1));
        est.values[l] = sum / static_cast<double>(count);
        est.counts.push_back(count);
    }
    return est;
}

VariogramEstimate genton(const Grid& g, const LagSet& lags, const QnConfig& cfg)
{
    VariogramEstimate est;
    est.estimator_id = "genton";
    est.lags = lags;
    est.values.resize(lags.h_max());
    std::vector<double> diffs;
    for (int l = 0; l < lags.h_max(); ++l) {
        const Lag h = lags.lags[l];
        diffs.clear();
        for (int y = 1; y <= g.ny(); ++y)
            for (int x = 1; x <= g.nx(); ++x)
                if (g.observed(x, y) && g.observed(x + h.dx, y + h.dy))
                    diffs.push_back(g(x, y) - g(x + h.dx, y + h.dy));
        if (diffs.size() < 2)
            throw EmptySample("genton: fewer than two observed pairs at lag " + std::to_string(l + 1));
        const double s = qn(diffs, cfg);
        est.values[l] = s * s;
        est.counts.push_back(static_cast<long>(diffs.size()));
    }
    return est;
}

Eigen::VectorXd variogram_from_scatter(const Eigen::MatrixXd& sigma, VectorKind kind)
{
    if (kind == VectorKind::Diff)
        return sigma.diagonal();

    const Eigen::Index p = sigma.rows();
    const double a0 = sigma.diagonal().mean();
    Eigen::VectorXd out(p - 1);
    for (Eigen::Index l = 1; l < p; ++l) {
        // Average both off-diagonals; the fitted scatter is symmetric up to rounding.
        const double al = 0.5 * (sigma.diagonal(l).mean() + sigma.diagonal(-l).mean());
        out[l - 1] = 2.0 * (a0 - al);
    }
    return out;
}

std::pair<VariogramEstimate, VariogramEstimate> mcd_raw_and_reweighted(const Grid& g, const LagSet& lags,
                                                                       VectorKind kind, const McdConfig& cfg,
                                                                       RngStream& rng)
{
    const VectorSample sample = extract(g, lags, kind);
    const McdFit raw = fast_mcd(sample.rows, cfg, rng);
    const McdFit re = reweight_mcd(sample.rows, raw, cfg);
    return {from_fit(raw, lags, kind, sample.count(), mcd_name(kind, false, false)),
            from_fit(re, lags, kind, sample.count(), mcd_name(kind, false, true))};
}

namespace {

VariogramEstimate mcd_plain(const Grid& g, const LagSet& lags, VectorKind kind, const McdConfig& cfg, bool reweight,
                            RngStream& rng)
{
    const VectorSample sample = extract(g, lags, kind);
    McdFit fit = fast_mcd(sample.rows, cfg, rng);
    if (reweight)
        fit = reweight_mcd(sample.rows, fit, cfg);
    return from_fit(fit, lags, kind, sample.count(), mcd_name(kind, false, reweight));
}

} // namespace

VariogramEstimate mcd_diff(const Grid& g, const LagSet& lags, const McdConfig& cfg, bool reweight, RngStream& rng)
{
    return mcd_plain(g, lags, VectorKind::Diff, cfg, reweight, rng);
}

VariogramEstimate mcd_org(const Grid& g, const LagSet& lags, const McdConfig& cfg, bool reweight, RngStream& rng)
{
    return mcd_plain(g, lags, VectorKind::Org, cfg, reweight, rng);
}

int non_overlapping_count(int n, int h_max, int m)
{
    if (n < h_max + 1)
        return 0;
    return (n - h_max - 1) / (h_max + 1 + m) + 1;
}

std::vector<std::vector<Cell>> mod_partitions(int nx, int ny, const LagSet& lags, const ModConfig& mod)
{
    if (mod.m_x < 0 || mod.m_y < 0)
        throw DomainError("mod: dependence ranges must be nonnegative");
    const Direction dir = lags.direction;
    if (dir != Direction::EW && dir != Direction::SN)
        throw NotUsable("mod estimators support only the ew and sn directions");

    const bool ew = dir == Direction::EW;
    const int h = lags.h_max();
    const int along_n = ew ? nx : ny;   // cells along a line
    const int across_n = ew ? ny : nx;  // number of lines
    const int m_along = ew ? mod.m_x : mod.m_y;
    const int m_across = ew ? mod.m_y : mod.m_x;
    const int line_offsets = mod.average_partitions ? m_across + 1 : 1;
    const int start_offsets = mod.average_partitions ? m_along + h + 1 : 1;

    std::vector<std::vector<Cell>> parts;
    for (int lo = 0; lo < line_offsets; ++lo) {
        for (int so = 0; so < start_offsets; ++so) {
            std::vector<Cell> bases;
            for (int line = 1 + lo; line <= across_n; line += m_across + 1)
                for (int pos = 1 + so; pos + h <= along_n; pos += h + 1 + m_along)
                    bases.push_back(ew ? Cell{pos, line} : Cell{line, pos});
            parts.push_back(std::move(bases));
        }
    }
    return parts;
}

VariogramEstimate mcd_mod(const Grid& g, const LagSet& lags, VectorKind kind, const ModConfig& mod,
                          const McdConfig& cfg, bool reweight, RngStream& rng)
{
    const int h = lags.h_max();
    const auto parts = mod_partitions(g.nx(), g.ny(), lags, mod);

    Eigen::VectorXd sum = Eigen::VectorXd::Zero(h);
    int used = 0;
    long vectors = 0;
    for (const auto& bases : parts) {
        if (static_cast<int>(bases.size()) <= 2 * h)
            continue;
        VectorSample sample;
        try {
            sample = extract_vectors_at(g, lags, bases, kind == VectorKind::Diff);
        } catch (const EmptySample&) {
            continue;
        }
        if (sample.count() <= 2 * h)
            continue;
        McdFit fit = fast_mcd(sample.rows, cfg, rng);
        if (reweight)
            fit = reweight_mcd(sample.rows, fit, cfg);
        sum += variogram_from_scatter(fit.sigma, kind);
        ++used;
        vectors += sample.count();
    }
    if (used == 0)
        throw NotUsable("mcd_mod: no partition holds more than 2*h_max non-overlapping vectors");

    VariogramEstimate est;
    est.estimator_id = mcd_name(kind, true, reweight);
    est.lags = lags;
    est.values = sum / static_cast<double>(used);
    est.counts.assign(static_cast<std::size_t>(h), vectors);
    return est;
}

VariogramEstimate estimate(EstimatorId id, const Grid& g, const LagSet& lags, const EstimatorOptions& opts,
                           RngStream& rng)
{
    VariogramEstimate est;
    switch (id) {
    case EstimatorId::Matheron: est = matheron(g, lags); break;
    case EstimatorId::Genton: est = genton(g, lags, opts.qn); break;
    case EstimatorId::McdOrg:
    case EstimatorId::McdOrgRe:
    case EstimatorId::McdDiff:
    case EstimatorId::McdDiffRe: est = mcd_plain(g, lags, vector_kind(id), opts.mcd, is_reweighted(id), rng); break;
    default: est = mcd_mod(g, lags, vector_kind(id), opts.mod, opts.mcd, is_reweighted(id), rng); break;
    }
    if (opts.drop_largest_lag && is_mcd(id) && vector_kind(id) == VectorKind::Org && est.lags.h_max() > 1) {
        est.lags.lags.pop_back();
        est.values.conservativeResize(est.values.size() - 1);
        est.counts.pop_back();
    }
    return est;
}

} // namespace robvario
