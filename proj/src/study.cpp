#include "robvario/study.hpp"

#include "robvario/app.hpp"
#include "robvario/errors.hpp"
#include "robvario/numerics.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

namespace robvario {

namespace {

using Row = std::vector<std::optional<Eigen::VectorXd>>;

Row run_one(const StudySpec& spec, const FieldSimulator& sim, const std::vector<EstimatorKey>& keys,
            const std::vector<LagSet>& key_lags, int replication)
{
    Row row(keys.size());
    RngStream field_rng(spec.base_seed, static_cast<std::uint64_t>(replication));
    RngStream aux(spec.base_seed, static_cast<std::uint64_t>(replication) + kAuxStreamOffset);

    Grid g = sim.simulate(field_rng);
    if (spec.contamination)
        g = contaminate(g, *spec.contamination, aux).grid;

    EstimatorOptions opts = spec.options;
    opts.drop_largest_lag = false;

    // Raw and reweighted MCD variants of one direction share a single fit.
    std::map<std::pair<Direction, VectorKind>, std::optional<std::pair<Eigen::VectorXd, Eigen::VectorXd>>> shared;
    const auto wants = [&](EstimatorId id) {
        for (EstimatorId e : spec.estimators)
            if (e == id)
                return true;
        return false;
    };

    for (std::size_t i = 0; i < keys.size(); ++i) {
        const auto [id, dir] = keys[i];
        const LagSet& lags = key_lags[i];
        try {
            Eigen::VectorXd two_gamma;
            if (spec.estimator_override) {
                two_gamma = spec.estimator_override(id, g, lags, aux).values;
            } else if (is_mcd(id) && !is_mod(id)) {
                const VectorKind kind = vector_kind(id);
                const EstimatorId raw_id = kind == VectorKind::Org ? EstimatorId::McdOrg : EstimatorId::McdDiff;
                const EstimatorId re_id = kind == VectorKind::Org ? EstimatorId::McdOrgRe : EstimatorId::McdDiffRe;
                if (wants(raw_id) && wants(re_id)) {
                    auto& slot = shared[{dir, kind}];
                    if (!slot) {
                        auto [raw, re] = mcd_raw_and_reweighted(g, lags, kind, opts.mcd, aux);
                        slot.emplace(std::move(raw.values), std::move(re.values));
                    }
                    two_gamma = is_reweighted(id) ? slot->second : slot->first;
                } else {
                    two_gamma = estimate(id, g, lags, opts, aux).values;
                }
            } else {
                two_gamma = estimate(id, g, lags, opts, aux).values;
            }
            double c = 1.0;
            if (const auto it = spec.correction_factors.find(keys[i]); it != spec.correction_factors.end())
                c = it->second;
            row[i] = 0.5 * c * two_gamma;
        } catch (const Error&) {
            row[i].reset();
        }
    }
    return row;
}

double sum_in_order(const std::vector<double>& v)
{
    return pairwise_sum(v.data(), v.size());
}

void check_failures(const StudySpec& spec, const EstimatorKey& key, int n_fail)
{
    if (n_fail > spec.max_failure_fraction * spec.replications)
        throw NumericalFailure("study: " + to_string(key.first) + " in direction " + to_string(key.second) +
                               " failed in " + std::to_string(n_fail) + " of " +
                               std::to_string(spec.replications) + " replications");
}

std::vector<double> truths(const StudySpec& spec, const LagSet& lags)
{
    std::vector<double> out;
    for (const Lag& h : lags.lags)
        out.push_back(0.5 * aniso_variogram(spec.field.model, h));
    return out;
}

std::string format(double v)
{
    return format_real(v);
}

} // namespace

ReplicationTable run_replications(const StudySpec& spec)
{
    if (spec.replications < 2)
        throw DomainError("study: at least two replications are required");
    if (spec.estimators.empty() || spec.lag_sets.empty())
        throw DomainError("study: no estimators or directions requested");

    ReplicationTable table;
    for (const LagSet& lags : spec.lag_sets)
        for (EstimatorId id : spec.estimators) {
            table.keys.push_back({id, lags.direction});
            table.lag_sets.push_back(lags);
        }

    const FieldSimulator sim(spec.field);
    std::vector<Row> rows(static_cast<std::size_t>(spec.replications));

    int threads = spec.threads > 0 ? spec.threads : static_cast<int>(std::thread::hardware_concurrency());
    threads = std::clamp(threads, 1, spec.replications);
    std::atomic<int> next{0};
    const auto worker = [&] {
        for (int r = next++; r < spec.replications; r = next++)
            rows[static_cast<std::size_t>(r)] = run_one(spec, sim, table.keys, table.lag_sets, r);
    };
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (int t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }

    table.results.assign(table.keys.size(), {});
    for (std::size_t k = 0; k < table.keys.size(); ++k) {
        table.results[k].reserve(rows.size());
        for (auto& row : rows)
            table.results[k].push_back(std::move(row[k]));
    }
    return table;
}

std::vector<CorrectionFactor> summarize_correction_factors(const StudySpec& spec, const ReplicationTable& table)
{
    std::vector<CorrectionFactor> out;
    for (std::size_t k = 0; k < table.keys.size(); ++k) {
        const LagSet& lags = table.lag_sets[k];
        const int h = lags.h_max();
        if (h < 2)
            throw DomainError("correction factor: h_max must be at least 2");
        const std::vector<double> gamma = truths(spec, lags);
        const double divisor = spec.corrfac_divisor == CorrfacDivisor::HMax ? h : h - 1;

        std::vector<double> q;
        int n_fail = 0;
        for (const auto& est : table.results[k]) {
            if (!est) {
                ++n_fail;
                continue;
            }
            std::vector<double> ratios;
            for (int i = 0; i < h - 1; ++i)
                ratios.push_back((*est)[i] / gamma[i]);
            q.push_back(sum_in_order(ratios) / divisor);
        }
        check_failures(spec, table.keys[k], n_fail);

        const double n = static_cast<double>(q.size());
        const double mean = sum_in_order(q) / n;
        std::vector<double> sq;
        for (double v : q)
            sq.push_back((v - mean) * (v - mean));
        const double sd = std::sqrt(sum_in_order(sq) / (n - 1.0));

        CorrectionFactor cf;
        cf.estimator = table.keys[k].first;
        cf.direction = table.keys[k].second;
        cf.c_opt = 1.0 / mean;
        cf.se = sd / std::sqrt(n) / (mean * mean);
        cf.n_ok = static_cast<int>(q.size());
        cf.n_fail = n_fail;
        out.push_back(cf);
    }
    return out;
}

std::vector<CellStats> summarize_bias_rmse(const StudySpec& spec, const ReplicationTable& table)
{
    std::vector<CellStats> out;
    for (std::size_t k = 0; k < table.keys.size(); ++k) {
        const LagSet& lags = table.lag_sets[k];
        const std::vector<double> gamma = truths(spec, lags);
        int n_fail = 0;
        for (const auto& est : table.results[k])
            n_fail += est ? 0 : 1;
        check_failures(spec, table.keys[k], n_fail);

        for (int l = 0; l < lags.h_max(); ++l) {
            std::vector<double> err, est_values;
            for (const auto& est : table.results[k])
                if (est) {
                    err.push_back((*est)[l] - gamma[l]);
                    est_values.push_back((*est)[l]);
                }
            const double n = static_cast<double>(err.size());
            const double bias = sum_in_order(err) / n;
            std::vector<double> sq, centered_sq, sq_dev;
            for (double e : err) {
                sq.push_back(e * e);
                centered_sq.push_back((e - bias) * (e - bias));
            }
            const double mse = sum_in_order(sq) / n;
            const double variance = sum_in_order(centered_sq) / n;
            for (double s : sq)
                sq_dev.push_back((s - mse) * (s - mse));

            CellStats c;
            c.estimator = table.keys[k].first;
            c.direction = table.keys[k].second;
            c.lag = l + 1;
            c.truth = gamma[l];
            c.mean_estimate = sum_in_order(est_values) / n;
            c.bias = bias;
            c.rmse = std::sqrt(mse);
            c.variance = variance;
            c.se_bias = std::sqrt(variance * n / (n - 1.0) / n);
            const double se_mse = std::sqrt(sum_in_order(sq_dev) / (n - 1.0) / n);
            c.se_rmse = c.rmse > 0.0 ? se_mse / (2.0 * c.rmse) : 0.0;
            c.n_ok = static_cast<int>(err.size());
            c.n_fail = n_fail;

            if (std::abs(mse - (bias * bias + variance)) > 1e-10 * (1.0 + mse))
                throw NumericalFailure("study: rMSE^2 = bias^2 + variance accounting check failed");
            out.push_back(c);
        }
    }
    return out;
}

std::vector<CorrectionFactor> run_correction_factor_study(const StudySpec& spec)
{
    if (spec.contamination)
        throw DomainError("correction factor study requires clean data");
    return summarize_correction_factors(spec, run_replications(spec));
}

StudyResult run_bias_rmse_study(const StudySpec& spec)
{
    StudyResult result;
    result.cells = summarize_bias_rmse(spec, run_replications(spec));
    return result;
}

const CellStats& StudyResult::cell(EstimatorId id, Direction d, int lag) const
{
    for (const auto& c : cells)
        if (c.estimator == id && c.direction == d && c.lag == lag)
            return c;
    throw DomainError("study result: no cell for " + to_string(id) + "/" + to_string(d) + "/" + std::to_string(lag));
}

const CorrectionFactor& StudyResult::factor(EstimatorId id, Direction d) const
{
    for (const auto& f : factors)
        if (f.estimator == id && f.direction == d)
            return f;
    throw DomainError("study result: no correction factor for " + to_string(id) + "/" + to_string(d));
}

void write_bias_rmse_csv(std::ostream& os, const std::vector<CellStats>& cells, double scale)
{
    os << "estimator,direction,lag,bias,rmse,se_bias,se_rmse,n_ok,n_fail\n";
    for (const auto& c : cells)
        os << to_string(c.estimator) << ',' << to_string(c.direction) << ',' << c.lag << ',' << format(scale * c.bias)
           << ',' << format(scale * c.rmse) << ',' << format(scale * c.se_bias) << ',' << format(scale * c.se_rmse)
           << ',' << c.n_ok << ',' << c.n_fail << '\n';
}

void write_correction_csv(std::ostream& os, const std::vector<CorrectionFactor>& factors)
{
    os << "estimator,direction,c_opt,se\n";
    for (const auto& f : factors)
        os << to_string(f.estimator) << ',' << to_string(f.direction) << ',' << format(f.c_opt) << ',' << format(f.se)
           << '\n';
}

std::map<EstimatorKey, double> read_correction_csv(std::istream& is)
{
    std::map<EstimatorKey, double> out;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty() || line_no == 1)
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        for (std::string f; std::getline(ss, f, ',');)
            fields.push_back(f);
        if (fields.size() < 3)
            throw ParseError("correction csv: expected estimator,direction,c_opt", line_no, 1);
        out[{parse_estimator(fields[0]), parse_direction(fields[1])}] = parse_real(fields[2], line_no, 3);
    }
    return out;
}

} // namespace robvario
