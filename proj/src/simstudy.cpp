#include "ispd/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "ispd/errors.hpp"
#include "ispd/indices.hpp"

namespace ispd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

int sgn(double x) { return (x > 0.0) - (x < 0.0); }

std::string full_precision(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double mad(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.empty()) {
        throw std::invalid_argument("mad: vectors must have equal nonzero "
                                    "length");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) sum += std::abs(a[i] - b[i]);
    return sum / static_cast<double>(a.size());
}

double pdc(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size() || a.size() < 2) {
        throw std::invalid_argument("pdc: vectors must have equal length "
                                    ">= 2");
    }
    const std::size_t n = a.size();
    std::size_t discordant = 0;
    for (std::size_t d = 1; d < n; ++d) {
        for (std::size_t e = 0; e < d; ++e) {
            if (sgn(a[d] - a[e]) != sgn(b[d] - b[e])) ++discordant;
        }
    }
    return 200.0 * static_cast<double>(discordant) /
           (static_cast<double>(n) * (static_cast<double>(n) - 1.0));
}

SummaryRow summarize(std::vector<double> values) {
    if (values.empty()) {
        throw std::invalid_argument("summarize: empty input");
    }
    std::sort(values.begin(), values.end());
    const auto quantile = [&](double p) {
        const double h = p * (static_cast<double>(values.size()) - 1.0);
        const std::size_t lo = static_cast<std::size_t>(std::floor(h));
        const std::size_t hi = std::min(lo + 1, values.size() - 1);
        const double w = h - static_cast<double>(lo);
        return (1.0 - w) * values[lo] + w * values[hi];
    };
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    return {values.front(), quantile(0.25), quantile(0.5),
            mean,           quantile(0.75), values.back()};
}

const char* index_kind_name(IndexKind kind) {
    switch (kind) {
        case IndexKind::Original: return "original";
        case IndexKind::Np: return "np";
        case IndexKind::Rim: return "rim";
        case IndexKind::Fcm: return "fcm";
    }
    return "?";
}

void BinnedHistogram::add(double x) {
    const double pos = (x - lo) / width;
    const auto n = static_cast<long>(counts.size());
    const long bin = std::clamp(static_cast<long>(std::floor(pos)), 0L,
                                n - 1);
    ++counts[static_cast<std::size_t>(bin)];
}

double ScenarioResult::mean_mad(IndexKind kind) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        if (!r.fit_converged) continue;
        sum += r.metrics[static_cast<std::size_t>(kind)].mad;
        ++n;
    }
    return n ? sum / n : kNaN;
}

double ScenarioResult::mean_pdc(IndexKind kind) const {
    double sum = 0.0;
    int n = 0;
    for (const auto& r : rows) {
        if (!r.fit_converged) continue;
        sum += r.metrics[static_cast<std::size_t>(kind)].pdc;
        ++n;
    }
    return n ? sum / n : kNaN;
}

namespace {

struct ReplicationData {
    ReplicationRow row;
    std::array<std::uint32_t, 201> hist_original{};
    std::array<std::uint32_t, 201> hist_fcm{};
    double std_min_size = 0.0;
    double std_max_size = 0.0;
};

ReplicationData run_replication(const ScenarioConfig& cfg, int rep) {
    const std::size_t d_count = cfg.sizes.size();
    std::vector<double> z_tilde(d_count), sigma_true(d_count);
    std::vector<std::vector<double>> scores(d_count);

    for (std::size_t d = 0; d < d_count; ++d) {
        RngStream rng = RngStream::substream(
            cfg.seed, static_cast<std::uint64_t>(rep) + 1,
            static_cast<std::uint64_t>(d) + 1);
        const SizeContext ctx{cfg.sizes[d], cfg.n_max};
        const double rho = rho_d(cfg.theta0, ctx);
        const double rho_pert = perturb_rho(rho, cfg.perturbation, rng);
        scores[d] = gen_scores(cfg.sizes[d], rho_pert, cfg.score_dist, rng);
        z_tilde[d] = scaled_average(scores[d]);
        sigma_true[d] = std::sqrt(1.0 + rho_pert * (cfg.sizes[d] - 1.0));
    }

    std::vector<double> theo(d_count), orig(d_count), np(d_count),
        rim(d_count), fcm(d_count, kNaN);
    for (std::size_t d = 0; d < d_count; ++d) {
        theo[d] = ispd_theo(z_tilde[d], sigma_true[d]);
        orig[d] = ispd_original(z_tilde[d]);
        np[d] = ispd_np(z_tilde[d], scores[d]);
    }
    const double rho_pooled = rho_rim(scores);
    for (std::size_t d = 0; d < d_count; ++d) {
        rim[d] = ispd_rim(z_tilde[d], cfg.sizes[d], rho_pooled);
    }

    Cohort cohort;
    cohort.n_max = cfg.n_max;
    cohort.records.reserve(d_count);
    for (std::size_t d = 0; d < d_count; ++d) {
        cohort.records.push_back({"d" + std::to_string(d), cfg.sizes[d],
                                  ScaledAvg{z_tilde[d]}});
    }
    bool fit_ok = false;
    try {
        const FitResult fr = fit(cohort, CorrelationModelKind::Fcm,
                                 LikelihoodKind::Scaled, cfg.fit_config);
        for (std::size_t d = 0; d < d_count; ++d) {
            fcm[d] = ispd_fcm(z_tilde[d], {cfg.sizes[d], cfg.n_max},
                              fr.theta_hat);
        }
        fit_ok = true;
    } catch (const ConvergenceError&) {
        fit_ok = false;
    }

    ReplicationData out;
    out.row.replication = rep;
    out.row.fit_converged = fit_ok;
    const std::array<const std::vector<double>*, 4> vs{&orig, &np, &rim,
                                                       &fcm};
    for (std::size_t k = 0; k < vs.size(); ++k) {
        if (k == static_cast<std::size_t>(IndexKind::Fcm) && !fit_ok) {
            out.row.metrics[k] = {kNaN, kNaN};
            continue;
        }
        out.row.metrics[k] = {mad(*vs[k], theo), pdc(*vs[k], theo)};
    }

    for (std::size_t d = 0; d < d_count; ++d) {
        ++out.hist_original[static_cast<std::size_t>(
            std::lround(orig[d] * 2.0))];
        if (fit_ok) {
            ++out.hist_fcm[static_cast<std::size_t>(
                std::lround(fcm[d] * 2.0))];
        }
    }
    const auto min_it = std::min_element(cfg.sizes.begin(), cfg.sizes.end());
    const auto max_it = std::max_element(cfg.sizes.begin(), cfg.sizes.end());
    const auto dmin = static_cast<std::size_t>(min_it - cfg.sizes.begin());
    const auto dmax = static_cast<std::size_t>(max_it - cfg.sizes.begin());
    out.std_min_size = z_tilde[dmin] / sigma_true[dmin];
    out.std_max_size = z_tilde[dmax] / sigma_true[dmax];
    return out;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
    if (cfg.replications < 1) {
        throw InputError("run_scenario: replications must be >= 1");
    }
    if (cfg.sizes.empty()) {
        throw InputError("run_scenario: no department sizes");
    }
    if (cfg.n_max < *std::max_element(cfg.sizes.begin(), cfg.sizes.end())) {
        throw InputError("run_scenario: n_max below the largest department");
    }
    cfg.score_dist.validate();

    std::vector<ReplicationData> data(
        static_cast<std::size_t>(cfg.replications));
    unsigned n_threads = cfg.threads > 0
                             ? static_cast<unsigned>(cfg.threads)
                             : std::max(1u, std::thread::hardware_concurrency());
    n_threads = std::min<unsigned>(
        n_threads, static_cast<unsigned>(cfg.replications));
    if (n_threads <= 1) {
        for (int r = 0; r < cfg.replications; ++r) {
            data[static_cast<std::size_t>(r)] = run_replication(cfg, r);
        }
    } else {
        std::vector<std::thread> workers;
        workers.reserve(n_threads);
        for (unsigned w = 0; w < n_threads; ++w) {
            workers.emplace_back([&, w] {
                for (int r = static_cast<int>(w); r < cfg.replications;
                     r += static_cast<int>(n_threads)) {
                    data[static_cast<std::size_t>(r)] =
                        run_replication(cfg, r);
                }
            });
        }
        for (auto& t : workers) t.join();
    }

    // Deterministic, replication-ordered gather.
    ScenarioResult result;
    result.rows.reserve(data.size());
    for (const auto& d : data) {
        result.rows.push_back(d.row);
        if (!d.row.fit_converged) ++result.n_fit_failures;
        for (std::size_t j = 0; j < 201; ++j) {
            result.hist_original.counts[j] += d.hist_original[j];
            result.hist_fcm.counts[j] += d.hist_fcm[j];
        }
        result.hist_std_min_size.add(d.std_min_size);
        result.hist_std_max_size.add(d.std_max_size);
    }
    return result;
}

void write_replications_csv(std::ostream& os, const ScenarioResult& result) {
    os << "replication,index_kind,mad,pdc\n";
    for (const auto& r : result.rows) {
        for (IndexKind kind : kComparedIndices) {
            const auto& m = r.metrics[static_cast<std::size_t>(kind)];
            os << r.replication << ',' << index_kind_name(kind) << ','
               << full_precision(m.mad) << ',' << full_precision(m.pdc)
               << '\n';
        }
    }
}

void write_summary_csv(std::ostream& os, const ScenarioResult& result) {
    os << "index_kind,metric,min,q1,q2,mean,q3,max\n";
    for (IndexKind kind : kComparedIndices) {
        for (const char* metric : {"mad", "pdc"}) {
            std::vector<double> values;
            values.reserve(result.rows.size());
            for (const auto& r : result.rows) {
                if (!r.fit_converged &&
                    kind == IndexKind::Fcm) {
                    continue;
                }
                const auto& m = r.metrics[static_cast<std::size_t>(kind)];
                values.push_back(metric[0] == 'm' ? m.mad : m.pdc);
            }
            const SummaryRow s = summarize(std::move(values));
            os << index_kind_name(kind) << ',' << metric << ','
               << full_precision(s.min) << ',' << full_precision(s.q1) << ','
               << full_precision(s.q2) << ',' << full_precision(s.mean)
               << ',' << full_precision(s.q3) << ',' << full_precision(s.max)
               << '\n';
        }
    }
}

void write_grid_histogram_csv(std::ostream& os, const GridHistogram& hist) {
    os << "index_value,count\n";
    for (std::size_t j = 0; j < hist.counts.size(); ++j) {
        os << full_precision(0.5 * static_cast<double>(j)) << ','
           << hist.counts[j] << '\n';
    }
}

void write_binned_histogram_csv(std::ostream& os,
                                const BinnedHistogram& hist) {
    os << "bin_lo,bin_hi,count\n";
    for (std::size_t j = 0; j < hist.counts.size(); ++j) {
        os << full_precision(hist.lo + hist.width * static_cast<double>(j))
           << ','
           << full_precision(hist.lo +
                             hist.width * static_cast<double>(j + 1))
           << ',' << hist.counts[j] << '\n';
    }
}

}  // namespace ispd
