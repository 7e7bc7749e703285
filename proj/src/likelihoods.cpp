#include "ispd/likelihoods.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "ispd/errors.hpp"
#include "ispd/specfun.hpp"

namespace ispd {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kPiFloor = 1e-300;

// Order-independent sum: permuting the departments of a cohort must leave
// the log-likelihood bit-identical.
double sorted_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end());
    return std::accumulate(terms.begin(), terms.end(), 0.0);
}

// 0.5 * [erf(hi) - erf(lo)] evaluated through erfc on whichever side keeps
// far-tail cells at full relative accuracy. Infinite bounds come from the
// clamped outer cells.
double half_erf_diff(double lo, double hi) {
    const auto erfc_of = [](double x) {
        if (std::isinf(x)) return x > 0 ? 0.0 : 2.0;
        return std::erfc(x);
    };
    if (lo >= 0.0) return 0.5 * (erfc_of(lo) - erfc_of(hi));
    if (hi <= 0.0) return 0.5 * (erfc_of(-hi) - erfc_of(-lo));
    return 0.5 * (std::erf(hi) - std::erf(lo));
}

double exp_e1(double e, double sigma) {
    if (std::isinf(e)) return 0.0;
    const double u = e / sigma;
    return std::exp(-u * u) * e;
}

double exp_e3(double e, double sigma) {
    if (std::isinf(e)) return 0.0;
    const double u = e / sigma;
    return std::exp(-u * u) * e * e * e;
}

// Everything about one department that the cell likelihoods reuse.
struct DeptModel {
    double sigma, delta, curvature;  // sigma_d, d rho/d alpha, d log delta/d alpha
    double nm1;                      // N_d - 1
};

DeptModel dept_model(const ModelTheta& theta, const SizeContext& ctx) {
    const double f = linpred(theta, ctx);
    return {std::sqrt(1.0 + rho_from_linpred(f, ctx.n_max) * (ctx.n_d - 1)),
            delta_alpha(theta, ctx), link_log_curvature(f, ctx.n_max),
            static_cast<double>(ctx.n_d - 1)};
}

// Cell probability with its first two alpha-derivatives.
struct CellTerms {
    double pi, eta, tau;
};

CellTerms cell_terms(const DeptModel& m, double e_lo, double e_hi) {
    const double s = m.sigma;
    const double pi = half_erf_diff(e_lo / s, e_hi / s);
    const double c = m.nm1 * m.delta;
    const double eta =
        c / (2.0 * kSqrtPi * s * s * s) * (exp_e1(e_lo, s) - exp_e1(e_hi, s));
    const double q =
        c / (kSqrtPi * s * s * s * s * s) * (exp_e3(e_lo, s) - exp_e3(e_hi, s));
    const double tau =
        m.curvature * eta + c / (2.0 * s * s) * (q - 3.0 * eta);
    return {pi, eta, tau};
}

// First two alpha-derivatives of the survival factor 1 - F_X(x_star).
struct SurvivalTerms {
    double surv, omega, xi;
};

SurvivalTerms survival_terms(const DeptModel& m, double e_star) {
    const double s = m.sigma;
    const double surv = 0.5 * std::erfc(e_star / s);
    const double c = m.nm1 * m.delta;
    const double omega =
        c / (2.0 * kSqrtPi * s * s * s) * exp_e1(e_star, s);
    // A vanishing omega (null truncation or a deep tail) kills xi too; the
    // bracket can be infinite at e_star = -inf, so short-circuit the 0*inf.
    const double xi =
        omega == 0.0
            ? 0.0
            : omega * (m.curvature +
                       c / (2.0 * s * s * s * s) *
                           (2.0 * e_star * e_star - 3.0 * s * s));
    return {surv, omega, xi};
}

int observed_cell(const DeptRecord& r) {
    return IspdGrid::index_of(std::get<IspdCell>(r.obs).value);
}

int truncation_cell(const Cohort& cohort) {
    return IspdGrid::index_of(*cohort.truncation);
}

void require_kind(const Cohort& cohort, ObsKind kind, bool truncated) {
    cohort.validate();
    if (cohort.kind() != kind) {
        throw InputError(
            "likelihood: observation type does not match the likelihood kind");
    }
    if (truncated && !cohort.truncation) {
        throw InputError("likelihood: cohort carries no truncation point");
    }
    if (!truncated && kind == ObsKind::Cell && cohort.truncation) {
        throw InputError(
            "likelihood: truncated cohort passed to the untruncated "
            "likelihood");
    }
}

}  // namespace

IspdGrid::IspdGrid() {
    for (int k = 0; k <= kCells; ++k) {
        const double raw = (0.5 * k - 0.25) / 100.0;
        bounds_[k] = std::clamp(raw, 0.0, 1.0);
        if (bounds_[k] <= 0.0) {
            e_[k] = -kInf;
        } else if (bounds_[k] >= 1.0) {
            e_[k] = kInf;
        } else {
            e_[k] = specfun::erf_inv(2.0 * bounds_[k] - 1.0);
        }
    }
}

int IspdGrid::index_of(double grid_value) {
    const double j = grid_value * 2.0;
    const long rounded = std::lround(j);
    if (rounded < 0 || rounded >= kCells ||
        std::abs(j - static_cast<double>(rounded)) > 2e-9) {
        throw InputError("index value " + std::to_string(grid_value) +
                         " is not on the half-integer grid 0..100");
    }
    return static_cast<int>(rounded);
}

const IspdGrid& default_grid() {
    static const IspdGrid grid;
    return grid;
}

ObsKind Cohort::kind() const {
    if (records.empty()) throw InputError("cohort: no records");
    return std::holds_alternative<ScaledAvg>(records.front().obs)
               ? ObsKind::Scaled
               : ObsKind::Cell;
}

void Cohort::validate() const {
    if (records.empty()) throw InputError("cohort: no records");
    const ObsKind k = kind();
    std::optional<int> trunc_j;
    if (truncation) {
        if (k != ObsKind::Cell) {
            throw InputError("cohort: truncation requires cell observations");
        }
        trunc_j = IspdGrid::index_of(*truncation);
    }
    for (const auto& r : records) {
        const SizeContext c{r.size, n_max};
        check_size_context(c);
        if (std::holds_alternative<ScaledAvg>(r.obs)) {
            if (k != ObsKind::Scaled) {
                throw InputError(
                    "cohort: mixed observation types (department " + r.id +
                    ")");
            }
            if (!std::isfinite(std::get<ScaledAvg>(r.obs).value)) {
                throw InputError("cohort: non-finite scaled average for " +
                                 r.id);
            }
        } else {
            if (k != ObsKind::Cell) {
                throw InputError(
                    "cohort: mixed observation types (department " + r.id +
                    ")");
            }
            const int j = observed_cell(r);
            if (trunc_j && j < *trunc_j) {
                throw InputError("cohort: department " + r.id +
                                 " lies below the truncation point");
            }
        }
    }
}

// ---------------------------------------------------------------- scaled

namespace {

// First and second alpha-derivatives of one department's contribution to
// the scaled-average log-likelihood.
struct ScaledTerms {
    double s_a, h_a;
};

ScaledTerms scaled_terms(const DeptModel& m, double z) {
    const double s2 = m.sigma * m.sigma;
    const double c = m.nm1 * m.delta;
    const double s_a = c * (z * z - s2) / (2.0 * s2 * s2);
    const double h_a = s_a * (m.curvature - 2.0 * c / s2) -
                       (c / (std::sqrt(2.0) * s2)) * (c / (std::sqrt(2.0) * s2));
    return {s_a, h_a};
}

}  // namespace

double loglik_scaled(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Scaled, false);
    std::vector<double> terms;
    terms.reserve(cohort.records.size());
    for (const auto& r : cohort.records) {
        const double sigma = sigma_d(theta, cohort.ctx(r));
        const double z = std::get<ScaledAvg>(r.obs).value / sigma;
        terms.push_back(-std::log(sigma) - 0.5 * z * z - kLogSqrt2Pi);
    }
    return sorted_sum(terms);
}

Vec2 score_scaled(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Scaled, false);
    Vec2 g{0.0, 0.0};
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const double s_a =
            scaled_terms(m, std::get<ScaledAvg>(r.obs).value).s_a;
        g[0] += s_a;
        g[1] += m.nm1 * s_a;
    }
    return g;
}

Mat22 hessian_scaled(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Scaled, false);
    Mat22 h;
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const double h_a =
            scaled_terms(m, std::get<ScaledAvg>(r.obs).value).h_a;
        h.a11 += h_a;
        h.a12 += m.nm1 * h_a;
        h.a22 += m.nm1 * m.nm1 * h_a;
    }
    h.a21 = h.a12;
    return h;
}

// ---------------------------------------------------------------- coarse

double cell_prob(const ModelTheta& theta, const SizeContext& ctx, int j,
                 const IspdGrid& grid) {
    if (j < 0 || j >= IspdGrid::kCells) {
        throw std::out_of_range("cell_prob: cell index out of range");
    }
    const DeptModel m = dept_model(theta, ctx);
    return half_erf_diff(grid.e_lower(j) / m.sigma,
                         grid.e_upper(j) / m.sigma);
}

double loglik_coarse(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Cell, false);
    const IspdGrid& grid = default_grid();
    std::vector<double> terms;
    terms.reserve(cohort.records.size());
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const int j = observed_cell(r);
        const CellTerms t = cell_terms(m, grid.e_lower(j), grid.e_upper(j));
        terms.push_back(std::log(std::max(t.pi, kPiFloor)));
    }
    return sorted_sum(terms);
}

Vec2 score_coarse(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Cell, false);
    const IspdGrid& grid = default_grid();
    Vec2 g{0.0, 0.0};
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const int j = observed_cell(r);
        const CellTerms t = cell_terms(m, grid.e_lower(j), grid.e_upper(j));
        const double s_a = t.eta / std::max(t.pi, kPiFloor);
        g[0] += s_a;
        g[1] += m.nm1 * s_a;
    }
    return g;
}

Mat22 hessian_coarse(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Cell, false);
    const IspdGrid& grid = default_grid();
    Mat22 h;
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const int j = observed_cell(r);
        const CellTerms t = cell_terms(m, grid.e_lower(j), grid.e_upper(j));
        // tau/pi - (eta/pi)^2; the factored form survives a floored pi.
        const double pi = std::max(t.pi, kPiFloor);
        const double ratio = t.eta / pi;
        const double h_a = t.tau / pi - ratio * ratio;
        h.a11 += h_a;
        h.a12 += m.nm1 * h_a;
        h.a22 += m.nm1 * m.nm1 * h_a;
    }
    h.a21 = h.a12;
    return h;
}

// ------------------------------------------------------------- truncated

namespace {

// log pi*, score and Hessian contribution of one truncated observation.
struct TruncTerms {
    double pi_star, s_a, h_a;
};

TruncTerms trunc_terms(const DeptModel& m, const IspdGrid& grid, int j,
                       int trunc_j, const std::string& dept_id) {
    const double e_star = grid.e_lower(trunc_j);
    const SurvivalTerms sv = survival_terms(m, e_star);
    if (sv.surv <= 0.0) {
        throw InfeasibleError(
            "truncated likelihood: survival factor underflows for "
            "department " +
            dept_id);
    }
    const CellTerms t = cell_terms(m, grid.e_lower(j), grid.e_upper(j));
    const double pi_star = t.pi / sv.surv;
    const double eta_star = (t.eta - pi_star * sv.omega) / sv.surv;
    const double tau_star =
        (t.tau - 2.0 * eta_star * sv.omega - pi_star * sv.xi) / sv.surv;
    const double p = std::max(pi_star, kPiFloor);
    const double ratio = eta_star / p;
    return {pi_star, ratio, tau_star / p - ratio * ratio};
}

}  // namespace

double cell_prob_trunc(const ModelTheta& theta, const SizeContext& ctx,
                       int j, int trunc_j, const IspdGrid& grid) {
    if (j < trunc_j || j >= IspdGrid::kCells) {
        throw std::out_of_range(
            "cell_prob_trunc: cell index outside the truncated support");
    }
    const DeptModel m = dept_model(theta, ctx);
    const double surv =
        0.5 * std::erfc(grid.e_lower(trunc_j) / m.sigma);
    if (surv <= 0.0) {
        throw InfeasibleError(
            "cell_prob_trunc: survival factor underflows");
    }
    return half_erf_diff(grid.e_lower(j) / m.sigma,
                         grid.e_upper(j) / m.sigma) /
           surv;
}

double loglik_trunc(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Cell, true);
    const IspdGrid& grid = default_grid();
    const int trunc_j = truncation_cell(cohort);
    std::vector<double> terms;
    terms.reserve(cohort.records.size());
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const TruncTerms t =
            trunc_terms(m, grid, observed_cell(r), trunc_j, r.id);
        terms.push_back(std::log(std::max(t.pi_star, kPiFloor)));
    }
    return sorted_sum(terms);
}

Vec2 score_trunc(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Cell, true);
    const IspdGrid& grid = default_grid();
    const int trunc_j = truncation_cell(cohort);
    Vec2 g{0.0, 0.0};
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const TruncTerms t =
            trunc_terms(m, grid, observed_cell(r), trunc_j, r.id);
        g[0] += t.s_a;
        g[1] += m.nm1 * t.s_a;
    }
    return g;
}

Mat22 hessian_trunc(const ModelTheta& theta, const Cohort& cohort) {
    require_kind(cohort, ObsKind::Cell, true);
    const IspdGrid& grid = default_grid();
    const int trunc_j = truncation_cell(cohort);
    Mat22 h;
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const TruncTerms t =
            trunc_terms(m, grid, observed_cell(r), trunc_j, r.id);
        h.a11 += t.h_a;
        h.a12 += m.nm1 * t.h_a;
        h.a22 += m.nm1 * m.nm1 * t.h_a;
    }
    h.a21 = h.a12;
    return h;
}

std::vector<std::string> underflow_cells(const ModelTheta& theta,
                                         const Cohort& cohort) {
    cohort.validate();
    std::vector<std::string> flagged;
    if (cohort.kind() != ObsKind::Cell) return flagged;
    const IspdGrid& grid = default_grid();
    const bool truncated = cohort.truncation.has_value();
    const int trunc_j = truncated ? truncation_cell(cohort) : 0;
    for (const auto& r : cohort.records) {
        const DeptModel m = dept_model(theta, cohort.ctx(r));
        const int j = observed_cell(r);
        double pi =
            half_erf_diff(grid.e_lower(j) / m.sigma, grid.e_upper(j) / m.sigma);
        if (truncated) {
            const double surv =
                0.5 * std::erfc(grid.e_lower(trunc_j) / m.sigma);
            pi = surv > 0.0 ? pi / surv : 0.0;
        }
        if (pi < kPiFloor) flagged.push_back(r.id);
    }
    return flagged;
}

}  // namespace ispd
