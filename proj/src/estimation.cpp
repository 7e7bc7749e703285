#include "ispd/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ispd/errors.hpp"
#include "ispd/specfun.hpp"

namespace ispd {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

ObsKind obs_kind_for(LikelihoodKind lik) {
    return lik == LikelihoodKind::Scaled ? ObsKind::Scaled : ObsKind::Cell;
}

// One Newton ascent with step halving from a single start. The Hessian step
// is used only when negative definite; otherwise the iteration falls back to
// steepest ascent.
StartDiagnostic maximize_from(const ModelTheta& start, const Cohort& cohort,
                              LikelihoodKind lik, bool beta_free,
                              const FitConfig& cfg) {
    StartDiagnostic diag;
    diag.start = start;
    ModelTheta theta = start;
    double ll = eval_loglik(theta, cohort, lik);
    Vec2 g = eval_score(theta, cohort, lik);
    if (!beta_free) g[1] = 0.0;
    double rel_change = 0.0;
    bool converged = false;
    int it = 0;
    for (; it < cfg.max_iterations; ++it) {
        if (max_abs(g) <= cfg.grad_tol &&
            rel_change <= cfg.loglik_rel_tol) {
            converged = true;
            break;
        }
        Vec2 dir;
        bool newton = false;
        if (beta_free) {
            const Mat22 h = eval_hessian(theta, cohort, lik);
            if (h.negative_definite()) {
                dir = h.negated().solve(g);
                newton = true;
            } else {
                // Levenberg-damped ascent: shift past the Gershgorin bound
                // so the step stays on the curvature scale instead of
                // jumping by the raw gradient magnitude.
                const double lam =
                    2.0 * std::max(std::abs(h.a11) + std::abs(h.a12),
                                   std::abs(h.a22) + std::abs(h.a12)) +
                    1.0;
                const Mat22 shifted{lam - h.a11, -h.a12, -h.a21,
                                    lam - h.a22};
                dir = shifted.solve(g);
            }
        } else {
            const double h_aa = eval_hessian(theta, cohort, lik).a11;
            newton = h_aa < 0.0;
            dir = {newton ? -g[0] / h_aa
                          : g[0] / (2.0 * std::abs(h_aa) + 1.0),
                   0.0};
        }
        // Backtracking: accept an improving step, or a loglik-flat step
        // that still reduces the gradient (near the optimum the objective
        // saturates in floating point before the gradient does).
        const double flat_slack =
            cfg.loglik_rel_tol * (1.0 + std::abs(ll));
        double t = 1.0;
        bool accepted = false;
        for (int halvings = 0; halvings <= cfg.max_step_halvings;
             ++halvings) {
            const ModelTheta cand{theta.alpha + t * dir[0],
                                  theta.beta + t * dir[1]};
            const double cand_ll = eval_loglik(cand, cohort, lik);
            if (std::isfinite(cand_ll)) {
                bool take = cand_ll > ll;
                Vec2 cand_g{};
                bool have_g = false;
                // Flat steps are trusted only for the full Newton step at a
                // concave point, where they polish the gradient without
                // drifting along the link's saturation plateau.
                if (!take && newton && halvings == 0 &&
                    cand_ll >= ll - flat_slack) {
                    cand_g = eval_score(cand, cohort, lik);
                    if (!beta_free) cand_g[1] = 0.0;
                    have_g = true;
                    take = max_abs(cand_g) < max_abs(g);
                }
                if (take) {
                    rel_change =
                        std::abs(cand_ll - ll) / (1.0 + std::abs(cand_ll));
                    theta = cand;
                    ll = cand_ll;
                    if (!have_g) {
                        cand_g = eval_score(cand, cohort, lik);
                        if (!beta_free) cand_g[1] = 0.0;
                    }
                    g = cand_g;
                    accepted = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if (!accepted) {
            // No usable step along this direction.
            converged = max_abs(g) <= cfg.grad_tol;
            break;
        }
    }
    diag.end = theta;
    diag.loglik = ll;
    diag.converged = converged;
    diag.iterations = it;
    return diag;
}

int count_underflows(const ModelTheta& theta, const Cohort& cohort,
                     LikelihoodKind lik) {
    if (lik == LikelihoodKind::Scaled) return 0;
    return static_cast<int>(underflow_cells(theta, cohort).size());
}

}  // namespace

double eval_loglik(const ModelTheta& theta, const Cohort& cohort,
                   LikelihoodKind lik) {
    switch (lik) {
        case LikelihoodKind::Scaled: return loglik_scaled(theta, cohort);
        case LikelihoodKind::Coarse: return loglik_coarse(theta, cohort);
        case LikelihoodKind::CoarseTruncated:
            return loglik_trunc(theta, cohort);
    }
    throw std::logic_error("eval_loglik: unknown likelihood kind");
}

Vec2 eval_score(const ModelTheta& theta, const Cohort& cohort,
                LikelihoodKind lik) {
    switch (lik) {
        case LikelihoodKind::Scaled: return score_scaled(theta, cohort);
        case LikelihoodKind::Coarse: return score_coarse(theta, cohort);
        case LikelihoodKind::CoarseTruncated:
            return score_trunc(theta, cohort);
    }
    throw std::logic_error("eval_score: unknown likelihood kind");
}

Mat22 eval_hessian(const ModelTheta& theta, const Cohort& cohort,
                   LikelihoodKind lik) {
    switch (lik) {
        case LikelihoodKind::Scaled: return hessian_scaled(theta, cohort);
        case LikelihoodKind::Coarse: return hessian_coarse(theta, cohort);
        case LikelihoodKind::CoarseTruncated:
            return hessian_trunc(theta, cohort);
    }
    throw std::logic_error("eval_hessian: unknown likelihood kind");
}

std::vector<ModelTheta> default_start_grid(CorrelationModelKind kind) {
    std::vector<ModelTheta> starts;
    if (kind == CorrelationModelKind::Ncm) return starts;
    for (double a : {0.0, 1.0, 2.0, 3.0, 4.0, 5.0}) {
        if (kind == CorrelationModelKind::Ccm) {
            starts.push_back({a, 0.0});
        } else {
            for (double b : {-0.02, -0.01, -0.005, 0.0}) {
                starts.push_back({a, b});
            }
        }
    }
    return starts;
}

int FitResult::free_parameters() const {
    switch (kind) {
        case CorrelationModelKind::Fcm: return 2;
        case CorrelationModelKind::Ccm: return 1;
        case CorrelationModelKind::Ncm: return 0;
    }
    return 0;
}

FitResult fit(const Cohort& cohort, CorrelationModelKind kind,
              LikelihoodKind lik, const FitConfig& cfg) {
    cohort.validate();
    if (cohort.kind() != obs_kind_for(lik)) {
        throw InputError("fit: cohort observation type does not match the "
                         "selected likelihood");
    }
    if (lik == LikelihoodKind::CoarseTruncated && !cohort.truncation) {
        throw InputError("fit: truncated likelihood requires a truncation "
                         "point on the cohort");
    }

    FitResult result;
    result.kind = kind;
    result.lik = lik;
    result.std_errors = {kNaN, kNaN};

    if (kind == CorrelationModelKind::Ncm) {
        result.theta_hat = {0.0, 0.0};
        result.loglik = eval_loglik(result.theta_hat, cohort, lik);
        result.hessian_at_opt = eval_hessian(result.theta_hat, cohort, lik);
        result.converged = true;
        result.n_underflow_cells =
            count_underflows(result.theta_hat, cohort, lik);
        return result;
    }

    const bool beta_free = kind == CorrelationModelKind::Fcm;
    std::vector<ModelTheta> starts =
        cfg.starts.empty() ? default_start_grid(kind) : cfg.starts;
    if (!beta_free) {
        for (auto& s : starts) s.beta = 0.0;
    }
    if (starts.empty()) throw InputError("fit: no start points");

    result.n_starts = static_cast<int>(starts.size());
    int best = -1;
    for (const auto& s : starts) {
        result.start_diagnostics.push_back(
            maximize_from(s, cohort, lik, beta_free, cfg));
        const auto& d = result.start_diagnostics.back();
        if (!d.converged) continue;
        if (best < 0 || d.loglik > result.start_diagnostics[best].loglik) {
            best = static_cast<int>(result.start_diagnostics.size()) - 1;
        }
    }
    if (best < 0) {
        throw ConvergenceError(
            "fit: no start converged; see per-start diagnostics");
    }
    const StartDiagnostic& win = result.start_diagnostics[best];
    result.theta_hat = win.end;
    result.loglik = win.loglik;
    result.iterations = win.iterations;
    result.converged = true;
    result.hessian_at_opt = eval_hessian(result.theta_hat, cohort, lik);
    result.n_underflow_cells =
        count_underflows(result.theta_hat, cohort, lik);

    if (beta_free) {
        if (result.hessian_at_opt.negative_definite()) {
            const Mat22 cov = result.hessian_at_opt.negated().inverse();
            result.std_errors = {std::sqrt(cov.a11), std::sqrt(cov.a22)};
        } else {
            result.hessian_indefinite = true;
        }
    } else {
        const double h_aa = result.hessian_at_opt.a11;
        if (h_aa < 0.0) {
            result.std_errors[0] = std::sqrt(-1.0 / h_aa);
        } else {
            result.hessian_indefinite = true;
        }
    }
    return result;
}

Vec2 std_errors(const FitResult& result) {
    if (!result.converged) {
        throw ConvergenceError("std_errors: fit did not converge");
    }
    if (result.hessian_indefinite ||
        (result.kind != CorrelationModelKind::Ncm &&
         !(result.std_errors[0] > 0.0))) {
        throw ConvergenceError(
            "std_errors: Hessian at the optimum is not negative definite");
    }
    return result.std_errors;
}

WaldTest wald_test(const FitResult& result, Param param, double null_value,
                   Sidedness sides) {
    const int idx = param == Param::Alpha ? 0 : 1;
    const double se = result.std_errors[idx];
    if (!(se > 0.0)) {
        throw ConvergenceError(
            "wald_test: no standard error for the requested parameter");
    }
    const double est =
        param == Param::Alpha ? result.theta_hat.alpha : result.theta_hat.beta;
    const double z = (est - null_value) / se;
    const double two_sided = 2.0 * specfun::norm_cdf(-std::abs(z));
    return {z, sides == Sidedness::TwoSided ? two_sided : 0.5 * two_sided};
}

LrtResult lrt(const FitResult& full, const FitResult& nested) {
    const int df = full.free_parameters() - nested.free_parameters();
    if (df <= 0) {
        throw InputError("lrt: second model is not nested in the first");
    }
    if (full.lik != nested.lik) {
        throw InputError("lrt: fits use different likelihoods");
    }
    double stat = 2.0 * (full.loglik - nested.loglik);
    if (stat < -1e-6) {
        throw ConvergenceError(
            "lrt: nested model exceeds the full model; optimizer failure");
    }
    stat = std::max(stat, 0.0);
    return {stat, df, specfun::chi2_sf(stat, df)};
}

}  // namespace ispd
