#ifndef ISPD_ESTIMATION_HPP
#define ISPD_ESTIMATION_HPP

// Multi-start maximization of the correlation-model likelihoods under
// FCM/CCM/NCM constraints, with standard errors, Wald tests and likelihood
// ratio tests.

#include <vector>

#include "ispd/likelihoods.hpp"

namespace ispd {

enum class LikelihoodKind { Scaled, Coarse, CoarseTruncated };

struct FitConfig {
    std::vector<ModelTheta> starts;  // empty selects the default grid
    double grad_tol = 1e-8;
    double loglik_rel_tol = 1e-12;
    int max_iterations = 200;
    int max_step_halvings = 60;
};

// Default start grid alpha in {0..5} x beta in {-0.02,-0.01,-0.005,0};
// brackets the empirically plausible region with margin.
std::vector<ModelTheta> default_start_grid(CorrelationModelKind kind);

struct StartDiagnostic {
    ModelTheta start;
    ModelTheta end;
    double loglik = 0.0;
    bool converged = false;
    int iterations = 0;
};

struct FitResult {
    CorrelationModelKind kind = CorrelationModelKind::Ncm;
    LikelihoodKind lik = LikelihoodKind::Scaled;
    ModelTheta theta_hat;
    double loglik = 0.0;
    Mat22 hessian_at_opt;            // full 2x2 at theta_hat
    Vec2 std_errors{};               // NaN where the model has no such parameter
    bool converged = false;
    bool hessian_indefinite = false;
    int n_starts = 0;
    int iterations = 0;              // of the winning start
    int n_underflow_cells = 0;       // diagnostics at theta_hat
    std::vector<StartDiagnostic> start_diagnostics;

    int free_parameters() const;
};

// Maximizes the selected likelihood on the cohort. NCM is a direct
// evaluation at (0,0). Throws ConvergenceError when no start converges.
FitResult fit(const Cohort& cohort, CorrelationModelKind kind,
              LikelihoodKind lik, const FitConfig& cfg = {});

// Square roots of the diagonal of the inverse negative Hessian; requires a
// converged fit with a usable Hessian.
Vec2 std_errors(const FitResult& result);

enum class Param { Alpha, Beta };
enum class Sidedness { TwoSided, OneSided };

struct WaldTest {
    double stat = 0.0;  // (estimate - null) / se
    double p = 1.0;
};

WaldTest wald_test(const FitResult& result, Param param, double null_value,
                   Sidedness sides);

struct LrtResult {
    double stat = 0.0;
    int df = 0;
    double p = 1.0;
};

// Likelihood ratio test of a nested model (NCM within CCM within FCM).
LrtResult lrt(const FitResult& full, const FitResult& nested);

// Plain evaluation of the selected likelihood (used by NCM and the tests).
double eval_loglik(const ModelTheta& theta, const Cohort& cohort,
                   LikelihoodKind lik);
Vec2 eval_score(const ModelTheta& theta, const Cohort& cohort,
                LikelihoodKind lik);
Mat22 eval_hessian(const ModelTheta& theta, const Cohort& cohort,
                   LikelihoodKind lik);

}  // namespace ispd

#endif
