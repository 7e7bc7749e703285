#ifndef ISPD_CORRMODEL_HPP
#define ISPD_CORRMODEL_HPP

// Size-dependent intra-departmental correlation model. A pseudo-Fisher link
// maps the linear predictor alpha + beta*(N-1) to a correlation in
// (-1/n_max, 1), which in turn inflates the scaled-average variance to
// 1 + rho*(N-1).

namespace ispd {

struct ModelTheta {
    double alpha = 0.0;
    double beta = 0.0;
};

enum class CorrelationModelKind {
    Fcm,  // full model, both parameters free
    Ccm,  // constant correlation, beta fixed at 0
    Ncm,  // null model, alpha = beta = 0
};

// Department size within its cohort. n_max is the cohort-wide maximum size
// and must stay fixed between fitting and adjustment.
struct SizeContext {
    int n_d = 2;
    int n_max = 2;
};

void check_size_context(const SizeContext& ctx);

double linpred(const ModelTheta& theta, const SizeContext& ctx);

// (e^f - 1) / (e^f + n_max); saturates to the range bounds for large |f|.
double rho_from_linpred(double f, int n_max);

double rho_d(const ModelTheta& theta, const SizeContext& ctx);

// sqrt(1 + rho*(N-1)); always real and positive given the link range.
double sigma_d(const ModelTheta& theta, const SizeContext& ctx);

// d rho / d alpha = e^F (n_max+1) / (e^F + n_max)^2, strictly positive.
// The beta derivative is (N-1) times this.
double delta_alpha(const ModelTheta& theta, const SizeContext& ctx);

// d log(delta_alpha) / d alpha = (n_max - e^F) / (n_max + e^F); shows up in
// every second derivative of the model.
double link_log_curvature(double f, int n_max);

}  // namespace ispd

#endif
