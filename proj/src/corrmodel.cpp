#include "ispd/corrmodel.hpp"

#include <cmath>
#include <stdexcept>

namespace ispd {

void check_size_context(const SizeContext& ctx) {
    if (ctx.n_d < 2 || ctx.n_max < ctx.n_d) {
        throw std::invalid_argument(
            "SizeContext: requires 2 <= n_d <= n_max");
    }
}

double linpred(const ModelTheta& theta, const SizeContext& ctx) {
    check_size_context(ctx);
    return theta.alpha + theta.beta * (ctx.n_d - 1);
}

double rho_from_linpred(double f, int n_max) {
    if (n_max < 2) {
        throw std::invalid_argument("rho_from_linpred: n_max must be >= 2");
    }
    // Evaluate on the side that cannot overflow; limits are 1 and -1/n_max.
    if (f >= 0.0) {
        const double t = std::exp(-f);
        return (1.0 - t) / (1.0 + n_max * t);
    }
    const double e = std::exp(f);
    return (e - 1.0) / (e + n_max);
}

double rho_d(const ModelTheta& theta, const SizeContext& ctx) {
    return rho_from_linpred(linpred(theta, ctx), ctx.n_max);
}

double sigma_d(const ModelTheta& theta, const SizeContext& ctx) {
    return std::sqrt(1.0 + rho_d(theta, ctx) * (ctx.n_d - 1));
}

double delta_alpha(const ModelTheta& theta, const SizeContext& ctx) {
    const double f = linpred(theta, ctx);
    if (f >= 0.0) {
        const double t = std::exp(-f);
        const double den = 1.0 + ctx.n_max * t;
        return (ctx.n_max + 1.0) * t / (den * den);
    }
    const double e = std::exp(f);
    const double den = e + ctx.n_max;
    return e * (ctx.n_max + 1.0) / (den * den);
}

double link_log_curvature(double f, int n_max) {
    // (n_max - e^f) / (n_max + e^f) written overflow-free.
    return std::tanh(0.5 * (std::log(static_cast<double>(n_max)) - f));
}

}  // namespace ispd
