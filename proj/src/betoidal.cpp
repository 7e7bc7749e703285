#include "ispd/betoidal.hpp"

#include <cmath>
#include <stdexcept>

#include "ispd/rng.hpp"
#include "ispd/specfun.hpp"

namespace ispd::betoidal {

namespace {

void check_sigma(double sigma) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw std::domain_error("betoidal: sigma must be positive");
    }
}

void check_truncation(const LTBetoidalParam& p) {
    check_sigma(p.sigma);
    if (!(p.x_star >= 0.0 && p.x_star < 1.0)) {
        throw std::domain_error("betoidal: x_star must lie in [0, 1)");
    }
}

// Survival mass above the truncation point, computed through erfc so that
// heavy truncation keeps full relative accuracy.
double survival(const LTBetoidalParam& p) {
    if (p.x_star == 0.0) return 1.0;
    const double e = specfun::erf_inv(2.0 * p.x_star - 1.0);
    const double s = 0.5 * specfun::erfc(e / p.sigma);
    if (s <= 0.0) {
        throw std::domain_error(
            "betoidal: truncation leaves no probability mass");
    }
    return s;
}

}  // namespace

double pdf(double x, const BetoidalParam& p) {
    check_sigma(p.sigma);
    if (!(x > 0.0 && x < 1.0)) {
        throw std::domain_error("betoidal pdf: x must lie in (0, 1)");
    }
    // phi(t/sigma) / (sigma * phi(t)) with t = Phi^{-1}(x), evaluated in log
    // form: exp(t^2/2 * (1 - 1/sigma^2)) / sigma.
    const double t = specfun::norm_quantile(x);
    return std::exp(0.5 * t * t * (1.0 - 1.0 / (p.sigma * p.sigma))) /
           p.sigma;
}

double cdf(double x, const BetoidalParam& p) {
    check_sigma(p.sigma);
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("betoidal cdf: x must lie in [0, 1]");
    }
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    return 0.5 * (1.0 + specfun::erf(specfun::erf_inv(2.0 * x - 1.0) /
                                     p.sigma));
}

double quantile(double q, const BetoidalParam& p) {
    check_sigma(p.sigma);
    if (!(q > 0.0 && q < 1.0)) {
        throw std::domain_error("betoidal quantile: q must lie in (0, 1)");
    }
    return 0.5 * (1.0 + specfun::erf(p.sigma *
                                     specfun::erf_inv(2.0 * q - 1.0)));
}

double variance(const BetoidalParam& p) {
    check_sigma(p.sigma);
    const double pi = 3.14159265358979323846;
    return std::atan(std::sqrt(1.0 + 2.0 * p.sigma * p.sigma)) / pi - 0.25;
}

double beta_shape_equiv(const BetoidalParam& p) {
    return (1.0 / (4.0 * variance(p)) - 1.0) / 2.0;
}

std::vector<double> sample(const BetoidalParam& p, std::size_t n,
                           RngStream& rng) {
    check_sigma(p.sigma);
    std::vector<double> xs(n);
    for (auto& x : xs) x = specfun::norm_cdf(p.sigma * rng.normal());
    return xs;
}

double lt_pdf(double x, const LTBetoidalParam& p) {
    check_truncation(p);
    if (x < p.x_star) {
        throw std::domain_error("lt_pdf: x below the truncation point");
    }
    return pdf(x, {p.sigma}) / survival(p);
}

double lt_cdf(double x, const LTBetoidalParam& p) {
    check_truncation(p);
    if (x < p.x_star) {
        throw std::domain_error("lt_cdf: x below the truncation point");
    }
    const double s = survival(p);
    const double v = (cdf(x, {p.sigma}) - cdf(p.x_star, {p.sigma})) / s;
    return std::min(std::max(v, 0.0), 1.0);
}

double lt_quantile(double q, const LTBetoidalParam& p) {
    check_truncation(p);
    if (!(q > 0.0 && q < 1.0)) {
        throw std::domain_error("lt_quantile: q must lie in (0, 1)");
    }
    const double s = survival(p);
    double u = cdf(p.x_star, {p.sigma}) + q * s;
    // Rounding can push u onto 1 when the survival mass is tiny.
    constexpr double kBelowOne = 1.0 - 0x1.0p-53;
    if (u >= 1.0) u = kBelowOne;
    return quantile(u, {p.sigma});
}

std::vector<double> lt_sample(const LTBetoidalParam& p, std::size_t n,
                              RngStream& rng) {
    check_truncation(p);
    std::vector<double> xs(n);
    for (auto& x : xs) x = lt_quantile(rng.uniform_open(), p);
    return xs;
}

SigmaFit mle_sigma_iid(std::span<const double> xs) {
    if (xs.empty()) {
        throw std::invalid_argument("mle_sigma_iid: empty sample");
    }
    double sum_sq = 0.0;
    for (double x : xs) {
        if (!(x > 0.0 && x < 1.0)) {
            throw std::domain_error(
                "mle_sigma_iid: observations must lie strictly inside (0, 1)");
        }
        const double t = specfun::norm_quantile(x);
        sum_sq += t * t;
    }
    if (sum_sq == 0.0) {
        throw std::invalid_argument(
            "mle_sigma_iid: degenerate sample (all observations at 0.5)");
    }
    const double n = static_cast<double>(xs.size());
    const double sigma_hat = std::sqrt(sum_sq / n);
    return {sigma_hat, sigma_hat * sigma_hat / (2.0 * n)};
}

}  // namespace ispd::betoidal
