#ifndef ISPD_BETOIDAL_HPP
#define ISPD_BETOIDAL_HPP

// The Betoidal(sigma) distribution: law of Phi(Z) with Z ~ N(0, sigma^2).
// Uniform on (0,1) at sigma = 1, U-shaped for sigma > 1, bell-shaped for
// sigma < 1. Includes the left-truncated variant and i.i.d. ML estimation
// of sigma.

#include <cstddef>
#include <span>
#include <vector>

namespace ispd {

class RngStream;

namespace betoidal {

struct BetoidalParam {
    double sigma = 1.0;
};

struct LTBetoidalParam {
    double sigma = 1.0;
    double x_star = 0.0;  // lower truncation point in [0, 1)
};

// Density on the open interval (0, 1); throws std::domain_error at the
// boundary, where the limit depends on sigma.
double pdf(double x, const BetoidalParam& p);

// CDF on [0, 1]; boundary values map to 0 and 1 by continuity.
double cdf(double x, const BetoidalParam& p);

// Quantile for q in (0, 1).
double quantile(double q, const BetoidalParam& p);

// arctan(sqrt(1+2*sigma^2))/pi - 1/4, strictly increasing, in (0, 1/4).
double variance(const BetoidalParam& p);

// Shape a of the symmetric Beta(a, a) with the same variance.
double beta_shape_equiv(const BetoidalParam& p);

std::vector<double> sample(const BetoidalParam& p, std::size_t n,
                           RngStream& rng);

double lt_pdf(double x, const LTBetoidalParam& p);
double lt_cdf(double x, const LTBetoidalParam& p);
double lt_quantile(double q, const LTBetoidalParam& p);
std::vector<double> lt_sample(const LTBetoidalParam& p, std::size_t n,
                              RngStream& rng);

struct SigmaFit {
    double sigma_hat = 0.0;
    double var_of_estimator = 0.0;  // sigma_hat^2 / (2n), from the expected information
};

// ML estimate of sigma from i.i.d. interior observations. Throws
// std::domain_error on boundary values and std::invalid_argument when the
// estimate would be 0 (all observations equal to 0.5) or the input is empty.
SigmaFit mle_sigma_iid(std::span<const double> xs);

}  // namespace betoidal
}  // namespace ispd

#endif
