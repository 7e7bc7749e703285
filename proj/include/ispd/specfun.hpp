#ifndef ISPD_SPECFUN_HPP
#define ISPD_SPECFUN_HPP

// Self-contained special-function kernel: error function and inverse,
// standard normal pdf/cdf/quantile, Owen's T at h = 0, and the chi-square
// upper tail. All functions are pure and thread-safe.

namespace ispd::specfun {

double erf(double x);
double erfc(double x);

// Inverse of erf on (-1, 1). Throws std::domain_error for |p| >= 1.
double erf_inv(double p);

// Inverse of erfc on (0, 2). Throws std::domain_error outside.
double erfc_inv(double q);

double norm_pdf(double z);
double norm_cdf(double z);

// Standard normal quantile, q in (0, 1). Throws std::domain_error outside.
double norm_quantile(double q);

// Owen's T(0, a) = arctan(a) / (2*pi), exact closed form.
double owens_t_h0(double a);

// Upper tail P(X > x) for X ~ chi-square(df). x >= 0, df >= 1.
double chi2_sf(double x, int df);

// Regularized upper incomplete gamma Q(a, x), a > 0, x >= 0.
double reg_gamma_q(double a, double x);

}  // namespace ispd::specfun

#endif
