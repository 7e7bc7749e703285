#ifndef ISPD_INDICES_HPP
#define ISPD_INDICES_HPP

// The five index variants: the original rounded percentile index, the
// infeasible benchmark built from the true standard deviation, and the
// non-parametric, random-intercept, and model-based adjustments.

#include <span>
#include <vector>

#include "ispd/corrmodel.hpp"

namespace ispd {

// floor(200 x + 0.5) / 2: x in [0,1] mapped onto the half-integer grid.
double ispd_round(double x);

// sum / sqrt(N); throws std::invalid_argument on an empty list.
double scaled_average(std::span<const double> scores);

double ispd_original(double z_tilde);

// Index after rescaling by a known standard deviation.
double ispd_theo(double z_tilde, double sigma);

// Average cross-product of standardized scores of one department; unbiased
// for the average pairwise correlation but unclamped, so it may leave
// [-(N-1)^{-1}, 1]. Requires N >= 2.
double rho_np(std::span<const double> scores);

// Non-parametric adjustment; clamps rho_np to [0, 1] before rescaling.
double ispd_np(double z_tilde, std::span<const double> scores);

// Pooled intraclass correlation from a one-way random-intercept
// decomposition (method-of-moments on the unbalanced design), clamped to
// [0, 1). Throws std::invalid_argument with fewer than two departments or
// zero total variance.
double rho_rim(const std::vector<std::vector<double>>& dept_scores);

double ispd_rim(double z_tilde, int n, double rho_rim_value);

// Model-based adjustment with a fitted parameter vector.
double ispd_fcm(double z_tilde, const SizeContext& ctx,
                const ModelTheta& theta_hat);

}  // namespace ispd

#endif
