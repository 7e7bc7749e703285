#include "ispd/indices.hpp"

#include <cmath>
#include <stdexcept>

#include "ispd/specfun.hpp"

namespace ispd {

double ispd_round(double x) {
    if (!(x >= 0.0 && x <= 1.0)) {
        throw std::domain_error("ispd_round: x must lie in [0, 1]");
    }
    return std::floor(200.0 * x + 0.5) / 2.0;
}

double scaled_average(std::span<const double> scores) {
    if (scores.empty()) {
        throw std::invalid_argument("scaled_average: empty score list");
    }
    double sum = 0.0;
    for (double s : scores) sum += s;
    return sum / std::sqrt(static_cast<double>(scores.size()));
}

double ispd_original(double z_tilde) {
    return ispd_round(specfun::norm_cdf(z_tilde));
}

double ispd_theo(double z_tilde, double sigma) {
    if (!(sigma > 0.0)) {
        throw std::domain_error("ispd_theo: sigma must be positive");
    }
    return ispd_round(specfun::norm_cdf(z_tilde / sigma));
}

double rho_np(std::span<const double> scores) {
    const std::size_t n = scores.size();
    if (n < 2) {
        throw std::invalid_argument("rho_np: needs at least two scores");
    }
    double sum = 0.0, sum_sq = 0.0;
    for (double s : scores) {
        sum += s;
        sum_sq += s * s;
    }
    // sum_{i != i'} z_i z_{i'} = (sum z)^2 - sum z^2
    const double nn = static_cast<double>(n);
    return (sum * sum - sum_sq) / (nn * (nn - 1.0));
}

double ispd_np(double z_tilde, std::span<const double> scores) {
    const double rho = std::clamp(rho_np(scores), 0.0, 1.0);
    const double sigma =
        std::sqrt(1.0 + rho * (static_cast<double>(scores.size()) - 1.0));
    return ispd_theo(z_tilde, sigma);
}

double rho_rim(const std::vector<std::vector<double>>& dept_scores) {
    const std::size_t groups = dept_scores.size();
    if (groups < 2) {
        throw std::invalid_argument("rho_rim: needs at least two departments");
    }
    double total_n = 0.0, grand_sum = 0.0, sum_sq_sizes = 0.0;
    for (const auto& g : dept_scores) {
        if (g.empty()) {
            throw std::invalid_argument("rho_rim: empty department");
        }
        total_n += static_cast<double>(g.size());
        sum_sq_sizes += static_cast<double>(g.size()) *
                        static_cast<double>(g.size());
        for (double s : g) grand_sum += s;
    }
    const double grand_mean = grand_sum / total_n;
    double ssb = 0.0, ssw = 0.0;
    for (const auto& g : dept_scores) {
        double m = 0.0;
        for (double s : g) m += s;
        m /= static_cast<double>(g.size());
        ssb += static_cast<double>(g.size()) * (m - grand_mean) *
               (m - grand_mean);
        for (double s : g) ssw += (s - m) * (s - m);
    }
    const double d = static_cast<double>(groups);
    if (ssb + ssw <= 0.0) {
        throw std::invalid_argument("rho_rim: zero total variance");
    }
    const double msb = ssb / (d - 1.0);
    const double msw = ssw / (total_n - d);
    // Unbalanced-design group-size coefficient of the one-way decomposition.
    const double n0 = (total_n - sum_sq_sizes / total_n) / (d - 1.0);
    const double icc = (msb - msw) / (msb + (n0 - 1.0) * msw);
    return std::clamp(icc, 0.0, 1.0 - 1e-12);
}

double ispd_rim(double z_tilde, int n, double rho_rim_value) {
    if (n < 2) throw std::invalid_argument("ispd_rim: n must be >= 2");
    return ispd_theo(z_tilde,
                     std::sqrt(1.0 + rho_rim_value * (n - 1.0)));
}

double ispd_fcm(double z_tilde, const SizeContext& ctx,
                const ModelTheta& theta_hat) {
    return ispd_theo(z_tilde, sigma_d(theta_hat, ctx));
}

}  // namespace ispd
