#include "ispd/simgen.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ispd/errors.hpp"

namespace ispd {

void ScoreDist::validate() const {
    if (support.empty() || support.size() != probs.size()) {
        throw InputError("ScoreDist: support and probs must match and be "
                         "nonempty");
    }
    double sum = 0.0, mean = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (!(probs[i] >= 0.0 && probs[i] <= 1.0)) {
            throw InputError("ScoreDist: probabilities must lie in [0, 1]");
        }
        sum += probs[i];
        mean += probs[i] * support[i];
        m2 += probs[i] * support[i] * support[i];
    }
    if (std::abs(sum - 1.0) > 1e-12) {
        throw InputError("ScoreDist: probabilities must sum to 1");
    }
    if (std::abs(mean) > 1e-5 || std::abs(m2 - mean * mean - 1.0) > 1e-5) {
        throw InputError("ScoreDist: scores must be standardized "
                         "(mean 0, variance 1)");
    }
}

double ScoreDist::draw(RngStream& rng) const {
    const double u = rng.uniform_open();
    double cum = 0.0;
    for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
        cum += probs[i];
        if (u <= cum) return support[i];
    }
    return support.back();
}

const ScoreDist& ScoreDist::vqr_2010_2014() {
    static const ScoreDist dist{
        {-1.69580, -1.06773, -0.12561, 0.81650, 1.44457},
        {0.1, 0.2, 0.3, 0.25, 0.15}};
    return dist;
}

ScoreDist ScoreDist::from_json_text(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("ScoreDist: invalid JSON: ") + e.what());
    }
    if (!j.contains("support") || !j.contains("probs")) {
        throw InputError("ScoreDist: JSON must have 'support' and 'probs'");
    }
    ScoreDist d{j["support"].get<std::vector<double>>(),
                j["probs"].get<std::vector<double>>()};
    d.validate();
    return d;
}

PerturbationLevel perturbation_from_name(const std::string& name) {
    if (name == "null") return PerturbationLevel::Null;
    if (name == "small") return PerturbationLevel::Small;
    if (name == "medium") return PerturbationLevel::Medium;
    if (name == "large") return PerturbationLevel::Large;
    throw InputError("unknown perturbation level: " + name);
}

std::string perturbation_name(PerturbationLevel level) {
    switch (level) {
        case PerturbationLevel::Null: return "null";
        case PerturbationLevel::Small: return "small";
        case PerturbationLevel::Medium: return "medium";
        case PerturbationLevel::Large: return "large";
    }
    return "?";
}

namespace {

void check_triplet(const ClusterTriplet& t, int n) {
    if (t.m < 0 || t.k < 2 || t.k_check < 0 || t.k_check > t.k ||
        t.m * t.k + t.k_check > n) {
        throw std::invalid_argument("ClusterTriplet: invalid for size n");
    }
}

}  // namespace

double achieved_rho(const ClusterTriplet& t, int n) {
    if (n < 2) throw std::invalid_argument("achieved_rho: n must be >= 2");
    check_triplet(t, n);
    const double nn = n;
    return (static_cast<double>(t.m) * t.k * (t.k - 1) +
            static_cast<double>(t.k_check) * (t.k_check - 1)) /
           (nn * (nn - 1.0));
}

TripletChoice triplet_select_report(double rho_target, int n) {
    if (n < 2) throw std::invalid_argument("triplet_select: n must be >= 2");
    if (!(rho_target >= 0.0 && rho_target < 1.0)) {
        throw InfeasibleError(
            "triplet_select: target correlation must lie in [0, 1)");
    }
    TripletChoice out;
    if (rho_target == 0.0) {
        out.triplet = {0, 2, 0};
        return out;
    }
    const double pairs = static_cast<double>(n) * (n - 1.0);
    // Smallest k with k >= 1 + rho (n-1); the nudge keeps exact integers
    // from rounding up.
    const int k = std::max(
        2, static_cast<int>(std::ceil(1.0 + rho_target * (n - 1.0) - 1e-9)));
    int m = static_cast<int>(
        std::floor(rho_target * pairs / (k * (k - 1.0)) + 1e-9));
    while (m * k > n) --m;
    const double rho_r = m * k * (k - 1.0) / pairs;
    const double k_check_root =
        0.5 + std::sqrt(0.25 + (rho_target - rho_r) * pairs);
    const int k_check =
        std::min(n - m * k, static_cast<int>(std::llround(k_check_root)));
    out.triplet = {m, k, k_check};
    out.capped = n - m * k < static_cast<int>(std::llround(k_check_root));
    out.extra_full_cluster = k_check == k;
    out.achieved = achieved_rho(out.triplet, n);
    out.rel_error = std::abs(out.achieved - rho_target) / rho_target;
    return out;
}

ClusterTriplet triplet_select(double rho_target, int n) {
    return triplet_select_report(rho_target, n).triplet;
}

std::vector<double> gen_scores(int n, double rho_target,
                               const ScoreDist& dist, RngStream& rng) {
    const ClusterTriplet t = triplet_select(rho_target, n);
    std::vector<double> scores;
    scores.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < t.m; ++i) {
        const double z = dist.draw(rng);
        scores.insert(scores.end(), t.k, z);
    }
    if (t.k_check > 0) {
        const double z = dist.draw(rng);
        scores.insert(scores.end(), t.k_check, z);
    }
    while (static_cast<int>(scores.size()) < n) {
        scores.push_back(dist.draw(rng));
    }
    return scores;
}

double perturb_rho(double rho, PerturbationLevel level, RngStream& rng) {
    if (rho < 0.0) {
        throw std::invalid_argument("perturb_rho: rho must be >= 0");
    }
    switch (level) {
        case PerturbationLevel::Null: return rho;
        case PerturbationLevel::Small: return rho * rng.uniform(0.9, 1.1);
        case PerturbationLevel::Medium: return rho * rng.uniform(0.75, 1.25);
        case PerturbationLevel::Large: return rho * rng.uniform(0.5, 1.5);
    }
    return rho;
}

const SizeSummary& anvur_2017_sizes() {
    static const SizeSummary s{24, 96, 120, 130.6, 153.5, 464};
    return s;
}

const SizeSummary& anvur_2022_sizes() {
    static const SizeSummary s{78, 159, 198, 219.8, 254.2, 615};
    return s;
}

std::vector<int> sample_sizes(const SizeSummary& summary, int count,
                              RngStream& rng) {
    if (count < 1) throw std::invalid_argument("sample_sizes: count >= 1");
    // Shift from the quartile equation (q2-c)^2 = (q1-c)(q3-c), then scale
    // from the quartile ratio. Matches the stated mean to within a percent
    // for both published summaries.
    const double c = (summary.q2 * summary.q2 - summary.q1 * summary.q3) /
                     (2.0 * summary.q2 - summary.q1 - summary.q3);
    if (!(c < summary.q1)) {
        throw InfeasibleError("sample_sizes: summary not log-normal-shaped");
    }
    const double mu = std::log(summary.q2 - c);
    const double z75 = 0.6744897501960817;  // standard normal upper quartile
    const double sigma = std::log((summary.q3 - c) / (summary.q2 - c)) / z75;
    std::vector<int> sizes(static_cast<std::size_t>(count));
    for (auto& s : sizes) {
        const double draw = c + std::exp(mu + sigma * rng.normal());
        s = static_cast<int>(
            std::clamp(std::llround(draw), std::llround(summary.min),
                       std::llround(summary.max)));
    }
    return sizes;
}

}  // namespace ispd
