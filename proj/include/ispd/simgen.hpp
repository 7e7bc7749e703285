#ifndef ISPD_SIMGEN_HPP
#define ISPD_SIMGEN_HPP

// Generator of standardized scores with a target intra-departmental
// correlation, obtained by replicating draws in clusters of sizes described
// by the triplet (m, k, k_check).

#include <string>
#include <vector>

#include "ispd/rng.hpp"

namespace ispd {

// Discrete standardized score distribution. The default is the marginal
// observed in the 2010-2014 evaluation round.
struct ScoreDist {
    std::vector<double> support;
    std::vector<double> probs;

    // Checks probabilities sum to one and the first two moments are
    // standardized (tolerance 1e-5, which the published constants meet).
    void validate() const;

    double draw(RngStream& rng) const;

    static const ScoreDist& vqr_2010_2014();
    static ScoreDist from_json_text(const std::string& text);
};

struct ClusterTriplet {
    int m = 0;        // number of fully replicated draws
    int k = 2;        // replication factor, >= 2
    int k_check = 0;  // size of the partial cluster, >= 0
};

enum class PerturbationLevel { Null, Small, Medium, Large };

PerturbationLevel perturbation_from_name(const std::string& name);
std::string perturbation_name(PerturbationLevel level);

// {m k(k-1) + k_check(k_check-1)} / {n(n-1)} for a triplet valid at size n.
double achieved_rho(const ClusterTriplet& t, int n);

struct TripletChoice {
    ClusterTriplet triplet;
    double achieved = 0.0;
    double rel_error = 0.0;        // |achieved - target| / target (0 at target 0)
    bool capped = false;           // k_check hit the n - m*k ceiling
    bool extra_full_cluster = false;  // rounding produced k_check == k
};

// Heuristic triplet choice: smallest k with k >= 1 + rho(n-1), largest
// feasible m, then the partial cluster from the quadratic root. Relative
// error is typically below 5% unless the cap binds. Throws InfeasibleError
// for rho outside [0, 1).
TripletChoice triplet_select_report(double rho_target, int n);
ClusterTriplet triplet_select(double rho_target, int n);

// Exactly n scores: m blocks of k identical draws, one block of k_check
// identical draws, then independent draws; every underlying draw i.i.d.
// from dist. Replicated blocks occupy the leading positions.
std::vector<double> gen_scores(int n, double rho_target,
                               const ScoreDist& dist, RngStream& rng);

// Multiplies rho by a uniform draw from the level's range; Null is the
// identity and consumes no randomness.
double perturb_rho(double rho, PerturbationLevel level, RngStream& rng);

// Six-number size summary (min, Q1, median, mean, Q3, max).
struct SizeSummary {
    double min, q1, q2, mean, q3, max;
};

const SizeSummary& anvur_2017_sizes();
const SizeSummary& anvur_2022_sizes();

// Draws department sizes from a shifted log-normal matched to the summary's
// quartiles, clamped to [min, max]. A declared approximation for when the
// per-department size list is not available.
std::vector<int> sample_sizes(const SizeSummary& summary, int count,
                              RngStream& rng);

}  // namespace ispd

#endif
