#ifndef ISPD_LIKELIHOODS_HPP
#define ISPD_LIKELIHOODS_HPP

// Log-likelihoods of the correlation model with analytic score and Hessian,
// for three observation schemes: exact scaled averages, indices rounded on
// the half-integer grid, and rounded indices left-truncated at a grid value.

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "ispd/corrmodel.hpp"
#include "ispd/mat2.hpp"

namespace ispd {

// The 201-point index grid {0, 0.5, ..., 100}. Cell j (0-based, value j/2)
// covers ((s_j - 0.25)/100, (s_j + 0.25)/100], with the outer bounds clamped
// to [0, 1] so that cell probabilities sum to one. The erf^{-1} images of
// the cell bounds do not depend on the model and are cached here.
class IspdGrid {
public:
    static constexpr int kCells = 201;

    IspdGrid();

    static double value(int j) { return 0.5 * j; }

    // Maps a grid value (e.g. 73.0) to its cell index; tolerance 1e-9,
    // off-grid values are rejected, never snapped.
    static int index_of(double grid_value);

    double lower_bound(int j) const { return bounds_[j]; }
    double upper_bound(int j) const { return bounds_[j + 1]; }

    // erf^{-1}(2 b - 1) at the cell bounds; -inf at 0 and +inf at 1.
    double e_lower(int j) const { return e_[j]; }
    double e_upper(int j) const { return e_[j + 1]; }

private:
    std::array<double, kCells + 1> bounds_;
    std::array<double, kCells + 1> e_;
};

const IspdGrid& default_grid();

struct ScaledAvg {
    double value = 0.0;
};

struct IspdCell {
    double value = 0.0;  // grid value, e.g. 73.5
};

using Observation = std::variant<ScaledAvg, IspdCell>;

struct DeptRecord {
    std::string id;
    int size = 2;  // count of submitted research outputs
    Observation obs;
};

enum class ObsKind { Scaled, Cell };

// A homogeneous set of department records sharing one grid and one n_max.
// When truncation is set (a grid value), every cell observation must lie at
// or above it.
struct Cohort {
    std::vector<DeptRecord> records;
    int n_max = 0;
    std::optional<double> truncation;

    ObsKind kind() const;
    void validate() const;
    SizeContext ctx(const DeptRecord& r) const { return {r.size, n_max}; }
};

// --- exact scaled averages ---
double loglik_scaled(const ModelTheta& theta, const Cohort& cohort);
Vec2 score_scaled(const ModelTheta& theta, const Cohort& cohort);
Mat22 hessian_scaled(const ModelTheta& theta, const Cohort& cohort);

// --- rounded cells ---
// P(index = grid cell j) for one department.
double cell_prob(const ModelTheta& theta, const SizeContext& ctx, int j,
                 const IspdGrid& grid = default_grid());

double loglik_coarse(const ModelTheta& theta, const Cohort& cohort);
Vec2 score_coarse(const ModelTheta& theta, const Cohort& cohort);
Mat22 hessian_coarse(const ModelTheta& theta, const Cohort& cohort);

// --- rounded cells, left-truncated at grid cell trunc_j ---
double cell_prob_trunc(const ModelTheta& theta, const SizeContext& ctx,
                       int j, int trunc_j,
                       const IspdGrid& grid = default_grid());

double loglik_trunc(const ModelTheta& theta, const Cohort& cohort);
Vec2 score_trunc(const ModelTheta& theta, const Cohort& cohort);
Mat22 hessian_trunc(const ModelTheta& theta, const Cohort& cohort);

// Departments whose observed cell probability underflowed the 1e-300 floor
// at theta; empty on healthy fits.
std::vector<std::string> underflow_cells(const ModelTheta& theta,
                                         const Cohort& cohort);

}  // namespace ispd

#endif
