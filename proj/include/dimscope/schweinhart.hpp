#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "dimscope/point_cloud.hpp"

namespace dimscope {

struct SizeSchedule {
    std::vector<std::size_t> sizes;  ///< strictly increasing subsample sizes
    int replicates = 3;
};

/// Throws InvalidArgument unless sizes are strictly increasing, at least 5,
/// the smallest >= 2, the largest <= n_total, and replicates >= 1.
void validate_schedule(const SizeSchedule& schedule, std::size_t n_total);

/// Geometric progression of `count` sizes from n_min to n_total, rounded to
/// the nearest integer and deduplicated.
SizeSchedule schedule_sizes(std::size_t n_total, std::size_t n_min, std::size_t count, int replicates = 3);

enum class RejectionReason {
    none,
    line_ci,        ///< regression-line band wider than gamma
    param_ci,       ///< slope interval wider than gamma
    slope_ge_one,   ///< upper slope bound >= 1, dimension interval unbounded
    alpha_ge_dhat,  ///< outside the theorem's 0 < alpha < d range
    degenerate,     ///< regression could not be carried out
};

std::string_view to_string(RejectionReason reason);

struct FitRecord {
    double alpha = 0.0;
    double d_hat = 0.0;      ///< alpha / (1 - slope); NaN when slope >= 1
    double slope = 0.0;      ///< estimate of (d - alpha) / d
    double intercept = 0.0;  ///< ln C(alpha, d)
    double slope_ci_low = 0.0;
    double slope_ci_high = 0.0;
    double ci_low = 0.0;     ///< 95% interval for d_hat
    double ci_high = 0.0;    ///< +inf when slope_ci_high >= 1
    double line_ci_rel = 0.0;
    double param_ci_rel = 0.0;
    bool admissible = false;
    RejectionReason rejection_reason = RejectionReason::none;
};

/// Fits ln E = intercept + slope * ln m by OLS and applies the admissibility
/// rules. log_sizes and log_values must be the same length (>= 3).
/// Throws DegenerateFit when the design has no spread. Constant responses
/// are an exact fit with slope 0.
FitRecord fit_log_log(double alpha, std::span<const double> log_sizes, std::span<const double> log_values,
                      double gamma);

/// Sorted MST edge weights for every (size, replicate) subsample. Built once
/// and reused for every alpha.
struct TreeBank {
    SizeSchedule schedule;
    std::vector<std::vector<std::vector<double>>> weights;  ///< [size][replicate]
};

TreeBank grow_trees(const PointCloud& cloud, const SizeSchedule& schedule, Seed seed);

/// Mean over replicates of ln E_alpha at each size. Throws DegenerateFit if
/// some E_alpha is not positive.
std::vector<double> log_power_sums(const TreeBank& bank, double alpha);

/// Throws DegenerateFit when E_alpha is equal at every size.
FitRecord fit_dimension(const TreeBank& bank, double alpha, double gamma);
FitRecord fit_dimension(const PointCloud& cloud, double alpha, const SizeSchedule& schedule, double gamma,
                        Seed seed);

struct AlphaGrid {
    double start = 1e-4;
    double stop = 10.0;
    double step = 0.1;
    std::vector<double> values() const;
};

struct SchweinhartReport {
    AlphaGrid grid;
    double gamma = 0.1;
    std::vector<FitRecord> records;
    std::optional<double> d_min;  ///< empty when nothing is admissible
    std::optional<double> d_max;
    std::vector<std::pair<double, double>> admissible_alpha;  ///< closed runs of admissible grid points
};

SchweinhartReport sweep_alpha(const TreeBank& bank, const AlphaGrid& grid, double gamma);
SchweinhartReport sweep_alpha(const PointCloud& cloud, const AlphaGrid& grid, const SizeSchedule& schedule,
                              double gamma, Seed seed);

}  // namespace dimscope
