#include "dimscope/schweinhart.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include <boost/math/distributions/students_t.hpp>

#include "dimscope/error.hpp"
#include "dimscope/mst.hpp"
#include "dimscope/parallel.hpp"

namespace dimscope {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

void validate_schedule(const SizeSchedule& schedule, std::size_t n_total) {
    const auto& s = schedule.sizes;
    if (s.size() < 5) throw InvalidArgument("size schedule needs at least 5 distinct sizes");
    if (s.front() < 2) throw InvalidArgument("size schedule: smallest size must be >= 2");
    if (s.back() > n_total) {
        throw InvalidArgument("size schedule: largest size " + std::to_string(s.back()) + " exceeds cloud size " +
                              std::to_string(n_total));
    }
    for (std::size_t i = 1; i < s.size(); ++i) {
        if (s[i] <= s[i - 1]) throw InvalidArgument("size schedule must be strictly increasing");
    }
    if (schedule.replicates < 1) throw InvalidArgument("size schedule: replicates must be >= 1");
}

SizeSchedule schedule_sizes(std::size_t n_total, std::size_t n_min, std::size_t count, int replicates) {
    if (n_min < 2 || n_min >= n_total) throw InvalidArgument("schedule_sizes: need 2 <= n_min < n_total");
    if (count < 5) throw InvalidArgument("schedule_sizes: count must be >= 5");
    if (replicates < 1) throw InvalidArgument("schedule_sizes: replicates must be >= 1");
    SizeSchedule schedule;
    schedule.replicates = replicates;
    const double ratio = static_cast<double>(n_total) / static_cast<double>(n_min);
    for (std::size_t k = 0; k < count; ++k) {
        std::size_t size;
        if (k == 0) {
            size = n_min;
        } else if (k + 1 == count) {
            size = n_total;
        } else {
            const double f = static_cast<double>(k) / static_cast<double>(count - 1);
            size = static_cast<std::size_t>(std::llround(static_cast<double>(n_min) * std::pow(ratio, f)));
        }
        if (schedule.sizes.empty() || size > schedule.sizes.back()) schedule.sizes.push_back(size);
    }
    return schedule;
}

std::string_view to_string(RejectionReason reason) {
    switch (reason) {
        case RejectionReason::none: return "none";
        case RejectionReason::line_ci: return "line_ci";
        case RejectionReason::param_ci: return "param_ci";
        case RejectionReason::slope_ge_one: return "slope_ge_one";
        case RejectionReason::alpha_ge_dhat: return "alpha_ge_dhat";
        case RejectionReason::degenerate: return "degenerate";
    }
    return "unknown";
}

FitRecord fit_log_log(double alpha, std::span<const double> log_sizes, std::span<const double> log_values,
                      double gamma) {
    if (!(alpha > 0.0)) throw InvalidArgument("fit: alpha must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("fit: gamma must lie in (0, 1)");
    if (log_sizes.size() != log_values.size() || log_sizes.size() < 3) {
        throw InvalidArgument("fit: need at least 3 paired observations");
    }
    const std::size_t k = log_sizes.size();
    const double kd = static_cast<double>(k);
    double x_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        x_mean += log_sizes[i];
        y_mean += log_values[i];
    }
    x_mean /= kd;
    y_mean /= kd;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dx = log_sizes[i] - x_mean;
        const double dy = log_values[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    const auto [x_lo, x_hi] = std::minmax_element(log_sizes.begin(), log_sizes.end());
    if (*x_lo == *x_hi || !(sxx > 0.0) || !std::isfinite(syy)) {
        std::ostringstream diag;
        diag << "alpha=" << alpha << " sxx=" << sxx << " syy=" << syy << " k=" << k;
        throw DegenerateFit("log-log regression is degenerate", diag.str());
    }

    FitRecord r;
    r.alpha = alpha;
    r.slope = sxy / sxx;
    r.intercept = y_mean - r.slope * x_mean;
    double ssr = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double e = log_values[i] - (r.intercept + r.slope * log_sizes[i]);
        ssr += e * e;
    }
    const double dof = kd - 2.0;
    const double resid_sd = std::sqrt(ssr / dof);
    const double t = boost::math::quantile(boost::math::complement(boost::math::students_t(dof), 0.025));
    const double slope_half = t * resid_sd / std::sqrt(sxx);
    r.slope_ci_low = r.slope - slope_half;
    r.slope_ci_high = r.slope + slope_half;

    // Mean-response band, measured as a relative halfwidth of E itself so it
    // does not depend on the units of the cloud.
    r.line_ci_rel = 0.0;
    for (std::size_t i = 0; i < k; ++i) {
        const double dx = log_sizes[i] - x_mean;
        const double half = t * resid_sd * std::sqrt(1.0 / kd + dx * dx / sxx);
        r.line_ci_rel = std::max(r.line_ci_rel, std::expm1(half));
    }
    // An exact fit has a zero-width interval even when the slope is zero.
    r.param_ci_rel = slope_half == 0.0 ? 0.0 : r.slope != 0.0 ? slope_half / std::abs(r.slope) : kInf;

    if (r.slope < 1.0) {
        r.d_hat = alpha / (1.0 - r.slope);
        r.ci_low = alpha / (1.0 - r.slope_ci_low);
        r.ci_high = r.slope_ci_high < 1.0 ? alpha / (1.0 - r.slope_ci_high) : kInf;
    } else {
        r.d_hat = kNaN;
        r.ci_low = kNaN;
        r.ci_high = kInf;
    }

    if (r.line_ci_rel > gamma) {
        r.rejection_reason = RejectionReason::line_ci;
    } else if (r.param_ci_rel > gamma) {
        r.rejection_reason = RejectionReason::param_ci;
    } else if (r.slope_ci_high >= 1.0) {
        r.rejection_reason = RejectionReason::slope_ge_one;
    } else if (alpha >= r.d_hat) {
        r.rejection_reason = RejectionReason::alpha_ge_dhat;
    } else {
        r.rejection_reason = RejectionReason::none;
    }
    r.admissible = r.rejection_reason == RejectionReason::none;
    return r;
}

TreeBank grow_trees(const PointCloud& cloud, const SizeSchedule& schedule, Seed seed) {
    validate_schedule(schedule, cloud.n());
    TreeBank bank;
    bank.schedule = schedule;
    const std::size_t sizes = schedule.sizes.size();
    const auto reps = static_cast<std::size_t>(schedule.replicates);
    bank.weights.assign(sizes, std::vector<std::vector<double>>(reps));

    // The full cloud yields the same tree for every replicate; build it once.
    const bool has_full = schedule.sizes.back() == cloud.n();
    std::vector<double> full_weights;
    if (has_full) full_weights = build_emst(cloud).weights();

    parallel_for(0, sizes * reps, [&](std::size_t job) {
        const std::size_t s = job / reps;
        const std::size_t r = job % reps;
        const std::size_t m = schedule.sizes[s];
        if (m == cloud.n()) {
            bank.weights[s][r] = full_weights;
            return;
        }
        const PointCloud sample = subsample(cloud, m, derive_seed(seed, "schweinhart.subsample", {m, r}));
        bank.weights[s][r] = build_emst(sample).weights();
    });
    return bank;
}

std::vector<double> log_power_sums(const TreeBank& bank, double alpha) {
    std::vector<double> out;
    out.reserve(bank.weights.size());
    for (std::size_t s = 0; s < bank.weights.size(); ++s) {
        double acc = 0.0;
        for (const auto& w : bank.weights[s]) {
            const double e = edge_power_sum(w, alpha);
            if (!(e > 0.0) || !std::isfinite(e)) {
                throw DegenerateFit("E_alpha is not positive",
                                    "size=" + std::to_string(bank.schedule.sizes[s]) + " E=" + std::to_string(e));
            }
            acc += std::log(e);
        }
        out.push_back(acc / static_cast<double>(bank.weights[s].size()));
    }
    return out;
}

FitRecord fit_dimension(const TreeBank& bank, double alpha, double gamma) {
    if (!(alpha > 0.0)) throw InvalidArgument("fit_dimension: alpha must be > 0");
    std::vector<double> x;
    x.reserve(bank.schedule.sizes.size());
    for (std::size_t m : bank.schedule.sizes) x.push_back(std::log(static_cast<double>(m)));
    const std::vector<double> y = log_power_sums(bank, alpha);
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) {
        throw DegenerateFit("E_alpha is the same at every size", "alpha=" + std::to_string(alpha));
    }
    return fit_log_log(alpha, x, y, gamma);
}

FitRecord fit_dimension(const PointCloud& cloud, double alpha, const SizeSchedule& schedule, double gamma,
                        Seed seed) {
    if (!(alpha > 0.0)) throw InvalidArgument("fit_dimension: alpha must be > 0");
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("fit_dimension: gamma must lie in (0, 1)");
    return fit_dimension(grow_trees(cloud, schedule, seed), alpha, gamma);
}

std::vector<double> AlphaGrid::values() const {
    if (!(start > 0.0) || !(step > 0.0) || !(stop >= start) || !std::isfinite(stop)) {
        throw InvalidArgument("alpha grid needs 0 < start <= stop and step > 0");
    }
    const auto count = static_cast<std::size_t>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i) v[i] = start + static_cast<double>(i) * step;
    return v;
}

SchweinhartReport sweep_alpha(const TreeBank& bank, const AlphaGrid& grid, double gamma) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("sweep_alpha: gamma must lie in (0, 1)");
    SchweinhartReport report;
    report.grid = grid;
    report.gamma = gamma;
    const std::vector<double> alphas = grid.values();
    report.records.resize(alphas.size());
    parallel_for(0, alphas.size(), [&](std::size_t i) {
        try {
            report.records[i] = fit_dimension(bank, alphas[i], gamma);
        } catch (const DegenerateFit&) {
            FitRecord r;
            r.alpha = alphas[i];
            r.d_hat = r.slope = r.intercept = r.ci_low = kNaN;
            r.slope_ci_low = r.slope_ci_high = kNaN;
            r.ci_high = r.line_ci_rel = r.param_ci_rel = kInf;
            r.rejection_reason = RejectionReason::degenerate;
            report.records[i] = r;
        }
    });

    bool in_run = false;
    for (const FitRecord& r : report.records) {
        if (r.admissible) {
            report.d_min = report.d_min ? std::min(*report.d_min, r.d_hat) : r.d_hat;
            report.d_max = report.d_max ? std::max(*report.d_max, r.d_hat) : r.d_hat;
            if (in_run) {
                report.admissible_alpha.back().second = r.alpha;
            } else {
                report.admissible_alpha.emplace_back(r.alpha, r.alpha);
            }
        }
        in_run = r.admissible;
    }
    return report;
}

SchweinhartReport sweep_alpha(const PointCloud& cloud, const AlphaGrid& grid, const SizeSchedule& schedule,
                              double gamma, Seed seed) {
    if (!(gamma > 0.0 && gamma < 1.0)) throw InvalidArgument("sweep_alpha: gamma must lie in (0, 1)");
    (void)grid.values();
    return sweep_alpha(grow_trees(cloud, schedule, seed), grid, gamma);
}

}  // namespace dimscope
