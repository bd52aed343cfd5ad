#include "dimscope/brito.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>

#include "dimscope/error.hpp"
#include "dimscope/geometry.hpp"
#include "dimscope/mst.hpp"
#include "dimscope/parallel.hpp"

namespace dimscope {

namespace {

std::string range_text(const BritoCalibration& calib) {
    if (calib.entries.empty()) return "calibration is empty";
    return "calibration covers dims " + std::to_string(calib.min_dim()) + ".." + std::to_string(calib.max_dim());
}

}  // namespace

void validate_calibration(const BritoCalibration& calib) {
    if (calib.entries.empty()) throw InvalidArgument("brito: calibration table is empty");
    for (std::size_t i = 0; i < calib.entries.size(); ++i) {
        const auto& e = calib.entries[i];
        if (i > 0 && e.dim != calib.entries[i - 1].dim + 1) {
            throw InvalidArgument("brito: candidate dims are not contiguous (" + range_text(calib) + ")");
        }
        if (!(e.sigma2_hat >= 0.0) || !std::isfinite(e.sigma2_hat) || !std::isfinite(e.mu_hat)) {
            throw InvalidArgument("brito: entry for dim " + std::to_string(e.dim) + " has invalid moments (" +
                                  range_text(calib) + ")");
        }
    }
}

BritoCalibration calibrate(int dim_lo, int dim_hi, std::size_t n_cal, std::size_t L, Seed seed) {
    if (dim_lo < 1 || dim_hi < dim_lo) throw InvalidArgument("calibrate: need 1 <= dim_lo <= dim_hi");
    if (n_cal < 100) throw InvalidArgument("calibrate: n_cal must be >= 100");
    if (L < 2) throw InvalidArgument("calibrate: L must be >= 2");

    const auto dims = static_cast<std::size_t>(dim_hi - dim_lo + 1);
    std::vector<double> stats(dims * L);
    parallel_for(0, dims * L, [&](std::size_t job) {
        const int dim = dim_lo + static_cast<int>(job / L);
        const std::size_t rep = job % L;
        ManifoldSpec cube;
        cube.kind = ManifoldKind::unit_cube;
        cube.intrinsic_dim = dim;
        const PointCloud sample =
            sample_manifold(cube, n_cal, derive_seed(seed, "brito.calibrate", {static_cast<std::uint64_t>(dim), rep}));
        stats[job] = degree_statistic(build_emst(sample));
    });

    BritoCalibration calib;
    calib.n_cal = n_cal;
    calib.L = L;
    calib.seed = seed;
    for (std::size_t i = 0; i < dims; ++i) {
        const double* m = stats.data() + i * L;
        double mean = 0.0;
        for (std::size_t j = 0; j < L; ++j) mean += m[j];
        mean /= static_cast<double>(L);
        if (std::all_of(m, m + L, [&](double v) { return v == m[0]; })) mean = m[0];
        double ss = 0.0;
        for (std::size_t j = 0; j < L; ++j) ss += (m[j] - mean) * (m[j] - mean);
        const double sigma2 = static_cast<double>(n_cal) * ss / static_cast<double>(L - 1);
        calib.entries.push_back({dim_lo + static_cast<int>(i), mean, sigma2});
    }
    return calib;
}

BritoEstimate posterior(double m_prime, std::size_t n_prime, const BritoCalibration& calib) {
    if (n_prime < 2) throw InvalidArgument("posterior: n_prime must be >= 2");
    if (!std::isfinite(m_prime)) throw InvalidArgument("posterior: statistic must be finite");
    validate_calibration(calib);

    std::vector<double> log_density;
    log_density.reserve(calib.entries.size());
    double peak = -std::numeric_limits<double>::infinity();
    // A zero-variance entry (dim 1, where M is deterministic) is a point
    // mass: it takes everything on an exact hit and nothing otherwise.
    const bool exact_hit = std::any_of(calib.entries.begin(), calib.entries.end(), [&](const CalibrationEntry& e) {
        return e.sigma2_hat == 0.0 && e.mu_hat == m_prime;
    });
    for (const auto& e : calib.entries) {
        double ld = -std::numeric_limits<double>::infinity();
        if (exact_hit) {
            if (e.sigma2_hat == 0.0 && e.mu_hat == m_prime) ld = 0.0;
        } else if (e.sigma2_hat > 0.0) {
            const double var = e.sigma2_hat / static_cast<double>(n_prime);
            const double z = m_prime - e.mu_hat;
            ld = -0.5 * std::log(2.0 * std::numbers::pi * var) - z * z / (2.0 * var);
        }
        log_density.push_back(ld);
        peak = std::max(peak, ld);
    }
    if (!std::isfinite(peak)) {
        throw OutOfRange("brito: statistic " + std::to_string(m_prime) + " has zero likelihood under every candidate (" +
                         range_text(calib) + ")");
    }

    double norm = 0.0;
    for (double ld : log_density) norm += std::exp(ld - peak);
    BritoEstimate est;
    est.m_prime = m_prime;
    est.n_prime = n_prime;
    for (std::size_t i = 0; i < calib.entries.size(); ++i) {
        const double p = std::exp(log_density[i] - peak) / norm;
        est.posterior.emplace_back(calib.entries[i].dim, p);
        est.expected_dim += p * calib.entries[i].dim;
    }
    est.d_bqy = static_cast<int>(std::round(est.expected_dim));
    return est;
}

BritoEstimate estimate(const PointCloud& cloud, const BritoCalibration& calib) {
    if (cloud.n() < 2) throw InvalidArgument("brito estimate: need at least 2 points");
    return posterior(degree_statistic(build_emst(cloud)), cloud.n(), calib);
}

std::vector<ConvergencePoint> convergence_curve(const PointCloud& cloud, std::span<const std::size_t> sizes,
                                                const BritoCalibration& calib, Seed seed) {
    validate_calibration(calib);
    if (sizes.empty()) throw InvalidArgument("convergence_curve: no sizes given");
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 2 || sizes[i] > cloud.n()) {
            throw InvalidArgument("convergence_curve: size " + std::to_string(sizes[i]) + " outside [2, " +
                                  std::to_string(cloud.n()) + "]");
        }
        if (i > 0 && sizes[i] <= sizes[i - 1]) throw InvalidArgument("convergence_curve: sizes must increase");
    }
    std::vector<ConvergencePoint> curve(sizes.size());
    parallel_for(0, sizes.size(), [&](std::size_t i) {
        const std::size_t m = sizes[i];
        const BritoEstimate est =
            m == cloud.n() ? estimate(cloud, calib)
                           : estimate(subsample(cloud, m, derive_seed(seed, "brito.curve", {m})), calib);
        curve[i] = {m, est.expected_dim, est.d_bqy};
    });
    return curve;
}

nlohmann::json calibration_to_json(const BritoCalibration& calib) {
    validate_calibration(calib);
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : calib.entries) {
        entries.push_back({{"i", e.dim}, {"mu_hat", e.mu_hat}, {"sigma2_hat", e.sigma2_hat}});
    }
    return {{"schema_version", 1},
            {"dims", {calib.min_dim(), calib.max_dim()}},
            {"n_cal", calib.n_cal},
            {"L", calib.L},
            {"seed", calib.seed.value},
            {"entries", std::move(entries)}};
}

BritoCalibration calibration_from_json(const nlohmann::json& doc) {
    BritoCalibration calib;
    try {
        if (doc.at("schema_version").get<int>() != 1) throw FormatError("calibration: unsupported schema_version");
        calib.n_cal = doc.at("n_cal").get<std::size_t>();
        calib.L = doc.at("L").get<std::size_t>();
        calib.seed = Seed{doc.at("seed").get<std::uint64_t>()};
        for (const auto& e : doc.at("entries")) {
            calib.entries.push_back({e.at("i").get<int>(), e.at("mu_hat").get<double>(), e.at("sigma2_hat").get<double>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("calibration: ") + e.what());
    }
    validate_calibration(calib);
    return calib;
}

void save_calibration(const std::filesystem::path& path, const BritoCalibration& calib) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument("cannot write " + path.string());
    out << calibration_to_json(calib).dump(2) << '\n';
}

BritoCalibration load_calibration(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InvalidArgument("cannot open calibration: " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
    return calibration_from_json(doc);
}

}  // namespace dimscope
