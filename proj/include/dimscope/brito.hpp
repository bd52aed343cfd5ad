#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "dimscope/point_cloud.hpp"

namespace dimscope {

struct CalibrationEntry {
    int dim = 0;
    double mu_hat = 0.0;      ///< mean of M over the L hypercube samples
    double sigma2_hat = 0.0;  ///< n_cal times the unbiased sample variance of M; 0 only for dim 1
};

struct BritoCalibration {
    std::vector<CalibrationEntry> entries;  ///< contiguous ascending dims
    std::size_t n_cal = 0;
    std::size_t L = 0;
    Seed seed;

    int min_dim() const { return entries.front().dim; }
    int max_dim() const { return entries.back().dim; }
};

/// Throws InvalidArgument if the table is empty, non-contiguous or has a
/// negative or non-finite moment; the message names the candidate range.
void validate_calibration(const BritoCalibration& calib);

/// Monte Carlo over L uniform samples of n_cal points in [0,1]^i for every
/// i in [dim_lo, dim_hi].
BritoCalibration calibrate(int dim_lo, int dim_hi, std::size_t n_cal, std::size_t L, Seed seed);

// JSON: {schema_version, dims: [lo, hi], n_cal, L, seed, entries: [{i, mu_hat, sigma2_hat}]}.
nlohmann::json calibration_to_json(const BritoCalibration& calib);
/// Throws FormatError on a malformed document and InvalidArgument if the
/// table fails validate_calibration.
BritoCalibration calibration_from_json(const nlohmann::json& doc);
void save_calibration(const std::filesystem::path& path, const BritoCalibration& calib);
BritoCalibration load_calibration(const std::filesystem::path& path);

struct BritoEstimate {
    double m_prime = 0.0;
    std::size_t n_prime = 0;
    std::vector<std::pair<int, double>> posterior;  ///< (dim, probability)
    double expected_dim = 0.0;
    int d_bqy = 0;  ///< expected_dim rounded half away from zero
};

/// Normal likelihood with variance sigma2_hat / n_prime under a flat prior,
/// normalised in log space. Throws OutOfRange if every density vanishes.
BritoEstimate posterior(double m_prime, std::size_t n_prime, const BritoCalibration& calib);

BritoEstimate estimate(const PointCloud& cloud, const BritoCalibration& calib);

struct ConvergencePoint {
    std::size_t size = 0;
    double expected_dim = 0.0;
    int d_bqy = 0;
};

/// Independent subsample per size; a size equal to cloud.n() uses the cloud
/// itself.
std::vector<ConvergencePoint> convergence_curve(const PointCloud& cloud, std::span<const std::size_t> sizes,
                                                const BritoCalibration& calib, Seed seed);

}  // namespace dimscope
