#pragma once

#include <cstddef>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace dimscope {

struct SvdOptions {
    /// Lanczos step cap; 0 means min(rows, cols), where the factorisation is exact.
    std::size_t max_steps = 0;
    /// Convergence when every wanted residual is below tol * sigma_1.
    double tol = 1e-13;
};

struct TruncatedSvd {
    Eigen::MatrixXd U;                ///< rows x d, orthonormal columns
    Eigen::VectorXd singular_values;  ///< descending
    Eigen::MatrixXd V;                ///< cols x d
    std::size_t steps = 0;            ///< Lanczos steps taken
    double max_residual = 0.0;
};

/// Top-d singular triplets by Golub-Kahan-Lanczos bidiagonalisation with
/// full reorthogonalisation. Each left vector is signed so that its
/// largest-magnitude entry is positive. Throws ConvergenceError when the
/// step cap is reached first.
TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double>& a, std::size_t d, const SvdOptions& options = {});

}  // namespace dimscope
