#include "dimscope/svd.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include <Eigen/SVD>

#include "dimscope/error.hpp"
#include "dimscope/rng.hpp"

namespace dimscope {

namespace {

// Classical Gram-Schmidt applied twice, which is enough to keep the basis
// orthogonal to working precision.
void reorthogonalize(Eigen::VectorXd& x, const Eigen::MatrixXd& basis, Eigen::Index count) {
    if (count == 0) return;
    for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd coeff = basis.leftCols(count).transpose() * x;
        x.noalias() -= basis.leftCols(count) * coeff;
    }
}

// Unit vector orthogonal to the first `count` basis columns, or zero if the
// basis already spans the space.
Eigen::VectorXd fresh_direction(Rng& rng, const Eigen::MatrixXd& basis, Eigen::Index count) {
    const Eigen::Index n = basis.rows();
    if (count >= n) return Eigen::VectorXd::Zero(n);
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::VectorXd x(n);
        for (Eigen::Index i = 0; i < n; ++i) x(i) = rng.normal();
        reorthogonalize(x, basis, count);
        const double norm = x.norm();
        if (norm > 1e-8) return x / norm;
    }
    return Eigen::VectorXd::Zero(n);
}

// Bidiagonalisation started from a right vector. Requires rows >= cols so
// that cols steps span the whole right space and the factorisation is exact.
TruncatedSvd lanczos(const Eigen::SparseMatrix<double>& a, std::size_t d, const SvdOptions& options) {
    const Eigen::Index rows = a.rows();
    const Eigen::Index cols = a.cols();
    const auto full = static_cast<std::size_t>(cols);
    const std::size_t cap = options.max_steps == 0 ? full : std::min(options.max_steps, full);
    if (cap < d) throw InvalidArgument("truncated_svd: step cap is smaller than d");

    const auto k_cap = static_cast<Eigen::Index>(cap);
    Eigen::MatrixXd U = Eigen::MatrixXd::Zero(rows, k_cap);
    Eigen::MatrixXd V = Eigen::MatrixXd::Zero(cols, k_cap + 1);
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(k_cap);
    Eigen::VectorXd beta = Eigen::VectorXd::Zero(k_cap);

    const double a_norm = a.norm();
    const double breakdown = 1e-13 * std::max(a_norm, 1e-300);
    Rng rng(Seed{0x9e3779b97f4a7c15ULL});
    V.col(0) = fresh_direction(rng, V, 0);

    std::size_t next_check = std::min(cap, std::max(2 * d, d + 20));
    double last_residual = 0.0;
    for (Eigen::Index j = 0; j < k_cap; ++j) {
        Eigen::VectorXd u = a * V.col(j);
        if (j > 0) u -= beta(j - 1) * U.col(j - 1);
        reorthogonalize(u, U, j);
        double a_j = u.norm();
        if (a_j <= breakdown) {
            U.col(j) = fresh_direction(rng, U, j);
            a_j = 0.0;
        } else {
            U.col(j) = u / a_j;
        }
        alpha(j) = a_j;

        Eigen::VectorXd v = a.transpose() * U.col(j);
        v -= a_j * V.col(j);
        reorthogonalize(v, V, j + 1);
        double b_j = v.norm();
        if (b_j <= breakdown) {
            V.col(j + 1) = fresh_direction(rng, V, j + 1);
            b_j = 0.0;
        } else {
            V.col(j + 1) = v / b_j;
        }
        beta(j) = b_j;

        const auto k = static_cast<std::size_t>(j + 1);
        if (k != next_check && k != cap) continue;

        // B is upper bidiagonal: alpha on the diagonal, beta above it.
        const auto kk = static_cast<Eigen::Index>(k);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(kk, kk);
        for (Eigen::Index i = 0; i < kk; ++i) {
            B(i, i) = alpha(i);
            if (i + 1 < kk) B(i, i + 1) = beta(i);
        }
        Eigen::JacobiSVD<Eigen::MatrixXd> small(B, Eigen::ComputeFullU | Eigen::ComputeFullV);
        const Eigen::VectorXd& sigma = small.singularValues();
        const auto dd = static_cast<Eigen::Index>(d);
        // A^T u_i - sigma_i v_i = beta_k * P(k-1, i) * v_{k+1}.
        double residual = 0.0;
        for (Eigen::Index i = 0; i < dd; ++i) {
            residual = std::max(residual, std::abs(beta(kk - 1) * small.matrixU()(kk - 1, i)));
        }
        last_residual = residual;
        const bool converged = k == full || residual <= options.tol * std::max(sigma(0), 1e-300);
        if (!converged) {
            next_check = std::min(cap, 2 * k);
            continue;
        }

        TruncatedSvd out;
        out.steps = k;
        out.max_residual = residual;
        out.singular_values = sigma.head(dd);
        out.U = U.leftCols(kk) * small.matrixU().leftCols(dd);
        out.V = V.leftCols(kk) * small.matrixV().leftCols(dd);
        return out;
    }
    throw ConvergenceError("truncated_svd: no convergence within " + std::to_string(cap) + " Lanczos steps",
                           last_residual, static_cast<int>(cap));
}

}  // namespace

TruncatedSvd truncated_svd(const Eigen::SparseMatrix<double>& a, std::size_t d, const SvdOptions& options) {
    const auto full = static_cast<std::size_t>(std::min(a.rows(), a.cols()));
    if (d < 1 || d > full) {
        throw InvalidArgument("truncated_svd: d = " + std::to_string(d) + " outside [1, " + std::to_string(full) + "]");
    }
    TruncatedSvd out;
    if (a.rows() >= a.cols()) {
        out = lanczos(a, d, options);
    } else {
        const Eigen::SparseMatrix<double> at = a.transpose();
        out = lanczos(at, d, options);
        std::swap(out.U, out.V);
    }
    for (Eigen::Index i = 0; i < out.U.cols(); ++i) {
        Eigen::Index arg = 0;
        double best = -1.0;
        for (Eigen::Index r = 0; r < out.U.rows(); ++r) {
            if (std::abs(out.U(r, i)) > best) {
                best = std::abs(out.U(r, i));
                arg = r;
            }
        }
        if (out.U(arg, i) < 0.0) {
            out.U.col(i) *= -1.0;
            out.V.col(i) *= -1.0;
        }
    }
    return out;
}

}  // namespace dimscope
