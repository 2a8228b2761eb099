#pragma once

#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

namespace twirlbench::detail {

struct LeastSquaresResult {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;
    double chi2 = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Evaluates whitened residuals r_i = (y_i - f_i(theta)) / sigma_i and the
/// Jacobian of f / sigma; returns false if the model is undefined at theta.
using WhitenedModel = std::function<bool(const Eigen::VectorXd& theta, Eigen::VectorXd& residual,
                                         Eigen::MatrixXd& jacobian)>;

/// Levenberg-Marquardt with multiplicative damping. Stops when an accepted
/// step is below `relative_step` relative to |theta|, or when no damping
/// level can lower chi^2 any further.
inline LeastSquaresResult levenberg_marquardt(const WhitenedModel& model, Eigen::VectorXd theta,
                                              int max_iterations = 200, double relative_step = 1e-12) {
    LeastSquaresResult out;
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    if (!model(theta, r, j)) return out;
    double chi2 = r.squaredNorm();
    double damping = 1e-3;

    for (int it = 1; it <= max_iterations; ++it) {
        out.iterations = it;
        const Eigen::MatrixXd jtj = j.transpose() * j;
        const Eigen::VectorXd grad = j.transpose() * r;
        bool accepted = false;
        while (damping < 1e20) {
            Eigen::MatrixXd lhs = jtj;
            lhs.diagonal() += damping * jtj.diagonal().cwiseMax(1e-300);
            const Eigen::VectorXd step = lhs.ldlt().solve(grad);
            if (!step.allFinite()) {
                damping *= 10.0;
                continue;
            }
            const Eigen::VectorXd trial = theta + step;
            Eigen::VectorXd r_trial;
            Eigen::MatrixXd j_trial;
            if (model(trial, r_trial, j_trial) && r_trial.allFinite()) {
                const double chi2_trial = r_trial.squaredNorm();
                if (chi2_trial <= chi2) {
                    const bool tiny = step.norm() <= relative_step * (theta.norm() + relative_step);
                    theta = trial;
                    r = std::move(r_trial);
                    j = std::move(j_trial);
                    const bool stalled = chi2 - chi2_trial <= 1e-15 * chi2;
                    chi2 = chi2_trial;
                    damping = std::max(damping / 10.0, 1e-12);
                    accepted = true;
                    if (tiny || (stalled && step.norm() <= 1e-9 * (theta.norm() + 1e-9))) {
                        out.converged = true;
                    }
                    break;
                }
            }
            damping *= 10.0;
        }
        if (!accepted) {
            // No damping level improves chi^2: theta is a minimum to working precision.
            out.converged = true;
        }
        if (out.converged) break;
    }

    out.params = theta;
    out.chi2 = chi2;
    const Eigen::MatrixXd jtj = j.transpose() * j;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (lu.isInvertible()) {
        out.covariance = lu.inverse();
    } else {
        out.covariance = Eigen::MatrixXd::Constant(theta.size(), theta.size(),
                                                   std::numeric_limits<double>::infinity());
    }
    if (!theta.allFinite() || !std::isfinite(chi2)) out.converged = false;
    return out;
}

/// Weighted linear least squares y ~ X beta with weights w; returns beta and
/// (X^T W X)^{-1}.
inline bool weighted_linear_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                                Eigen::VectorXd& beta, Eigen::MatrixXd& covariance) {
    const Eigen::MatrixXd xtw = x.transpose() * w.asDiagonal();
    const Eigen::MatrixXd normal = xtw * x;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(normal);
    if (!lu.isInvertible()) return false;
    covariance = lu.inverse();
    beta = covariance * (xtw * y);
    return beta.allFinite();
}

}  // namespace twirlbench::detail
