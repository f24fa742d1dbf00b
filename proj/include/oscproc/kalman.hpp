#pragma once

#include <span>
#include <vector>

#include "oscproc/params.hpp"

namespace oscproc::kalman {

/// Conditional Gaussian state of (a_t, b_t) given a phase path.
struct GaussState {
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Zero();

    /// Symmetrize and clamp tiny negative eigenvalues to zero.
    void make_psd();
};

struct LogLik {
    double loglik;
    double innovation_var; ///< F = C Sigma C^T + sigma_eps2
};

/// One-step prediction: mean -> mu + A (mean - mu), cov -> A cov A^T + Q.
GaussState predict(const GaussState& prior, const ModelParams& params);

/// Marginal Gaussian log-density of y under the prediction, with observation
/// row C = (f_phi, 1). F is floored at 1e-12 (counted in *var_floor_hits).
LogLik observation_likelihood(const GaussState& pred, double y, double f_phi, double sigma_eps2,
                              int* var_floor_hits = nullptr);

/// Measurement update (Joseph form) with C = (f_phi, 1).
GaussState update(const GaussState& pred, double y, double f_phi, double sigma_eps2);

/// Kalman gain K = P C^T / F for the prediction covariance P.
Vec2 kalman_gain(const GaussState& pred, double f_phi, double sigma_eps2);

struct SmoothedState {
    GaussState state;
    Mat2 cross = Mat2::Zero(); ///< Cov(x_k, x_{k-1} | all data in window); zero at index 0
};

struct SmoothResult {
    std::vector<SmoothedState> states;
    int pinv_fallbacks = 0; ///< singular one-step prediction covariances encountered
};

/// Backward fixed-interval smoothing over a window of filtered states.
///
/// filtered[k] is the posterior at window time k; predicted[k] is the one-step
/// prediction of time k from time k-1 (predicted[0] is ignored). gain_last and
/// f_phi_last are the Kalman gain and pattern value at the window end, used to
/// seed the lag-one cross-covariance recursion. Singular prediction
/// covariances fall back to a pseudo-inverse.
SmoothResult smooth_pass(std::span<const GaussState> filtered, std::span<const GaussState> predicted,
                         const ModelParams& params, const Vec2& gain_last, double f_phi_last);

/// Smoother gain V_k = Sigma_k A^T pinv(Sigma_{k+1|k}).
Mat2 smoother_gain(const GaussState& filt, const GaussState& pred_next, const Mat2& a_mat,
                   bool* was_singular = nullptr);

/// smooth_pass with precomputed smoother gains (gains[k] pairs filtered[k]
/// with predicted[k+1]; the last slot is unused). Lets a sliding-window
/// caller reuse gains across overlapping windows.
SmoothResult smooth_with_gains(std::span<const GaussState> filtered,
                               std::span<const GaussState> predicted, std::span<const Mat2> gains,
                               const ModelParams& params, const Vec2& gain_last, double f_phi_last);

/// Moore-Penrose pseudo-inverse of a symmetric 2x2 matrix.
Mat2 pinv2(const Mat2& m, bool* was_singular = nullptr);

} // namespace oscproc::kalman
