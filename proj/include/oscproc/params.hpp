#pragma once

#include <Eigen/Dense>
#include <vector>

namespace oscproc {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

/// Static parameters of the generalized state space model:
/// ACD(1,0) phase increments, Gaussian VAR(1) amplitude/baseline,
/// and Gaussian observation noise.
struct ModelParams {
    double alpha = 0.2;       ///< ACD intercept, > 0
    double beta = 0.02;       ///< ACD slope, in [0, 1)
    double acd_shape = 100.0; ///< Gamma shape nu of the unit-mean innovations
    double sigma_eps2 = 0.25; ///< observation noise variance
    Vec2 mu{1.0, 0.0};        ///< (mu_a, mu_b)
    Mat2 A = Mat2::Identity();
    Mat2 Q = Mat2::Zero();
    bool pattern_known = true; ///< false: nonparametric pattern, mu pinned to (1, 0)

    /// Mean phase increment omega = alpha / (1 - beta), < pi by construction.
    double mean_phase_increment() const { return alpha / (1.0 - beta); }

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

/// Observed series y_1..y_T.
struct ObservationSeries {
    std::vector<double> y;
    double sample_interval = 1.0; // display metadata only

    int length() const { return static_cast<int>(y.size()); }
};

/// Ground-truth hidden path from simulation; index 0 is the initial state,
/// indices 1..T align with the observations.
struct HiddenTrajectory {
    std::vector<double> phi; ///< unwrapped phases
    std::vector<double> psi; ///< increments, psi[t] = phi[t] - phi[t-1] for t >= 1
    std::vector<double> a;
    std::vector<double> b;
};

} // namespace oscproc
