#pragma once

#include <vector>

#include "oscproc/kalman.hpp"

namespace oscproc::kalman::oracle {

/// A fully specified conditionally linear-Gaussian system over T steps:
/// x_0 ~ prior, x_t = mu + A (x_{t-1} - mu) + N(0, Q), y_t = (c_vals[t-1], 1) x_t + N(0, sigma_eps2).
struct System {
    GaussState prior;
    ModelParams params;
    std::vector<double> c_vals; ///< f(phi_t) for t = 1..T
    std::vector<double> y;      ///< y_1..y_T
};

struct Moments {
    std::vector<GaussState> states; ///< times 0..T
    std::vector<Mat2> cross;        ///< cross[t] = Cov(x_t, x_{t-1} | data), cross[0] = 0
};

/// Exact posterior moments given all observations, by dense conditioning of
/// the joint Gaussian of (x_0..x_T, y_1..y_T). Intended for T <= 50.
Moments smoothed_moments(const System& sys);

/// Exact filtered moments: states[t] conditions on y_1..y_t only.
Moments filtered_moments(const System& sys);

/// Exact marginal log-density of the observation vector.
double joint_loglik(const System& sys);

} // namespace oscproc::kalman::oracle
