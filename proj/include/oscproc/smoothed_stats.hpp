#pragma once

#include <cstddef>
#include <vector>

namespace oscproc {

/// Per-(time, particle) fixed-lag smoothing output feeding the EM updates:
/// weights w̃_t^i, phase pairs, smoothed means/covariances at t and t-1, and
/// the lag-one cross-covariance Cov(x_t, x_{t-1}). Rows are t = 1..T,
/// particle-major within a row.
struct SmoothedStats {
    int T = 0;
    int N = 0;

    std::vector<double> y;   ///< observations, size T
    std::vector<double> ess; ///< per-time effective sample size of the weights

    // size T*N each
    std::vector<double> w;
    std::vector<double> phi;      ///< unwrapped phase at t
    std::vector<double> psi;      ///< increment at t
    std::vector<double> psi_prev; ///< increment at t-1
    std::vector<double> a, b;
    std::vector<double> cov_aa, cov_ab, cov_bb;
    std::vector<double> a_prev, b_prev;
    std::vector<double> pcov_aa, pcov_ab, pcov_bb;
    std::vector<double> x_aa, x_ab, x_ba, x_bb; ///< Cov(x_t, x_{t-1}) entries

    std::size_t idx(int t, int i) const {
        return static_cast<std::size_t>(t - 1) * static_cast<std::size_t>(N) +
               static_cast<std::size_t>(i);
    }

    void resize(int T_, int N_) {
        T = T_;
        N = N_;
        const std::size_t n = static_cast<std::size_t>(T) * static_cast<std::size_t>(N);
        y.assign(static_cast<std::size_t>(T), 0.0);
        ess.assign(static_cast<std::size_t>(T), 0.0);
        for (auto* v : {&w, &phi, &psi, &psi_prev, &a, &b, &cov_aa, &cov_ab, &cov_bb, &a_prev,
                        &b_prev, &pcov_aa, &pcov_ab, &pcov_bb, &x_aa, &x_ab, &x_ba, &x_bb})
            v->assign(n, 0.0);
    }
};

} // namespace oscproc
