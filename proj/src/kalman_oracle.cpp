#include "oscproc/kalman_oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace oscproc::kalman::oracle {

namespace {

struct Joint {
    Eigen::VectorXd mean_x;  // 2(T+1)
    Eigen::MatrixXd cov_xx;  // states
    Eigen::VectorXd mean_y;  // T
    Eigen::MatrixXd cov_yy;
    Eigen::MatrixXd cov_xy;  // 2(T+1) x T
};

Joint build_joint(const System& sys) {
    const int T = static_cast<int>(sys.y.size());
    if (static_cast<int>(sys.c_vals.size()) != T)
        throw std::invalid_argument("oracle: c_vals and y must have equal length");
    if (T > 50) throw std::invalid_argument("oracle: dense construction limited to T <= 50");
    const int nx = 2 * (T + 1);

    Joint j;
    j.mean_x.resize(nx);
    j.cov_xx.setZero(nx, nx);

    const Mat2& a = sys.params.A;
    j.mean_x.segment<2>(0) = sys.prior.mean;
    j.cov_xx.block<2, 2>(0, 0) = sys.prior.cov;
    for (int t = 1; t <= T; ++t) {
        j.mean_x.segment<2>(2 * t) = sys.params.mu + a * (j.mean_x.segment<2>(2 * (t - 1)) - sys.params.mu);
        j.cov_xx.block<2, 2>(2 * t, 2 * t) =
            a * j.cov_xx.block<2, 2>(2 * (t - 1), 2 * (t - 1)) * a.transpose() + sys.params.Q;
        for (int s = 0; s < t; ++s) {
            Mat2 c_st = j.cov_xx.block<2, 2>(2 * s, 2 * (t - 1)) * a.transpose();
            j.cov_xx.block<2, 2>(2 * s, 2 * t) = c_st;
            j.cov_xx.block<2, 2>(2 * t, 2 * s) = c_st.transpose();
        }
    }

    // y_t = C_t x_t + eps_t
    Eigen::MatrixXd h = Eigen::MatrixXd::Zero(T, nx);
    for (int t = 1; t <= T; ++t) {
        h(t - 1, 2 * t) = sys.c_vals[static_cast<std::size_t>(t) - 1];
        h(t - 1, 2 * t + 1) = 1.0;
    }
    j.mean_y = h * j.mean_x;
    j.cov_yy = h * j.cov_xx * h.transpose() +
               sys.params.sigma_eps2 * Eigen::MatrixXd::Identity(T, T);
    j.cov_xy = j.cov_xx * h.transpose();
    return j;
}

Moments condition(const Joint& j, const System& sys, int n_obs) {
    const int T = static_cast<int>(sys.y.size());
    Eigen::VectorXd mean = j.mean_x;
    Eigen::MatrixXd cov = j.cov_xx;
    if (n_obs > 0) {
        Eigen::VectorXd yv(n_obs);
        for (int t = 0; t < n_obs; ++t) yv(t) = sys.y[static_cast<std::size_t>(t)];
        Eigen::MatrixXd syy = j.cov_yy.topLeftCorner(n_obs, n_obs);
        Eigen::MatrixXd sxy = j.cov_xy.leftCols(n_obs);
        Eigen::LDLT<Eigen::MatrixXd> ldlt(syy);
        mean += sxy * ldlt.solve(yv - j.mean_y.head(n_obs));
        cov -= sxy * ldlt.solve(sxy.transpose());
    }

    Moments m;
    m.states.resize(static_cast<std::size_t>(T) + 1);
    m.cross.assign(static_cast<std::size_t>(T) + 1, Mat2::Zero());
    for (int t = 0; t <= T; ++t) {
        m.states[static_cast<std::size_t>(t)].mean = mean.segment<2>(2 * t);
        m.states[static_cast<std::size_t>(t)].cov = cov.block<2, 2>(2 * t, 2 * t);
        if (t >= 1) m.cross[static_cast<std::size_t>(t)] = cov.block<2, 2>(2 * t, 2 * (t - 1));
    }
    return m;
}

} // namespace

Moments smoothed_moments(const System& sys) {
    Joint j = build_joint(sys);
    return condition(j, sys, static_cast<int>(sys.y.size()));
}

Moments filtered_moments(const System& sys) {
    const int T = static_cast<int>(sys.y.size());
    Joint j = build_joint(sys);
    Moments out;
    out.states.resize(static_cast<std::size_t>(T) + 1);
    out.cross.assign(static_cast<std::size_t>(T) + 1, Mat2::Zero());
    for (int t = 0; t <= T; ++t) {
        Moments m = condition(j, sys, t);
        out.states[static_cast<std::size_t>(t)] = m.states[static_cast<std::size_t>(t)];
    }
    return out;
}

double joint_loglik(const System& sys) {
    const int T = static_cast<int>(sys.y.size());
    if (T == 0) return 0.0;
    Joint j = build_joint(sys);
    Eigen::VectorXd yv(T);
    for (int t = 0; t < T; ++t) yv(t) = sys.y[static_cast<std::size_t>(t)];
    Eigen::LDLT<Eigen::MatrixXd> ldlt(j.cov_yy);
    Eigen::VectorXd r = yv - j.mean_y;
    double quad = r.dot(ldlt.solve(r));
    double logdet = 0.0;
    for (int t = 0; t < T; ++t) logdet += std::log(ldlt.vectorD()(t));
    return -0.5 * (T * std::log(2.0 * 3.14159265358979323846) + logdet + quad);
}

} // namespace oscproc::kalman::oracle
