#include "oscproc/kalman.hpp"

#include <cmath>
#include <stdexcept>

namespace oscproc::kalman {

namespace {
constexpr double log_two_pi = 1.8378770664093454835606594728112;
constexpr double var_floor = 1e-12;
} // namespace

namespace {

// Closed-form spectral decomposition of a symmetric 2x2 matrix.
// Returns eigenvalues l1 >= l2 and the unit eigenvector for l1.
struct Eig2 {
    double l1, l2;
    double v1x, v1y;
};

Eig2 eig_sym2(const Mat2& m) {
    const double a = m(0, 0), b = m(1, 1), c = 0.5 * (m(0, 1) + m(1, 0));
    const double half_tr = 0.5 * (a + b);
    const double disc = std::sqrt(std::max(0.0, 0.25 * (a - b) * (a - b) + c * c));
    Eig2 e{half_tr + disc, half_tr - disc, 1.0, 0.0};
    // pick the numerically larger residual column of (m - l2 I)
    const double r1x = a - e.l2, r2y = b - e.l2;
    if (std::abs(r1x) >= std::abs(r2y)) {
        e.v1x = r1x;
        e.v1y = c;
    } else {
        e.v1x = c;
        e.v1y = r2y;
    }
    const double n = std::hypot(e.v1x, e.v1y);
    if (n > 0.0) {
        e.v1x /= n;
        e.v1y /= n;
    } else {
        e.v1x = 1.0;
        e.v1y = 0.0;
    }
    return e;
}

Mat2 from_eig(const Eig2& e, double l1, double l2) {
    // V diag(l1, l2) V^T with V = [v1, v1_perp]
    const double x = e.v1x, y = e.v1y;
    Mat2 m;
    m(0, 0) = l1 * x * x + l2 * y * y;
    m(0, 1) = (l1 - l2) * x * y;
    m(1, 0) = m(0, 1);
    m(1, 1) = l1 * y * y + l2 * x * x;
    return m;
}

} // namespace

void GaussState::make_psd() {
    cov(0, 1) = cov(1, 0) = 0.5 * (cov(0, 1) + cov(1, 0));
    const Eig2 e = eig_sym2(cov);
    if (e.l2 < 0.0) cov = from_eig(e, std::max(e.l1, 0.0), 0.0);
}

GaussState predict(const GaussState& prior, const ModelParams& params) {
    GaussState out;
    out.mean = params.mu + params.A * (prior.mean - params.mu);
    out.cov = params.A * prior.cov * params.A.transpose() + params.Q;
    out.cov = 0.5 * (out.cov + out.cov.transpose()).eval();
    return out;
}

LogLik observation_likelihood(const GaussState& pred, double y, double f_phi, double sigma_eps2,
                              int* var_floor_hits) {
    if (!(sigma_eps2 > 0.0)) throw std::invalid_argument("observation_likelihood: sigma_eps2 must be > 0");
    const Eigen::RowVector2d c(f_phi, 1.0);
    double f_var = c * pred.cov * c.transpose() + sigma_eps2;
    if (f_var < var_floor) {
        f_var = var_floor;
        if (var_floor_hits) ++*var_floor_hits;
    }
    const double r = y - c * pred.mean;
    return {-0.5 * (log_two_pi + std::log(f_var) + r * r / f_var), f_var};
}

Vec2 kalman_gain(const GaussState& pred, double f_phi, double sigma_eps2) {
    const Eigen::RowVector2d c(f_phi, 1.0);
    double f_var = c * pred.cov * c.transpose() + sigma_eps2;
    if (f_var < var_floor) f_var = var_floor;
    return pred.cov * c.transpose() / f_var;
}

GaussState update(const GaussState& pred, double y, double f_phi, double sigma_eps2) {
    const Eigen::RowVector2d c(f_phi, 1.0);
    const Vec2 gain = kalman_gain(pred, f_phi, sigma_eps2);
    GaussState out;
    out.mean = pred.mean + gain * (y - c * pred.mean);
    const Mat2 ikc = Mat2::Identity() - gain * c;
    out.cov = ikc * pred.cov * ikc.transpose() + gain * sigma_eps2 * gain.transpose();
    out.make_psd();
    return out;
}

Mat2 pinv2(const Mat2& m, bool* was_singular) {
    const Eig2 e = eig_sym2(0.5 * (m + m.transpose()));
    const double tol = 1e-12 * std::max(std::abs(e.l1), std::abs(e.l2));
    const bool keep1 = std::abs(e.l1) > tol;
    const bool keep2 = std::abs(e.l2) > tol;
    if (was_singular) *was_singular = !(keep1 && keep2);
    return from_eig(e, keep1 ? 1.0 / e.l1 : 0.0, keep2 ? 1.0 / e.l2 : 0.0);
}

Mat2 smoother_gain(const GaussState& filt, const GaussState& pred_next, const Mat2& a_mat,
                   bool* was_singular) {
    return filt.cov * a_mat.transpose() * pinv2(pred_next.cov, was_singular);
}

SmoothResult smooth_with_gains(std::span<const GaussState> filtered,
                               std::span<const GaussState> predicted, std::span<const Mat2> gains,
                               const ModelParams& params, const Vec2& gain_last, double f_phi_last) {
    const std::size_t n = filtered.size();
    if (n == 0) throw std::invalid_argument("smooth_pass: empty window");
    if (predicted.size() != n || gains.size() != n)
        throw std::invalid_argument("smooth_pass: window size mismatch");

    SmoothResult res;
    res.states.resize(n);
    res.states[n - 1].state = filtered[n - 1];
    if (n == 1) return res;

    const Mat2& a_mat = params.A;
    const Eigen::RowVector2d c_last(f_phi_last, 1.0);
    res.states[n - 1].cross = (Mat2::Identity() - gain_last * c_last) * a_mat * filtered[n - 2].cov;

    for (std::size_t k = n - 1; k-- > 0;) {
        const Mat2& v = gains[k];
        GaussState& sm = res.states[k].state;
        sm.mean = filtered[k].mean + v * (res.states[k + 1].state.mean - predicted[k + 1].mean);
        sm.cov = filtered[k].cov + v * (res.states[k + 1].state.cov - predicted[k + 1].cov) * v.transpose();
        sm.make_psd();
        if (k >= 1) {
            res.states[k].cross = filtered[k].cov * gains[k - 1].transpose() +
                                  v * (res.states[k + 1].cross - a_mat * filtered[k].cov) *
                                      gains[k - 1].transpose();
        }
    }
    return res;
}

SmoothResult smooth_pass(std::span<const GaussState> filtered, std::span<const GaussState> predicted,
                         const ModelParams& params, const Vec2& gain_last, double f_phi_last) {
    const std::size_t n = filtered.size();
    if (n == 0) throw std::invalid_argument("smooth_pass: empty window");
    if (predicted.size() != n) throw std::invalid_argument("smooth_pass: window size mismatch");

    int fallbacks = 0;
    std::vector<Mat2> gains(n, Mat2::Zero());
    for (std::size_t k = 0; k + 1 < n; ++k) {
        bool singular = false;
        gains[k] = smoother_gain(filtered[k], predicted[k + 1], params.A, &singular);
        if (singular) ++fallbacks;
    }
    SmoothResult res = smooth_with_gains(filtered, predicted, gains, params, gain_last, f_phi_last);
    res.pinv_fallbacks = fallbacks;
    return res;
}

} // namespace oscproc::kalman
