#include "oscproc/pattern.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace oscproc {

OscillationPattern::OscillationPattern(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 4) throw std::invalid_argument("OscillationPattern: need at least 4 grid nodes");
    for (double v : values_)
        if (!std::isfinite(v)) throw std::invalid_argument("OscillationPattern: non-finite node value");
}

OscillationPattern OscillationPattern::constant(int m, double c) {
    return OscillationPattern(std::vector<double>(static_cast<std::size_t>(m), c));
}

OscillationPattern OscillationPattern::cosine(int m) {
    return from_function(m, [](double x) { return std::cos(x); });
}

OscillationPattern OscillationPattern::ecg_like(int m) {
    // One sharp spike plus two smaller bumps and a dip, loosely mimicking a
    // PQRST cycle. Bump centers/widths are in radians on [0, 2*pi).
    return from_function(m, [](double x) {
        auto bump = [x](double center, double width, double height) {
            double d = wrap_pi(x - center);
            return height * std::exp(-0.5 * d * d / (width * width));
        };
        return bump(2.4, 0.45, 0.35)        // P
               + bump(3.1, 0.10, 2.6)       // R spike
               + bump(2.85, 0.07, -0.55)    // Q dip
               + bump(3.35, 0.07, -0.75)    // S dip
               + bump(4.3, 0.5, 0.6);       // T
    });
}

OscillationPattern OscillationPattern::from_function(int m, const std::function<double(double)>& f) {
    std::vector<double> v(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) v[static_cast<std::size_t>(j)] = f(two_pi * j / m);
    return OscillationPattern(std::move(v));
}

double OscillationPattern::operator()(double phi) const {
    const int m = size();
    double u = fold_2pi(phi) * (m / two_pi);
    int j = static_cast<int>(u);
    double frac = u - j;
    // Snap to the node when rounding noise leaves us epsilon off it, so grid
    // nodes evaluate to their stored sample exactly.
    if (frac < 1e-9) frac = 0.0;
    if (frac > 1.0 - 1e-9) {
        ++j;
        frac = 0.0;
    }
    if (j >= m) j -= m;
    const double v0 = values_[static_cast<std::size_t>(j)];
    const double v1 = values_[static_cast<std::size_t>(j + 1 == m ? 0 : j + 1)];
    return (1.0 - frac) * v0 + frac * v1;
}

double aligned_rel_l2(const OscillationPattern& est, const OscillationPattern& truth) {
    const int m = truth.size();
    std::vector<double> e(static_cast<std::size_t>(m));
    for (int j = 0; j < m; ++j) e[static_cast<std::size_t>(j)] = est(truth.node_phase(j));

    double norm2 = 0.0;
    for (int j = 0; j < m; ++j) norm2 += truth.node(j) * truth.node(j);
    if (norm2 <= 0.0) throw std::invalid_argument("aligned_rel_l2: reference pattern is identically zero");

    double best = std::numeric_limits<double>::infinity();
    for (int s = 0; s < m; ++s) {
        double d2 = 0.0;
        for (int j = 0; j < m; ++j) {
            // est shifted by theta_s = 2*pi*s/m: compare est(phi_j - theta_s) with truth(phi_j)
            int k = j - s;
            if (k < 0) k += m;
            double d = e[static_cast<std::size_t>(k)] - truth.node(j);
            d2 += d * d;
        }
        best = std::min(best, d2);
    }
    return std::sqrt(best / norm2);
}

} // namespace oscproc
