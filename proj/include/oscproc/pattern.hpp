#pragma once

#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace oscproc {

inline constexpr double two_pi = 6.283185307179586476925286766559;

/// Fold to [0, 2*pi).
inline double fold_2pi(double x) {
    double r = std::fmod(x, two_pi);
    return r < 0.0 ? r + two_pi : r;
}

/// Wrap to [-pi, pi).
inline double wrap_pi(double x) {
    double r = fold_2pi(x);
    return r >= two_pi / 2.0 ? r - two_pi : r;
}

/// A 2*pi-periodic function sampled on a uniform grid phi_j = 2*pi*j/M,
/// evaluated anywhere by periodic linear interpolation.
class OscillationPattern {
public:
    explicit OscillationPattern(std::vector<double> values);

    static OscillationPattern constant(int m, double c);
    static OscillationPattern cosine(int m);
    /// Spiky ECG-like template: sharp positive peak with small side lobes.
    static OscillationPattern ecg_like(int m);
    static OscillationPattern from_function(int m, const std::function<double(double)>& f);

    int size() const { return static_cast<int>(values_.size()); }
    std::span<const double> values() const { return values_; }
    double node(int j) const { return values_[static_cast<std::size_t>(j)]; }
    double node_phase(int j) const { return two_pi * j / size(); }

    double operator()(double phi) const;

private:
    std::vector<double> values_;
};

/// Shift-aligned relative L2 distance between two patterns on a common grid:
/// min over cyclic shifts theta of ||est(.-theta) - truth||_2 / ||truth||_2.
double aligned_rel_l2(const OscillationPattern& est, const OscillationPattern& truth);

} // namespace oscproc
