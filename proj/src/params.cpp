#include "oscproc/params.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oscproc {

void ModelParams::validate() const {
    if (!(alpha > 0.0)) throw std::invalid_argument("ModelParams: alpha must be > 0");
    if (!(beta >= 0.0 && beta < 1.0)) throw std::invalid_argument("ModelParams: beta must be in [0, 1)");
    if (!(alpha < std::numbers::pi * (1.0 - beta)))
        throw std::invalid_argument("ModelParams: alpha < pi*(1-beta) required");
    if (!(acd_shape > 0.0)) throw std::invalid_argument("ModelParams: acd_shape must be > 0");
    if (!(sigma_eps2 > 0.0)) throw std::invalid_argument("ModelParams: sigma_eps2 must be > 0");
    if (!mu.allFinite() || !A.allFinite() || !Q.allFinite())
        throw std::invalid_argument("ModelParams: non-finite entries");
    if (std::abs(Q(0, 1) - Q(1, 0)) > 1e-12) throw std::invalid_argument("ModelParams: Q must be symmetric");
    Eigen::SelfAdjointEigenSolver<Mat2> es(Q);
    if (es.eigenvalues().minCoeff() < -1e-10) throw std::invalid_argument("ModelParams: Q must be PSD");
    if (!pattern_known && (mu(0) != 1.0 || mu(1) != 0.0))
        throw std::invalid_argument("ModelParams: nonparametric pattern requires mu = (1, 0)");
}

} // namespace oscproc
