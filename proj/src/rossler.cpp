#include "oscproc/rossler.hpp"

#include <cmath>
#include <stdexcept>

#include "oscproc/pattern.hpp"

namespace oscproc {

RosslerState rossler_deriv(const RosslerState& s) {
    return {-s.x2 - s.x3, s.x1 + 0.15 * s.x2, 0.4 + s.x3 * (s.x1 - 8.5)};
}

namespace {
RosslerState axpy(const RosslerState& s, const RosslerState& d, double h) {
    return {s.x1 + h * d.x1, s.x2 + h * d.x2, s.x3 + h * d.x3};
}
} // namespace

RosslerState rossler_rk4(const RosslerState& s, double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("rossler_rk4: dt must be > 0");
    RosslerState k1 = rossler_deriv(s);
    RosslerState k2 = rossler_deriv(axpy(s, k1, dt / 2.0));
    RosslerState k3 = rossler_deriv(axpy(s, k2, dt / 2.0));
    RosslerState k4 = rossler_deriv(axpy(s, k3, dt));
    return {s.x1 + dt / 6.0 * (k1.x1 + 2.0 * k2.x1 + 2.0 * k3.x1 + k4.x1),
            s.x2 + dt / 6.0 * (k1.x2 + 2.0 * k2.x2 + 2.0 * k3.x2 + k4.x2),
            s.x3 + dt / 6.0 * (k1.x3 + 2.0 * k2.x3 + 2.0 * k3.x3 + k4.x3)};
}

double rossler_true_phase(double x1, double x2) {
    if (x1 == 0.0 && x2 == 0.0)
        throw std::invalid_argument("rossler_true_phase: phase undefined at the origin");
    return fold_2pi(std::atan2(x2, x1));
}

RosslerTrajectory simulate_rossler(int n_samples, double dt, int burn_in_steps, const RosslerState& init) {
    RosslerState s = init;
    for (int i = 0; i < burn_in_steps; ++i) s = rossler_rk4(s, dt);

    RosslerTrajectory traj;
    traj.x1.reserve(static_cast<std::size_t>(n_samples));
    traj.x2.reserve(static_cast<std::size_t>(n_samples));
    traj.x3.reserve(static_cast<std::size_t>(n_samples));
    traj.true_phase.reserve(static_cast<std::size_t>(n_samples));
    traj.true_phase_unwrapped.reserve(static_cast<std::size_t>(n_samples));

    double unwrapped = 0.0;
    double prev_folded = 0.0;
    for (int i = 0; i < n_samples; ++i) {
        traj.x1.push_back(s.x1);
        traj.x2.push_back(s.x2);
        traj.x3.push_back(s.x3);
        double folded = rossler_true_phase(s.x1, s.x2);
        if (i == 0) {
            unwrapped = folded;
        } else {
            unwrapped += wrap_pi(folded - prev_folded); // nearest-turn unwrapping
        }
        prev_folded = folded;
        traj.true_phase.push_back(folded);
        traj.true_phase_unwrapped.push_back(unwrapped);
        s = rossler_rk4(s, dt);
    }
    return traj;
}

} // namespace oscproc
