#pragma once

#include <cstdint>
#include <vector>

namespace oscproc {

struct RosslerState {
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
};

/// Vector field with the (0.15, 0.4, 8.5) configuration.
RosslerState rossler_deriv(const RosslerState& s);

/// One classical 4th-order Runge-Kutta step.
RosslerState rossler_rk4(const RosslerState& s, double dt);

/// Quadrant-aware angle of (x1, x2) folded to [0, 2*pi). Origin is an error.
double rossler_true_phase(double x1, double x2);

struct RosslerTrajectory {
    std::vector<double> x1, x2, x3;
    std::vector<double> true_phase;          ///< folded, per sample
    std::vector<double> true_phase_unwrapped;
};

/// Integrate n_samples points at the given step after discarding a transient.
RosslerTrajectory simulate_rossler(int n_samples, double dt, int burn_in_steps,
                                   const RosslerState& init = {0.5, -2.0, 0.1});

} // namespace oscproc
