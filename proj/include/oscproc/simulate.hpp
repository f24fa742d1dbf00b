#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "oscproc/params.hpp"
#include "oscproc/pattern.hpp"
#include "oscproc/rng.hpp"

namespace oscproc {

/// One ACD(1,0) increment: psi_t = (alpha + beta * psi_prev) * eta.
double acd_step(double psi_prev, const ModelParams& params, double eta);

/// Full simulation of the state space model. phi_0 ~ U[0, 2*pi),
/// psi_0 = alpha/(1-beta), (a_0, b_0) ~ N(mu, Q).
std::pair<ObservationSeries, HiddenTrajectory>
simulate_gssm(const ModelParams& params, const OscillationPattern& f, int T, std::uint64_t seed);

/// Random-walk phase: increments iid N(omega, sigma_eta^2), phi_0 ~ U[0, 2*pi).
/// Returns phi_0..phi_T (T+1 values).
std::vector<double> simulate_phase_rw(double omega, double sigma_eta, int T, std::uint64_t seed);

/// AR(1) increments around omega with stationary start.
std::vector<double> simulate_phase_ar1(double omega, double beta_ar, double sigma_eta, int T,
                                       std::uint64_t seed);

} // namespace oscproc
