#include "oscproc/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace oscproc {

double acd_step(double psi_prev, const ModelParams& params, double eta) {
    if (!(psi_prev >= 0.0)) throw std::invalid_argument("acd_step: psi_prev must be >= 0");
    if (!std::isfinite(eta) || !(eta > 0.0)) throw std::invalid_argument("acd_step: eta must be finite and positive");
    return (params.alpha + params.beta * psi_prev) * eta;
}

namespace {

// Draw from N(0, Q) for symmetric PSD Q via its (lower) Cholesky-like factor.
Vec2 gaussian2(const Mat2& q, RngStream& rng) {
    Eigen::SelfAdjointEigenSolver<Mat2> es(q);
    Vec2 ev = es.eigenvalues().cwiseMax(0.0);
    Vec2 z{rng.normal(), rng.normal()};
    return es.eigenvectors() * ev.cwiseSqrt().asDiagonal() * z;
}

} // namespace

std::pair<ObservationSeries, HiddenTrajectory>
simulate_gssm(const ModelParams& params, const OscillationPattern& f, int T, std::uint64_t seed) {
    params.validate();
    if (T < 1) throw std::invalid_argument("simulate_gssm: T must be >= 1");

    RngStream rng = derive_stream(seed, stream_tag::sim);
    HiddenTrajectory traj;
    traj.phi.resize(static_cast<std::size_t>(T) + 1);
    traj.psi.resize(static_cast<std::size_t>(T) + 1);
    traj.a.resize(static_cast<std::size_t>(T) + 1);
    traj.b.resize(static_cast<std::size_t>(T) + 1);

    traj.phi[0] = rng.uniform() * two_pi;
    traj.psi[0] = params.mean_phase_increment();
    Vec2 ab = params.mu + gaussian2(params.Q, rng);
    traj.a[0] = ab(0);
    traj.b[0] = ab(1);

    ObservationSeries obs;
    obs.y.resize(static_cast<std::size_t>(T));

    const double shape = params.acd_shape;
    const double sd_eps = std::sqrt(params.sigma_eps2);
    for (int t = 1; t <= T; ++t) {
        double eta = rng.gamma(shape, 1.0 / shape);
        double psi = acd_step(traj.psi[static_cast<std::size_t>(t) - 1], params, eta);
        traj.psi[static_cast<std::size_t>(t)] = psi;
        traj.phi[static_cast<std::size_t>(t)] = traj.phi[static_cast<std::size_t>(t) - 1] + psi;

        ab = params.mu + params.A * (ab - params.mu) + gaussian2(params.Q, rng);
        traj.a[static_cast<std::size_t>(t)] = ab(0);
        traj.b[static_cast<std::size_t>(t)] = ab(1);

        obs.y[static_cast<std::size_t>(t) - 1] =
            ab(0) * f(traj.phi[static_cast<std::size_t>(t)]) + ab(1) + sd_eps * rng.normal();
    }
    return {std::move(obs), std::move(traj)};
}

std::vector<double> simulate_phase_rw(double omega, double sigma_eta, int T, std::uint64_t seed) {
    if (!(omega > 0.0 && omega < std::numbers::pi))
        throw std::invalid_argument("simulate_phase_rw: omega must be in (0, pi)");
    if (!(sigma_eta >= 0.0)) throw std::invalid_argument("simulate_phase_rw: sigma_eta must be >= 0");
    RngStream rng = derive_stream(seed, stream_tag::sim);
    std::vector<double> phi(static_cast<std::size_t>(T) + 1);
    phi[0] = rng.uniform() * two_pi;
    for (int t = 1; t <= T; ++t)
        phi[static_cast<std::size_t>(t)] =
            phi[static_cast<std::size_t>(t) - 1] + omega + sigma_eta * rng.normal();
    return phi;
}

std::vector<double> simulate_phase_ar1(double omega, double beta_ar, double sigma_eta, int T,
                                       std::uint64_t seed) {
    if (!(omega > 0.0 && omega < std::numbers::pi))
        throw std::invalid_argument("simulate_phase_ar1: omega must be in (0, pi)");
    if (!(std::abs(beta_ar) < 1.0)) throw std::invalid_argument("simulate_phase_ar1: |beta_ar| < 1 required");
    RngStream rng = derive_stream(seed, stream_tag::sim);
    std::vector<double> phi(static_cast<std::size_t>(T) + 1);
    phi[0] = rng.uniform() * two_pi;
    // stationary start for the centered increment process
    double stat_sd = sigma_eta / std::sqrt(1.0 - beta_ar * beta_ar);
    double dev = stat_sd > 0.0 ? stat_sd * rng.normal() : 0.0;
    for (int t = 1; t <= T; ++t) {
        dev = beta_ar * dev + sigma_eta * rng.normal();
        phi[static_cast<std::size_t>(t)] = phi[static_cast<std::size_t>(t) - 1] + omega + dev;
    }
    return phi;
}

} // namespace oscproc
