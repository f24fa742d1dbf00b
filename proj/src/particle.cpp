#include "oscproc/particle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "oscproc/rng.hpp"
#include "oscproc/simulate.hpp"

namespace oscproc::particle {

namespace {
constexpr double neg_inf = -std::numeric_limits<double>::infinity();
} // namespace

ParticleCloud::ParticleCloud(int n, const ModelParams& params, const kalman::GaussState& prior_gauss,
                             std::uint64_t seed, int lag)
    : seed_(seed), lag_(lag) {
    if (n < 2) throw std::invalid_argument("ParticleCloud: need at least 2 particles");
    if (lag < 0) throw std::invalid_argument("ParticleCloud: lag must be >= 0");
    params.validate();

    const double psi0 = params.mean_phase_increment();
    particles_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Particle p(lag + 2);
        RngStream rng = derive_stream(seed, stream_tag::cloud_init, static_cast<std::uint64_t>(i));
        WindowEntry e;
        e.phi = rng.uniform() * two_pi;
        e.psi = psi0;
        e.filt = prior_gauss;
        e.pred = prior_gauss;
        p.window.push(e);
        p.w = 1.0 / n;
        p.logw = -std::log(static_cast<double>(n));
        particles_.push_back(std::move(p));
    }
}

ParticleCloud::ParticleCloud(const CarryOver& carry, std::uint64_t seed, int lag)
    : seed_(seed), lag_(lag) {
    const int n = static_cast<int>(carry.phi0.size());
    if (n < 2) throw std::invalid_argument("ParticleCloud: carry-over needs at least 2 particles");
    double wsum = 0.0;
    for (double w : carry.w0) wsum += w;
    if (!(wsum > 0.0)) throw std::invalid_argument("ParticleCloud: carry-over weights sum to zero");

    particles_.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        Particle p(lag + 2);
        WindowEntry e;
        e.phi = carry.phi0[static_cast<std::size_t>(i)];
        e.psi = carry.psi0[static_cast<std::size_t>(i)];
        e.filt = carry.gauss0[static_cast<std::size_t>(i)];
        e.pred = e.filt;
        p.window.push(e);
        p.w = carry.w0[static_cast<std::size_t>(i)] / wsum;
        p.logw = p.w > 0.0 ? std::log(p.w) : neg_inf;
        particles_.push_back(std::move(p));
    }
}

double ess(std::span<const double> weights) {
    double sum = 0.0, sum2 = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("ess: negative weight");
        sum += w;
        sum2 += w * w;
    }
    if (std::abs(sum - 1.0) > 1e-8) throw std::invalid_argument("ess: weights must be normalized");
    return 1.0 / sum2;
}

std::vector<int> systematic_offspring(std::span<const double> weights, double u0) {
    const int n = static_cast<int>(weights.size());
    std::vector<int> counts(static_cast<std::size_t>(n), 0);
    double cum = 0.0;
    int j = 0;
    int last_positive = 0;
    for (int i = 0; i < n; ++i) {
        if (weights[static_cast<std::size_t>(i)] > 0.0) last_positive = i;
        cum += weights[static_cast<std::size_t>(i)];
        while (j < n && (j + u0) / n < cum) {
            ++counts[static_cast<std::size_t>(i)];
            ++j;
        }
    }
    counts[static_cast<std::size_t>(last_positive)] += n - j; // guard against rounding shortfall
    return counts;
}

void ParticleCloud::resample(std::uint64_t seed) {
    const int n = size();
    std::vector<double> w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i)] = particles_[static_cast<std::size_t>(i)].w;
    const double u0 = derive_stream(seed_, stream_tag::resample, seed).uniform();
    std::vector<int> counts = systematic_offspring(w, u0);

    std::vector<Particle> next;
    next.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        for (int c = 0; c < counts[static_cast<std::size_t>(i)]; ++c)
            next.push_back(particles_[static_cast<std::size_t>(i)]);
    particles_ = std::move(next);
    const double w_uniform = 1.0 / n;
    const double logw_uniform = -std::log(static_cast<double>(n));
    for (auto& p : particles_) {
        p.w = w_uniform;
        p.logw = logw_uniform;
    }
}

void systematic_resample(ParticleCloud& cloud, std::uint64_t seed) {
    cloud.resample(seed);
}

void ParticleCloud::step(double y, const ModelParams& params, const OscillationPattern& f) {
    const int n = size();
    const int t = ++t_;
    const double shape = params.acd_shape;

    std::vector<double> loglik(static_cast<std::size_t>(n));
    int var_floor_hits = 0;
    int pinv_fallbacks = 0;

#pragma omp parallel for schedule(static) reduction(+ : var_floor_hits, pinv_fallbacks)
    for (int i = 0; i < n; ++i) {
        Particle& p = particles_[static_cast<std::size_t>(i)];
        WindowEntry& prev = p.window.back();
        kalman::GaussState pred = kalman::predict(prev.filt, params);

        RngStream rng = derive_stream(seed_, stream_tag::proposal, static_cast<std::uint64_t>(t),
                                      static_cast<std::uint64_t>(i));
        const double eta = rng.gamma(shape, 1.0 / shape);
        WindowEntry e;
        e.psi = acd_step(prev.psi, params, eta);
        e.phi = prev.phi + e.psi;
        e.f_phi = f(e.phi);
        e.pred = pred;
        e.filt = pred; // placeholder until the update below

        bool singular = false;
        prev.gain_to_next = kalman::smoother_gain(prev.filt, pred, params.A, &singular);
        if (singular) ++pinv_fallbacks;

        int hits = 0;
        loglik[static_cast<std::size_t>(i)] =
            kalman::observation_likelihood(pred, y, e.f_phi, params.sigma_eps2, &hits).loglik;
        var_floor_hits += hits;
        p.window.push(e);
    }
    diag_.var_floor_hits += var_floor_hits;
    diag_.pinv_fallbacks += pinv_fallbacks;

    // weight update and evidence increment, in log space
    double max_logw = neg_inf;
    for (int i = 0; i < n; ++i) {
        Particle& p = particles_[static_cast<std::size_t>(i)];
        p.logw += loglik[static_cast<std::size_t>(i)];
        max_logw = std::max(max_logw, p.logw);
    }
    if (std::isfinite(max_logw)) {
        double s = 0.0;
        for (const Particle& p : particles_) s += std::exp(p.logw - max_logw);
        const double lse = max_logw + std::log(s);
        loglik_ += lse;
        for (Particle& p : particles_) {
            p.logw -= lse;
            p.w = std::exp(p.logw);
        }
    } else {
        // every raw weight underflowed to zero: reset to uniform
        ++diag_.weight_resets;
        const double w_uniform = 1.0 / n;
        for (Particle& p : particles_) {
            p.w = w_uniform;
            p.logw = -std::log(static_cast<double>(n));
        }
    }

    double e = 0.0;
    for (const Particle& p : particles_) e += p.w * p.w;
    const double ess_now = 1.0 / e;
    diag_.ess_trace.push_back(ess_now);
    if (ess_now < 0.2 * n) {
        resample(static_cast<std::uint64_t>(t));
        diag_.resample_times.push_back(t);
    }

#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        WindowEntry& e2 = particles_[static_cast<std::size_t>(i)].window.back();
        e2.filt = kalman::update(e2.pred, y, e2.f_phi, params.sigma_eps2);
    }
}

std::vector<double> ParticleCloud::weights() const {
    std::vector<double> w(particles_.size());
    for (std::size_t i = 0; i < particles_.size(); ++i) w[i] = particles_[i].w;
    return w;
}

namespace {

struct EmitSlot {
    double phi = 0.0, psi = 0.0, psi_prev = 0.0;
    Vec2 mean = Vec2::Zero();
    Mat2 cov = Mat2::Zero();
    Vec2 mean_prev = Vec2::Zero();
    Mat2 cov_prev = Mat2::Zero();
    Mat2 cross = Mat2::Zero();
};

} // namespace

void fixed_lag_smooth(const ParticleCloud& cloud, const ModelParams& params, int emit_index,
                      int emit_time, SmootherOutput& out, SmoothedStats* stats, int* pinv_fallbacks) {
    const auto parts = cloud.particles();
    const int n = static_cast<int>(parts.size());
    std::vector<EmitSlot> slots(static_cast<std::size_t>(n));
    const bool want_prev = emit_index >= 1;

#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const Window& win = parts[static_cast<std::size_t>(i)].window;
        const int m = win.size();
        thread_local std::vector<kalman::GaussState> filt, pred;
        thread_local std::vector<Mat2> gains;
        filt.resize(static_cast<std::size_t>(m));
        pred.resize(static_cast<std::size_t>(m));
        gains.resize(static_cast<std::size_t>(m));
        for (int k = 0; k < m; ++k) {
            filt[static_cast<std::size_t>(k)] = win[k].filt;
            pred[static_cast<std::size_t>(k)] = win[k].pred;
            gains[static_cast<std::size_t>(k)] = win[k].gain_to_next;
        }
        const Vec2 gain_last =
            kalman::kalman_gain(win.back().pred, win.back().f_phi, params.sigma_eps2);
        kalman::SmoothResult sm =
            kalman::smooth_with_gains(filt, pred, gains, params, gain_last, win.back().f_phi);

        EmitSlot& s = slots[static_cast<std::size_t>(i)];
        s.phi = win[emit_index].phi;
        s.psi = win[emit_index].psi;
        s.mean = sm.states[static_cast<std::size_t>(emit_index)].state.mean;
        s.cov = sm.states[static_cast<std::size_t>(emit_index)].state.cov;
        if (want_prev) {
            s.psi_prev = win[emit_index - 1].psi;
            s.mean_prev = sm.states[static_cast<std::size_t>(emit_index) - 1].state.mean;
            s.cov_prev = sm.states[static_cast<std::size_t>(emit_index) - 1].state.cov;
            s.cross = sm.states[static_cast<std::size_t>(emit_index)].cross;
        }
    }

    if (emit_time >= 1) {
        double phi_hat = 0.0, a_hat = 0.0, b_hat = 0.0;
        for (int i = 0; i < n; ++i) {
            const double w = parts[static_cast<std::size_t>(i)].w;
            const EmitSlot& s = slots[static_cast<std::size_t>(i)];
            phi_hat += w * s.phi;
            a_hat += w * s.mean(0);
            b_hat += w * s.mean(1);
        }
        out.phi_hat.push_back(phi_hat);
        out.phi_hat_folded.push_back(fold_2pi(phi_hat));
        out.a_hat.push_back(a_hat);
        out.b_hat.push_back(b_hat);

        if (stats) {
            if (!want_prev)
                throw std::logic_error("fixed_lag_smooth: stats emission requires the t-1 slot");
            double e2 = 0.0;
            for (int i = 0; i < n; ++i) {
                const double w = parts[static_cast<std::size_t>(i)].w;
                e2 += w * w;
                const EmitSlot& s = slots[static_cast<std::size_t>(i)];
                const std::size_t k = stats->idx(emit_time, i);
                stats->w[k] = w;
                stats->phi[k] = s.phi;
                stats->psi[k] = s.psi;
                stats->psi_prev[k] = s.psi_prev;
                stats->a[k] = s.mean(0);
                stats->b[k] = s.mean(1);
                stats->cov_aa[k] = s.cov(0, 0);
                stats->cov_ab[k] = s.cov(0, 1);
                stats->cov_bb[k] = s.cov(1, 1);
                stats->a_prev[k] = s.mean_prev(0);
                stats->b_prev[k] = s.mean_prev(1);
                stats->pcov_aa[k] = s.cov_prev(0, 0);
                stats->pcov_ab[k] = s.cov_prev(0, 1);
                stats->pcov_bb[k] = s.cov_prev(1, 1);
                stats->x_aa[k] = s.cross(0, 0);
                stats->x_ab[k] = s.cross(0, 1);
                stats->x_ba[k] = s.cross(1, 0);
                stats->x_bb[k] = s.cross(1, 1);
            }
            stats->ess[static_cast<std::size_t>(emit_time) - 1] = 1.0 / e2;
        }
    }
    (void)pinv_fallbacks;
}

namespace {

void capture_carry(const ParticleCloud& cloud, const ModelParams& params, CarryOver& carry,
                   bool from_smoothed) {
    const auto parts = cloud.particles();
    const int n = static_cast<int>(parts.size());
    carry.phi0.resize(static_cast<std::size_t>(n));
    carry.psi0.resize(static_cast<std::size_t>(n));
    carry.gauss0.resize(static_cast<std::size_t>(n));
    carry.w0.resize(static_cast<std::size_t>(n));

#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const Window& win = parts[static_cast<std::size_t>(i)].window;
        carry.phi0[static_cast<std::size_t>(i)] = win[0].phi;
        carry.psi0[static_cast<std::size_t>(i)] = win[0].psi;
        carry.w0[static_cast<std::size_t>(i)] = parts[static_cast<std::size_t>(i)].w;
        if (from_smoothed && win.size() > 1) {
            thread_local std::vector<kalman::GaussState> filt, pred;
            thread_local std::vector<Mat2> gains;
            const int m = win.size();
            filt.resize(static_cast<std::size_t>(m));
            pred.resize(static_cast<std::size_t>(m));
            gains.resize(static_cast<std::size_t>(m));
            for (int k = 0; k < m; ++k) {
                filt[static_cast<std::size_t>(k)] = win[k].filt;
                pred[static_cast<std::size_t>(k)] = win[k].pred;
                gains[static_cast<std::size_t>(k)] = win[k].gain_to_next;
            }
            const Vec2 gain_last =
                kalman::kalman_gain(win.back().pred, win.back().f_phi, params.sigma_eps2);
            kalman::SmoothResult sm =
                kalman::smooth_with_gains(filt, pred, gains, params, gain_last, win.back().f_phi);
            carry.gauss0[static_cast<std::size_t>(i)] = sm.states[0].state;
        } else {
            carry.gauss0[static_cast<std::size_t>(i)] = win[0].filt;
        }
    }
}

} // namespace

RbpsResult run_rbps(const ObservationSeries& y, const ModelParams& params,
                    const OscillationPattern& f, const RbpsOptions& opts) {
    params.validate();
    const int T = y.length();
    if (T < 1) throw std::invalid_argument("run_rbps: empty observation series");
    const int lag = opts.lag;

    kalman::GaussState prior;
    if (opts.prior_set) {
        prior = opts.prior;
    } else {
        prior.mean = params.mu;
        prior.cov = params.Q;
    }

    RbpsResult res;
    ParticleCloud cloud =
        (opts.carry && !opts.carry->empty())
            ? ParticleCloud(*opts.carry, opts.seed, lag)
            : ParticleCloud(opts.n_particles, params, prior, opts.seed, lag);
    const int n = cloud.size();

    if (opts.collect_stats) res.stats.resize(T, n);
    SmoothedStats* stats = opts.collect_stats ? &res.stats : nullptr;
    if (stats) stats->y = y.y;

    res.out.phi_hat.reserve(static_cast<std::size_t>(T));

    if (lag == 0) capture_carry(cloud, params, res.carry, false);

    for (int t = 1; t <= T; ++t) {
        cloud.step(y.y[static_cast<std::size_t>(t) - 1], params, f);
        if (t >= lag && lag > 0) {
            const int emit_time = t - lag;
            const int window_start = std::max(0, t - lag - 1);
            if (emit_time == 0) {
                capture_carry(cloud, params, res.carry, true);
            } else {
                fixed_lag_smooth(cloud, params, emit_time - window_start, emit_time, res.out, stats,
                                 nullptr);
            }
        } else if (lag == 0) {
            const int window_start = std::max(0, t - 1);
            fixed_lag_smooth(cloud, params, t - window_start, t, res.out, stats, nullptr);
        }
    }

    // tail: emit remaining times from the final window, reusing the last weights
    const int window_start = std::max(0, T - lag - 1);
    const int tail_start = T >= lag ? T - lag + 1 : 0;
    if (lag > 0) {
        for (int emit_time = tail_start; emit_time <= T; ++emit_time) {
            if (emit_time == 0) {
                capture_carry(cloud, params, res.carry, true);
            } else {
                fixed_lag_smooth(cloud, params, emit_time - window_start, emit_time, res.out, stats,
                                 nullptr);
            }
        }
    }

    const Diagnostics& d = cloud.diagnostics();
    res.out.ess = d.ess_trace;
    res.out.resample_times = d.resample_times;
    res.out.loglik = cloud.loglik();
    res.out.weight_resets = d.weight_resets;
    res.out.var_floor_hits = d.var_floor_hits;
    res.out.pinv_fallbacks = d.pinv_fallbacks;
    return res;
}

} // namespace oscproc::particle
