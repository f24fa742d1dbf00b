#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "oscproc/kalman.hpp"
#include "oscproc/params.hpp"
#include "oscproc/pattern.hpp"
#include "oscproc/smoothed_stats.hpp"

namespace oscproc::particle {

/// One window slot of a particle's history: phase, increment, pattern value,
/// filtered and predicted Gaussian states, and the cached smoother gain
/// pairing this slot with the next one's prediction.
struct WindowEntry {
    double phi = 0.0;
    double psi = 0.0;
    double f_phi = 0.0;
    kalman::GaussState filt;
    kalman::GaussState pred;
    Mat2 gain_to_next = Mat2::Zero();
};

/// Fixed-capacity ring over the last (lag + 2) time slots.
class Window {
public:
    explicit Window(int capacity) : buf_(static_cast<std::size_t>(capacity)) {}

    int size() const { return count_; }
    int capacity() const { return static_cast<int>(buf_.size()); }

    WindowEntry& operator[](int j) { return buf_[phys(j)]; }
    const WindowEntry& operator[](int j) const { return buf_[phys(j)]; }
    WindowEntry& back() { return (*this)[count_ - 1]; }
    const WindowEntry& back() const { return (*this)[count_ - 1]; }

    void push(const WindowEntry& e) {
        if (count_ < capacity()) {
            buf_[phys(count_)] = e;
            ++count_;
        } else {
            buf_[head_] = e;
            head_ = (head_ + 1) % capacity();
        }
    }

private:
    std::size_t phys(int j) const {
        return static_cast<std::size_t>((head_ + j) % capacity());
    }
    std::vector<WindowEntry> buf_;
    int head_ = 0;
    int count_ = 0;
};

struct Particle {
    double logw = 0.0;
    double w = 0.0;
    Window window;
    explicit Particle(int capacity) : window(capacity) {}
};

/// Initial particles carried from one EM iteration to the next: the smoothed
/// time-0 states and the weights at time min(l, T).
struct CarryOver {
    std::vector<double> phi0;
    std::vector<double> psi0;
    std::vector<kalman::GaussState> gauss0;
    std::vector<double> w0;
    bool empty() const { return phi0.empty(); }
};

struct Diagnostics {
    std::vector<double> ess_trace; ///< per filter step, before any resampling
    std::vector<int> resample_times;
    int weight_resets = 0;
    int var_floor_hits = 0;
    int pinv_fallbacks = 0;
};

class ParticleCloud {
public:
    /// Fresh cloud: phi_0 ~ U[0, 2pi), psi_0 = alpha/(1-beta), Gaussian
    /// states from prior_gauss, uniform weights.
    ParticleCloud(int n, const ModelParams& params, const kalman::GaussState& prior_gauss,
                  std::uint64_t seed, int lag);

    /// Cloud restarted from carried-over per-particle initial states.
    ParticleCloud(const CarryOver& carry, std::uint64_t seed, int lag);

    int size() const { return static_cast<int>(particles_.size()); }
    int lag() const { return lag_; }
    int time() const { return t_; }
    double loglik() const { return loglik_; }
    const Diagnostics& diagnostics() const { return diag_; }
    std::span<const Particle> particles() const { return particles_; }

    /// One RBPF step: Kalman prediction, phase-pair proposal, importance
    /// weighting, ESS-triggered systematic resampling, Kalman update.
    void step(double y, const ModelParams& params, const OscillationPattern& f);

    std::vector<double> weights() const;

    friend void systematic_resample(ParticleCloud& cloud, std::uint64_t seed);

private:
    void resample(std::uint64_t seed);

    std::vector<Particle> particles_;
    std::uint64_t seed_ = 0;
    int lag_ = 0;
    int t_ = 0;
    double loglik_ = 0.0;
    Diagnostics diag_;
};

/// Effective sample size 1/sum(w^2); weights must be normalized.
double ess(std::span<const double> weights);

/// Resample with a single stratified uniform draw; weights reset to 1/N.
void systematic_resample(ParticleCloud& cloud, std::uint64_t seed);

/// Offspring counts of systematic resampling for a normalized weight vector.
std::vector<int> systematic_offspring(std::span<const double> weights, double u0);

/// Weighted point estimates over times 1..T (phase averaged unwrapped, then
/// folded for display).
struct SmootherOutput {
    std::vector<double> phi_hat;
    std::vector<double> phi_hat_folded;
    std::vector<double> a_hat;
    std::vector<double> b_hat;
    std::vector<double> ess; ///< filter ESS trace
    std::vector<int> resample_times;
    double loglik = 0.0;
    int weight_resets = 0;
    int var_floor_hits = 0;
    int pinv_fallbacks = 0;
};

/// Backward-smooth every particle's current window and emit the weighted
/// estimates for the window slot at `emit_index` (counted from the window
/// start). Appends EM statistics for that time when `stats` is given.
void fixed_lag_smooth(const ParticleCloud& cloud, const ModelParams& params, int emit_index,
                      int emit_time, SmootherOutput& out, SmoothedStats* stats, int* pinv_fallbacks);

struct RbpsOptions {
    int n_particles = 1000;
    int lag = 10;
    std::uint64_t seed = 0;
    kalman::GaussState prior;  ///< time-0 Gaussian prior; defaults to N(mu, Q)
    bool prior_set = false;
    const CarryOver* carry = nullptr;
    bool collect_stats = false;
};

struct RbpsResult {
    SmootherOutput out;
    CarryOver carry;
    SmoothedStats stats;
};

/// Full streaming Rao-Blackwellized fixed-lag particle smoother.
RbpsResult run_rbps(const ObservationSeries& y, const ModelParams& params,
                    const OscillationPattern& f, const RbpsOptions& opts);

} // namespace oscproc::particle
