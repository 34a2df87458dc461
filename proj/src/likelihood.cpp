#include "phasecon/likelihood.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

#include "phasecon/numeric.hpp"

namespace phasecon {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct TrigTable {
    std::vector<double> cos;
    std::vector<double> sin;
};

// Nodes phi_k = -pi + 2 pi k / n.
const TrigTable& trig_table(int n) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<TrigTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[n];
    if (!slot) {
        slot = std::make_unique<TrigTable>();
        slot->cos.resize(n);
        slot->sin.resize(n);
        for (int k = 0; k < n; ++k) {
            const double phi = -std::numbers::pi + kTwoPi * k / n;
            slot->cos[k] = std::cos(phi);
            slot->sin[k] = std::sin(phi);
        }
    }
    return *slot;
}

struct IntegrandTerms {
    double constant;  // log(k_n/2pi) - (k_n/2)(|y|^2+|u|^2) - log(2 pi I0(k_phi))
    double a;         // k_n Re z + k_phi
    double b;         // k_n Im z
    double peak;      // |k_phi + k_n z|, upper bound of a cos - b sin
};

IntegrandTerms integrand_terms(cplx y, cplx u, const ChannelParams& p) {
    const double kn = p.k_n();
    const double kp = p.k_phi();
    const cplx z = std::conj(y) * u;
    IntegrandTerms t;
    t.constant = std::log(kn / kTwoPi) - 0.5 * kn * (std::norm(y) + std::norm(u)) -
                 std::log(kTwoPi) - log_bessel_i0(kp);
    t.a = kn * z.real() + kp;
    t.b = kn * z.imag();
    t.peak = std::hypot(t.a, t.b);
    return t;
}

// sum over k = first, first + stride, ... of exp(a cos - b sin - peak)
double shifted_sum(const IntegrandTerms& t, const TrigTable& tab, int first, int stride) {
    double s = 0.0;
    const int n = static_cast<int>(tab.cos.size());
    for (int k = first; k < n; k += stride) {
        s += std::exp(t.a * tab.cos[k] - t.b * tab.sin[k] - t.peak);
    }
    return s;
}

void check_grid(int n) {
    if (n < 64 || n % 2 != 0) {
        throw Error(Errc::invalid_argument,
                    "likelihood grid must be even and >= 64, got " + std::to_string(n));
    }
}

double gaussian_log_density(cplx y, cplx u, double kn) {
    return std::log(kn / kTwoPi) - 0.5 * kn * std::norm(y - u);
}

}  // namespace

double tikhonov_log_pdf(double phi, double k_phi) {
    if (!(k_phi >= 0.0) || !std::isfinite(k_phi)) {
        throw Error(Errc::invalid_argument, "Tikhonov concentration must be finite and >= 0");
    }
    return k_phi * std::cos(phi) - std::log(kTwoPi) - log_bessel_i0(k_phi);
}

double phase_estimate(cplx z, double a_ratio) {
    if (a_ratio == 0.0) return 0.0;
    const double phi = -std::atan2(a_ratio * z.imag(), 1.0 + a_ratio * z.real());
    return phi <= -std::numbers::pi ? std::numbers::pi : phi;
}

MetricContext::MetricContext(const ChannelParams& params, const Constellation& c)
    : params_(params), points_(c.points().begin(), c.points().end()) {
    energy_.reserve(points_.size());
    for (const auto& u : points_) energy_.push_back(-0.5 * params_.k_n() * std::norm(u));
}

double MetricContext::metric(cplx y, std::size_t i) const {
    const cplx u = points_.at(i);
    return energy_[i] + phase_peak(std::conj(y) * u, params_.k_n(), params_.a_ratio());
}

double awgn_metric(cplx y, cplx u, double k_n) noexcept {
    return -0.5 * k_n * std::norm(u) + k_n * (std::conj(y) * u).real();
}

double decision_metric(cplx y, cplx u, const MetricContext& ctx) {
    const auto& p = ctx.params();
    if (!p.has_phase_noise()) return awgn_metric(y, u, p.k_n());
    return -0.5 * p.k_n() * std::norm(u) + phase_peak(std::conj(y) * u, p.k_n(), p.a_ratio());
}

double log_ratio(cplx y, cplx u, cplx x, const MetricContext& ctx) {
    return decision_metric(y, u, ctx) - decision_metric(y, x, ctx);
}

double trapezoid_log_likelihood(cplx y, cplx u, const ChannelParams& params, int n) {
    check_grid(n);
    if (!params.has_phase_noise()) return gaussian_log_density(y, u, params.k_n());
    const auto t = integrand_terms(y, u, params);
    const double s = shifted_sum(t, trig_table(n), 0, 1);
    return t.constant + t.peak + std::log(s * kTwoPi / n);
}

double exact_log_likelihood(cplx y, cplx u, const ChannelParams& params, int n_grid) {
    check_grid(n_grid);
    if (!params.has_phase_noise()) return gaussian_log_density(y, u, params.k_n());
    constexpr int kMaxGrid = 1 << 22;
    constexpr double kTol = 1e-8;
    const auto t = integrand_terms(y, u, params);
    int n = n_grid;
    double sum = shifted_sum(t, trig_table(n), 0, 1);
    double est = t.constant + t.peak + std::log(sum * kTwoPi / n);
    while (n < kMaxGrid) {
        // The new nodes of the 2n grid are its odd indices.
        sum += shifted_sum(t, trig_table(2 * n), 1, 2);
        n *= 2;
        const double next = t.constant + t.peak + std::log(sum * kTwoPi / n);
        const bool done = std::abs(next - est) < kTol;
        est = next;
        if (done) break;
    }
    return est;
}

}  // namespace phasecon
