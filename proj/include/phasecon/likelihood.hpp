#pragma once

#include <cmath>
#include <vector>

#include "phasecon/model.hpp"

namespace phasecon {

// log of the Tikhonov (von Mises) density with zero mean:
// k cos(phi) - log(2 pi I0(k)).
double tikhonov_log_pdf(double phi, double k_phi);

// Phase that maximizes f(phi) = k_phi cos(phi) + k_n Re(z e^{j phi}),
// i.e. -arg(1 + A z). Result in (-pi, pi]; 0 when A == 0.
double phase_estimate(cplx z, double a_ratio);

// f(phi_hat(z)) - k_phi for z = conj(y) u. Since
// f(phi) = Re(k_phi (1 + A z) e^{j phi}), the maximum is k_phi |1 + A z|;
// subtracting the u-independent k_phi keeps the value O(k_n) even for very
// concentrated phase noise. Reduces to k_n Re(z) when A == 0.
inline double phase_peak(cplx z, double k_n, double a_ratio) noexcept {
    const double re = 1.0 + a_ratio * z.real();
    const double im = a_ratio * z.imag();
    const double mag = std::sqrt(re * re + im * im);
    return k_n * (2.0 * z.real() + a_ratio * std::norm(z)) / (mag + 1.0);
}

// Max-log decision metric per hypothesis. The additive constant common to
// all hypotheses (including k_phi) is dropped, so only differences are
// meaningful. Holds the per-point energy terms -(k_n/2)|u|^2.
class MetricContext {
public:
    MetricContext(const ChannelParams& params, const Constellation& c);

    const ChannelParams& params() const noexcept { return params_; }
    double energy_term(std::size_t i) const { return energy_.at(i); }
    std::size_t size() const noexcept { return points_.size(); }

    // decision_metric(y, points[i]) using the precomputed energy term.
    double metric(cplx y, std::size_t i) const;

private:
    ChannelParams params_;
    std::vector<cplx> points_;
    std::vector<double> energy_;
};

// -(k_n/2)|u|^2 + k_n Re(conj(y) u): the AWGN log-likelihood up to terms
// that do not depend on u.
double awgn_metric(cplx y, cplx u, double k_n) noexcept;

// -(k_n/2)|u|^2 + lambda(phi_hat) + k_n Re(conj(y) u e^{j phi_hat}) - k_phi.
// Dispatches to awgn_metric when k_phi is infinite.
double decision_metric(cplx y, cplx u, const MetricContext& ctx);

// Approximate log p(y|u)/p(y|x) with the phase integral replaced by its
// maximum. Identical to decision_metric(y,u) - decision_metric(y,x).
double log_ratio(cplx y, cplx u, cplx x, const MetricContext& ctx);

// Trapezoidal evaluation of log int p(y|u,phi) p(phi) dphi on n equispaced
// nodes over one period, including every normalizing constant.
double trapezoid_log_likelihood(cplx y, cplx u, const ChannelParams& params, int n);

inline constexpr int kDefaultLikelihoodGrid = 2048;

// trapezoid_log_likelihood starting at n_grid and doubling until successive
// estimates differ by less than 1e-8. Without phase noise this is the
// complex Gaussian log density.
double exact_log_likelihood(cplx y, cplx u, const ChannelParams& params,
                            int n_grid = kDefaultLikelihoodGrid);

}  // namespace phasecon
