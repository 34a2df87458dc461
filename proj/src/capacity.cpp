#include "phasecon/capacity.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "phasecon/io.hpp"
#include "phasecon/likelihood.hpp"
#include "phasecon/numeric.hpp"

namespace phasecon {

const char* objective_name(Objective o) noexcept {
    return o == Objective::ami ? "AMI" : "PAMI";
}

Objective parse_objective(const std::string& s) {
    std::string u;
    for (char ch : s) u += static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
    if (u == "AMI") return Objective::ami;
    if (u == "PAMI") return Objective::pami;
    throw Error(Errc::invalid_argument, "unknown objective '" + s + "'");
}

const char* method_name(Method m) noexcept {
    return m == Method::quadrature ? "quadrature" : "monte_carlo";
}

namespace {

using Node = MetricTable::Node;

struct ScaledGrid {
    std::vector<Node> nodes;
    double weight_total = 0.0;
};

// Phase nodes sit at sqrt(2) sigma_phi t like a Gaussian rule, and each
// phase weight is multiplied by the Tikhonov / Gaussian density ratio at the
// node, so the phase dimension integrates against the Tikhonov law itself.
// Nodes beyond +-pi get zero weight.
std::vector<double> phase_weights(const ChannelParams& params, const QuadratureGrid& grid) {
    const double s = params.pnsd_rad();
    const double scale = std::numbers::sqrt2 * s;
    std::vector<double> w;
    w.reserve(grid.nodes().size());
    for (const auto& nd : grid.nodes()) {
        const double phi = scale * nd.node;
        if (std::abs(phi) > std::numbers::pi) {
            w.push_back(0.0);
            continue;
        }
        const double log_ratio = nd.node * nd.node + tikhonov_log_pdf(phi, params.k_phi());
        w.push_back(nd.weight * std::sqrt(std::numbers::pi) * scale * std::exp(log_ratio));
    }
    return w;
}

ScaledGrid scale_grid(const ChannelParams& params, const QuadratureGrid& grid) {
    const double noise_scale = std::numbers::sqrt2 * params.noise_sigma();
    const bool phase = params.has_phase_noise();
    const double phase_scale = std::numbers::sqrt2 * params.pnsd_rad();
    const std::size_t k = grid.nodes().size();
    const auto& pts = phase ? grid.product3() : grid.product2();
    std::vector<double> pw = phase ? phase_weights(params, grid) : std::vector<double>{};
    ScaledGrid out;
    out.nodes.reserve(pts.size());
    CompensatedSum w;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& p = pts[i];
        cplx rot(1.0, 0.0);
        double weight = p.weight;
        if (phase) {
            // product3 is ordered with the phase index innermost
            const auto& pn = grid.nodes()[i % k];
            rot = std::polar(1.0, phase_scale * p.t_phase);
            weight = p.weight / pn.weight * pw[i % k];
        }
        out.nodes.push_back({cplx(noise_scale * p.t_re, noise_scale * p.t_im), rot, weight});
        w.add(weight);
    }
    out.weight_total = w.value();
    return out;
}

// Unit phasor of x (1 at the origin). The noise nodes are laid out in this
// frame, so a global rotation of the constellation rotates every received
// sample with it.
inline cplx frame_of(cplx x) noexcept {
    const double r = std::abs(x);
    return r > 0.0 ? x / r : cplx(1.0, 0.0);
}

inline cplx received(cplx x, cplx frame, const Node& n) noexcept {
    return x * n.rotation + frame * n.noise;
}

inline double metric_entry(cplx y, cplx u, double kn, double a) noexcept {
    return -0.5 * kn * std::norm(u) + phase_peak(std::conj(y) * u, kn, a);
}

// out[node * M + u] for transmitted point x
void fill_row_into(std::span<double> out, const Constellation& c, std::size_t x,
                   const std::vector<Node>& nodes, double kn, double a) {
    const auto pts = c.points();
    const std::size_t M = pts.size();
    const cplx frame = frame_of(pts[x]);
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const cplx y = received(pts[x], frame, nodes[n]);
        double* row = out.data() + n * M;
        for (std::size_t u = 0; u < M; ++u) row[u] = metric_entry(y, pts[u], kn, a);
    }
}

// log of the sum of exp(g[u]) over u in the label subset where bit b equals
// `bit`, relative to the shift mx; log-domain fallback when the scaled sum
// underflows.
double subset_log_sum(std::span<const double> g, std::span<const double> e,
                      const Constellation& c, int b, int bit, double mx) {
    double s = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (c.label_bit(u, b) == bit) s += e[u];
    }
    if (s > 0.0) return mx + std::log(s);
    double sub_max = -std::numeric_limits<double>::infinity();
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (c.label_bit(u, b) == bit) sub_max = std::max(sub_max, g[u]);
    }
    s = 0.0;
    for (std::size_t u = 0; u < g.size(); ++u) {
        if (c.label_bit(u, b) == bit) s += std::exp(g[u] - sub_max);
    }
    return sub_max + std::log(s);
}

// Weighted sum over nodes of the per-node loss term (nats) for point x.
double reduce_row(std::span<const double> rows, const Constellation& c, std::size_t x,
                  const std::vector<Node>& nodes, Objective objective) {
    const std::size_t M = c.size();
    const int m = c.bits_per_symbol();
    std::vector<double> e(M);
    CompensatedSum acc;
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const std::span<const double> g = rows.subspan(n * M, M);
        const double mx = *std::max_element(g.begin(), g.end());
        double tot = 0.0;
        for (std::size_t u = 0; u < M; ++u) {
            e[u] = std::exp(g[u] - mx);
            tot += e[u];
        }
        const double log_tot = mx + std::log(tot);
        double term;
        if (objective == Objective::ami) {
            term = log_tot - g[x];
        } else {
            term = 0.0;
            for (int b = 0; b < m; ++b) {
                term += log_tot - subset_log_sum(g, e, c, b, c.label_bit(x, b), mx);
            }
        }
        acc.add(nodes[n].weight * term);
    }
    return acc.value();
}

double to_bits(std::span<const double> row_sums, int m, double weight_total) {
    CompensatedSum total;
    for (double r : row_sums) total.add(r);
    return m - total.value() /
                   (static_cast<double>(row_sums.size()) * weight_total * std::numbers::ln2);
}

void require_unit_power(const Constellation& c) {
    if (!is_unit_power(c, 1e-9)) {
        throw Error(Errc::not_normalized,
                    "constellation average power is " + format_double(c.average_power()) +
                        ", expected 1");
    }
}

CapacityResult finish(const Constellation& c, const ChannelParams& params, Objective objective,
                      Method method, double raw) {
    CapacityResult r;
    r.raw_bits = raw;
    r.m = c.bits_per_symbol();
    r.bits = std::clamp(raw, 0.0, static_cast<double>(r.m));
    r.out_of_range = raw < -0.01 || raw > r.m + 0.01;
    r.method = method;
    r.objective = objective;
    r.params = params;
    r.fingerprint = fingerprint(c);
    return r;
}

}  // namespace

MetricTable::MetricTable(const ChannelParams& params, const QuadratureGrid& grid,
                         const Constellation& c, unsigned threads)
    : params_(params), c_(c), threads_(threads) {
    auto scaled = scale_grid(params, grid);
    nodes_ = std::move(scaled.nodes);
    weight_total_ = scaled.weight_total;
    const std::size_t M = c_.size();
    table_.resize(M * nodes_.size() * M);
    parallel_for(M, threads_, [&](std::size_t x) { fill_row(x); });
}

void MetricTable::fill_row(std::size_t x) {
    const std::size_t M = c_.size();
    const std::size_t N = nodes_.size();
    fill_row_into(std::span(table_).subspan(x * N * M, N * M), c_, x, nodes_, params_.k_n(),
                  params_.a_ratio());
}

void MetricTable::reset(const Constellation& updated) {
    if (updated.size() != c_.size()) {
        throw Error(Errc::size_mismatch, "reset changes the constellation size");
    }
    c_ = updated;
    parallel_for(c_.size(), threads_, [&](std::size_t x) { fill_row(x); });
}

void MetricTable::relabel(const Constellation& updated) {
    if (!std::ranges::equal(updated.points(), c_.points())) {
        throw Error(Errc::invalid_argument, "relabel must keep the points unchanged");
    }
    c_ = updated;
}

double MetricTable::objective_bits(Objective objective) const {
    const std::size_t M = c_.size();
    const std::size_t N = nodes_.size();
    std::vector<double> sums(M);
    parallel_for(M, threads_, [&](std::size_t x) {
        sums[x] = reduce_row(std::span<const double>(table_).subspan(x * N * M, N * M), c_, x,
                             nodes_, objective);
    });
    return to_bits(sums, c_.bits_per_symbol(), weight_total_);
}

CapacityResult evaluate_quadrature(const Constellation& c, const ChannelParams& params,
                                   const QuadratureGrid& grid, Objective objective,
                                   unsigned threads) {
    require_unit_power(c);
    const auto scaled = scale_grid(params, grid);
    const std::size_t M = c.size();
    const std::size_t N = scaled.nodes.size();
    std::vector<double> sums(M);
    // Row by row, so memory stays O(N M) per worker for large M.
    parallel_for(M, threads, [&](std::size_t x) {
        std::vector<double> rows(N * M);
        fill_row_into(rows, c, x, scaled.nodes, params.k_n(), params.a_ratio());
        sums[x] = reduce_row(rows, c, x, scaled.nodes, objective);
    });
    auto r = finish(c, params, objective, Method::quadrature,
                    to_bits(sums, c.bits_per_symbol(), scaled.weight_total));
    r.quad_degree = grid.degree();
    if (params.pnsd_deg() > kSurrogateWarnDeg) {
        r.warnings.push_back("PNSD " + format_double(params.pnsd_deg()) +
                             " deg exceeds 30 deg; the Hermite phase rule is coarse here, "
                             "cross-check with Monte Carlo");
    }
    return r;
}

CapacityResult ami_quadrature(const Constellation& c, const ChannelParams& params,
                              const QuadratureGrid& grid, unsigned threads) {
    return evaluate_quadrature(c, params, grid, Objective::ami, threads);
}

CapacityResult pami_quadrature(const Constellation& c, const ChannelParams& params,
                               const QuadratureGrid& grid, unsigned threads) {
    return evaluate_quadrature(c, params, grid, Objective::pami, threads);
}

double sample_tikhonov(std::mt19937_64& rng, double k_phi) {
    if (!(k_phi >= 0.0) || !std::isfinite(k_phi)) {
        throw Error(Errc::invalid_argument, "Tikhonov concentration must be finite and >= 0");
    }
    constexpr double pi = std::numbers::pi;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    if (k_phi <= 50.0) {
        std::uniform_real_distribution<double> angle(-pi, pi);
        for (;;) {
            const double phi = angle(rng);
            if (unit(rng) < std::exp(k_phi * (std::cos(phi) - 1.0))) return phi;
        }
    }
    std::normal_distribution<double> proposal(0.0, pi / (2.0 * std::sqrt(k_phi)));
    for (;;) {
        const double phi = proposal(rng);
        if (std::abs(phi) > pi) continue;
        const double log_ratio = k_phi * (std::cos(phi) - 1.0) + 2.0 * k_phi * phi * phi / (pi * pi);
        if (unit(rng) < std::exp(log_ratio)) return phi;
    }
}

namespace {

constexpr std::uint64_t kBlockSize = 1024;

struct BlockMoments {
    double sum = 0.0;
    double sum_sq = 0.0;
};

BlockMoments run_block(const Constellation& c, const ChannelParams& params, Objective objective,
                       std::uint64_t block, std::uint64_t count, std::uint64_t seed) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(block + 1)));
    const std::size_t M = c.size();
    const int m = c.bits_per_symbol();
    const auto pts = c.points();
    std::uniform_int_distribution<std::size_t> pick(0, M - 1);
    std::normal_distribution<double> gauss(0.0, params.noise_sigma());
    std::vector<double> ll(M), sub;
    sub.reserve(M);
    CompensatedSum s, s2;
    for (std::uint64_t i = 0; i < count; ++i) {
        const std::size_t x = pick(rng);
        const double phi = params.has_phase_noise() ? sample_tikhonov(rng, params.k_phi()) : 0.0;
        const double nr = gauss(rng);
        const double ni = gauss(rng);
        const cplx y = pts[x] * std::polar(1.0, phi) + cplx(nr, ni);
        for (std::size_t u = 0; u < M; ++u) {
            ll[u] = exact_log_likelihood(y, pts[u], params, kMonteCarloLikelihoodGrid);
        }
        const double log_tot = log_sum_exp(ll);
        double v;
        if (objective == Objective::ami) {
            v = m - (log_tot - ll[x]) / std::numbers::ln2;
        } else {
            v = 0.0;
            for (int b = 0; b < m; ++b) {
                sub.clear();
                for (std::size_t u = 0; u < M; ++u) {
                    if (c.label_bit(u, b) == c.label_bit(x, b)) sub.push_back(ll[u]);
                }
                v += 1.0 - (log_tot - log_sum_exp(sub)) / std::numbers::ln2;
            }
        }
        s.add(v);
        s2.add(v * v);
    }
    return {s.value(), s2.value()};
}

}  // namespace

CapacityResult evaluate_monte_carlo(const Constellation& c, const ChannelParams& params,
                                    Objective objective, std::uint64_t n_samples,
                                    std::uint64_t seed, unsigned threads) {
    if (n_samples < kMinMonteCarloSamples) {
        throw Error(Errc::invalid_argument,
                    "Monte Carlo needs at least " + std::to_string(kMinMonteCarloSamples) +
                        " samples");
    }
    require_unit_power(c);
    const std::uint64_t blocks = (n_samples + kBlockSize - 1) / kBlockSize;
    std::vector<BlockMoments> moments(blocks);
    parallel_for(blocks, threads, [&](std::size_t b) {
        const std::uint64_t count = std::min(kBlockSize, n_samples - b * kBlockSize);
        moments[b] = run_block(c, params, objective, b, count, seed);
    });
    CompensatedSum s, s2;
    for (const auto& bm : moments) {
        s.add(bm.sum);
        s2.add(bm.sum_sq);
    }
    const double n = static_cast<double>(n_samples);
    const double mean = s.value() / n;
    const double var = std::max(0.0, (s2.value() - n * mean * mean) / (n - 1.0));
    auto r = finish(c, params, objective, Method::monte_carlo, mean);
    r.std_error = std::sqrt(var / n);
    r.samples = n_samples;
    return r;
}

CapacityResult ami_monte_carlo(const Constellation& c, const ChannelParams& params,
                               std::uint64_t n_samples, std::uint64_t seed, unsigned threads) {
    return evaluate_monte_carlo(c, params, Objective::ami, n_samples, seed, threads);
}

CapacityResult pami_monte_carlo(const Constellation& c, const ChannelParams& params,
                                std::uint64_t n_samples, std::uint64_t seed, unsigned threads) {
    return evaluate_monte_carlo(c, params, Objective::pami, n_samples, seed, threads);
}

}  // namespace phasecon
