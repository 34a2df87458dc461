#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "phasecon/model.hpp"
#include "phasecon/quadrature.hpp"

namespace phasecon {

enum class Objective { ami, pami };
enum class Method { quadrature, monte_carlo };

const char* objective_name(Objective o) noexcept;  // "AMI" / "PAMI"
Objective parse_objective(const std::string& s);   // case-insensitive
const char* method_name(Method m) noexcept;

// Above this PNSD the Hermite phase nodes spread toward +-pi and the
// reweighted rule loses accuracy.
inline constexpr double kSurrogateWarnDeg = 30.0;

struct CapacityResult {
    double bits = 0.0;      // clamped to [0, m]
    double raw_bits = 0.0;  // before clamping
    double std_error = 0.0; // 0 for quadrature
    Method method = Method::quadrature;
    Objective objective = Objective::ami;
    ChannelParams params = ChannelParams::from_concentrations(1.0, 1.0);
    int m = 0;
    int quad_degree = 0;        // 0 for Monte Carlo
    std::uint64_t samples = 0;  // 0 for quadrature
    std::string fingerprint;
    bool out_of_range = false;  // raw value outside [-0.01, m + 0.01]
    std::vector<std::string> warnings;
};

// Per-(transmitted point, grid node, hypothesis) decision metrics under the
// max-log phase approximation, plus the AMI / PAMI reduction over them.
// Metric entries do not depend on the labeling, so a label swap only reruns
// the reduction. Values are bit-identical to evaluate_quadrature.
class MetricTable {
public:
    MetricTable(const ChannelParams& params, const QuadratureGrid& grid,
                const Constellation& c, unsigned threads = 1);

    // Recompute every entry for a new constellation of the same size.
    void reset(const Constellation& updated);
    // Labels changed only; metric entries are label-independent.
    void relabel(const Constellation& updated);

    // Unclamped objective in bits.
    double objective_bits(Objective objective) const;

    const Constellation& constellation() const noexcept { return c_; }

    struct Node {
        cplx noise;
        cplx rotation;
        double weight;
    };

private:
    void fill_row(std::size_t x);

    ChannelParams params_;
    std::vector<Node> nodes_;
    double weight_total_ = 0.0;
    Constellation c_;
    unsigned threads_;
    std::vector<double> table_;   // [x][node][u]
};

CapacityResult ami_quadrature(const Constellation& c, const ChannelParams& params,
                              const QuadratureGrid& grid, unsigned threads = 1);
CapacityResult pami_quadrature(const Constellation& c, const ChannelParams& params,
                               const QuadratureGrid& grid, unsigned threads = 1);
CapacityResult evaluate_quadrature(const Constellation& c, const ChannelParams& params,
                                   const QuadratureGrid& grid, Objective objective,
                                   unsigned threads = 1);

inline constexpr std::uint64_t kMinMonteCarloSamples = 1000;
// Starting trapezoid size for the per-sample likelihoods of the Monte Carlo
// estimators; exact_log_likelihood doubles it until converged.
inline constexpr int kMonteCarloLikelihoodGrid = 256;

// Sampling estimators with the numerically integrated likelihood. Samples
// are drawn in fixed-size blocks with independent seeded streams, so the
// result does not depend on `threads`.
CapacityResult ami_monte_carlo(const Constellation& c, const ChannelParams& params,
                               std::uint64_t n_samples, std::uint64_t seed,
                               unsigned threads = 1);
CapacityResult pami_monte_carlo(const Constellation& c, const ChannelParams& params,
                                std::uint64_t n_samples, std::uint64_t seed,
                                unsigned threads = 1);
CapacityResult evaluate_monte_carlo(const Constellation& c, const ChannelParams& params,
                                    Objective objective, std::uint64_t n_samples,
                                    std::uint64_t seed, unsigned threads = 1);

// Zero-mean Tikhonov draw by rejection. Uniform proposal up to k = 50, a
// Gaussian proposal with variance pi^2/(4k) truncated to [-pi, pi] above
// (1 - cos t >= 2 t^2 / pi^2 bounds the ratio).
double sample_tikhonov(std::mt19937_64& rng, double k_phi);

}  // namespace phasecon
