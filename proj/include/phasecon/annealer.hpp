#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "phasecon/capacity.hpp"
#include "phasecon/model.hpp"
#include "phasecon/quadrature.hpp"

namespace phasecon {

// Annealing schedule. `iterations` is the total step budget, split evenly
// over 1 + reanneal_count passes; every pass restarts both schedules from
// their initial values at the best constellation found so far.
struct SAConfig {
    std::uint64_t iterations = 200000;
    double t_initial = 0.05;  // bits
    double t_final = 1e-5;
    double d_initial = 0.5;   // amplitude units
    double d_final = 0.005;
    double label_swap_prob = 0.1;  // used for the PAMI objective only
    std::uint64_t seed = 1;
    int reanneal_count = 3;
    std::uint64_t trace_every = 100;

    // Throws Error(invalid_argument). t_initial == t_final is allowed.
    void validate() const;
    std::uint64_t passes() const noexcept { return 1 + static_cast<std::uint64_t>(reanneal_count); }
    // Steps in pass p (the last pass takes the remainder).
    std::uint64_t pass_length(std::uint64_t p) const noexcept;
    // Per-step geometric temperature factor within a pass of `steps` steps.
    double cooling(std::uint64_t steps) const noexcept;

    friend bool operator==(const SAConfig&, const SAConfig&) = default;
};

enum class MoveType { initial, point, label };
const char* move_type_name(MoveType t) noexcept;

struct TraceRecord {
    std::uint64_t step;
    double temperature;
    double current_bits;
    double best_bits;
    bool accepted;
    MoveType move;
};

struct AnnealTrace {
    std::vector<TraceRecord> records;
};

struct SAResult {
    Constellation best;
    double best_bits;
    double initial_bits;
    AnnealTrace trace;
    std::uint64_t accepted_moves = 0;
    std::uint64_t rejected_collisions = 0;
    std::vector<std::string> warnings;
};

// Maximizes AMI or PAMI over unit-average-power sets of M points. Starts
// from `initial` (normalized) when given, otherwise from uniform points in
// the unit disc with a random labeling. Returns the best set visited.
SAResult sa_optimize(int M, const ChannelParams& params, Objective objective,
                     const QuadratureGrid& grid, const SAConfig& config,
                     const std::optional<Constellation>& initial = std::nullopt);

// Moves point `index` by max_disp * sqrt(u1) * exp(j 2 pi u2), then
// renormalizes. u1, u2 in [0, 1).
Constellation perturb_point(const Constellation& c, std::size_t index, double max_disp,
                            double u1, double u2);

Constellation swap_labels(const Constellation& c, std::size_t i, std::size_t j);

// delta >= 0 always accepts; otherwise accept iff draw < exp(delta / T).
bool metropolis_accept(double delta, double temperature, double draw);

// d_initial (d_final/d_initial)^(step/(iterations-1)).
double displacement_schedule(std::uint64_t step, const SAConfig& config);
// Same geometric law for the temperature.
double temperature_schedule(std::uint64_t step, const SAConfig& config);

// CSV: step,temperature,current_bits,best_bits,accepted,move_type
std::string trace_to_csv(const AnnealTrace& trace);

}  // namespace phasecon
