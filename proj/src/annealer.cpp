#include "phasecon/annealer.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "phasecon/io.hpp"

namespace phasecon {

namespace {

constexpr double kCollisionDistance = 1e-9;

double geometric(double from, double to, std::uint64_t step, std::uint64_t n) {
    if (n <= 1 || from == to) return from;
    const double frac = static_cast<double>(step) / static_cast<double>(n - 1);
    return from * std::pow(to / from, frac);
}

bool has_collision(const Constellation& c, std::size_t moved) {
    for (std::size_t j = 0; j < c.size(); ++j) {
        if (j != moved && std::abs(c.point(j) - c.point(moved)) < kCollisionDistance) return true;
    }
    return false;
}

Constellation random_start(int M, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<cplx> pts(M);
    for (auto& p : pts) {
        const double r = std::sqrt(unit(rng));
        p = std::polar(r, 2.0 * std::numbers::pi * unit(rng));
    }
    std::vector<std::uint32_t> labels(M);
    for (int i = 0; i < M; ++i) labels[i] = static_cast<std::uint32_t>(i);
    std::shuffle(labels.begin(), labels.end(), rng);
    return normalize_average_power(Constellation::make(std::move(pts), std::move(labels)));
}

}  // namespace

void SAConfig::validate() const {
    auto bad = [](const std::string& what) { throw Error(Errc::invalid_argument, what); };
    if (iterations < 1) bad("iterations must be >= 1");
    if (!(t_final > 0.0) || !(t_initial >= t_final) || !std::isfinite(t_initial)) {
        bad("temperatures must satisfy t_initial >= t_final > 0");
    }
    if (!(d_final > 0.0) || !(d_initial >= d_final) || !std::isfinite(d_initial)) {
        bad("displacements must satisfy d_initial >= d_final > 0");
    }
    if (!(label_swap_prob >= 0.0 && label_swap_prob <= 1.0)) {
        bad("label_swap_prob must lie in [0, 1]");
    }
    if (reanneal_count < 0) bad("reanneal_count must be >= 0");
    if (static_cast<std::uint64_t>(reanneal_count) >= iterations) {
        bad("reanneal_count must be smaller than iterations");
    }
    if (trace_every < 1) bad("trace_every must be >= 1");
}

std::uint64_t SAConfig::pass_length(std::uint64_t p) const noexcept {
    const std::uint64_t base = iterations / passes();
    return p + 1 == passes() ? iterations - base * (passes() - 1) : base;
}

double SAConfig::cooling(std::uint64_t steps) const noexcept {
    if (steps <= 1) return 1.0;
    return std::pow(t_final / t_initial, 1.0 / static_cast<double>(steps - 1));
}

const char* move_type_name(MoveType t) noexcept {
    switch (t) {
        case MoveType::initial: return "initial";
        case MoveType::point: return "point";
        case MoveType::label: return "label";
    }
    return "?";
}

double displacement_schedule(std::uint64_t step, const SAConfig& config) {
    return geometric(config.d_initial, config.d_final, std::min(step, config.iterations - 1),
                     config.iterations);
}

double temperature_schedule(std::uint64_t step, const SAConfig& config) {
    return geometric(config.t_initial, config.t_final, std::min(step, config.iterations - 1),
                     config.iterations);
}

bool metropolis_accept(double delta, double temperature, double draw) {
    if (!(temperature > 0.0)) {
        throw Error(Errc::invalid_argument, "temperature must be positive");
    }
    if (delta >= 0.0) return true;
    return draw < std::exp(delta / temperature);
}

Constellation perturb_point(const Constellation& c, std::size_t index, double max_disp,
                            double u1, double u2) {
    if (index >= c.size()) {
        throw Error(Errc::index_out_of_range, "point index " + std::to_string(index) +
                                                  " out of range");
    }
    if (!(max_disp > 0.0)) {
        throw Error(Errc::invalid_argument, "max displacement must be positive");
    }
    std::vector<cplx> pts(c.points().begin(), c.points().end());
    pts[index] += std::polar(max_disp * std::sqrt(u1), 2.0 * std::numbers::pi * u2);
    return normalize_average_power(c.with_points(std::move(pts)));
}

Constellation swap_labels(const Constellation& c, std::size_t i, std::size_t j) {
    if (i >= c.size() || j >= c.size()) {
        throw Error(Errc::index_out_of_range, "label index out of range");
    }
    if (i == j) throw Error(Errc::invalid_argument, "swap_labels needs two distinct indices");
    std::vector<std::uint32_t> labels(c.labels().begin(), c.labels().end());
    std::swap(labels[i], labels[j]);
    return c.with_labels(std::move(labels));
}

SAResult sa_optimize(int M, const ChannelParams& params, Objective objective,
                     const QuadratureGrid& grid, const SAConfig& config,
                     const std::optional<Constellation>& initial) {
    if (M < 2 || !std::has_single_bit(static_cast<unsigned>(M))) {
        throw Error(Errc::size_not_power_of_two, "M = " + std::to_string(M) +
                                                     " is not a power of two >= 2");
    }
    config.validate();

    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick(0, M - 1);
    std::uniform_int_distribution<std::size_t> pick_other(0, M - 2);

    Constellation current = initial ? normalize_average_power(*initial) : random_start(M, rng);
    if (static_cast<int>(current.size()) != M) {
        throw Error(Errc::size_mismatch, "initial constellation has the wrong size");
    }

    SAResult out{current, 0.0, 0.0, {}, 0, 0, {}};
    const bool label_moves = objective == Objective::pami && config.label_swap_prob > 0.0;
    if (objective == Objective::pami && config.label_swap_prob == 0.0) {
        out.warnings.push_back("PAMI objective with label_swap_prob = 0: labeling is never explored");
    }

    MetricTable table(params, grid, current);
    MetricTable scratch = table;  // candidate of a point move
    double current_bits = table.objective_bits(objective);
    out.initial_bits = current_bits;
    out.best_bits = current_bits;
    out.trace.records.push_back(
        {0, config.t_initial, current_bits, current_bits, true, MoveType::initial});

    std::uint64_t global_step = 0;
    for (std::uint64_t pass = 0; pass < config.passes(); ++pass) {
        SAConfig pass_cfg = config;
        pass_cfg.iterations = config.pass_length(pass);
        if (pass > 0) {
            current = out.best;
            current_bits = out.best_bits;
            table.reset(current);
        }
        for (std::uint64_t step = 0; step < pass_cfg.iterations; ++step, ++global_step) {
            const double temperature = temperature_schedule(step, pass_cfg);
            const bool label_move = label_moves && unit(rng) < config.label_swap_prob;

            std::optional<Constellation> candidate;
            if (label_move) {
                const std::size_t i = pick(rng);
                std::size_t j = pick_other(rng);
                if (j >= i) ++j;
                candidate = swap_labels(current, i, j);
                table.relabel(*candidate);
            } else {
                const std::size_t k = pick(rng);
                const double u1 = unit(rng);
                const double u2 = unit(rng);
                try {
                    candidate = perturb_point(current, k, displacement_schedule(step, pass_cfg), u1, u2);
                    if (has_collision(*candidate, k)) candidate.reset();
                } catch (const Error& e) {
                    if (e.code() != Errc::duplicate_point) throw;
                }
                if (candidate) scratch.reset(*candidate);
            }
            MetricTable& evaluated = label_move ? table : scratch;

            bool accepted = false;
            double delta = 0.0;
            const double draw = unit(rng);
            if (candidate) {
                const double bits = evaluated.objective_bits(objective);
                delta = bits - current_bits;
                accepted = metropolis_accept(delta, temperature, draw);
                if (accepted) {
                    current = std::move(*candidate);
                    current_bits = bits;
                    ++out.accepted_moves;
                    if (!label_move) std::swap(table, scratch);
                    if (current_bits > out.best_bits) {
                        out.best = current;
                        out.best_bits = current_bits;
                    }
                } else if (label_move) {
                    table.relabel(current);
                }
            } else {
                ++out.rejected_collisions;
            }

            const bool last = global_step + 1 == config.iterations;
            if ((global_step + 1) % config.trace_every == 0 || last) {
                out.trace.records.push_back({global_step + 1, temperature, current_bits,
                                             out.best_bits, accepted,
                                             label_move ? MoveType::label : MoveType::point});
            }
        }
    }
    return out;
}

std::string trace_to_csv(const AnnealTrace& trace) {
    std::ostringstream os;
    os << "step,temperature,current_bits,best_bits,accepted,move_type\n";
    for (const auto& r : trace.records) {
        os << r.step << ',' << format_double(r.temperature) << ','
           << format_double(r.current_bits) << ',' << format_double(r.best_bits) << ','
           << (r.accepted ? 1 : 0) << ',' << move_type_name(r.move) << '\n';
    }
    return os.str();
}

}  // namespace phasecon
