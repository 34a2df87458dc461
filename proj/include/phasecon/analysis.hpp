#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "phasecon/annealer.hpp"
#include "phasecon/capacity.hpp"

namespace phasecon {

enum class Axis { snr_db, pnsd_deg };
const char* axis_name(Axis a) noexcept;

struct CurvePoint {
    double x;
    double bits;
    double std_error;
};

struct CapacityCurve {
    Axis axis = Axis::snr_db;
    double fixed_param = 0.0;  // PNSD (deg) for SNR sweeps, SNR (dB) for PNSD sweeps
    Objective objective = Objective::ami;
    std::string fingerprint;
    int m = 0;
    std::vector<CurvePoint> points;
};

// One quadrature evaluation per abscissa. Lists must be non-empty and
// strictly increasing.
CapacityCurve snr_sweep(const Constellation& c, double pnsd_deg,
                        const std::vector<double>& snr_list_db, Objective objective,
                        const QuadratureGrid& grid, unsigned threads = 1);
CapacityCurve pnsd_sweep(const Constellation& c, double snr_db,
                         const std::vector<double>& pnsd_list_deg, Objective objective,
                         const QuadratureGrid& grid, unsigned threads = 1);

// Header comment lines "# abscissa_kind,fixed_param,objective,fingerprint"
// and their values, then "x,bits,stderr" and one row per point.
std::string curve_to_csv(const CapacityCurve& curve);

struct DesignPoint {
    double snr_db;
    double pnsd_deg;
    auto operator<=>(const DesignPoint&) const = default;
};

std::string design_label(const DesignPoint& p);

struct CampaignCell {
    Constellation constellation;
    std::uint64_t seed;
    double bits;  // objective at the design point
};

using Campaign = std::map<DesignPoint, CampaignCell>;

// Seed of cell (i, j) in a campaign grid: base ^ splitmix64(i << 32 | j).
std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t snr_index, std::size_t pnsd_index);

// One sa_optimize run per (SNR, PNSD) cell, seeded with
// cell_seed(config.seed, i, j). Cells are independent and may run
// concurrently unless chain_warm_start is set; then cells run in row-major
// order and each starts from the previous cell's design.
Campaign design_campaign(int M, const std::vector<double>& snr_list_db,
                         const std::vector<double>& pnsd_list_deg, Objective objective,
                         const SAConfig& config, const QuadratureGrid& grid,
                         unsigned threads = 1, bool chain_warm_start = false);

// bits[d][e]: design d evaluated at channel e. For each evaluation cell the
// reference is the design made for that exact cell when present, otherwise
// the best design there. loss = reference - bits.
struct MismatchReport {
    Objective objective = Objective::ami;
    std::vector<DesignPoint> designs;
    std::vector<DesignPoint> evaluations;
    std::vector<std::vector<double>> bits;
    std::vector<std::vector<double>> loss;
    std::vector<double> reference_bits;
};

MismatchReport mismatch_matrix(const std::map<DesignPoint, Constellation>& designs,
                               const std::vector<double>& eval_snr_list_db,
                               const std::vector<double>& eval_pnsd_list_deg,
                               const QuadratureGrid& grid, Objective objective = Objective::ami,
                               unsigned threads = 1);

enum class MatrixKind { loss, bits };
std::string mismatch_to_csv(const MismatchReport& report, MatrixKind kind = MatrixKind::loss);

struct GapResult {
    double gap_db;     // snr_right - snr_left
    double snr_left;   // where the left curve reaches the target
    double snr_right;
    double bracket_db; // final bisection bracket width (max of both)
    int iterations;    // max of both bisections
};

inline constexpr double kGapSnrLow = -10.0;
inline constexpr double kGapSnrHigh = 40.0;
inline constexpr double kGapToleranceDb = 0.01;
inline constexpr int kGapMaxIterations = 60;

// Horizontal distance at target_bits between the `left` curve of `left_c`
// (AMI by default) and the `right` curve of `right_c` (PAMI by default), at
// a fixed PNSD. Each crossing is found by bisection over [-10, 40] dB.
GapResult pragmatic_gap(const Constellation& left_c, const Constellation& right_c,
                        double pnsd_deg, const QuadratureGrid& grid, double target_bits,
                        Objective left = Objective::ami, Objective right = Objective::pami);

// SNR in dB at which the objective reaches target_bits (bisection).
double snr_at_bits(const Constellation& c, double pnsd_deg, const QuadratureGrid& grid,
                   double target_bits, Objective objective, double* bracket_db = nullptr,
                   int* iterations = nullptr);

}  // namespace phasecon
