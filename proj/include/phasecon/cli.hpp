#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "phasecon/annealer.hpp"

namespace phasecon::cli {

enum ExitCode : int {
    kExitOk = 0,
    kExitValidationFailed = 1,
    kExitIoError = 2,
    kExitInvalidParams = 3,
};

// Fully resolved settings of one invocation.
struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::string output;
    std::string trace_output;
    double snr_db = 12.0;
    double pnsd_deg = 0.0;
    std::string objective = "AMI";
    int quad_degree = 7;
    int m_points = 8;
    SAConfig sa;
    std::uint64_t samples = 100000;
    std::uint64_t mc_seed = 1;
    std::string reference_kind = "psk";
    std::string rings;
    std::string axis = "snr";
    double from = 0.0;
    double to = 20.0;
    double step = 1.0;
    std::vector<double> snr_list;
    std::vector<double> pnsd_list;
    std::string matrix = "loss";
    double target_bits = 2.5;
    std::string left_objective = "AMI";
    std::string right_objective = "PAMI";
    bool warm_start = false;
    unsigned threads = 0;  // 0: PHASECON_THREADS or 1

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

std::string run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const std::string& text);

// Abscissae from, from + step, ... up to `to` (inclusive within 1e-9 step).
std::vector<double> linear_range(double from, double to, double step);

// Entry point shared by the executable and the tests. args excludes the
// program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace phasecon::cli
