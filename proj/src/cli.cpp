#include "phasecon/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <limits>
#include <map>
#include <sstream>

#include "phasecon/analysis.hpp"
#include "phasecon/capacity.hpp"
#include "phasecon/io.hpp"
#include "phasecon/numeric.hpp"

namespace phasecon::cli {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct Failure {
    int code;
    std::string message;
};

[[noreturn]] void fail(int code, std::string message) { throw Failure{code, std::move(message)}; }

ConstellationFile load(const std::string& path) {
    try {
        return read_constellation(path);
    } catch (const Error& e) {
        fail(kExitIoError, path + ": " + e.what());
    }
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
    if (path.empty() || path == "-") {
        out << text;
    } else {
        write_text_file(path, text);
    }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json params_json(const ChannelParams& p) {
    return json{{"snr_db", p.snr_db()},
                {"pnsd_deg", p.pnsd_deg()},
                {"k_n", p.k_n()},
                {"k_phi", number_or_null(p.k_phi())}};
}

json result_json(const CapacityResult& r) {
    json j;
    j["bits"] = r.bits;
    j["raw_bits"] = r.raw_bits;
    j["std_error"] = r.std_error;
    j["method"] = method_name(r.method);
    j["objective"] = objective_name(r.objective);
    j["m"] = r.m;
    j["quad_degree"] = r.quad_degree;
    j["samples"] = r.samples;
    j["params"] = params_json(r.params);
    j["fingerprint"] = r.fingerprint;
    j["out_of_range"] = r.out_of_range;
    j["warnings"] = r.warnings;
    return j;
}

void print_warnings(const std::vector<std::string>& warnings, std::ostream& err) {
    for (const auto& w : warnings) err << "warning: " << w << '\n';
}

unsigned threads_of(const RunConfig& cfg) {
    return cfg.threads == 0 ? default_thread_count() : cfg.threads;
}

QuadratureGrid grid_of(const RunConfig& cfg) {
    if (cfg.quad_degree < 1 || cfg.quad_degree > 30) {
        fail(kExitInvalidParams, "--quad-degree must lie in [1, 30]");
    }
    return QuadratureGrid(cfg.quad_degree);
}

std::vector<ApskRing> parse_rings(const std::string& text) {
    std::vector<ApskRing> rings;
    std::stringstream all(text);
    std::string item;
    while (std::getline(all, item, ',')) {
        ApskRing ring;
        char c1 = 0, c2 = 0;
        double phase_deg = 0.0;
        std::istringstream is(item);
        if (!(is >> ring.count >> c1 >> ring.radius >> c2 >> phase_deg) || c1 != ':' || c2 != ':') {
            fail(kExitInvalidParams, "ring '" + item + "' is not count:radius:phase_deg");
        }
        ring.phase = deg_to_rad(phase_deg);
        rings.push_back(ring);
    }
    return rings;
}

int cmd_reference(const RunConfig& cfg, std::ostream& out) {
    const auto rings = parse_rings(cfg.rings);
    const auto c = reference_constellation(parse_reference_kind(cfg.reference_kind), cfg.m_points,
                                           rings);
    emit(cfg.output, to_json(c), out);
    return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    const auto file = load(cfg.inputs.at(0));
    const auto params = ChannelParams::from_snr_pnsd(cfg.snr_db, cfg.pnsd_deg);
    const auto r = evaluate_quadrature(file.constellation, params, grid_of(cfg),
                                       parse_objective(cfg.objective), threads_of(cfg));
    print_warnings(r.warnings, err);
    const std::string text = result_json(r).dump(2) + "\n";
    out << text;
    if (!cfg.output.empty()) write_text_file(cfg.output, text);
    return kExitOk;
}

fs::path default_trace_path(const std::string& output) {
    fs::path p(output);
    p.replace_extension();
    p += ".trace.csv";
    return p;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.output.empty()) fail(kExitInvalidParams, "--out is required");
    const auto params = ChannelParams::from_snr_pnsd(cfg.snr_db, cfg.pnsd_deg);
    const Objective objective = parse_objective(cfg.objective);
    const auto r = sa_optimize(cfg.m_points, params, objective, grid_of(cfg), cfg.sa);
    print_warnings(r.warnings, err);
    const ConstellationMeta meta{objective_name(objective), cfg.snr_db, cfg.pnsd_deg, cfg.sa.seed};
    write_constellation(cfg.output, r.best, meta);
    const fs::path trace =
        cfg.trace_output.empty() ? default_trace_path(cfg.output) : fs::path(cfg.trace_output);
    write_text_file(trace, trace_to_csv(r.trace));
    json j;
    j["output"] = cfg.output;
    j["trace"] = trace.string();
    j["objective"] = objective_name(objective);
    j["best_bits"] = r.best_bits;
    j["initial_bits"] = r.initial_bits;
    j["accepted_moves"] = r.accepted_moves;
    j["rejected_collisions"] = r.rejected_collisions;
    j["fingerprint"] = fingerprint(r.best);
    out << j.dump(2) << '\n';
    return kExitOk;
}

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    if (cfg.samples < kMinMonteCarloSamples) {
        fail(kExitInvalidParams, "--samples must be at least " +
                                     std::to_string(kMinMonteCarloSamples));
    }
    const auto file = load(cfg.inputs.at(0));
    const auto params = ChannelParams::from_snr_pnsd(cfg.snr_db, cfg.pnsd_deg);
    const Objective objective = parse_objective(cfg.objective);
    const unsigned threads = threads_of(cfg);
    const auto q = evaluate_quadrature(file.constellation, params, grid_of(cfg), objective, threads);
    const auto mc = evaluate_monte_carlo(file.constellation, params, objective, cfg.samples,
                                         cfg.mc_seed, threads);
    print_warnings(q.warnings, err);
    print_warnings(mc.warnings, err);
    const double diff = std::abs(q.bits - mc.bits);
    const double tol = std::max(0.03, 3.0 * mc.std_error);
    const bool pass = diff <= tol;
    json j;
    j["objective"] = objective_name(objective);
    j["params"] = params_json(params);
    j["quadrature_bits"] = q.bits;
    j["quad_degree"] = q.quad_degree;
    j["monte_carlo_bits"] = mc.bits;
    j["monte_carlo_std_error"] = mc.std_error;
    j["samples"] = mc.samples;
    j["seed"] = cfg.mc_seed;
    j["difference"] = diff;
    j["tolerance"] = tol;
    j["pass"] = pass;
    out << j.dump(2) << '\n';
    return pass ? kExitOk : kExitValidationFailed;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out) {
    const auto file = load(cfg.inputs.at(0));
    const auto xs = linear_range(cfg.from, cfg.to, cfg.step);
    const Objective objective = parse_objective(cfg.objective);
    CapacityCurve curve;
    if (cfg.axis == "snr") {
        curve = snr_sweep(file.constellation, cfg.pnsd_deg, xs, objective, grid_of(cfg),
                          threads_of(cfg));
    } else if (cfg.axis == "pnsd") {
        curve = pnsd_sweep(file.constellation, cfg.snr_db, xs, objective, grid_of(cfg),
                           threads_of(cfg));
    } else {
        fail(kExitInvalidParams, "--axis must be snr or pnsd");
    }
    emit(cfg.output, curve_to_csv(curve), out);
    return kExitOk;
}

int cmd_campaign(const RunConfig& cfg, std::ostream& out) {
    if (cfg.output.empty()) fail(kExitInvalidParams, "--out-dir is required");
    const Objective objective = parse_objective(cfg.objective);
    const auto campaign = design_campaign(cfg.m_points, cfg.snr_list, cfg.pnsd_list, objective,
                                          cfg.sa, grid_of(cfg), threads_of(cfg), cfg.warm_start);
    std::error_code ec;
    fs::create_directories(cfg.output, ec);
    if (ec) fail(kExitIoError, "cannot create " + cfg.output + ": " + ec.message());
    std::ostringstream index;
    index << "snr_db,pnsd_deg,seed,bits,fingerprint,file\n";
    for (std::size_t i = 0; i < cfg.snr_list.size(); ++i) {
        for (std::size_t j = 0; j < cfg.pnsd_list.size(); ++j) {
            const DesignPoint at{cfg.snr_list[i], cfg.pnsd_list[j]};
            const auto& cell = campaign.at(at);
            const fs::path file = fs::path(cfg.output) /
                                  ("design_s" + std::to_string(i) + "_p" + std::to_string(j) + ".json");
            write_constellation(file, cell.constellation,
                                ConstellationMeta{objective_name(objective), at.snr_db,
                                                  at.pnsd_deg, cell.seed});
            index << format_double(at.snr_db) << ',' << format_double(at.pnsd_deg) << ','
                  << cell.seed << ',' << format_double(cell.bits) << ','
                  << fingerprint(cell.constellation) << ',' << file.string() << '\n';
        }
    }
    write_text_file(fs::path(cfg.output) / "index.csv", index.str());
    out << index.str();
    return kExitOk;
}

int cmd_mismatch(const RunConfig& cfg, std::ostream& out) {
    std::map<DesignPoint, Constellation> designs;
    for (const auto& path : cfg.inputs) {
        auto file = load(path);
        if (!file.meta) fail(kExitInvalidParams, path + ": design file carries no meta block");
        const DesignPoint at{file.meta->snr_db, file.meta->pnsd_deg};
        if (!designs.emplace(at, std::move(file.constellation)).second) {
            fail(kExitInvalidParams, path + ": duplicate design point " + design_label(at));
        }
    }
    if (cfg.matrix != "loss" && cfg.matrix != "bits") {
        fail(kExitInvalidParams, "--matrix must be loss or bits");
    }
    const auto report = mismatch_matrix(designs, cfg.snr_list, cfg.pnsd_list, grid_of(cfg),
                                        parse_objective(cfg.objective), threads_of(cfg));
    emit(cfg.output, mismatch_to_csv(report, cfg.matrix == "loss" ? MatrixKind::loss : MatrixKind::bits),
         out);
    return kExitOk;
}

int cmd_gap(const RunConfig& cfg, std::ostream& out) {
    const auto left = load(cfg.inputs.at(0));
    const auto right = load(cfg.inputs.at(1));
    const Objective lo = parse_objective(cfg.left_objective);
    const Objective ro = parse_objective(cfg.right_objective);
    const auto g = pragmatic_gap(left.constellation, right.constellation, cfg.pnsd_deg,
                                 grid_of(cfg), cfg.target_bits, lo, ro);
    json j;
    j["pnsd_deg"] = cfg.pnsd_deg;
    j["target_bits"] = cfg.target_bits;
    j["left_objective"] = objective_name(lo);
    j["right_objective"] = objective_name(ro);
    j["snr_left_db"] = g.snr_left;
    j["snr_right_db"] = g.snr_right;
    j["gap_db"] = g.gap_db;
    j["bracket_db"] = g.bracket_db;
    j["iterations"] = g.iterations;
    out << j.dump(2) << '\n';
    return kExitOk;
}

void add_channel(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--snr-db", cfg.snr_db, "Channel SNR in dB");
    sub->add_option("--pnsd-deg", cfg.pnsd_deg, "Phase-noise standard deviation in degrees")
        ->check(CLI::NonNegativeNumber);
}

void add_objective(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--objective", cfg.objective, "AMI or PAMI")
        ->transform(CLI::IsMember({"AMI", "PAMI"}, CLI::ignore_case));
}

void add_grid(CLI::App* sub, RunConfig& cfg) {
    sub->add_option("--quad-degree", cfg.quad_degree, "Gauss-Hermite nodes per dimension")
        ->check(CLI::Range(1, 30));
}

void add_sa(CLI::App* sub, RunConfig& cfg) {
    auto& sa = cfg.sa;
    sub->add_option("--m-points", cfg.m_points, "Constellation size (power of two)");
    sub->add_option("--seed", sa.seed, "Annealing seed");
    sub->add_option("--iterations", sa.iterations, "Total annealing steps over all passes");
    sub->add_option("--t-initial", sa.t_initial, "Initial temperature (bits)");
    sub->add_option("--t-final", sa.t_final, "Final temperature (bits)");
    sub->add_option("--d-initial", sa.d_initial, "Initial maximum displacement");
    sub->add_option("--d-final", sa.d_final, "Final maximum displacement");
    sub->add_option("--label-swap-prob", sa.label_swap_prob,
                    "Probability of a label swap move (PAMI only)");
    sub->add_option("--reanneal", sa.reanneal_count, "Restarts from the best point");
    sub->add_option("--trace-every", sa.trace_every, "Trace sampling period in steps");
}

}  // namespace

std::vector<double> linear_range(double from, double to, double step) {
    if (!(step > 0.0) || !std::isfinite(from) || !std::isfinite(to) || to < from) {
        throw Error(Errc::invalid_argument, "range needs from <= to and step > 0");
    }
    const auto n = static_cast<std::size_t>(std::floor((to - from) / step + 1e-9)) + 1;
    std::vector<double> xs(n);
    for (std::size_t i = 0; i < n; ++i) xs[i] = from + static_cast<double>(i) * step;
    return xs;
}

std::string run_config_to_json(const RunConfig& c) {
    json sa{{"iterations", c.sa.iterations},   {"t_initial", c.sa.t_initial},
            {"t_final", c.sa.t_final},         {"d_initial", c.sa.d_initial},
            {"d_final", c.sa.d_final},         {"label_swap_prob", c.sa.label_swap_prob},
            {"seed", c.sa.seed},               {"reanneal_count", c.sa.reanneal_count},
            {"trace_every", c.sa.trace_every}};
    json j{{"command", c.command},
           {"inputs", c.inputs},
           {"output", c.output},
           {"trace_output", c.trace_output},
           {"snr_db", c.snr_db},
           {"pnsd_deg", c.pnsd_deg},
           {"objective", c.objective},
           {"quad_degree", c.quad_degree},
           {"m_points", c.m_points},
           {"sa", sa},
           {"samples", c.samples},
           {"mc_seed", c.mc_seed},
           {"reference_kind", c.reference_kind},
           {"rings", c.rings},
           {"axis", c.axis},
           {"from", c.from},
           {"to", c.to},
           {"step", c.step},
           {"snr_list", c.snr_list},
           {"pnsd_list", c.pnsd_list},
           {"matrix", c.matrix},
           {"target_bits", c.target_bits},
           {"left_objective", c.left_objective},
           {"right_objective", c.right_objective},
           {"warm_start", c.warm_start},
           {"threads", c.threads}};
    return j.dump(2) + "\n";
}

RunConfig run_config_from_json(const std::string& text) {
    try {
        const auto j = json::parse(text);
        RunConfig c;
        j.at("command").get_to(c.command);
        j.at("inputs").get_to(c.inputs);
        j.at("output").get_to(c.output);
        j.at("trace_output").get_to(c.trace_output);
        j.at("snr_db").get_to(c.snr_db);
        j.at("pnsd_deg").get_to(c.pnsd_deg);
        j.at("objective").get_to(c.objective);
        j.at("quad_degree").get_to(c.quad_degree);
        j.at("m_points").get_to(c.m_points);
        const auto& sa = j.at("sa");
        sa.at("iterations").get_to(c.sa.iterations);
        sa.at("t_initial").get_to(c.sa.t_initial);
        sa.at("t_final").get_to(c.sa.t_final);
        sa.at("d_initial").get_to(c.sa.d_initial);
        sa.at("d_final").get_to(c.sa.d_final);
        sa.at("label_swap_prob").get_to(c.sa.label_swap_prob);
        sa.at("seed").get_to(c.sa.seed);
        sa.at("reanneal_count").get_to(c.sa.reanneal_count);
        sa.at("trace_every").get_to(c.sa.trace_every);
        j.at("samples").get_to(c.samples);
        j.at("mc_seed").get_to(c.mc_seed);
        j.at("reference_kind").get_to(c.reference_kind);
        j.at("rings").get_to(c.rings);
        j.at("axis").get_to(c.axis);
        j.at("from").get_to(c.from);
        j.at("to").get_to(c.to);
        j.at("step").get_to(c.step);
        j.at("snr_list").get_to(c.snr_list);
        j.at("pnsd_list").get_to(c.pnsd_list);
        j.at("matrix").get_to(c.matrix);
        j.at("target_bits").get_to(c.target_bits);
        j.at("left_objective").get_to(c.left_objective);
        j.at("right_objective").get_to(c.right_objective);
        j.at("warm_start").get_to(c.warm_start);
        j.at("threads").get_to(c.threads);
        return c;
    } catch (const json::exception& e) {
        throw Error(Errc::format_error, std::string("run config: ") + e.what());
    }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    RunConfig cfg;
    bool print_config = false;

    CLI::App app{"Constellation design and information-rate evaluation under phase noise",
                 "phasecon"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.add_flag("--print-config", print_config,
                 "Print the resolved configuration as JSON instead of running");
    app.add_option("--threads", cfg.threads,
                   "Worker threads; 0 reads PHASECON_THREADS and falls back to 1");

    auto* reference = app.add_subcommand("reference", "Write a PSK, QAM or APSK constellation");
    reference->add_option("--kind", cfg.reference_kind, "psk, qam or apsk");
    reference->add_option("--m-points", cfg.m_points, "Constellation size");
    reference->add_option("--rings", cfg.rings,
                          "APSK rings as count:radius:phase_deg,... (empty: built-in layout)");
    reference->add_option("--out", cfg.output, "Output file ('' or '-' for stdout)");

    auto* evaluate = app.add_subcommand("evaluate", "Quadrature AMI or PAMI of a constellation");
    evaluate->add_option("file", cfg.inputs, "Constellation JSON")->required()->expected(1)->default_str("");
    add_channel(evaluate, cfg);
    add_objective(evaluate, cfg);
    add_grid(evaluate, cfg);
    evaluate->add_option("--out", cfg.output, "Also write the result JSON here");

    auto* optimize = app.add_subcommand("optimize", "Simulated-annealing constellation design");
    add_channel(optimize, cfg);
    add_objective(optimize, cfg);
    add_grid(optimize, cfg);
    add_sa(optimize, cfg);
    optimize->add_option("--out", cfg.output, "Output constellation JSON")->required();
    optimize->add_option("--trace", cfg.trace_output,
                         "Trace CSV ('' writes <out stem>.trace.csv)");

    auto* validate = app.add_subcommand("validate", "Compare quadrature with Monte Carlo");
    validate->add_option("file", cfg.inputs, "Constellation JSON")->required()->expected(1)->default_str("");
    add_channel(validate, cfg);
    add_objective(validate, cfg);
    add_grid(validate, cfg);
    validate->add_option("--samples", cfg.samples, "Monte Carlo sample count");
    validate->add_option("--seed", cfg.mc_seed, "Monte Carlo seed");

    auto* sweep = app.add_subcommand("sweep", "Capacity curve over SNR or PNSD");
    sweep->add_option("file", cfg.inputs, "Constellation JSON")->required()->expected(1)->default_str("");
    add_channel(sweep, cfg);
    add_objective(sweep, cfg);
    add_grid(sweep, cfg);
    sweep->add_option("--axis", cfg.axis, "snr or pnsd")
        ->check(CLI::IsMember({"snr", "pnsd"}));
    sweep->add_option("--from", cfg.from, "First abscissa");
    sweep->add_option("--to", cfg.to, "Last abscissa (inclusive)");
    sweep->add_option("--step", cfg.step, "Abscissa step");
    sweep->add_option("--out", cfg.output, "Output CSV ('' or '-' for stdout)");

    auto* campaign = app.add_subcommand("campaign", "One design per (SNR, PNSD) cell");
    add_objective(campaign, cfg);
    add_grid(campaign, cfg);
    add_sa(campaign, cfg);
    campaign->add_option("--snr-list", cfg.snr_list, "Design SNRs in dB")
        ->delimiter(',')
        ->required();
    campaign->add_option("--pnsd-list", cfg.pnsd_list, "Design PNSDs in degrees")
        ->delimiter(',')
        ->required();
    campaign->add_flag("--warm-start", cfg.warm_start,
                       "Start each cell from the previous cell's design (row-major)");
    campaign->add_option("--out-dir", cfg.output, "Directory for design files")->required();

    auto* mismatch = app.add_subcommand("mismatch", "Evaluate designs away from their design point");
    mismatch->add_option("designs", cfg.inputs, "Design JSON files with meta")->required()->default_str("");
    add_objective(mismatch, cfg);
    add_grid(mismatch, cfg);
    mismatch->add_option("--eval-snr", cfg.snr_list, "Evaluation SNRs in dB")
        ->delimiter(',')
        ->required();
    mismatch->add_option("--eval-pnsd", cfg.pnsd_list, "Evaluation PNSDs in degrees")
        ->delimiter(',')
        ->required();
    mismatch->add_option("--matrix", cfg.matrix, "loss or bits")
        ->check(CLI::IsMember({"loss", "bits"}));
    mismatch->add_option("--out", cfg.output, "Output CSV ('' or '-' for stdout)");

    auto* gap = app.add_subcommand("gap", "SNR gap between two curves at a target rate");
    gap->add_option("files", cfg.inputs, "Left and right constellation JSON")
        ->required()
        ->default_str("")
        ->expected(2);
    gap->add_option("--pnsd-deg", cfg.pnsd_deg, "Phase-noise standard deviation in degrees")
        ->check(CLI::NonNegativeNumber);
    gap->add_option("--target", cfg.target_bits, "Target rate in bits per symbol");
    gap->add_option("--left-objective", cfg.left_objective, "Objective of the left curve")
        ->transform(CLI::IsMember({"AMI", "PAMI"}, CLI::ignore_case));
    gap->add_option("--right-objective", cfg.right_objective, "Objective of the right curve")
        ->transform(CLI::IsMember({"AMI", "PAMI"}, CLI::ignore_case));
    add_grid(gap, cfg);

    std::vector<const char*> argv{"phasecon"};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInvalidParams;
    }
    cfg.command = app.get_subcommands().front()->get_name();

    if (print_config) {
        out << run_config_to_json(cfg);
        return kExitOk;
    }

    try {
        if (cfg.command == "reference") return cmd_reference(cfg, out);
        if (cfg.command == "evaluate") return cmd_evaluate(cfg, out, err);
        if (cfg.command == "optimize") return cmd_optimize(cfg, out, err);
        if (cfg.command == "validate") return cmd_validate(cfg, out, err);
        if (cfg.command == "sweep") return cmd_sweep(cfg, out);
        if (cfg.command == "campaign") return cmd_campaign(cfg, out);
        if (cfg.command == "mismatch") return cmd_mismatch(cfg, out);
        if (cfg.command == "gap") return cmd_gap(cfg, out);
    } catch (const Failure& f) {
        err << "error: " << f.message << '\n';
        return f.code;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == Errc::format_error ? kExitIoError : kExitInvalidParams;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitInvalidParams;
    }
    err << "error: unknown command " << cfg.command << '\n';
    return kExitInvalidParams;
}

}  // namespace phasecon::cli
