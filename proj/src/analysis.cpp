#include "phasecon/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "phasecon/io.hpp"
#include "phasecon/numeric.hpp"

namespace phasecon {

const char* axis_name(Axis a) noexcept { return a == Axis::snr_db ? "snr_db" : "pnsd_deg"; }

namespace {

void require_increasing(const std::vector<double>& v, const char* what) {
    if (v.empty()) throw Error(Errc::invalid_argument, std::string(what) + " is empty");
    for (std::size_t i = 1; i < v.size(); ++i) {
        if (!(v[i] > v[i - 1])) {
            throw Error(Errc::invalid_argument, std::string(what) + " must be strictly increasing");
        }
    }
}

CapacityCurve sweep(const Constellation& c, Axis axis, double fixed,
                    const std::vector<double>& xs, Objective objective,
                    const QuadratureGrid& grid, unsigned threads) {
    require_increasing(xs, axis == Axis::snr_db ? "SNR list" : "PNSD list");
    CapacityCurve curve{axis, fixed, objective, fingerprint(c), c.bits_per_symbol(), {}};
    curve.points.resize(xs.size());
    parallel_for(xs.size(), threads, [&](std::size_t i) {
        const auto params = axis == Axis::snr_db ? ChannelParams::from_snr_pnsd(xs[i], fixed)
                                                 : ChannelParams::from_snr_pnsd(fixed, xs[i]);
        const auto r = evaluate_quadrature(c, params, grid, objective);
        curve.points[i] = {xs[i], r.bits, r.std_error};
    });
    return curve;
}

}  // namespace

CapacityCurve snr_sweep(const Constellation& c, double pnsd_deg,
                        const std::vector<double>& snr_list_db, Objective objective,
                        const QuadratureGrid& grid, unsigned threads) {
    return sweep(c, Axis::snr_db, pnsd_deg, snr_list_db, objective, grid, threads);
}

CapacityCurve pnsd_sweep(const Constellation& c, double snr_db,
                         const std::vector<double>& pnsd_list_deg, Objective objective,
                         const QuadratureGrid& grid, unsigned threads) {
    return sweep(c, Axis::pnsd_deg, snr_db, pnsd_list_deg, objective, grid, threads);
}

std::string curve_to_csv(const CapacityCurve& curve) {
    std::ostringstream os;
    os << "# abscissa_kind,fixed_param,objective,fingerprint\n";
    os << "# " << axis_name(curve.axis) << ',' << format_double(curve.fixed_param) << ','
       << objective_name(curve.objective) << ',' << curve.fingerprint << '\n';
    os << "x,bits,stderr\n";
    for (const auto& p : curve.points) {
        os << format_double(p.x) << ',' << format_double(p.bits) << ','
           << format_double(p.std_error) << '\n';
    }
    return os.str();
}

std::string design_label(const DesignPoint& p) {
    return format_double(p.snr_db) + "dB/" + format_double(p.pnsd_deg) + "deg";
}

std::uint64_t cell_seed(std::uint64_t base_seed, std::size_t snr_index, std::size_t pnsd_index) {
    return base_seed ^ splitmix64((static_cast<std::uint64_t>(snr_index) << 32) |
                                  static_cast<std::uint64_t>(pnsd_index));
}

Campaign design_campaign(int M, const std::vector<double>& snr_list_db,
                         const std::vector<double>& pnsd_list_deg, Objective objective,
                         const SAConfig& config, const QuadratureGrid& grid, unsigned threads,
                         bool chain_warm_start) {
    if (snr_list_db.empty() || pnsd_list_deg.empty()) {
        throw Error(Errc::invalid_argument, "campaign grids must be non-empty");
    }
    config.validate();
    const std::size_t ns = snr_list_db.size();
    const std::size_t np = pnsd_list_deg.size();
    std::vector<std::optional<CampaignCell>> cells(ns * np);
    auto run_cell = [&](std::size_t idx, const std::optional<Constellation>& initial) {
        const std::size_t i = idx / np;
        const std::size_t j = idx % np;
        SAConfig cfg = config;
        cfg.seed = cell_seed(config.seed, i, j);
        const auto params = ChannelParams::from_snr_pnsd(snr_list_db[i], pnsd_list_deg[j]);
        auto r = sa_optimize(M, params, objective, grid, cfg, initial);
        cells[idx] = CampaignCell{std::move(r.best), cfg.seed, r.best_bits};
    };
    if (chain_warm_start) {
        for (std::size_t idx = 0; idx < cells.size(); ++idx) {
            run_cell(idx, idx == 0 ? std::nullopt
                                   : std::optional<Constellation>(cells[idx - 1]->constellation));
        }
    } else {
        parallel_for(ns * np, threads, [&](std::size_t idx) { run_cell(idx, std::nullopt); });
    }
    Campaign out;
    for (std::size_t idx = 0; idx < cells.size(); ++idx) {
        out.emplace(DesignPoint{snr_list_db[idx / np], pnsd_list_deg[idx % np]},
                    std::move(*cells[idx]));
    }
    return out;
}

MismatchReport mismatch_matrix(const std::map<DesignPoint, Constellation>& designs,
                               const std::vector<double>& eval_snr_list_db,
                               const std::vector<double>& eval_pnsd_list_deg,
                               const QuadratureGrid& grid, Objective objective,
                               unsigned threads) {
    if (designs.empty()) throw Error(Errc::invalid_argument, "no designs to compare");
    if (eval_snr_list_db.empty() || eval_pnsd_list_deg.empty()) {
        throw Error(Errc::invalid_argument, "evaluation grids must be non-empty");
    }
    MismatchReport rep;
    rep.objective = objective;
    std::vector<const Constellation*> cs;
    for (const auto& [at, c] : designs) {
        rep.designs.push_back(at);
        cs.push_back(&c);
    }
    for (double s : eval_snr_list_db) {
        for (double p : eval_pnsd_list_deg) rep.evaluations.push_back({s, p});
    }
    const std::size_t nd = rep.designs.size();
    const std::size_t ne = rep.evaluations.size();
    rep.bits.assign(nd, std::vector<double>(ne));
    parallel_for(nd * ne, threads, [&](std::size_t idx) {
        const std::size_t d = idx / ne;
        const std::size_t e = idx % ne;
        const auto& at = rep.evaluations[e];
        const auto params = ChannelParams::from_snr_pnsd(at.snr_db, at.pnsd_deg);
        rep.bits[d][e] = evaluate_quadrature(*cs[d], params, grid, objective).bits;
    });
    rep.reference_bits.resize(ne);
    for (std::size_t e = 0; e < ne; ++e) {
        const auto it = std::find(rep.designs.begin(), rep.designs.end(), rep.evaluations[e]);
        if (it != rep.designs.end()) {
            rep.reference_bits[e] = rep.bits[it - rep.designs.begin()][e];
        } else {
            double best = rep.bits[0][e];
            for (std::size_t d = 1; d < nd; ++d) best = std::max(best, rep.bits[d][e]);
            rep.reference_bits[e] = best;
        }
    }
    rep.loss.assign(nd, std::vector<double>(ne));
    for (std::size_t d = 0; d < nd; ++d) {
        for (std::size_t e = 0; e < ne; ++e) {
            rep.loss[d][e] = rep.reference_bits[e] - rep.bits[d][e];
        }
    }
    return rep;
}

std::string mismatch_to_csv(const MismatchReport& report, MatrixKind kind) {
    std::ostringstream os;
    os << "# " << (kind == MatrixKind::loss ? "loss" : "bits") << ','
       << objective_name(report.objective) << '\n';
    os << "design\\eval";
    for (const auto& e : report.evaluations) os << ',' << design_label(e);
    os << '\n';
    const auto& mat = kind == MatrixKind::loss ? report.loss : report.bits;
    for (std::size_t d = 0; d < report.designs.size(); ++d) {
        os << design_label(report.designs[d]);
        for (double v : mat[d]) os << ',' << format_double(v);
        os << '\n';
    }
    return os.str();
}

double snr_at_bits(const Constellation& c, double pnsd_deg, const QuadratureGrid& grid,
                   double target_bits, Objective objective, double* bracket_db, int* iterations) {
    if (!(target_bits < c.bits_per_symbol()) || !(target_bits > 0.0)) {
        throw Error(Errc::invalid_argument, "target rate must lie in (0, m)");
    }
    auto f = [&](double snr) {
        return evaluate_quadrature(c, ChannelParams::from_snr_pnsd(snr, pnsd_deg), grid, objective)
            .bits;
    };
    double lo = kGapSnrLow;
    double hi = kGapSnrHigh;
    if (f(hi) < target_bits || f(lo) >= target_bits) {
        throw Error(Errc::target_unreachable,
                    "target " + format_double(target_bits) + " bits is not crossed within [" +
                        format_double(lo) + ", " + format_double(hi) + "] dB");
    }
    int it = 0;
    while (hi - lo >= kGapToleranceDb && it < kGapMaxIterations) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= target_bits ? hi : lo) = mid;
        ++it;
    }
    if (bracket_db) *bracket_db = hi - lo;
    if (iterations) *iterations = it;
    return 0.5 * (lo + hi);
}

GapResult pragmatic_gap(const Constellation& left_c, const Constellation& right_c,
                        double pnsd_deg, const QuadratureGrid& grid, double target_bits,
                        Objective left, Objective right) {
    GapResult g{};
    double bl = 0.0, br = 0.0;
    int il = 0, ir = 0;
    g.snr_left = snr_at_bits(left_c, pnsd_deg, grid, target_bits, left, &bl, &il);
    g.snr_right = snr_at_bits(right_c, pnsd_deg, grid, target_bits, right, &br, &ir);
    g.gap_db = g.snr_right - g.snr_left;
    g.bracket_db = std::max(bl, br);
    g.iterations = std::max(il, ir);
    return g;
}

}  // namespace phasecon
