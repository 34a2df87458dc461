// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status is 0 only when the failing criteria are exactly the known ones.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "phasecon/analysis.hpp"
#include "phasecon/annealer.hpp"
#include "phasecon/capacity.hpp"
#include "phasecon/cli.hpp"
#include "phasecon/io.hpp"
#include "phasecon/numeric.hpp"

using namespace phasecon;

namespace {

const QuadratureGrid kGrid7(7);
const QuadratureGrid kGrid15(15);

ChannelParams ch(double snr, double pnsd) { return ChannelParams::from_snr_pnsd(snr, pnsd); }

Constellation psk8() { return reference_constellation(ReferenceKind::psk, 8); }

struct Verdict {
    bool pass = true;
    std::vector<std::string> lines;

    void note(const char* fmt, auto... args) {
        char buf[512];
        std::snprintf(buf, sizeof buf, fmt, args...);
        lines.emplace_back(buf);
    }
    void require(bool ok, const char* fmt, auto... args) {
        pass = pass && ok;
        note(fmt, args...);
        lines.back().insert(0, ok ? "ok   " : "BAD  ");
    }
};

// Runs of sa_optimize shared between criteria.
struct Designs {
    std::map<std::pair<double, Objective>, SAResult> at12;  // (pnsd, objective) at 12 dB, seed 1

    const SAResult& get(double pnsd, Objective obj) {
        const auto key = std::make_pair(pnsd, obj);
        auto it = at12.find(key);
        if (it == at12.end()) {
            SAConfig cfg;
            cfg.seed = 1;
            it = at12.emplace(key, sa_optimize(8, ch(12.0, pnsd), obj, kGrid7, cfg)).first;
        }
        return it->second;
    }
};

Verdict criterion1() {
    Verdict v;
    const auto c = psk8();
    for (double snr : {3.0, 9.0, 15.0}) {
        for (double pnsd : {0.0, 5.0, 20.0}) {
            const auto q = ami_quadrature(c, ch(snr, pnsd), kGrid7);
            const auto mc = ami_monte_carlo(c, ch(snr, pnsd), 100000, 1, default_thread_count());
            const double diff = std::abs(q.bits - mc.bits);
            const double tol = std::max(0.03, 3.0 * mc.std_error);
            v.require(diff <= tol, "%4.0f dB %4.0f deg: quad %.4f  mc %.4f +- %.4f  |diff| %.4f <= %.4f",
                      snr, pnsd, q.bits, mc.bits, mc.std_error, diff, tol);
        }
    }
    return v;
}

Verdict criterion2() {
    Verdict v;
    std::mt19937_64 rng(20240601);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> snr(-5.0, 25.0), pnsd(0.0, 30.0);
    double worst = -1e9;
    int cases = 0;
    for (int t = 0; t < 200; ++t) {
        std::vector<cplx> pts(8);
        for (auto& p : pts) p = {gauss(rng), gauss(rng)};
        std::vector<std::uint32_t> labels(8);
        std::iota(labels.begin(), labels.end(), 0u);
        std::shuffle(labels.begin(), labels.end(), rng);
        const auto c = normalize_average_power(make_constellation(pts, labels));
        for (int k = 0; k < 4; ++k) {
            const auto p = ch(snr(rng), pnsd(rng));
            const double excess = pami_quadrature(c, p, kGrid7).raw_bits -
                                  ami_quadrature(c, p, kGrid7).raw_bits;
            worst = std::max(worst, excess);
            ++cases;
        }
    }
    v.require(worst <= 1e-6, "%d cases, max(pami - ami) = %.3e <= 1e-6", cases, worst);
    return v;
}

Verdict criterion3() {
    Verdict v;
    const auto c = psk8();
    for (double snr : {3.0, 9.0, 15.0}) {
        for (double pnsd : {0.0, 5.0, 20.0}) {
            const double a7 = ami_quadrature(c, ch(snr, pnsd), kGrid7).bits;
            const double a15 = ami_quadrature(c, ch(snr, pnsd), kGrid15).bits;
            v.require(std::abs(a7 - a15) <= 0.01, "%4.0f dB %4.0f deg: k=7 %.5f  k=15 %.5f  |diff| %.2e",
                      snr, pnsd, a7, a15, std::abs(a7 - a15));
        }
    }
    return v;
}

Verdict criterion4(Designs& designs) {
    Verdict v;
    for (double pnsd : {10.0, 20.0}) {
        const double ref = ami_quadrature(psk8(), ch(12.0, pnsd), kGrid7).bits;
        std::vector<double> bits;
        for (std::uint64_t seed : {1, 2, 3}) {
            double b = 0.0;
            if (seed == 1) {
                b = designs.get(pnsd, Objective::ami).best_bits;
            } else {
                SAConfig cfg;
                cfg.seed = seed;
                b = sa_optimize(8, ch(12.0, pnsd), Objective::ami, kGrid7, cfg).best_bits;
            }
            bits.push_back(b);
            v.require(b - ref >= 0.02, "12 dB %2.0f deg seed %llu: AMI %.4f vs 8-PSK %.4f, gain %.4f >= 0.02",
                      pnsd, static_cast<unsigned long long>(seed), b, ref, b - ref);
        }
        const auto [lo, hi] = std::minmax_element(bits.begin(), bits.end());
        v.require(*hi - *lo <= 0.02, "12 dB %2.0f deg: seed spread %.4f <= 0.02", pnsd, *hi - *lo);
    }
    return v;
}

Verdict criterion5(Designs& designs) {
    Verdict v;
    const auto eval = ch(30.0, 25.0);
    const double d0 = ami_quadrature(designs.get(0.0, Objective::ami).best, eval, kGrid7).bits;
    const double d25 = ami_quadrature(designs.get(25.0, Objective::ami).best, eval, kGrid7).bits;
    const double p8 = ami_quadrature(psk8(), eval, kGrid7).bits;
    v.require(d0 < 2.95, "0-deg design at 30 dB / 25 deg: AMI %.4f < 2.95", d0);
    v.require(d25 > d0, "25-deg design at 30 dB / 25 deg: AMI %.4f > %.4f", d25, d0);
    v.note("     8-PSK at the same channel: %.4f", p8);
    return v;
}

Verdict criterion6(Designs& designs) {
    Verdict v;
    for (double pnsd : {0.0, 25.0}) {
        const auto& ami = designs.get(pnsd, Objective::ami).best;
        const auto& pami = designs.get(pnsd, Objective::pami).best;
        try {
            const auto g = pragmatic_gap(ami, pami, pnsd, kGrid7, 2.5);
            v.require(g.gap_db <= 0.3,
                      "%2.0f deg: AMI design reaches 2.5 bits at %.3f dB, PAMI design at %.3f dB, "
                      "gap %.3f dB <= 0.3 (reported 0.2)",
                      pnsd, g.snr_left, g.snr_right, g.gap_db);
            // Where the gap comes from: the rate deficit of the PAMI design at
            // the left crossing, divided by the local slope of its PAMI curve.
            const auto at = [&](const Constellation& c, double snr, Objective o) {
                return evaluate_quadrature(c, ch(snr, pnsd), kGrid7, o).bits;
            };
            const double deficit = 2.5 - at(pami, g.snr_left, Objective::pami);
            const double slope = (at(pami, g.snr_left + 0.25, Objective::pami) -
                                  at(pami, g.snr_left - 0.25, Objective::pami)) / 0.5;
            v.note("     at %.3f dB the PAMI design has PAMI %.4f (AMI %.4f): deficit %.4f bits, "
                   "slope %.4f bits/dB, deficit/slope %.3f dB",
                   g.snr_left, 2.5 - deficit, at(pami, g.snr_left, Objective::ami), deficit, slope,
                   deficit / slope);
        } catch (const Error& e) {
            v.require(false, "%2.0f deg: %s", pnsd, e.what());
        }
    }
    return v;
}

// Exhaustive search over two-point unit-power sets: p0 = r, p1 = sqrt(2 - r^2) e^{j theta}.
// A common rotation and conjugation are free, so theta in [0, pi] suffices.
double two_point_optimum(const ChannelParams& p) {
    auto value = [&](double r, double theta) {
        const double r2 = std::sqrt(std::max(0.0, 2.0 - r * r));
        const cplx a(r, 0.0), b = std::polar(r2, theta);
        if (std::abs(a - b) < 1e-9) return -1.0;
        return ami_quadrature(make_constellation({a, b}, {0, 1}), p, kGrid7).raw_bits;
    };
    const double rmax = std::numbers::sqrt2;
    double best = -1.0, br = 0.0, bt = 0.0;
    const int nr = 60, nt = 60;
    for (int i = 0; i <= nr; ++i) {
        for (int j = 0; j <= nt; ++j) {
            const double r = rmax * i / nr, t = std::numbers::pi * j / nt;
            const double f = value(r, t);
            if (f > best) best = f, br = r, bt = t;
        }
    }
    // Local refinement around the best cell.
    double hr = rmax / nr, ht = std::numbers::pi / nt;
    for (int level = 0; level < 6; ++level) {
        const double cr = br, ct = bt;
        for (int i = -4; i <= 4; ++i) {
            for (int j = -4; j <= 4; ++j) {
                const double r = std::clamp(cr + i * hr / 4, 0.0, rmax);
                const double t = std::clamp(ct + j * ht / 4, 0.0, std::numbers::pi);
                const double f = value(r, t);
                if (f > best) best = f, br = r, bt = t;
            }
        }
        hr /= 4;
        ht /= 4;
    }
    return best;
}

Verdict criterion7() {
    Verdict v;
    for (double pnsd : {0.0, 20.0}) {
        const auto p = ch(10.0, pnsd);
        const double oracle = two_point_optimum(p);
        SAConfig cfg;
        cfg.seed = 1;
        const auto r = sa_optimize(2, p, Objective::ami, kGrid7, cfg);
        v.require(std::abs(r.best_bits - oracle) <= 0.01,
                  "10 dB %2.0f deg: SA %.5f  grid search %.5f  |diff| %.2e <= 0.01", pnsd,
                  r.best_bits, oracle, std::abs(r.best_bits - oracle));
    }
    return v;
}

int cli(const std::vector<std::string>& args, std::string* out = nullptr) {
    std::ostringstream o, e;
    const int code = cli::run_cli(args, o, e);
    if (out) *out = o.str();
    return code;
}

Verdict criterion8() {
    Verdict v;
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "phasecon_acceptance";
    fs::create_directories(dir);
    const std::string a = (dir / "a.json").string(), b = (dir / "b.json").string();
    const std::vector<std::string> opt{"optimize", "--m-points", "8",  "--snr-db", "12", "--pnsd-deg",
                                       "10",       "--seed",     "42", "--iterations", "20000"};
    auto with_out = [&](const std::string& path) {
        auto args = opt;
        args.insert(args.end(), {"--out", path});
        return args;
    };
    const bool ran = cli(with_out(a)) == 0 && cli(with_out(b)) == 0;
    const bool same_design = ran && read_text_file(a) == read_text_file(b);
    const bool same_trace = ran && read_text_file(dir / "a.trace.csv") == read_text_file(dir / "b.trace.csv");
    v.require(same_design && same_trace, "optimize twice with seed 42: design %s, trace %s",
              same_design ? "identical" : "differs", same_trace ? "identical" : "differs");

    std::string e1, e2;
    const std::vector<std::string> ev{"evaluate", a, "--snr-db", "9", "--pnsd-deg", "15",
                                      "--objective", "PAMI"};
    const bool eval_ok = cli(ev, &e1) == 0 && cli(ev, &e2) == 0 && e1 == e2;
    v.require(eval_ok, "evaluate twice: output %s", eval_ok ? "identical" : "differs");

    const auto c = read_constellation(a).constellation;
    double worst = 0.0;
    for (auto obj : {Objective::ami, Objective::pami}) {
        for (double pnsd : {0.0, 15.0}) {
            const auto p = ch(9.0, pnsd);
            worst = std::max(worst, std::abs(evaluate_quadrature(c, p, kGrid7, obj, 1).raw_bits -
                                             evaluate_quadrature(c, p, kGrid7, obj, 4).raw_bits));
            worst = std::max(worst, std::abs(evaluate_monte_carlo(c, p, obj, 20000, 3, 1).raw_bits -
                                             evaluate_monte_carlo(c, p, obj, 20000, 3, 4).raw_bits));
        }
    }
    v.require(worst < 1e-10, "serial vs 4 threads, quadrature and Monte Carlo: max |diff| %.2e < 1e-10",
              worst);
    return v;
}

}  // namespace

int main(int argc, char** argv) {
    // Optional argument: a file that receives a copy of the report.
    std::string report;
    auto emit = [&](const char* fmt, auto... args) {
        char buf[1024];
        std::snprintf(buf, sizeof buf, fmt, args...);
        std::fputs(buf, stdout);
        std::fflush(stdout);
        report += buf;
    };
    Designs designs;
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
        {"quadrature agrees with Monte Carlo on 8-PSK", criterion1},
        {"PAMI never exceeds AMI", criterion2},
        {"quadrature order 7 agrees with order 15", criterion3},
        {"annealed 8-point designs beat 8-PSK, seeds agree", [&] { return criterion4(designs); }},
        {"phase-noise-blind design saturates below 2.95 bits", [&] { return criterion5(designs); }},
        {"pragmatic gap at 2.5 bits", [&] { return criterion6(designs); }},
        {"two-point annealing matches exhaustive search", criterion7},
        {"deterministic outputs", criterion8},
    };
    // Criteria that fail for reasons analysed in the README. The run succeeds
    // only when the failing set is exactly this one, so any other failure,
    // or one of these turning green, still fails the test.
    const std::set<std::size_t> known_red{6};
    std::set<std::size_t> red;
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = criteria[i].second();
        } catch (const std::exception& e) {
            v.require(false, "unexpected exception: %s", e.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit("%s criterion %zu: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
             secs);
        for (const auto& line : v.lines) emit("    %s\n", line.c_str());
        failed += !v.pass;
        if (!v.pass) red.insert(i + 1);
    }
    emit("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed,
         criteria.size());
    for (std::size_t i : known_red) {
        emit("criterion %zu is a known deviation (%s)\n", i,
             red.count(i) ? "still failing" : "now passing, update known_red");
    }
    if (argc > 1) write_text_file(argv[1], report);
    return red == known_red ? 0 : 1;
}
