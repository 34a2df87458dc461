#include "phasecon/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace phasecon {

const char* errc_name(Errc code) noexcept {
    switch (code) {
        case Errc::size_not_power_of_two: return "size-not-power-of-two";
        case Errc::duplicate_label: return "duplicate-label";
        case Errc::label_out_of_range: return "label-out-of-range";
        case Errc::duplicate_point: return "duplicate-point";
        case Errc::size_mismatch: return "size-mismatch";
        case Errc::all_zero: return "all-zero";
        case Errc::width_mismatch: return "width-mismatch";
        case Errc::unsupported_reference: return "unsupported-reference";
        case Errc::not_normalized: return "not-normalized";
        case Errc::index_out_of_range: return "index-out-of-range";
        case Errc::invalid_argument: return "invalid-argument";
        case Errc::target_unreachable: return "target-unreachable";
        case Errc::format_error: return "format-error";
    }
    return "unknown";
}

Constellation Constellation::make(std::vector<cplx> points,
                                  std::vector<std::uint32_t> labels) {
    const std::size_t n = points.size();
    if (labels.size() != n) {
        throw Error(Errc::size_mismatch, "points and labels differ in length");
    }
    if (n < 2 || !std::has_single_bit(n)) {
        throw Error(Errc::size_not_power_of_two,
                    "constellation size " + std::to_string(n) +
                        " is not a power of two >= 2");
    }
    std::vector<bool> seen(n, false);
    for (auto l : labels) {
        if (l >= n) {
            throw Error(Errc::label_out_of_range,
                        "label " + std::to_string(l) + " out of range");
        }
        if (seen[l]) {
            throw Error(Errc::duplicate_label,
                        "duplicate label " + std::to_string(l));
        }
        seen[l] = true;
    }
    for (const auto& p : points) {
        if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
            throw Error(Errc::invalid_argument, "non-finite point");
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (points[i] == points[j]) {
                throw Error(Errc::duplicate_point,
                            "points " + std::to_string(i) + " and " +
                                std::to_string(j) + " coincide");
            }
        }
    }
    const int m = std::countr_zero(n);
    return Constellation(std::move(points), std::move(labels), m);
}

double Constellation::average_power() const noexcept {
    double s = 0.0;
    for (const auto& p : points_) s += std::norm(p);
    return s / static_cast<double>(points_.size());
}

Constellation Constellation::with_points(std::vector<cplx> points) const {
    return make(std::move(points), labels_);
}

Constellation Constellation::with_labels(std::vector<std::uint32_t> labels) const {
    return make(points_, std::move(labels));
}

Constellation normalize_average_power(const Constellation& c) {
    const double p = c.average_power();
    if (!(p > 0.0)) {
        throw Error(Errc::all_zero, "cannot normalize an all-zero constellation");
    }
    const double s = 1.0 / std::sqrt(p);
    if (s == 1.0) return c;
    std::vector<cplx> pts(c.points().begin(), c.points().end());
    for (auto& x : pts) x *= s;
    return c.with_points(std::move(pts));
}

bool is_unit_power(const Constellation& c, double tol) noexcept {
    return std::abs(c.average_power() - 1.0) <= tol;
}

Constellation rotate(const Constellation& c, double theta) {
    const cplx r = std::polar(1.0, theta);
    std::vector<cplx> pts(c.points().begin(), c.points().end());
    for (auto& x : pts) x *= r;
    return c.with_points(std::move(pts));
}

LabelBits::LabelBits(std::uint32_t v, int w) : value(v), width(w) {
    if (w < 1 || w > 31 || v >= (1u << w)) {
        throw Error(Errc::invalid_argument,
                    "label value does not fit in " + std::to_string(w) + " bits");
    }
}

int hamming_distance(const LabelBits& a, const LabelBits& b) {
    if (a.width != b.width) {
        throw Error(Errc::width_mismatch, "label widths differ");
    }
    return std::popcount(a.value ^ b.value);
}

bool is_gray(const Constellation& c) {
    constexpr double rel_tol = 1e-9;
    const auto pts = c.points();
    const auto n = pts.size();
    for (std::size_t i = 0; i < n; ++i) {
        double dmin = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < n; ++k) {
            if (k != i) dmin = std::min(dmin, std::norm(pts[i] - pts[k]));
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            if (std::norm(pts[i] - pts[j]) <= dmin * (1.0 + rel_tol) &&
                std::popcount(c.label(i) ^ c.label(j)) != 1) {
                return false;
            }
        }
    }
    return true;
}

ChannelParams ChannelParams::from_concentrations(double k_n, double k_phi) {
    if (!(k_n > 0.0) || !std::isfinite(k_n)) {
        throw Error(Errc::invalid_argument, "k_n must be positive and finite");
    }
    if (!(k_phi > 0.0)) {
        throw Error(Errc::invalid_argument, "k_phi must be positive or +inf");
    }
    return ChannelParams(k_n, k_phi);
}

ChannelParams ChannelParams::from_snr_pnsd(double snr_db, double pnsd_deg) {
    if (!std::isfinite(snr_db)) {
        throw Error(Errc::invalid_argument, "SNR must be finite");
    }
    if (!(pnsd_deg >= 0.0) || !std::isfinite(pnsd_deg)) {
        throw Error(Errc::invalid_argument, "PNSD must be finite and >= 0 degrees");
    }
    const double k_n = 2.0 * std::pow(10.0, snr_db / 10.0);
    if (pnsd_deg == 0.0) {
        return from_concentrations(k_n, std::numeric_limits<double>::infinity());
    }
    const double s = deg_to_rad(pnsd_deg);
    return from_concentrations(k_n, 1.0 / (s * s));
}

bool ChannelParams::has_phase_noise() const noexcept { return std::isfinite(k_phi_); }

double ChannelParams::a_ratio() const noexcept {
    return has_phase_noise() ? k_n_ / k_phi_ : 0.0;
}

double ChannelParams::snr_db() const noexcept { return 10.0 * std::log10(k_n_ / 2.0); }

double ChannelParams::pnsd_rad() const noexcept {
    return has_phase_noise() ? std::sqrt(1.0 / k_phi_) : 0.0;
}

double ChannelParams::pnsd_deg() const noexcept { return rad_to_deg(pnsd_rad()); }

double ChannelParams::noise_sigma() const noexcept { return 1.0 / std::sqrt(k_n_); }

double deg_to_rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
double rad_to_deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

namespace {

Constellation psk(int M) {
    std::vector<cplx> pts(M);
    std::vector<std::uint32_t> labels(M);
    for (int i = 0; i < M; ++i) {
        pts[i] = std::polar(1.0, 2.0 * std::numbers::pi * i / M);
        labels[i] = gray_code(static_cast<std::uint32_t>(i));
    }
    // BPSK at angle pi has a tiny imaginary residue; snap it.
    if (M == 2) pts[1] = cplx(-1.0, 0.0);
    return normalize_average_power(Constellation::make(std::move(pts), std::move(labels)));
}

// Per-axis Gray on a rows x cols grid of odd integer coordinates.
void rect_grid(int bits_i, int bits_q, std::vector<cplx>& pts,
               std::vector<std::uint32_t>& labels) {
    const int ni = 1 << bits_i;
    const int nq = 1 << bits_q;
    for (int a = 0; a < ni; ++a) {
        for (int b = 0; b < nq; ++b) {
            pts.emplace_back(2.0 * a - (ni - 1), 2.0 * b - (nq - 1));
            labels.push_back((gray_code(a) << bits_q) | gray_code(b));
        }
    }
}

Constellation qam(int M) {
    const int m = std::countr_zero(static_cast<unsigned>(M));
    std::vector<cplx> pts;
    std::vector<std::uint32_t> labels;
    if (m % 2 == 0) {
        rect_grid(m / 2, m / 2, pts, labels);
    } else if (M == 8) {
        rect_grid(2, 1, pts, labels);
    } else {
        // Cross: start from the 2^(n+1) x 2^n rectangle and fold the outer
        // columns into the empty bands above and below.
        const int n = (m - 1) / 2;
        rect_grid(n + 1, n, pts, labels);
        const double edge = 3.0 * (1 << (n - 1)) - 1.0;
        for (auto& p : pts) {
            const double re = p.real();
            const double im = p.imag();
            if (std::abs(re) > edge) {
                const double si = re > 0 ? 1.0 : -1.0;
                const double sq = im > 0 ? 1.0 : -1.0;
                p = cplx(si * ((1 << n) - std::abs(im)),
                         sq * (std::abs(re) - (1 << (n - 1))));
            }
        }
    }
    return normalize_average_power(Constellation::make(std::move(pts), std::move(labels)));
}

Constellation apsk(int M, std::span<const ApskRing> rings) {
    if (rings.empty()) {
        throw Error(Errc::unsupported_reference, "apsk requires a ring layout");
    }
    std::vector<cplx> pts;
    std::vector<std::uint32_t> labels;
    std::uint32_t offset = 0;
    for (const auto& r : rings) {
        if (r.count < 1 || !(r.radius >= 0.0)) {
            throw Error(Errc::unsupported_reference, "invalid apsk ring");
        }
        const bool pow2 = std::has_single_bit(static_cast<unsigned>(r.count));
        for (int i = 0; i < r.count; ++i) {
            pts.push_back(std::polar(r.radius, r.phase + 2.0 * std::numbers::pi * i / r.count));
            labels.push_back(offset + (pow2 ? gray_code(i) : static_cast<std::uint32_t>(i)));
        }
        offset += static_cast<std::uint32_t>(r.count);
    }
    if (static_cast<int>(pts.size()) != M) {
        throw Error(Errc::unsupported_reference, "apsk ring counts do not sum to M");
    }
    return normalize_average_power(Constellation::make(std::move(pts), std::move(labels)));
}

}  // namespace

Constellation reference_constellation(ReferenceKind kind, int M,
                                      std::span<const ApskRing> rings) {
    if (M < 2 || !std::has_single_bit(static_cast<unsigned>(M))) {
        throw Error(Errc::unsupported_reference,
                    "M = " + std::to_string(M) + " is not a power of two");
    }
    switch (kind) {
        case ReferenceKind::psk:
            return psk(M);
        case ReferenceKind::qam:
            if (M < 4) throw Error(Errc::unsupported_reference, "qam needs M >= 4");
            return qam(M);
        case ReferenceKind::apsk:
            return apsk(M, rings);
    }
    throw Error(Errc::unsupported_reference, "unknown reference kind");
}

ReferenceKind parse_reference_kind(const std::string& s) {
    if (s == "psk") return ReferenceKind::psk;
    if (s == "qam") return ReferenceKind::qam;
    if (s == "apsk") return ReferenceKind::apsk;
    throw Error(Errc::unsupported_reference, "unknown constellation kind '" + s + "'");
}

}  // namespace phasecon
