#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "phasecon/errors.hpp"

namespace phasecon {

using cplx = std::complex<double>;

// A signal set of M = 2^m complex points together with a one-to-one
// m-bit labeling. labels()[i] is the label carried by points()[i].
// Immutable; every transformation returns a new object.
class Constellation {
public:
    // Validates size, label bijectivity and point distinctness.
    // Does not normalize.
    static Constellation make(std::vector<cplx> points,
                              std::vector<std::uint32_t> labels);

    std::span<const cplx> points() const noexcept { return points_; }
    std::span<const std::uint32_t> labels() const noexcept { return labels_; }

    std::size_t size() const noexcept { return points_.size(); }
    int bits_per_symbol() const noexcept { return m_; }

    const cplx& point(std::size_t i) const { return points_.at(i); }
    std::uint32_t label(std::size_t i) const { return labels_.at(i); }

    // Bit b (0 = least significant) of the label of point i.
    int label_bit(std::size_t i, int b) const noexcept {
        return static_cast<int>((labels_[i] >> b) & 1u);
    }

    double average_power() const noexcept;

    // New constellation with the same labels and replaced points, or the same
    // points and replaced labels. Both re-validate.
    Constellation with_points(std::vector<cplx> points) const;
    Constellation with_labels(std::vector<std::uint32_t> labels) const;

    friend bool operator==(const Constellation&, const Constellation&) = default;

private:
    Constellation(std::vector<cplx> p, std::vector<std::uint32_t> l, int m)
        : points_(std::move(p)), labels_(std::move(l)), m_(m) {}

    std::vector<cplx> points_;
    std::vector<std::uint32_t> labels_;
    int m_ = 0;
};

inline Constellation make_constellation(std::vector<cplx> points,
                                        std::vector<std::uint32_t> labels) {
    return Constellation::make(std::move(points), std::move(labels));
}

// Scales all points by one positive real so that (1/M) sum |x|^2 == 1.
Constellation normalize_average_power(const Constellation& c);

bool is_unit_power(const Constellation& c, double tol = 1e-9) noexcept;

// Rotates every point by exp(j*theta).
Constellation rotate(const Constellation& c, double theta);

// ---------------------------------------------------------------------------
// Labels

struct LabelBits {
    std::uint32_t value = 0;
    int width = 0;

    LabelBits(std::uint32_t v, int w);
};

int hamming_distance(const LabelBits& a, const LabelBits& b);

// Every nearest neighbour of every point (all of them, on ties) carries a
// label at Hamming distance one. Ties are detected with a relative tolerance
// of 1e-9 on squared distances.
bool is_gray(const Constellation& c);

// Binary-reflected Gray code of i.
constexpr std::uint32_t gray_code(std::uint32_t i) noexcept { return i ^ (i >> 1); }

// ---------------------------------------------------------------------------
// Channel

// Thermal concentration k_n = 1/sigma^2 (per real dimension) and Tikhonov
// phase concentration k_phi. k_phi == +inf means no phase noise.
class ChannelParams {
public:
    static ChannelParams from_concentrations(double k_n, double k_phi);
    // SNR = k_n / 2 in dB; PNSD sigma_phi = 1/sqrt(k_phi) in degrees, 0 = none.
    static ChannelParams from_snr_pnsd(double snr_db, double pnsd_deg);

    double k_n() const noexcept { return k_n_; }
    double k_phi() const noexcept { return k_phi_; }
    bool has_phase_noise() const noexcept;

    // A = k_n / k_phi, 0 without phase noise.
    double a_ratio() const noexcept;
    double snr_db() const noexcept;
    double pnsd_rad() const noexcept;
    double pnsd_deg() const noexcept;
    // Per real dimension.
    double noise_sigma() const noexcept;

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;

private:
    ChannelParams(double k_n, double k_phi) : k_n_(k_n), k_phi_(k_phi) {}

    double k_n_;
    double k_phi_;
};

double deg_to_rad(double deg) noexcept;
double rad_to_deg(double rad) noexcept;

// ---------------------------------------------------------------------------
// Reference sets

enum class ReferenceKind { psk, qam, apsk };

struct ApskRing {
    int count = 0;
    double radius = 1.0;
    double phase = 0.0;  // radians, offset of the first point on the ring
};

// Unit-average-power PSK / QAM / APSK with a Gray (or near-Gray) labeling.
// PSK: binary-reflected ring labels. Square QAM: per-axis Gray. M = 8 QAM is
// the 4x2 rectangle; M = 32, 128 use the cross shape with folded corner
// columns. APSK: rings are labeled in blocks, Gray order inside a ring when
// its size is a power of two.
Constellation reference_constellation(ReferenceKind kind, int M,
                                      std::span<const ApskRing> rings = {});

ReferenceKind parse_reference_kind(const std::string& s);

}  // namespace phasecon
