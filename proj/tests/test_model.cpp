#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "phasecon/model.hpp"
#include "support.hpp"

using namespace phasecon;
using phasecon::test::thrown_code;

namespace {
const cplx J{0.0, 1.0};
}

TEST_CASE("make_constellation accepts QPSK") {
    const auto c = make_constellation({1.0, J, -1.0, -J}, {0, 1, 3, 2});
    CHECK(c.size() == 4);
    CHECK(c.bits_per_symbol() == 2);
    CHECK(c.label(2) == 3u);
    CHECK(c.point(1) == J);
}

TEST_CASE("make_constellation rejects malformed input") {
    CHECK(thrown_code([] { make_constellation({1.0, J, -1.0}, {0, 1, 2}); }) ==
          Errc::size_not_power_of_two);
    CHECK(thrown_code([] { make_constellation({1.0}, {0}); }) == Errc::size_not_power_of_two);
    CHECK(thrown_code([] { make_constellation({1.0, J, -1.0, -J}, {0, 0, 1, 2}); }) ==
          Errc::duplicate_label);
    CHECK(thrown_code([] { make_constellation({1.0, J, -1.0, -J}, {0, 1, 2, 4}); }) ==
          Errc::label_out_of_range);
    CHECK(thrown_code([] { make_constellation({1.0, J, 1.0, -J}, {0, 1, 2, 3}); }) ==
          Errc::duplicate_point);
    CHECK(thrown_code([] { make_constellation({1.0, J, -1.0, -J}, {0, 1, 2}); }) ==
          Errc::size_mismatch);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(make_constellation({1.0, cplx{nan, 0.0}}, {0, 1}), Error);
}

TEST_CASE("make_constellation does not normalize") {
    const auto c = make_constellation({2.0, -2.0}, {0, 1});
    CHECK(c.average_power() == doctest::Approx(4.0));
}

TEST_CASE("extracting points and labels and rebuilding is the identity") {
    const auto c = test::psk8();
    const auto d = make_constellation({c.points().begin(), c.points().end()},
                                      {c.labels().begin(), c.labels().end()});
    CHECK(c == d);
}

TEST_CASE("normalize_average_power") {
    SUBCASE("{2, -2} becomes {1, -1}") {
        const auto c = normalize_average_power(make_constellation({2.0, -2.0}, {0, 1}));
        CHECK(c.point(0) == cplx(1.0, 0.0));
        CHECK(c.point(1) == cplx(-1.0, 0.0));
        CHECK(c.label(1) == 1u);
    }
    SUBCASE("unit power input is returned unchanged") {
        const auto c = make_constellation({1.0, -1.0}, {1, 0});
        CHECK(normalize_average_power(c) == c);
    }
    SUBCASE("all-zero input is rejected") {
        CHECK(thrown_code([] {
                  normalize_average_power(make_constellation({0.0, cplx(0.0, 0.0)}, {0, 1}));
              }) == Errc::duplicate_point);
        CHECK(thrown_code([] {
                  normalize_average_power(make_constellation({0.0, 0.0, 0.0, 0.0}, {0, 1, 2, 3}));
              }) == Errc::duplicate_point);
    }
    SUBCASE("single nonzero point is enough") {
        const auto c = normalize_average_power(make_constellation({0.0, 3.0}, {0, 1}));
        CHECK(std::abs(c.average_power() - 1.0) < 1e-12);
    }
    SUBCASE("idempotent") {
        std::mt19937_64 rng(7);
        for (int t = 0; t < 20; ++t) {
            const auto once = test::random_constellation(16, rng);
            const auto twice = normalize_average_power(once);
            for (std::size_t i = 0; i < once.size(); ++i) {
                CHECK(std::abs(once.point(i) - twice.point(i)) < 1e-12);
            }
            CHECK(std::abs(once.average_power() - 1.0) < 1e-12);
        }
    }
}

TEST_CASE("hamming_distance") {
    CHECK(hamming_distance({0b000, 3}, {0b000, 3}) == 0);
    CHECK(hamming_distance({0b000, 3}, {0b111, 3}) == 3);
    CHECK(hamming_distance({0b101, 3}, {0b011, 3}) == 2);
    CHECK(thrown_code([] { hamming_distance({1, 3}, {1, 4}); }) == Errc::width_mismatch);
    CHECK_THROWS_AS(LabelBits(8, 3), Error);
}

TEST_CASE("is_gray") {
    SUBCASE("8-PSK with reflected labels") {
        const auto c = test::psk8();
        const std::vector<std::uint32_t> expected{0, 1, 3, 2, 6, 7, 5, 4};
        CHECK(std::vector<std::uint32_t>(c.labels().begin(), c.labels().end()) == expected);
        CHECK(is_gray(c));
    }
    SUBCASE("8-PSK with natural labels") { CHECK_FALSE(is_gray(test::psk8_natural())); }
    SUBCASE("BPSK, either labeling") {
        CHECK(is_gray(make_constellation({1.0, -1.0}, {0, 1})));
        CHECK(is_gray(make_constellation({1.0, -1.0}, {1, 0})));
    }
    SUBCASE("ties require every nearest neighbour to be one bit away") {
        // 0 and 3 are both at distance 1 from the centre point labelled 1.
        const auto c = make_constellation({-1.0, 0.0, 1.0, 5.0}, {0, 1, 2, 3});
        CHECK_FALSE(is_gray(c));
        const auto d = make_constellation({-1.0, 0.0, 1.0, 5.0}, {0, 1, 3, 2});
        CHECK(is_gray(d));
    }
    SUBCASE("invariant under rotation and scaling") {
        for (const auto& c : {test::psk8(), test::psk8_natural(),
                              reference_constellation(ReferenceKind::qam, 16)}) {
            const bool g = is_gray(c);
            for (double th : {0.1, 1.0, 2.5, -0.7}) CHECK(is_gray(rotate(c, th)) == g);
            std::vector<cplx> scaled(c.points().begin(), c.points().end());
            for (auto& p : scaled) p *= 3.7;
            CHECK(is_gray(c.with_points(scaled)) == g);
        }
    }
}

TEST_CASE("gray_code") {
    for (std::uint32_t i = 0; i + 1 < 64; ++i) {
        CHECK(std::popcount(gray_code(i) ^ gray_code(i + 1)) == 1);
    }
}

TEST_CASE("reference constellations") {
    SUBCASE("PSK points on the unit circle") {
        const auto c = reference_constellation(ReferenceKind::psk, 8);
        for (std::size_t i = 0; i < 8; ++i) {
            const cplx expected = std::polar(1.0, 2.0 * std::numbers::pi * i / 8.0);
            CHECK(std::abs(c.point(i) - expected) < 1e-15);
        }
    }
    SUBCASE("BPSK is {+1, -1}") {
        const auto c = reference_constellation(ReferenceKind::psk, 2);
        CHECK(c.point(0) == cplx(1.0, 0.0));
        CHECK(c.point(1) == cplx(-1.0, 0.0));
    }
    SUBCASE("every PSK size is Gray") {
        for (int M : {2, 4, 8, 16, 32, 64}) {
            const auto c = reference_constellation(ReferenceKind::psk, M);
            CHECK(is_gray(c));
            CHECK(is_unit_power(c, 1e-12));
        }
    }
    SUBCASE("16-QAM is a scaled 4x4 grid with unit power") {
        const auto c = reference_constellation(ReferenceKind::qam, 16);
        double sum = 0.0;
        for (const auto& p : c.points()) sum += std::norm(p);
        CHECK(std::abs(sum / 16.0 - 1.0) < 1e-12);
        const double d = 2.0 / std::sqrt(10.0);
        for (const auto& p : c.points()) {
            const double a = p.real() / d + 0.5;
            const double b = p.imag() / d + 0.5;
            CHECK(std::abs(a - std::round(a)) < 1e-12);
            CHECK(std::abs(b - std::round(b)) < 1e-12);
            CHECK(std::abs(p.real()) < 2.0 * d);
        }
        CHECK(is_gray(c));
    }
    SUBCASE("square QAM sizes are Gray; other sizes are valid and unit power") {
        for (int M : {4, 16, 64, 256}) CHECK(is_gray(reference_constellation(ReferenceKind::qam, M)));
        for (int M : {8, 32, 128}) {
            CHECK(is_unit_power(reference_constellation(ReferenceKind::qam, M), 1e-12));
        }
    }
    SUBCASE("APSK from a ring layout") {
        const std::vector<ApskRing> rings{{4, 1.0, std::numbers::pi / 4}, {12, 2.6, 0.0}};
        const auto c = reference_constellation(ReferenceKind::apsk, 16, rings);
        CHECK(c.size() == 16);
        CHECK(is_unit_power(c, 1e-12));
        const double r_in = std::abs(c.point(0));
        const double r_out = std::abs(c.point(15));
        CHECK(r_out / r_in == doctest::Approx(2.6).epsilon(1e-12));
    }
    SUBCASE("unsupported combinations") {
        CHECK(thrown_code([] { reference_constellation(ReferenceKind::psk, 6); }) ==
              Errc::unsupported_reference);
        CHECK(thrown_code([] { reference_constellation(ReferenceKind::qam, 2); }) ==
              Errc::unsupported_reference);
        const std::vector<ApskRing> bad{{4, 1.0, 0.0}, {8, 2.0, 0.0}};
        CHECK(thrown_code([&] { reference_constellation(ReferenceKind::apsk, 16, bad); }) ==
              Errc::unsupported_reference);
        CHECK(thrown_code([] { parse_reference_kind("pam"); }) == Errc::unsupported_reference);
    }
}

TEST_CASE("ChannelParams conversions") {
    SUBCASE("SNR and PNSD round-trip") {
        for (double snr : {-10.0, 0.0, 3.0, 12.5, 40.0}) {
            for (double pnsd : {0.5, 5.0, 25.0, 60.0}) {
                const auto p = ChannelParams::from_snr_pnsd(snr, pnsd);
                CHECK(p.k_n() == doctest::Approx(2.0 * std::pow(10.0, snr / 10.0)).epsilon(1e-12));
                CHECK(std::abs(p.snr_db() - snr) <= 1e-12 * std::max(1.0, std::abs(snr)));
                CHECK(std::abs(p.pnsd_deg() - pnsd) <= 1e-12 * pnsd);
                CHECK(p.pnsd_rad() == doctest::Approx(deg_to_rad(pnsd)).epsilon(1e-12));
                CHECK(p.a_ratio() * p.k_phi() == doctest::Approx(p.k_n()).epsilon(1e-15));
                CHECK(p.noise_sigma() == doctest::Approx(1.0 / std::sqrt(p.k_n())));
            }
        }
    }
    SUBCASE("zero PNSD means no phase noise") {
        const auto p = ChannelParams::from_snr_pnsd(10.0, 0.0);
        CHECK_FALSE(p.has_phase_noise());
        CHECK(std::isinf(p.k_phi()));
        CHECK(p.a_ratio() == 0.0);
        CHECK(p.pnsd_deg() == 0.0);
    }
    SUBCASE("concentrations") {
        const auto p = ChannelParams::from_concentrations(4.0, 100.0);
        CHECK(p.a_ratio() == 0.04);
        CHECK(p.pnsd_rad() == doctest::Approx(0.1));
        CHECK(p.snr_db() == doctest::Approx(10.0 * std::log10(2.0)));
    }
    SUBCASE("invalid values") {
        CHECK_THROWS_AS(ChannelParams::from_snr_pnsd(10.0, -1.0), Error);
        CHECK_THROWS_AS(ChannelParams::from_concentrations(0.0, 1.0), Error);
        CHECK_THROWS_AS(ChannelParams::from_concentrations(1.0, -1.0), Error);
        CHECK_THROWS_AS(ChannelParams::from_concentrations(1.0, 0.0), Error);
        CHECK_THROWS_AS(ChannelParams::from_snr_pnsd(std::nan(""), 1.0), Error);
    }
}

TEST_CASE("rotate keeps labels and power") {
    const auto c = rotate(test::psk8(), 0.3);
    CHECK(c.label(3) == test::psk8().label(3));
    CHECK(std::arg(c.point(0)) == doctest::Approx(0.3));
    CHECK(is_unit_power(c, 1e-12));
}
