#pragma once

#include <doctest.h>

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

#include "phasecon/model.hpp"

namespace phasecon::test {

template <class F>
Errc thrown_code(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected phasecon::Error");
    return Errc::invalid_argument;
}

inline Constellation psk8() { return reference_constellation(ReferenceKind::psk, 8); }

inline Constellation psk8_natural() {
    const auto g = psk8();
    std::vector<cplx> pts(g.points().begin(), g.points().end());
    std::vector<std::uint32_t> labels(8);
    std::iota(labels.begin(), labels.end(), 0u);
    return make_constellation(std::move(pts), std::move(labels));
}

// Unit-power set of M points drawn from a complex Gaussian, random labels.
inline Constellation random_constellation(int M, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<cplx> pts(M);
    for (auto& p : pts) p = {g(rng), g(rng)};
    std::vector<std::uint32_t> labels(M);
    std::iota(labels.begin(), labels.end(), 0u);
    std::shuffle(labels.begin(), labels.end(), rng);
    return normalize_average_power(make_constellation(std::move(pts), std::move(labels)));
}

}  // namespace phasecon::test
