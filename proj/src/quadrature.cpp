#include "phasecon/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "phasecon/errors.hpp"

namespace phasecon {

// Newton iteration on the orthonormal Hermite recurrence, with the usual
// asymptotic starting guesses for the largest roots.
std::vector<HermiteNode> gauss_hermite_nodes(int k) {
    if (k < 1 || k > 30) {
        throw Error(Errc::invalid_argument,
                    "Gauss-Hermite degree must be in [1, 30], got " + std::to_string(k));
    }
    const double pim4 = 1.0 / std::pow(std::numbers::pi, 0.25);
    std::vector<double> x(k), w(k);
    const int half = (k + 1) / 2;
    double z = 0.0;
    for (int i = 0; i < half; ++i) {
        if (i == 0) {
            z = std::sqrt(2.0 * k + 1.0) - 1.85575 * std::pow(2.0 * k + 1.0, -1.0 / 6.0);
        } else if (i == 1) {
            z -= 1.14 * std::pow(static_cast<double>(k), 0.426) / z;
        } else if (i == 2) {
            z = 1.86 * z - 0.86 * x[0];
        } else if (i == 3) {
            z = 1.91 * z - 0.91 * x[1];
        } else {
            z = 2.0 * z - x[i - 2];
        }
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p1 = pim4;
            double p2 = 0.0;
            for (int j = 1; j <= k; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = z * std::sqrt(2.0 / j) * p2 - std::sqrt((j - 1.0) / j) * p3;
            }
            pp = std::sqrt(2.0 * k) * p2;
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) <= 1e-15) break;
        }
        if (2 * i + 1 == k) z = 0.0;
        x[i] = z;
        x[k - 1 - i] = -z;
        w[i] = 2.0 / (pp * pp);
        w[k - 1 - i] = w[i];
    }
    std::vector<HermiteNode> out(k);
    // x is descending; emit ascending
    for (int i = 0; i < k; ++i) out[i] = {x[k - 1 - i], w[k - 1 - i]};
    return out;
}

QuadratureGrid::QuadratureGrid(int degree)
    : degree_(degree), nodes_(gauss_hermite_nodes(degree)) {
    product3_.reserve(nodes_.size() * nodes_.size() * nodes_.size());
    product2_.reserve(nodes_.size() * nodes_.size());
    for (const auto& a : nodes_) {
        for (const auto& b : nodes_) {
            product2_.push_back({a.node, b.node, 0.0, a.weight * b.weight});
            for (const auto& c : nodes_) {
                product3_.push_back({a.node, b.node, c.node, a.weight * b.weight * c.weight});
            }
        }
    }
}

}  // namespace phasecon
