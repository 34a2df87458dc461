#pragma once

#include <vector>

namespace phasecon {

struct HermiteNode {
    double node;
    double weight;
};

// Gauss-Hermite rule for the weight exp(-t^2), 1 <= k <= 30. Nodes in
// ascending order, exactly symmetric about zero.
std::vector<HermiteNode> gauss_hermite_nodes(int k);

// Offsets in the unit (t-space) product grid. Channel scaling is applied by
// the evaluator: noise = sqrt(2) sigma (t_re + j t_im), phase = sqrt(2)
// sigma_phi t_phase.
struct GridPoint {
    double t_re;
    double t_im;
    double t_phase;
    double weight;
};

class QuadratureGrid {
public:
    explicit QuadratureGrid(int degree = 7);

    int degree() const noexcept { return degree_; }
    const std::vector<HermiteNode>& nodes() const noexcept { return nodes_; }

    // k^3 points over (noise re, noise im, phase); weights sum to pi^{3/2}.
    const std::vector<GridPoint>& product3() const noexcept { return product3_; }
    // k^2 points with t_phase = 0; weights sum to pi.
    const std::vector<GridPoint>& product2() const noexcept { return product2_; }

private:
    int degree_;
    std::vector<HermiteNode> nodes_;
    std::vector<GridPoint> product3_;
    std::vector<GridPoint> product2_;
};

}  // namespace phasecon
