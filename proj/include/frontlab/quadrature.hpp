#pragma once

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace frontlab {

/// Gauss-Legendre rule mapped onto [0, 1].
struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Nodes from Newton iteration on the Legendre recurrence. Accurate to
/// roundoff for the node counts used here (up to a few hundred).
inline QuadratureRule gauss_legendre_unit(int count) {
    if (count < 1) {
        throw std::invalid_argument("gauss_legendre_unit: count must be positive");
    }
    QuadratureRule rule;
    rule.nodes.resize(count);
    rule.weights.resize(count);
    const int half = (count + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (count + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= count; ++k) {
                const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = pk;
            }
            // P_n(x) = p1, P_{n-1}(x) = p0
            dp = count * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) {
                break;
            }
        }
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]; x is the positive member of the pair
        rule.nodes[i] = 0.5 * (1.0 - x);
        rule.nodes[count - 1 - i] = 0.5 * (1.0 + x);
        rule.weights[i] = 0.5 * w;
        rule.weights[count - 1 - i] = 0.5 * w;
    }
    return rule;
}

}  // namespace frontlab
