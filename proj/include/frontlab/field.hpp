#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "frontlab/grid.hpp"

namespace frontlab {

/// Perturbation v = (v1-block, v2-block) sampled on a grid at time t.
/// Components 0..n1-1 form the first block.
struct FieldState {
    double t = 0.0;
    int n1 = 1;
    std::vector<std::vector<double>> components;

    FieldState() = default;
    FieldState(const Grid& grid, int n_components, int first_block)
        : n1(first_block),
          components(static_cast<std::size_t>(n_components), std::vector<double>(grid.size(), 0.0)) {}

    int size() const { return static_cast<int>(components.size()); }
    std::span<double> operator[](int i) { return components[static_cast<std::size_t>(i)]; }
    std::span<const double> operator[](int i) const { return components[static_cast<std::size_t>(i)]; }

    bool finite() const {
        for (const auto& comp : components) {
            for (double x : comp) {
                if (!std::isfinite(x)) {
                    return false;
                }
            }
        }
        return true;
    }

    void check_shape(const Grid& grid) const {
        for (const auto& comp : components) {
            if (comp.size() != grid.size()) {
                throw std::invalid_argument(
                    fmt::format("field: component has {} samples, grid has {}", comp.size(), grid.size()));
            }
        }
    }
};

}  // namespace frontlab
