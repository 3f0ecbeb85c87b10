#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

namespace frontlab {

/// Periodic box [-L0, L0) x [-L1, L1) with N points per axis. Axis 0 is z,
/// the propagation axis that carries the drift and the weight. Storage is
/// row major with axis 0 slowest.
class Grid {
public:
    Grid() = default;

    Grid(int dim, std::array<double, 2> half_length, std::array<int, 2> points)
        : dim_(dim), half_(half_length), n_(points) {
        if (dim != 1 && dim != 2) {
            throw std::invalid_argument(fmt::format("grid: dimension must be 1 or 2, got {}", dim));
        }
        if (dim == 1) {
            n_[1] = 1;
            half_[1] = 0.0;
        }
        for (int a = 0; a < dim; ++a) {
            const int n = n_[a];
            if (n < 16 || (n & (n - 1)) != 0) {
                throw std::invalid_argument(
                    fmt::format("grid: axis {} needs a power of two >= 16 points, got {}", a, n));
            }
            if (!(half_[a] > 0.0)) {
                throw std::invalid_argument(fmt::format("grid: axis {} half length must be positive", a));
            }
        }
    }

    static Grid line(double half_length, int points) { return Grid(1, {half_length, 0.0}, {points, 1}); }

    int dim() const { return dim_; }
    int points(int axis) const { return n_[axis]; }
    double half_length(int axis) const { return half_[axis]; }
    double spacing(int axis) const { return 2.0 * half_[axis] / n_[axis]; }
    std::size_t size() const { return static_cast<std::size_t>(n_[0]) * static_cast<std::size_t>(n_[1]); }

    double cell_volume() const {
        double v = spacing(0);
        if (dim_ == 2) {
            v *= spacing(1);
        }
        return v;
    }

    double coordinate(int axis, int i) const { return -half_[axis] + i * spacing(axis); }

    /// z coordinate of flat index idx.
    double z_of(std::size_t idx) const { return coordinate(0, static_cast<int>(idx / n_[1])); }

    /// Angular wavenumber of FFT bin i along an axis: 2 pi k / (2L) with k
    /// in [-N/2, N/2).
    double wavenumber(int axis, int i) const {
        const int n = n_[axis];
        const int k = i < n / 2 ? i : i - n;
        return std::numbers::pi * k / half_[axis];
    }

    bool is_nyquist(int axis, int i) const { return i == n_[axis] / 2; }

    /// Per-mode |ξ|², the advective ξ1 (zero at the z Nyquist bin, where a
    /// real field has no consistent odd derivative), flat index order.
    struct ModeTable {
        std::vector<double> xi_sq;
        std::vector<double> xi1;
    };

    ModeTable modes() const {
        ModeTable t;
        t.xi_sq.resize(size());
        t.xi1.resize(size());
        for (int i = 0; i < n_[0]; ++i) {
            const double k0 = wavenumber(0, i);
            for (int j = 0; j < n_[1]; ++j) {
                const double k1 = dim_ == 2 ? wavenumber(1, j) : 0.0;
                const std::size_t idx = static_cast<std::size_t>(i) * n_[1] + j;
                t.xi_sq[idx] = k0 * k0 + k1 * k1;
                t.xi1[idx] = is_nyquist(0, i) ? 0.0 : k0;
            }
        }
        return t;
    }

    std::string describe() const {
        if (dim_ == 1) {
            return fmt::format("1D N={} L={}", n_[0], half_[0]);
        }
        return fmt::format("2D N={}x{} L={}x{}", n_[0], n_[1], half_[0], half_[1]);
    }

private:
    int dim_ = 1;
    std::array<double, 2> half_{1.0, 0.0};
    std::array<int, 2> n_{16, 1};
};

}  // namespace frontlab
