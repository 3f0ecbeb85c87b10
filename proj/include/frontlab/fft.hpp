#pragma once

// Thin RAII wrapper over an in-place FFTW complex transform on a grid.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <new>
#include <span>

#include "frontlab/grid.hpp"

namespace frontlab {

namespace detail {
/// FFTW's planner is not thread safe; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace detail

class FftPlan {
public:
    explicit FftPlan(const Grid& grid) : size_(grid.size()) {
        buffer_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * size_));
        if (!buffer_) {
            throw std::bad_alloc();
        }
        std::lock_guard lock(detail::fftw_planner_mutex());
        // FFTW_ESTIMATE keeps plans, and therefore outputs, reproducible run to run
        if (grid.dim() == 1) {
            forward_ = fftw_plan_dft_1d(grid.points(0), buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_1d(grid.points(0), buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
        } else {
            forward_ = fftw_plan_dft_2d(grid.points(0), grid.points(1), buffer_, buffer_, FFTW_FORWARD,
                                        FFTW_ESTIMATE);
            backward_ = fftw_plan_dft_2d(grid.points(0), grid.points(1), buffer_, buffer_, FFTW_BACKWARD,
                                         FFTW_ESTIMATE);
        }
    }

    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;

    ~FftPlan() {
        std::lock_guard lock(detail::fftw_planner_mutex());
        fftw_destroy_plan(forward_);
        fftw_destroy_plan(backward_);
        fftw_free(buffer_);
    }

    std::size_t size() const { return size_; }

    std::span<std::complex<double>> data() {
        return {reinterpret_cast<std::complex<double>*>(buffer_), size_};
    }

    /// Real samples -> unnormalized spectrum in the buffer.
    void forward(std::span<const double> in) {
        auto d = data();
        for (std::size_t i = 0; i < size_; ++i) {
            d[i] = {in[i], 0.0};
        }
        fftw_execute(forward_);
    }

    /// Buffer spectrum -> real part of the normalized inverse.
    void backward(std::span<double> out) {
        fftw_execute(backward_);
        const double scale = 1.0 / static_cast<double>(size_);
        auto d = data();
        for (std::size_t i = 0; i < size_; ++i) {
            out[i] = d[i].real() * scale;
        }
    }

private:
    std::size_t size_;
    fftw_complex* buffer_ = nullptr;
    fftw_plan forward_ = nullptr;
    fftw_plan backward_ = nullptr;
};

}  // namespace frontlab
