// fft.hpp — RAII wrapper around an in-place complex FFTW plan pair

#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace lrhsr {

class FftPlan {
public:
    // Row-major transform over `dims`; FFTW_ESTIMATE keeps plans (and results) deterministic.
    explicit FftPlan(const std::vector<int>& dims) : dims_(dims) {
        size_ = 1;
        for (int n : dims_) size_ *= static_cast<std::size_t>(n);
        data_ = fftw_alloc_complex(size_);
        if (!data_) throw std::bad_alloc();
        fwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), data_, data_, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd_ = fftw_plan_dft(static_cast<int>(dims_.size()), dims_.data(), data_, data_, FFTW_BACKWARD, FFTW_ESTIMATE);
        if (!fwd_ || !bwd_) {
            release();
            throw std::runtime_error("FFTW plan creation failed");
        }
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
    ~FftPlan() { release(); }

    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(data_); }
    const std::complex<double>* data() const { return reinterpret_cast<const std::complex<double>*>(data_); }
    std::size_t size() const { return size_; }

    void forward() { fftw_execute(fwd_); }  // sum_x f(x) e^{-2πi k.x/N}
    void backward() { fftw_execute(bwd_); } // unnormalized inverse

private:
    void release() {
        if (fwd_) fftw_destroy_plan(fwd_);
        if (bwd_) fftw_destroy_plan(bwd_);
        if (data_) fftw_free(data_);
        fwd_ = bwd_ = nullptr;
        data_ = nullptr;
    }

    std::vector<int> dims_;
    std::size_t size_{0};
    fftw_complex* data_{nullptr};
    fftw_plan fwd_{nullptr};
    fftw_plan bwd_{nullptr};
};

} // namespace lrhsr
