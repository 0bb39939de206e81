#pragma once

#include "swipt/common.hpp"

namespace swipt {

// Unnormalized in-place DFT of a fixed size backed by FFTW.
// An instance owns its buffers and is not meant to be shared between threads;
// plan creation itself is serialized internally.
class Fft {
public:
    explicit Fft(int n);
    ~Fft();
    Fft(const Fft&) = delete;
    Fft& operator=(const Fft&) = delete;
    Fft(Fft&& other) noexcept;
    Fft& operator=(Fft&&) = delete;

    int size() const { return n_; }
    // X[k] = sum_n x[n] e^{-j 2 pi k n / N}
    void forward(cd* data);
    // x[n] = sum_k X[k] e^{+j 2 pi k n / N}
    void backward(cd* data);

private:
    int n_;
    void* buf_ = nullptr;
    void* fwd_ = nullptr;
    void* bwd_ = nullptr;
};

}  // namespace swipt
