#include "swipt/fft.hpp"

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace swipt {

namespace {
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}
}  // namespace

Fft::Fft(int n) : n_(n)
{
    if (n <= 0)
        throw ConfigError("FFT size must be positive");
    std::lock_guard<std::mutex> lock(planner_mutex());
    auto* b = fftw_alloc_complex(static_cast<size_t>(n));
    buf_ = b;
    fwd_ = fftw_plan_dft_1d(n, b, b, FFTW_FORWARD, FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_1d(n, b, b, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft::Fft(Fft&& o) noexcept : n_(o.n_), buf_(o.buf_), fwd_(o.fwd_), bwd_(o.bwd_)
{
    o.buf_ = o.fwd_ = o.bwd_ = nullptr;
}

Fft::~Fft()
{
    if (!buf_)
        return;
    std::lock_guard<std::mutex> lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(fwd_));
    fftw_destroy_plan(static_cast<fftw_plan>(bwd_));
    fftw_free(buf_);
}

void Fft::forward(cd* data)
{
    std::memcpy(buf_, data, sizeof(cd) * n_);
    fftw_execute(static_cast<fftw_plan>(fwd_));
    std::memcpy(data, buf_, sizeof(cd) * n_);
}

void Fft::backward(cd* data)
{
    std::memcpy(buf_, data, sizeof(cd) * n_);
    fftw_execute(static_cast<fftw_plan>(bwd_));
    std::memcpy(data, buf_, sizeof(cd) * n_);
}

}  // namespace swipt
