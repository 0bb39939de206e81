#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace swipt {

using cd = std::complex<double>;
using CVec = std::vector<cd>;
using RVec = std::vector<double>;
using Rng = std::mt19937_64;

struct ComplexSignal {
    CVec samples;
    double sample_rate = 1.0;

    std::size_t size() const { return samples.size(); }
};

// Raised on invalid configuration or arguments; the CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Independent stream for (seed, stream, index); used so that per-symbol
// randomness does not depend on how work is split across threads.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0)
{
    std::uint64_t s = splitmix64(seed ^ splitmix64(stream * 0x632be59bd9b4e019ULL + 1));
    s = splitmix64(s ^ splitmix64(index + 0x1234567ULL));
    return Rng(s);
}

// Circular complex Gaussian with E|z|^2 = var.
inline cd cgauss(Rng& rng, double var = 1.0)
{
    std::normal_distribution<double> n(0.0, 1.0);
    double s = std::sqrt(var / 2.0);
    double re = n(rng);
    double im = n(rng);
    return {s * re, s * im};
}

double mean_power(const CVec& x);
double db10(double lin);
double from_db10(double db);

}  // namespace swipt
