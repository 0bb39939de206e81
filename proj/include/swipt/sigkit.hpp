#pragma once

#include "swipt/common.hpp"
#include "swipt/fft.hpp"

#include <functional>

namespace swipt {

enum class Modulation { QPSK };

struct OfdmConfig {
    int n_subcarriers = 512;
    double subcarrier_spacing = 15e3;
    int oversampling = 4;
    int cp_length = 0;
    Modulation modulation = Modulation::QPSK;

    void validate() const;
    int fft_size() const { return n_subcarriers * oversampling; }
    int symbol_length() const { return fft_size() + cp_length; }
    double sample_rate() const { return subcarrier_spacing * fft_size(); }
    int bits_per_symbol() const { return 2 * n_subcarriers; }
};

// Gray QPSK, bit pair (b0, b1) -> ((1 - 2 b0) + j (1 - 2 b1)) / sqrt(2).
CVec map_bits(const std::vector<std::uint8_t>& bits, int n_subcarriers);
std::vector<std::uint8_t> demap_symbols(const CVec& symbols);
std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t n);

class OfdmModem {
public:
    explicit OfdmModem(const OfdmConfig& cfg);

    const OfdmConfig& config() const { return cfg_; }

    // One symbol, length fft_size() + cp_length.
    ComplexSignal modulate(const CVec& grid);
    void modulate_into(const CVec& grid, cd* out, bool with_cp = true);

    // Inverse of modulate for a single symbol (with CP if configured).
    CVec demodulate(const ComplexSignal& signal);
    // Demodulate fft_size() samples that carry no CP.
    void demodulate_block(const cd* x, cd* grid);

    // Full oversampled spectrum of one CP-free block, scaled like the grid.
    void to_spectrum(const cd* x, cd* bins);
    void from_spectrum(const cd* bins, cd* x);
    void spectrum_to_grid(const cd* bins, cd* grid) const;

    int bin_of(int k) const;

private:
    OfdmConfig cfg_;
    Fft fft_;
    CVec work_;
};

// A batch of random QPSK-OFDM symbols, CP-free, concatenated in time.
struct OfdmBatch {
    int n_symbols = 0;
    int block = 0;
    std::vector<std::uint8_t> bits;
    CVec grids;
    CVec samples;
};

OfdmBatch generate_ofdm(const OfdmConfig& cfg, int n_symbols, std::uint64_t seed);

double papr_db(const CVec& x);
double papr_db(const cd* x, std::size_t n);

struct CcdfPoint {
    double threshold_db;
    double probability;
};

RVec papr_samples(const OfdmConfig& cfg, std::size_t n_trials, std::uint64_t seed, int threads = 1);
std::vector<CcdfPoint> empirical_ccdf(const RVec& values, const RVec& thresholds);
std::vector<CcdfPoint> papr_ccdf(const OfdmConfig& cfg, std::size_t n_trials, std::uint64_t seed,
                                 const RVec& thresholds, int threads = 1);
RVec threshold_grid(double lo, double hi, double step);
// Value exceeded with probability p (upper empirical quantile).
double exceedance_level(RVec values, double p);

// Splits [0, n) into contiguous chunks processed on up to `threads` threads.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t, int)>& fn);

}  // namespace swipt
