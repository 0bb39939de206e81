#include "swipt/sigkit.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

namespace swipt {

double mean_power(const CVec& x)
{
    if (x.empty())
        return 0.0;
    double s = 0.0;
    for (const auto& v : x)
        s += std::norm(v);
    return s / static_cast<double>(x.size());
}

double db10(double lin) { return 10.0 * std::log10(lin); }
double from_db10(double db) { return std::pow(10.0, db / 10.0); }

void OfdmConfig::validate() const
{
    if (n_subcarriers < 2 || (n_subcarriers & (n_subcarriers - 1)) != 0)
        throw ConfigError("n_subcarriers must be a power of two >= 2, got " + std::to_string(n_subcarriers));
    if (oversampling < 1)
        throw ConfigError("oversampling_factor must be >= 1");
    if (cp_length < 0 || cp_length >= fft_size())
        throw ConfigError("cp_length must be in [0, N*L)");
    if (!(subcarrier_spacing > 0))
        throw ConfigError("subcarrier_spacing must be positive");
}

CVec map_bits(const std::vector<std::uint8_t>& bits, int n_subcarriers)
{
    std::size_t need = 2 * static_cast<std::size_t>(n_subcarriers);
    if (bits.size() != need)
        throw ConfigError("map_bits: need exactly " + std::to_string(need) + " bits for " +
                          std::to_string(n_subcarriers) + " QPSK subcarriers, got " + std::to_string(bits.size()));
    const double a = 1.0 / std::sqrt(2.0);
    CVec out(n_subcarriers);
    for (int k = 0; k < n_subcarriers; ++k) {
        double re = bits[2 * k] ? -a : a;
        double im = bits[2 * k + 1] ? -a : a;
        out[k] = {re, im};
    }
    return out;
}

std::vector<std::uint8_t> demap_symbols(const CVec& symbols)
{
    std::vector<std::uint8_t> bits(2 * symbols.size());
    for (std::size_t k = 0; k < symbols.size(); ++k) {
        bits[2 * k] = symbols[k].real() < 0 ? 1 : 0;
        bits[2 * k + 1] = symbols[k].imag() < 0 ? 1 : 0;
    }
    return bits;
}

std::vector<std::uint8_t> random_bits(Rng& rng, std::size_t n)
{
    std::vector<std::uint8_t> b(n);
    std::uint64_t word = 0;
    int left = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (left == 0) {
            word = rng();
            left = 64;
        }
        b[i] = static_cast<std::uint8_t>(word & 1u);
        word >>= 1;
        --left;
    }
    return b;
}

OfdmModem::OfdmModem(const OfdmConfig& cfg) : cfg_(cfg), fft_((cfg.validate(), cfg.fft_size())), work_(cfg.fft_size())
{
}

int OfdmModem::bin_of(int k) const
{
    int n = cfg_.n_subcarriers;
    return k < n / 2 ? k : cfg_.fft_size() - n + k;
}

void OfdmModem::modulate_into(const CVec& grid, cd* out, bool with_cp)
{
    const int n = cfg_.n_subcarriers;
    const int m = cfg_.fft_size();
    if (static_cast<int>(grid.size()) != n)
        throw ConfigError("ofdm_modulate: grid has " + std::to_string(grid.size()) + " symbols, expected " +
                          std::to_string(n));
    std::fill(work_.begin(), work_.end(), cd{});
    for (int k = 0; k < n; ++k)
        work_[bin_of(k)] = grid[k];
    fft_.backward(work_.data());
    const double s = 1.0 / std::sqrt(static_cast<double>(n));
    int cp = with_cp ? cfg_.cp_length : 0;
    for (int i = 0; i < cp; ++i)
        out[i] = work_[m - cp + i] * s;
    for (int i = 0; i < m; ++i)
        out[cp + i] = work_[i] * s;
}

ComplexSignal OfdmModem::modulate(const CVec& grid)
{
    ComplexSignal sig;
    sig.samples.resize(cfg_.symbol_length());
    sig.sample_rate = cfg_.sample_rate();
    modulate_into(grid, sig.samples.data());
    return sig;
}

void OfdmModem::to_spectrum(const cd* x, cd* bins)
{
    const int m = cfg_.fft_size();
    std::copy(x, x + m, bins);
    fft_.forward(bins);
    const double s = std::sqrt(static_cast<double>(cfg_.n_subcarriers)) / m;
    for (int i = 0; i < m; ++i)
        bins[i] *= s;
}

void OfdmModem::from_spectrum(const cd* bins, cd* x)
{
    const int m = cfg_.fft_size();
    std::copy(bins, bins + m, x);
    fft_.backward(x);
    const double s = 1.0 / std::sqrt(static_cast<double>(cfg_.n_subcarriers));
    for (int i = 0; i < m; ++i)
        x[i] *= s;
}

void OfdmModem::spectrum_to_grid(const cd* bins, cd* grid) const
{
    for (int k = 0; k < cfg_.n_subcarriers; ++k)
        grid[k] = bins[bin_of(k)];
}

void OfdmModem::demodulate_block(const cd* x, cd* grid)
{
    to_spectrum(x, work_.data());
    spectrum_to_grid(work_.data(), grid);
}

CVec OfdmModem::demodulate(const ComplexSignal& signal)
{
    if (static_cast<int>(signal.size()) != cfg_.symbol_length())
        throw ConfigError("ofdm_demodulate: signal has " + std::to_string(signal.size()) + " samples, expected " +
                          std::to_string(cfg_.symbol_length()));
    CVec grid(cfg_.n_subcarriers);
    demodulate_block(signal.samples.data() + cfg_.cp_length, grid.data());
    return grid;
}

OfdmBatch generate_ofdm(const OfdmConfig& cfg, int n_symbols, std::uint64_t seed)
{
    cfg.validate();
    if (n_symbols < 1)
        throw ConfigError("generate_ofdm: need at least one symbol");
    OfdmBatch b;
    b.n_symbols = n_symbols;
    b.block = cfg.fft_size();
    const int n = cfg.n_subcarriers;
    b.bits.resize(static_cast<std::size_t>(n_symbols) * 2 * n);
    b.grids.resize(static_cast<std::size_t>(n_symbols) * n);
    b.samples.resize(static_cast<std::size_t>(n_symbols) * b.block);
    OfdmConfig nocp = cfg;
    nocp.cp_length = 0;
    OfdmModem modem(nocp);
    for (int s = 0; s < n_symbols; ++s) {
        Rng rng = make_rng(seed, 1, s);
        auto bits = random_bits(rng, 2 * n);
        auto grid = map_bits(bits, n);
        std::copy(bits.begin(), bits.end(), b.bits.begin() + static_cast<std::ptrdiff_t>(s) * 2 * n);
        std::copy(grid.begin(), grid.end(), b.grids.begin() + static_cast<std::ptrdiff_t>(s) * n);
        modem.modulate_into(grid, b.samples.data() + static_cast<std::ptrdiff_t>(s) * b.block, false);
    }
    return b;
}

double papr_db(const cd* x, std::size_t n)
{
    if (n == 0)
        throw ConfigError("papr_db: empty signal");
    double peak = 0.0, sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double p = std::norm(x[i]);
        peak = std::max(peak, p);
        sum += p;
    }
    if (!(sum > 0.0))
        throw ConfigError("papr_db: zero-power signal");
    return 10.0 * std::log10(peak / (sum / static_cast<double>(n)));
}

double papr_db(const CVec& x) { return papr_db(x.data(), x.size()); }

void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t, std::size_t, int)>& fn)
{
    int t = std::max(1, threads);
    if (t == 1 || n < 2) {
        fn(0, n, 0);
        return;
    }
    t = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(t), n));
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(t);
    for (int w = 0; w < t; ++w) {
        std::size_t b = n * w / t, e = n * (w + 1) / t;
        pool.emplace_back([&, b, e, w] {
            try {
                fn(b, e, w);
            } catch (...) {
                errs[w] = std::current_exception();
            }
        });
    }
    for (auto& th : pool)
        th.join();
    for (auto& e : errs)
        if (e)
            std::rethrow_exception(e);
}

RVec papr_samples(const OfdmConfig& cfg, std::size_t n_trials, std::uint64_t seed, int threads)
{
    cfg.validate();
    if (n_trials < 1)
        throw ConfigError("papr_ccdf: n_trials must be >= 1");
    OfdmConfig nocp = cfg;
    nocp.cp_length = 0;
    RVec out(n_trials);
    parallel_for(n_trials, threads, [&](std::size_t b, std::size_t e, int) {
        OfdmModem modem(nocp);
        CVec x(nocp.fft_size());
        for (std::size_t i = b; i < e; ++i) {
            Rng rng = make_rng(seed, 1, i);
            auto grid = map_bits(random_bits(rng, nocp.bits_per_symbol()), nocp.n_subcarriers);
            modem.modulate_into(grid, x.data(), false);
            out[i] = papr_db(x);
        }
    });
    return out;
}

std::vector<CcdfPoint> empirical_ccdf(const RVec& values, const RVec& thresholds)
{
    RVec v = values;
    std::sort(v.begin(), v.end());
    std::vector<CcdfPoint> out;
    out.reserve(thresholds.size());
    for (double t : thresholds) {
        // fraction strictly above t; a PAPR equal to t does not exceed it
        auto it = std::upper_bound(v.begin(), v.end(), t);
        double p = static_cast<double>(v.end() - it) / static_cast<double>(v.size());
        out.push_back({t, p});
    }
    return out;
}

RVec threshold_grid(double lo, double hi, double step)
{
    RVec t;
    int n = static_cast<int>(std::floor((hi - lo) / step + 1e-9));
    for (int i = 0; i <= n; ++i)
        t.push_back(lo + step * i);
    return t;
}

std::vector<CcdfPoint> papr_ccdf(const OfdmConfig& cfg, std::size_t n_trials, std::uint64_t seed,
                                 const RVec& thresholds, int threads)
{
    return empirical_ccdf(papr_samples(cfg, n_trials, seed, threads), thresholds);
}

double exceedance_level(RVec values, double p)
{
    if (values.empty())
        throw ConfigError("exceedance_level: no values");
    std::sort(values.begin(), values.end());
    double pos = (1.0 - p) * static_cast<double>(values.size() - 1);
    std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= values.size())
        return values.back();
    double f = pos - static_cast<double>(i);
    return values[i] * (1.0 - f) + values[i + 1] * f;
}

}  // namespace swipt
