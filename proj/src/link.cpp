#include "swipt/link.hpp"

#include <cmath>
#include <limits>

namespace swipt {

void SplitConfig::validate() const
{
    if (!(rho >= 0 && rho <= 1))
        throw ConfigError("power split ratio rho must be in [0, 1]");
    if (sigma_a2 < 0 || sigma_p2 < 0)
        throw ConfigError("noise variances must be non-negative");
}

SplitBranches power_split(const CVec& r, const SplitConfig& split, Rng& rng)
{
    split.validate();
    SplitBranches b;
    b.eh.resize(r.size());
    b.info.resize(r.size());
    const double se = std::sqrt(split.rho);
    const double si = std::sqrt(1.0 - split.rho);
    for (std::size_t i = 0; i < r.size(); ++i) {
        cd wa = split.sigma_a2 > 0 ? cgauss(rng, split.sigma_a2) : cd{};
        cd wpe = split.sigma_p2 > 0 ? cgauss(rng, split.sigma_p2) : cd{};
        cd wpi = split.sigma_p2 > 0 ? cgauss(rng, split.sigma_p2) : cd{};
        b.eh[i] = se * (r[i] + wa) + wpe;
        b.info[i] = si * (r[i] + wa) + wpi;
    }
    return b;
}

namespace {
double ratio_or_flag(double num, double den, bool* degenerate)
{
    if (degenerate)
        *degenerate = den <= 0;
    if (den <= 0)
        return num > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return num / den;
}
}  // namespace

double sinr(const SplitConfig& split, double k_l, double sigma_d2, double h2, double p, bool* degenerate)
{
    split.validate();
    if (k_l < 0 || sigma_d2 < 0 || h2 < 0 || p < 0)
        throw ConfigError("sinr: arguments must be non-negative");
    double gi = (1.0 - split.rho) * p;
    double num = h2 * gi * k_l * k_l;
    double den = h2 * gi * sigma_d2 + (1.0 - split.rho) * split.sigma_a2 + split.sigma_p2;
    return ratio_or_flag(num, den, degenerate);
}

double sinr_companded(const SplitConfig& split, const CompandedNoiseModel& m, double h2, double p, bool* degenerate)
{
    split.validate();
    double gi = (1.0 - split.rho) * p;
    double num = h2 * gi * m.k_l_c * m.k_l_c;
    double den = h2 * gi * m.sigma_D2 + (1.0 - split.rho) * m.sigma_w2 + split.sigma_p2;
    return ratio_or_flag(num, den, degenerate);
}

double achievable_rate(double s)
{
    if (s < 0)
        throw ConfigError("achievable_rate: SINR must be non-negative");
    return std::log2(1.0 + s);
}

namespace {
Harvested finish_harvest(double signal, double distortion, double noise, const EhModel& eh, double T, double p_max)
{
    Harvested h;
    h.signal = signal;
    h.distortion = distortion;
    h.noise = noise;
    h.p_in = signal + distortion + noise;
    h.eta3 = h.p_in > 0 ? eta3(eh, watts_to_dbm(h.p_in)) : (eh.kind == EhKind::LinearConstant ? eh.eta3_linear : 0.0);
    h.h_e = h.eta3 * h.p_in * T;
    h.h_p = h.h_e / T;
    h.h_pe = p_max > 0 ? h.h_p / p_max : 0.0;
    return h;
}
}  // namespace

Harvested harvested(const SplitConfig& split, double k_l, double sigma_d2, double h2, double p, const EhModel& eh,
                    double T, double p_max)
{
    split.validate();
    if (!(T > 0))
        throw ConfigError("harvested: symbol period must be positive");
    double ge = split.rho * p;
    return finish_harvest(h2 * ge * k_l * k_l, h2 * ge * sigma_d2, split.rho * split.sigma_a2 + split.sigma_p2, eh, T,
                          p_max > 0 ? p_max : p);
}

Harvested harvested_companded(const SplitConfig& split, const CompandedNoiseModel& m, double h2, double p,
                              const EhModel& eh, double T, double p_max)
{
    split.validate();
    if (!(T > 0))
        throw ConfigError("harvested: symbol period must be positive");
    double ge = split.rho * p;
    return finish_harvest(h2 * ge * m.k_l_c * m.k_l_c, h2 * ge * m.sigma_D2, split.rho * m.sigma_w2 + split.sigma_p2,
                          eh, T, p_max > 0 ? p_max : p);
}

OfdmReceiver::OfdmReceiver(const OfdmConfig& cfg)
    : modem_(cfg), h_(cfg.fft_size(), cd{1.0, 0.0}), bins_(cfg.fft_size()), block_(cfg.fft_size())
{
}

void OfdmReceiver::set_channel(const CVec& taps, cd gain)
{
    const auto& cfg = modem_.config();
    if (static_cast<int>(taps.size()) - 1 > cfg.cp_length)
        throw ConfigError("receiver: cyclic prefix shorter than the channel memory");
    h_ = frequency_response(taps, cfg.fft_size());
    for (auto& v : h_)
        v *= gain;
}

void OfdmReceiver::equalize(const cd* y, cd* grid, const ExpandParams* expand)
{
    const auto& cfg = modem_.config();
    const int m = cfg.fft_size();
    modem_.to_spectrum(y + cfg.cp_length, bins_.data());
    for (int i = 0; i < m; ++i)
        bins_[i] /= h_[i];
    if (expand) {
        modem_.from_spectrum(bins_.data(), block_.data());
        for (auto& v : block_)
            v *= expand->k_norm;
        expand_inplace(block_, expand->compander);
        modem_.to_spectrum(block_.data(), bins_.data());
    }
    modem_.spectrum_to_grid(bins_.data(), grid);
}

std::size_t count_bit_errors(const CVec& g, const std::uint8_t* bits)
{
    std::size_t e = 0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        e += (g[k].real() < 0) != (bits[2 * k] != 0);
        e += (g[k].imag() < 0) != (bits[2 * k + 1] != 0);
    }
    return e;
}

BerCount demodulate_and_ber(const CVec& info, const ChannelRealization& rz, const OfdmConfig& cfg,
                            const std::vector<std::uint8_t>& bits, cd gain, const std::optional<ExpandParams>& expand)
{
    const std::size_t len = cfg.symbol_length();
    if (info.size() % len != 0)
        throw ConfigError("demodulate_and_ber: signal is not a whole number of symbols");
    std::size_t ns = info.size() / len;
    if (bits.size() != ns * cfg.bits_per_symbol())
        throw ConfigError("demodulate_and_ber: truth bits do not match the number of symbols");
    OfdmReceiver rx(cfg);
    rx.set_channel(rz.taps, gain * std::pow(10.0, rz.path_loss_db / 20.0));
    CVec grid(cfg.n_subcarriers);
    BerCount c;
    for (std::size_t s = 0; s < ns; ++s) {
        rx.equalize(info.data() + s * len, grid.data(), expand ? &*expand : nullptr);
        c.errors += count_bit_errors(grid, bits.data() + s * cfg.bits_per_symbol());
        c.bits += cfg.bits_per_symbol();
    }
    return c;
}

}  // namespace swipt
