#pragma once

#include "swipt/channel.hpp"
#include "swipt/compander.hpp"
#include "swipt/harvester.hpp"
#include "swipt/sigkit.hpp"

#include <optional>

namespace swipt {

struct SplitConfig {
    double rho = 1.0 - 1e-6;
    double sigma_a2 = 1e-3;
    double sigma_p2 = 1e-3;

    void validate() const;
};

struct SplitBranches {
    CVec eh;
    CVec info;
};

// The antenna noise w_a is added before the splitter (shared by both branches);
// each branch then gets its own processing noise w_p.
SplitBranches power_split(const CVec& received, const SplitConfig& split, Rng& rng);

double sinr(const SplitConfig& split, double k_l, double sigma_d2, double h_gain2, double p_rf_tx,
            bool* degenerate = nullptr);
double sinr_companded(const SplitConfig& split, const CompandedNoiseModel& m, double h_gain2, double p_rf_tx,
                      bool* degenerate = nullptr);
double achievable_rate(double sinr);

struct Harvested {
    double h_e = 0.0;
    double h_p = 0.0;
    double h_pe = 0.0;
    double p_in = 0.0;
    double eta3 = 0.0;
    // input-power contributions (signal, distortion, noise) before eta3
    double signal = 0.0;
    double distortion = 0.0;
    double noise = 0.0;
};

Harvested harvested(const SplitConfig& split, double k_l, double sigma_d2, double h_gain2, double p_rf_tx,
                    const EhModel& eh, double T = 1.0, double p_max = 0.0);
Harvested harvested_companded(const SplitConfig& split, const CompandedNoiseModel& m, double h_gain2,
                              double p_rf_tx, const EhModel& eh, double T = 1.0, double p_max = 0.0);

struct ExpandParams {
    CompanderParams compander;
    double k_norm = 1.0;  // transmitter divided the compressed signal by this
};

// Per-symbol OFDM receiver with perfect CSI: CP removal, DFT, zero forcing on
// all bins, and (for companding) IDFT, expansion and a second DFT.
class OfdmReceiver {
public:
    explicit OfdmReceiver(const OfdmConfig& cfg);

    const OfdmConfig& config() const { return modem_.config(); }
    // gain: known complex scaling between the unit-power transmit reference and the received signal.
    void set_channel(const CVec& taps, cd gain);
    void equalize(const cd* y, cd* grid, const ExpandParams* expand = nullptr);

private:
    OfdmModem modem_;
    CVec h_;
    CVec bins_;
    CVec block_;
};

std::size_t count_bit_errors(const CVec& grid_hat, const std::uint8_t* bits);

struct BerCount {
    std::size_t bits = 0;
    std::size_t errors = 0;
    double ber() const { return bits ? static_cast<double>(errors) / static_cast<double>(bits) : 0.0; }
};

// Demodulates consecutive symbols (each with CP) that went through one realization.
BerCount demodulate_and_ber(const CVec& info_branch, const ChannelRealization& realization, const OfdmConfig& cfg,
                            const std::vector<std::uint8_t>& truth_bits, cd gain,
                            const std::optional<ExpandParams>& expand = std::nullopt);

}  // namespace swipt
