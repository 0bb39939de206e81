#pragma once

#include "swipt/channel.hpp"
#include "swipt/compander.hpp"
#include "swipt/dpd.hpp"
#include "swipt/harvester.hpp"
#include "swipt/link.hpp"
#include "swipt/nonlin.hpp"
#include "swipt/sigkit.hpp"

#include <array>
#include <optional>
#include <ostream>
#include <string>

namespace swipt {

enum class Technique { Baseline, Dpd, Companding, DpdCompanding };

std::string to_string(Technique t);
Technique parse_technique(const std::string& s);
const std::array<Technique, 4>& all_techniques();
inline bool uses_companding(Technique t) { return t == Technique::Companding || t == Technique::DpdCompanding; }
inline bool uses_dpd(Technique t) { return t == Technique::Dpd || t == Technique::DpdCompanding; }

struct Scenario {
    std::string name = "default";
    OfdmConfig ofdm;
    PaModel pa = PaModel::sspa(1.0, 1.2);
    double baseline_ibo_db = 8.0;
    Technique technique = Technique::Baseline;
    ChannelSpec channel;
    SplitConfig split;
    EhModel eh = EhModel::default_curve();
    HarvestMode eh_mode = HarvestMode::Instantaneous;

    double p_rf_tx_dbm = 30.0;                 // mean radiated power of the baseline chain
    std::optional<double> eh_rx_dbm = 0.0;     // pinned mean power at the EH input; unset -> path loss
    double eh_noise_dbm = -90.0;               // per-branch noise at the EH input
    std::optional<double> eh_snr_db;           // overrides eh_noise_dbm relative to the received power
    double ebn0_db = 10.0;                     // information branch, referenced to the baseline radiated power

    DpdOptions dpd;
    std::optional<double> mu = 1.25;           // unset -> optimized over the IBO grid
    PeakMode peak_mode = PeakMode::SymbolPeakQuantile;
    double peak_quantile = 0.999;
    int peak_symbols = 2000;
    MuSearchOptions mu_search;
    std::optional<double> ibo_reduction_db;    // overrides the designed reduction
    double evm_tolerance = 1.01;

    int trials = 400;                          // OFDM symbols per Monte Carlo run
    int design_symbols = 200;
    int batches = 20;
    std::uint64_t seed = 1;

    void validate() const;
    // OFDM config actually used: CP stretched to cover the channel memory.
    OfdmConfig effective_ofdm() const;
};

// Designs shared by all techniques of a scenario.
struct TechniqueDesigns {
    DpdDesign dpd;
    Predistorter predistorter;
    double mu = 1.25;
    double peak = 1.0;
    double k_norm = 1.0;
    std::optional<MuSearch> mu_search;
    CompandingDesign companding;
    CombinedDesign combined;

    double reduction_db(Technique t) const;
};

TechniqueDesigns design_techniques(const Scenario& s);

// Transmit chain of one technique at a fixed IBO. run() maps a unit-power OFDM
// block x to the chain's unit-power reference (x, or the renormalized
// compressed block) and the PA output.
struct TxChain {
    Technique technique = Technique::Baseline;
    PaModel pa;
    double ibo_db = 8.0;
    Predistorter predistorter;
    CompanderParams compander;
    double k_norm = 1.0;

    void run(const cd* x, std::size_t n, cd* ref, cd* out) const;
};

TxChain make_chain(const Scenario& s, const TechniqueDesigns& d, Technique t);
double operating_ibo_db(const Scenario& s, const TechniqueDesigns& d, Technique t);

struct ChainCalibration {
    cd gain_ref{};             // PA output vs chain reference (what the receiver divides out)
    BussgangParams vs_input;   // PA output vs the original OFDM block
    double mean_power = 0.0;   // mean PA output power
    double papr_db = 0.0;      // peak-to-mean of the calibration output
};

ChainCalibration calibrate_chain(const TxChain& chain, const OfdmBatch& batch);

struct LinkMetrics {
    std::string scenario;
    Technique technique = Technique::Baseline;
    ChannelKind channel = ChannelKind::Awgn;
    double axis_value = 0.0;
    double ibo_db = 0.0;
    double ibo_reduction_db = 0.0;
    double eta1 = 0.0;
    double eta1_papr = 0.0;
    double papr_out_db = 0.0;
    double eta3 = 0.0;
    double eta3_ci = 0.0;
    double eta_e2e = 0.0;
    double ber = 0.0;
    double ber_ci = 0.0;
    std::size_t bits = 0;
    std::size_t bit_errors = 0;
    double rate_bps_hz = 0.0;
    double harvested_norm = 0.0;
    double k_l = 0.0;
    double sigma_d2 = 0.0;
};

struct RunOptions {
    bool eh = true;
    bool ber = true;
    int threads = 1;
};

LinkMetrics run_scenario(const Scenario& s, const TechniqueDesigns& d, const RunOptions& opt = {});
LinkMetrics run_scenario(const Scenario& s, const RunOptions& opt = {});

// Four techniques over AWGN with the same designs (Table I style).
std::vector<LinkMetrics> table1_pipeline(const Scenario& base, int threads = 1);
std::vector<LinkMetrics> table1_pipeline(std::uint64_t seed, int threads = 1);

enum class SweepAxis { Rho, Mu, IboReduction, PRfTx, Snr };
std::string to_string(SweepAxis a);
SweepAxis parse_sweep_axis(const std::string& s);

struct SweepResult {
    SweepAxis axis = SweepAxis::Rho;
    RVec values;
    std::vector<LinkMetrics> rows;
    std::uint64_t seed = 0;
};

SweepResult sweep(SweepAxis axis, const RVec& values, const Scenario& s, const RunOptions& opt = {});

struct BerPoint {
    ChannelKind channel = ChannelKind::Awgn;
    Technique technique = Technique::Baseline;
    double ebn0_db = 0.0;
    std::size_t bits = 0;
    std::size_t errors = 0;
    double ber = 0.0;
    double ci = 0.0;
};

std::vector<BerPoint> ber_curve(const Scenario& s, const TechniqueDesigns& d, const RVec& ebn0_db, int threads = 1);

// Batch-means mean and 95% half-width.
struct MeanCi {
    double mean = 0.0;
    double half_width = 0.0;
};
MeanCi batch_means(const RVec& batch_values);

double qfunc(double x);

// CSV/manifest output with a provenance header.
struct Provenance {
    std::string kind;
    std::string config_hash;
    std::uint64_t seed = 0;
};

void write_header(std::ostream& os, const Provenance& p, const std::vector<std::string>& columns);
std::string format_number(double v);
void write_metrics_csv(std::ostream& os, const Provenance& p, const std::vector<LinkMetrics>& rows,
                       const std::string& axis_name = "axis");

}  // namespace swipt
