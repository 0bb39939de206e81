#pragma once

#include "swipt/dpd.hpp"
#include "swipt/nonlin.hpp"
#include "swipt/sigkit.hpp"

namespace swipt {

struct CompanderParams {
    double mu = 1.25;
    double peak = 1.0;

    void validate() const;
};

// mu-law on the complex envelope: magnitude compressed, phase kept.
double compress_magnitude(double r, const CompanderParams& p);
double expand_magnitude(double r, const CompanderParams& p);
CVec compress(const CVec& x, const CompanderParams& p);
CVec expand(const CVec& x, const CompanderParams& p);
void compress_inplace(CVec& x, const CompanderParams& p);
void expand_inplace(CVec& x, const CompanderParams& p);
ComplexSignal compress(const ComplexSignal& x, const CompanderParams& p);
ComplexSignal expand(const ComplexSignal& x, const CompanderParams& p);
// Real-signal form with sgn(x), as the law is usually written.
double compress_real(double x, const CompanderParams& p);
double expand_real(double x, const CompanderParams& p);

enum class PeakMode { SymbolPeakQuantile, SampleQuantile };

// Fixed ensemble peak: a quantile of per-symbol peak magnitudes (default) or of
// all sample magnitudes, over unit-power OFDM symbols.
double ensemble_peak(const OfdmConfig& cfg, int n_symbols, std::uint64_t seed,
                     PeakMode mode = PeakMode::SymbolPeakQuantile, double quantile = 0.999);
double ensemble_peak(const OfdmBatch& batch, PeakMode mode, double quantile);

// RMS of the compressed unit-power signal; the transmitter divides by it.
double compressed_rms(const CVec& x, const CompanderParams& p);

// Samples the fixed peak does not cover; the law still applies to them but the
// output magnitude exceeds A there.
std::size_t count_above_peak(const CVec& x, double peak);

// Per-symbol PAPR after compression (mu = 0: uncompressed), same symbols as papr_samples.
RVec companded_papr_samples(const OfdmConfig& cfg, double mu, double peak, std::size_t trials, std::uint64_t seed,
                            int threads = 1);

struct PaprReduction {
    double mu = 0.0;
    double papr_before_db = 0.0;
    double papr_after_db = 0.0;
    double reduction_db = 0.0;
};

// PAPR exceeded with probability `level` before and after compression.
PaprReduction companded_papr_reduction(const OfdmConfig& cfg, double mu, double peak, int trials,
                                       std::uint64_t seed, double level = 1e-3);

struct CompandedBussgang {
    double k_l_c = 0.0;
    double sigma_d_c2 = 0.0;
    double k_norm = 1.0;
};

// Empirical linearization of x -> compress -> /k -> IBO -> PA -> /IBO gain, against x.
CompandedBussgang companded_bussgang(const CVec& x, const CompanderParams& p, double ibo_db, const PaModel& pa);
CompandedBussgang companded_bussgang(const OfdmConfig& cfg, double mu, double peak, double ibo_db,
                                     const PaModel& pa, int n_symbols, std::uint64_t seed);

double companding_factor(double mu, double peak);
double noise_distortion_powers(double sigma2, double mu, double peak);

struct CompandedNoiseModel {
    double k_l_c = 0.0;
    double sigma_d_c2 = 0.0;
    double sigma_w2 = 0.0;
    double sigma_D2 = 0.0;
    int n = 512;
    double sigma_a2 = 1e-3;
    double mu = 1.25;
    double peak = 1.0;

    bool consistent(double tol = 1e-12) const;
};

CompandedNoiseModel make_noise_model(double k_l_c, double sigma_d_c2, double mu, double peak, int n, double sigma_a2);

// 1 / (N (sigma_a^2 + sigma_d,c^2) ((ln(1+mu)/mu)^2 + (ln(1+mu)/A)^2)); +inf when both variances vanish.
double companded_snr(double mu, double peak, int n, double sigma_a2, double sigma_d_c2);

struct MuSearchOptions {
    RVec ibo_grid{2.0, 4.0, 6.0, 8.0};
    RVec mu_grid;  // empty -> 0.05..3.0 step 0.05
    double sigma_a2 = 1e-3;
    double resolution = 1e-3;
    int n_symbols = 150;
};

struct MuPoint {
    double mu;
    double snr_db;  // averaged over the IBO grid
    RVec k_l_c;     // per IBO
    RVec sigma_d_c2;
};

struct MuSearch {
    double mu_star = 0.0;
    double snr_db_star = 0.0;
    double peak = 0.0;
    std::vector<MuPoint> grid;
};

// Objective for one mu: SNR in dB averaged over the IBO grid.
MuPoint evaluate_mu(const CVec& x, double mu, double peak, const PaModel& pa, const MuSearchOptions& opt, int n);
MuSearch optimize_mu(const CVec& x, double peak, const PaModel& pa, const MuSearchOptions& opt, int n);
MuSearch optimize_mu(const OfdmConfig& cfg, const PaModel& pa, const MuSearchOptions& opt, std::uint64_t seed);

// Generic 1-D golden-section maximizer on [lo, hi].
double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol);

struct CompandingDesign {
    CompanderParams params;
    double k_norm = 1.0;
    double ibo_reduction_db = 0.0;
    double evm_baseline = 0.0;
    double evm_companded = 0.0;
};

// Largest IBO reduction at which the compressed waveform's in-band PA distortion
// does not exceed the baseline's at the baseline IBO.
CompandingDesign design_companding_reduction(const CVec& x, OfdmModem& modem, const CompanderParams& p,
                                             const PaModel& pa, double baseline_ibo_db, double tolerance = 1.01,
                                             double max_db = 6.0, double step_db = 0.1);

struct CombinedDesign {
    CompandingDesign companding;
    double dpd_extra_db = 0.0;
    double total_reduction_db = 0.0;
    double evm_reference = 0.0;
    double evm_combined = 0.0;
};

// Companding reduction first, then the DPD EVM-matched search on the companded waveform.
CombinedDesign design_combined_reduction(const CVec& x, OfdmModem& modem, const CompanderParams& p,
                                         const PaModel& pa, const Predistorter& pd, double baseline_ibo_db,
                                         double tolerance = 1.01, double max_db = 6.0, double step_db = 0.1);

}  // namespace swipt
