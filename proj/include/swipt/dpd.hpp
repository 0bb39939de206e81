#pragma once

#include "swipt/nonlin.hpp"
#include "swipt/sigkit.hpp"

#include <functional>
#include <limits>
#include <string>

namespace swipt {

struct PolyFit {
    int order = 0;
    RVec coeffs;
    double domain_max = 0.0;
    double residual_rms = 0.0;

    double eval(double m) const;
    bool in_domain(double m) const { return m <= domain_max * (1 + 1e-12); }
};

// Least-squares polynomial y ~ sum_i c_i x^i of the given order.
PolyFit fit_polynomial(const RVec& x, const RVec& y, int order);
PolyFit fit_pa_polynomial(const RVec& train_in, const RVec& train_out, int order);
PolyFit fit_inverse_polynomial(const RVec& train_out, const RVec& train_in, int order);

enum class RampSpacing { Input, Output };

struct TrainingSet {
    RVec in;
    RVec out;
};

// Deterministic amplitude ramp through the PA. With Output spacing the points
// are uniform in PA output amplitude up to F(max_input).
TrainingSet training_ramp(const PaModel& pa, double max_input, int n_points = 4096,
                          RampSpacing spacing = RampSpacing::Output);
void append_training(TrainingSet& t, const PaModel& pa, const CVec& pa_input);

struct PredistortStats {
    std::size_t clamped = 0;
};

class Predistorter {
public:
    Predistorter() = default;
    explicit Predistorter(PolyFit inverse) : inv_(std::move(inverse)) {}

    const PolyFit& inverse() const { return inv_; }
    cd apply(cd u, bool* clamped = nullptr) const;
    CVec apply(const CVec& u, PredistortStats* stats = nullptr) const;
    void apply_inplace(CVec& u, PredistortStats* stats = nullptr) const;

private:
    PolyFit inv_{1, {0.0, 1.0}, std::numeric_limits<double>::infinity(), 0.0};
};

ComplexSignal predistort(const ComplexSignal& signal, const PolyFit& inverse_fit, PredistortStats* stats = nullptr);

// RMS(measured - alpha ref) / RMS(alpha ref), alpha the LS complex gain.
double evm(const CVec& reference, const CVec& measured);
double evm(const cd* reference, const cd* measured, std::size_t n);
// EVM on the demodulated data subcarriers of CP-free concatenated blocks.
double inband_evm(OfdmModem& modem, const CVec& reference, const CVec& measured);

struct ReductionSearch {
    double reduction_db = 0.0;
    double target = 0.0;
    double value_at_reduction = 0.0;
    bool feasible = true;
    bool hit_upper_bound = false;
    std::vector<std::pair<double, double>> grid;  // (reduction, metric)
    std::vector<double> non_monotone_at;
};

// Largest r in [0, max_db] with metric(r) <= target on a step grid, then
// bisection between the last feasible and first infeasible grid points.
ReductionSearch largest_feasible_reduction(const std::function<double(double)>& metric, double target,
                                           double max_db = 6.0, double step_db = 0.1, int bisect_steps = 15);

struct DpdOptions {
    int pa_order = 4;
    int inverse_order = 7;
    double train_max_input = 2.7;  // multiples of a_sat
    int train_points = 4096;
    RampSpacing spacing = RampSpacing::Output;
    bool add_ofdm_training = false;
    double baseline_ibo_db = 8.0;
    double evm_tolerance = 1.01;
    double search_max_db = 6.0;
    double search_step_db = 0.1;
    int n_symbols = 200;
};

struct DpdDesign {
    PolyFit pa_fit;
    PolyFit inverse_fit;
    double ibo_reduction_db = 0.0;
    double baseline_ibo_db = 8.0;
    double evm_baseline = 0.0;
    double evm_with_dpd = 0.0;
    bool degenerate = false;
    std::string diagnostics;
    std::vector<std::pair<double, double>> evm_curve;

    std::string to_text() const;
    static DpdDesign from_text(const std::string& text);
};

struct DpdFits {
    PolyFit pa_fit;
    PolyFit inverse_fit;
};

DpdFits fit_dpd(const PaModel& pa, const DpdOptions& opt, const OfdmConfig& cfg, std::uint64_t seed);

DpdDesign design_ibo_reduction(const PaModel& pa, const DpdFits& fits, const DpdOptions& opt,
                               const OfdmConfig& cfg, std::uint64_t seed);
DpdDesign design_ibo_reduction(const PaModel& pa, const DpdOptions& opt, const OfdmConfig& cfg,
                               std::uint64_t seed);

}  // namespace swipt
