#pragma once

#include "swipt/common.hpp"

#include <array>
#include <memory>
#include <string>

namespace swipt {

// Piecewise-cubic efficiency curve eta3(P_in [dBm]).
class RectennaCurve {
public:
    RectennaCurve() = default;

    const RVec& knots() const { return knots_; }  // breakpoints incl. both range ends
    const std::vector<std::array<double, 4>>& segments() const { return seg_; }
    double sensitivity_dbm() const { return sens_; }
    double saturation_dbm() const { return sat_; }
    double p_min() const { return knots_.front(); }
    double p_max() const { return knots_.back(); }
    const RVec& source_p() const { return src_p_; }
    const RVec& source_eta() const { return src_eta_; }

    // Clamped to [0, 1]; zero below sensitivity; flat outside the fitted range
    // (extrapolated set when that happens).
    double eta(double p_dbm, bool* extrapolated = nullptr) const;
    // Raw piecewise polynomial value (no clamping), p inside the fitted range.
    double raw(double p_dbm) const;
    double max_fit_residual() const;
    double max_knot_jump() const;

    static RectennaCurve fit(const RVec& p_dbm, const RVec& eta, RVec interior_knots, double sensitivity_dbm);

private:
    RVec knots_;
    std::vector<std::array<double, 4>> seg_;  // c0..c3 in (p - knot_lo)
    double sens_ = -35.0;
    double sat_ = 0.0;
    RVec src_p_, src_eta_;
};

RectennaCurve parse_calibration(const std::string& text, const std::string& origin = "<string>");
RectennaCurve load_calibration(const std::string& path);
// Text of the calibration CSV shipped in data/, embedded at build time.
const std::string& default_calibration_text();
const RectennaCurve& default_rectenna();

enum class EhKind { LinearConstant, Curve };
enum class HarvestMode { Instantaneous, Average };

std::string to_string(HarvestMode m);
HarvestMode parse_harvest_mode(const std::string& s);

struct EhModel {
    EhKind kind = EhKind::Curve;
    double eta3_linear = 0.5;
    std::shared_ptr<const RectennaCurve> curve;

    static EhModel linear(double eta);
    static EhModel from_curve(RectennaCurve c);
    static EhModel default_curve();
};

double eta3(const EhModel& m, double p_in_dbm, bool* extrapolated = nullptr);

double watts_to_dbm(double w);
double dbm_to_watts(double dbm);

struct HarvestResult {
    double dc_watts = 0.0;
    double rf_watts = 0.0;   // mean input power
    double efficiency = 0.0;  // dc / rf
    HarvestMode mode = HarvestMode::Instantaneous;
    std::size_t extrapolated = 0;
};

// Samples are complex envelopes in sqrt(W): |x|^2 is instantaneous power.
HarvestResult harvest_dc(const EhModel& m, const CVec& samples, HarvestMode mode);
HarvestResult harvest_dc(const EhModel& m, const cd* samples, std::size_t n, HarvestMode mode);

}  // namespace swipt
