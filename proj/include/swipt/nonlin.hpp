#pragma once

#include "swipt/common.hpp"

namespace swipt {

enum class PaKind { Linear, Sspa, SoftLimiter, Polynomial };

struct PaModel {
    PaKind kind = PaKind::Sspa;
    double a_sat = 1.0;
    double smoothness = 1.2;
    RVec coeffs;  // polynomial AM/AM coefficients a_0..a_P, Polynomial only

    static PaModel linear();
    static PaModel sspa(double a_sat = 1.0, double p = 1.2);
    static PaModel soft_limiter(double a_sat = 1.0);
    static PaModel polynomial(RVec coeffs, double a_sat = 1.0);

    void validate() const;
    // Output amplitude for input amplitude m >= 0.
    double am_am(double m) const;
    // Input amplitude that produces output amplitude s (bisection on the monotone AM/AM).
    double inverse_am_am(double s) const;
    bool bounded() const { return kind == PaKind::Sspa || kind == PaKind::SoftLimiter; }
};

struct OperatingPoint {
    double ibo_db = 8.0;
    double clipping_level = 1.0;  // A_c for unit-power input

    double nu() const;
    double gain() const;  // input pre-gain 10^{-IBO/20}
};

struct BussgangParams {
    double k_l = 0.0;
    double sigma_d2 = 0.0;
    cd k_complex{};
};

double sspa_am_am(double magnitude, double a_sat, double p);
double sspa_am_am(double magnitude, const PaModel& pa);

// Phase-preserving clip of a unit-power input sample at operating point op.
cd soft_limiter(cd sample, const PaModel& pa, const OperatingPoint& op);

// Sample-wise AM/AM on samples already at the PA input level.
CVec apply_am_am(const CVec& u, const PaModel& pa);
void apply_am_am_inplace(CVec& u, const PaModel& pa);
// Scales the unit-power input by 10^{-IBO/20} and applies the PA.
CVec apply_pa(const CVec& x, const PaModel& pa, double ibo_db);
ComplexSignal apply_pa(const ComplexSignal& x, const PaModel& pa, const OperatingPoint& op);

double db_to_amplitude(double db);

// Average class-A efficiency for a signal of the given PAPR: 0.5 / 10^{PAPR/10}.
double class_a_efficiency(double papr_db);
// Average class-A efficiency when the PA runs at an amplitude back-off of ibo_db.
double backoff_efficiency(double ibo_db);

BussgangParams bussgang_estimate(const CVec& input, const CVec& output);
BussgangParams bussgang_estimate(const cd* input, const cd* output, std::size_t n);

struct AnalyticSl {
    double bracket;
    BussgangParams params;
};
// Closed-form soft-limiter linearization for a unit-power complex Gaussian input.
// as_printed selects the literal sigma_d^2 expression with the unsquared A_c/nu factor.
AnalyticSl bussgang_analytic_sl(double nu, double a_c = 1.0, bool as_printed = false);

}  // namespace swipt
