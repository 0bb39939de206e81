#include "swipt/nonlin.hpp"

#include <cmath>
#include <limits>

namespace swipt {

PaModel PaModel::linear()
{
    PaModel pa;
    pa.kind = PaKind::Linear;
    pa.a_sat = std::numeric_limits<double>::infinity();
    return pa;
}

PaModel PaModel::sspa(double a_sat, double p)
{
    PaModel pa;
    pa.kind = PaKind::Sspa;
    pa.a_sat = a_sat;
    pa.smoothness = p;
    pa.validate();
    return pa;
}

PaModel PaModel::soft_limiter(double a_sat)
{
    PaModel pa;
    pa.kind = PaKind::SoftLimiter;
    pa.a_sat = a_sat;
    pa.validate();
    return pa;
}

PaModel PaModel::polynomial(RVec coeffs, double a_sat)
{
    PaModel pa;
    pa.kind = PaKind::Polynomial;
    pa.a_sat = a_sat;
    pa.coeffs = std::move(coeffs);
    pa.validate();
    return pa;
}

void PaModel::validate() const
{
    if (!(a_sat > 0))
        throw ConfigError("PA saturation amplitude must be positive");
    if (kind == PaKind::Sspa && !(smoothness > 0))
        throw ConfigError("SSPA smoothness must be positive");
    if (kind == PaKind::Polynomial && coeffs.empty())
        throw ConfigError("polynomial PA needs coefficients");
}

double sspa_am_am(double m, double a_sat, double p)
{
    if (m < 0)
        throw ConfigError("sspa_am_am: negative magnitude");
    if (m == 0)
        return 0.0;
    double r = m / a_sat;
    // log form avoids overflow of r^{2p} for huge inputs
    double l = std::log1p(std::exp(2 * p * std::log(r))) / (2 * p);
    return m * std::exp(-l);
}

double sspa_am_am(double m, const PaModel& pa) { return sspa_am_am(m, pa.a_sat, pa.smoothness); }

double PaModel::am_am(double m) const
{
    switch (kind) {
    case PaKind::Linear:
        return m;
    case PaKind::Sspa:
        return sspa_am_am(std::abs(m), a_sat, smoothness);
    case PaKind::SoftLimiter:
        return std::min(std::abs(m), a_sat);
    case PaKind::Polynomial: {
        double v = 0.0;
        for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
            v = v * m + *it;
        return v;
    }
    }
    return m;
}

double PaModel::inverse_am_am(double s) const
{
    if (s < 0)
        throw ConfigError("inverse_am_am: negative amplitude");
    if (kind == PaKind::Linear)
        return s;
    if (kind == PaKind::Sspa) {
        if (s >= a_sat)
            throw ConfigError("inverse_am_am: output at or above saturation");
        double r = s / a_sat;
        return s / std::pow(1.0 - std::pow(r, 2 * smoothness), 1.0 / (2 * smoothness));
    }
    if (kind == PaKind::SoftLimiter) {
        if (s >= a_sat)
            throw ConfigError("inverse_am_am: output at or above saturation");
        return s;
    }
    double hi = 1.0;
    while (am_am(hi) < s) {
        hi *= 2;
        if (hi > 1e12)
            throw ConfigError("inverse_am_am: output not reachable");
    }
    double lo = 0.0;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (am_am(mid) < s ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double OperatingPoint::nu() const { return std::pow(10.0, ibo_db / 20.0); }
double OperatingPoint::gain() const { return std::pow(10.0, -ibo_db / 20.0); }
double db_to_amplitude(double db) { return std::pow(10.0, db / 20.0); }

cd soft_limiter(cd x, const PaModel& pa, const OperatingPoint& op)
{
    double r = std::abs(x);
    if (r == 0)
        return {0.0, 0.0};
    double g = op.clipping_level / op.nu();
    if (g * r <= pa.a_sat)
        return x * g;
    return x * (pa.a_sat / r);
}

void apply_am_am_inplace(CVec& u, const PaModel& pa)
{
    if (pa.kind == PaKind::Linear)
        return;
    for (auto& v : u) {
        double r = std::abs(v);
        if (r == 0)
            continue;
        v *= pa.am_am(r) / r;
    }
}

CVec apply_am_am(const CVec& u, const PaModel& pa)
{
    CVec out = u;
    apply_am_am_inplace(out, pa);
    return out;
}

CVec apply_pa(const CVec& x, const PaModel& pa, double ibo_db)
{
    double g = db_to_amplitude(-ibo_db);
    CVec u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        u[i] = x[i] * g;
    apply_am_am_inplace(u, pa);
    return u;
}

ComplexSignal apply_pa(const ComplexSignal& x, const PaModel& pa, const OperatingPoint& op)
{
    ComplexSignal out;
    out.sample_rate = x.sample_rate;
    if (pa.kind == PaKind::SoftLimiter) {
        out.samples.resize(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
            out.samples[i] = soft_limiter(x.samples[i], pa, op);
        return out;
    }
    out.samples = apply_pa(x.samples, pa, op.ibo_db);
    return out;
}

double class_a_efficiency(double papr_db)
{
    if (papr_db < 0)
        throw ConfigError("class_a_efficiency: PAPR must be >= 0 dB");
    return 0.5 / std::pow(10.0, papr_db / 10.0);
}

double backoff_efficiency(double ibo_db)
{
    if (ibo_db < 0)
        throw ConfigError("backoff_efficiency: IBO must be >= 0 dB");
    return 0.5 * std::pow(10.0, -ibo_db / 20.0);
}

BussgangParams bussgang_estimate(const cd* x, const cd* g, std::size_t n)
{
    if (n == 0)
        throw ConfigError("bussgang_estimate: empty input");
    cd cross{};
    double px = 0.0, pg = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cross += std::conj(x[i]) * g[i];
        px += std::norm(x[i]);
        pg += std::norm(g[i]);
    }
    if (!(px > 0))
        throw ConfigError("bussgang_estimate: zero input power");
    BussgangParams b;
    double dn = static_cast<double>(n);
    b.k_complex = cross / px;
    b.k_l = b.k_complex.real();
    b.sigma_d2 = std::max(0.0, pg / dn - std::norm(b.k_complex) * px / dn);
    return b;
}

BussgangParams bussgang_estimate(const CVec& input, const CVec& output)
{
    if (input.size() != output.size())
        throw ConfigError("bussgang_estimate: length mismatch");
    return bussgang_estimate(input.data(), output.data(), input.size());
}

AnalyticSl bussgang_analytic_sl(double nu, double a_c, bool as_printed)
{
    if (!(nu > 0))
        throw ConfigError("bussgang_analytic_sl: nu must be positive");
    const double e = std::exp(-nu * nu);
    const double bracket = 1.0 - e + std::sqrt(M_PI) * nu / 2.0 * std::erfc(nu);
    AnalyticSl out;
    out.bracket = bracket;
    out.params.k_l = a_c / nu * bracket;
    out.params.k_complex = out.params.k_l;
    const double k2 = out.params.k_l * out.params.k_l;
    if (as_printed)
        out.params.sigma_d2 = a_c / nu * (1.0 - e - k2);
    else
        out.params.sigma_d2 = std::max(0.0, (a_c / nu) * (a_c / nu) * (1.0 - e) - k2);
    return out;
}

}  // namespace swipt
