#include "swipt/compander.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace swipt {

void CompanderParams::validate() const
{
    if (!(mu > 0))
        throw ConfigError("compander: mu must be positive");
    if (!(peak > 0))
        throw ConfigError("compander: peak A must be positive");
}

double compress_magnitude(double r, const CompanderParams& p)
{
    return p.peak * std::log1p(p.mu * r / p.peak) / std::log1p(p.mu);
}

double expand_magnitude(double r, const CompanderParams& p)
{
    return p.peak * std::expm1(r * std::log1p(p.mu) / p.peak) / p.mu;
}

void compress_inplace(CVec& x, const CompanderParams& p)
{
    p.validate();
    const double c = p.peak / std::log1p(p.mu);
    const double s = p.mu / p.peak;
    for (auto& v : x) {
        double r = std::abs(v);
        if (r > 0)
            v *= c * std::log1p(s * r) / r;
    }
}

void expand_inplace(CVec& x, const CompanderParams& p)
{
    p.validate();
    const double c = p.peak / p.mu;
    const double s = std::log1p(p.mu) / p.peak;
    for (auto& v : x) {
        double r = std::abs(v);
        if (r > 0)
            v *= c * std::expm1(s * r) / r;
    }
}

CVec compress(const CVec& x, const CompanderParams& p)
{
    CVec y = x;
    compress_inplace(y, p);
    return y;
}

CVec expand(const CVec& x, const CompanderParams& p)
{
    CVec y = x;
    expand_inplace(y, p);
    return y;
}

ComplexSignal compress(const ComplexSignal& x, const CompanderParams& p) { return {compress(x.samples, p), x.sample_rate}; }
ComplexSignal expand(const ComplexSignal& x, const CompanderParams& p) { return {expand(x.samples, p), x.sample_rate}; }

double compress_real(double x, const CompanderParams& p)
{
    p.validate();
    double sg = (x > 0) - (x < 0);
    return sg * compress_magnitude(std::abs(x), p);
}

double expand_real(double x, const CompanderParams& p)
{
    p.validate();
    double sg = (x > 0) - (x < 0);
    return sg * expand_magnitude(std::abs(x), p);
}

double ensemble_peak(const OfdmBatch& batch, PeakMode mode, double quantile)
{
    if (!(quantile > 0 && quantile < 1))
        throw ConfigError("ensemble_peak: quantile must be in (0, 1)");
    RVec v;
    if (mode == PeakMode::SymbolPeakQuantile) {
        v.resize(batch.n_symbols);
        for (int s = 0; s < batch.n_symbols; ++s) {
            double m = 0;
            for (int i = 0; i < batch.block; ++i)
                m = std::max(m, std::abs(batch.samples[static_cast<std::size_t>(s) * batch.block + i]));
            v[s] = m;
        }
    } else {
        v.resize(batch.samples.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = std::abs(batch.samples[i]);
    }
    return exceedance_level(std::move(v), 1.0 - quantile);
}

double ensemble_peak(const OfdmConfig& cfg, int n_symbols, std::uint64_t seed, PeakMode mode, double quantile)
{
    return ensemble_peak(generate_ofdm(cfg, n_symbols, seed), mode, quantile);
}

double compressed_rms(const CVec& x, const CompanderParams& p)
{
    p.validate();
    const double c = p.peak / std::log1p(p.mu);
    const double s = p.mu / p.peak;
    double acc = 0.0;
    for (const auto& v : x) {
        double y = c * std::log1p(s * std::abs(v));
        acc += y * y;
    }
    return std::sqrt(acc / static_cast<double>(x.size()));
}

std::size_t count_above_peak(const CVec& x, double peak)
{
    std::size_t n = 0;
    for (const auto& v : x)
        n += std::abs(v) > peak;
    return n;
}

RVec companded_papr_samples(const OfdmConfig& cfg, double mu, double peak, std::size_t trials, std::uint64_t seed,
                            int threads)
{
    if (mu == 0.0)
        return papr_samples(cfg, trials, seed, threads);
    CompanderParams p{mu, peak};
    p.validate();
    OfdmConfig c = cfg;
    c.cp_length = 0;
    c.validate();
    RVec out(trials);
    parallel_for(trials, threads, [&](std::size_t b, std::size_t e, int) {
        OfdmModem modem(c);
        CVec x(c.fft_size());
        for (std::size_t t = b; t < e; ++t) {
            Rng rng = make_rng(seed, 1, t);
            modem.modulate_into(map_bits(random_bits(rng, c.bits_per_symbol()), c.n_subcarriers), x.data(), false);
            compress_inplace(x, p);
            out[t] = papr_db(x);
        }
    });
    return out;
}

PaprReduction companded_papr_reduction(const OfdmConfig& cfg, double mu, double peak, int trials,
                                       std::uint64_t seed, double level)
{
    if (trials < 1)
        throw ConfigError("companded_papr_reduction: trials must be >= 1");
    RVec before = papr_samples(cfg, trials, seed);
    RVec after = companded_papr_samples(cfg, mu, peak, trials, seed);
    PaprReduction r;
    r.mu = mu;
    r.papr_before_db = exceedance_level(before, level);
    r.papr_after_db = exceedance_level(after, level);
    r.reduction_db = r.papr_before_db - r.papr_after_db;
    return r;
}

CompandedBussgang companded_bussgang(const CVec& x, const CompanderParams& p, double ibo_db, const PaModel& pa)
{
    CompandedBussgang out;
    out.k_norm = compressed_rms(x, p);
    const double c = p.peak / std::log1p(p.mu);
    const double s = p.mu / p.peak;
    const double g = db_to_amplitude(-ibo_db);
    cd cross{};
    double px = 0.0, py = 0.0;
    for (const auto& v : x) {
        double r = std::abs(v);
        cd y{};
        if (r > 0) {
            double u = c * std::log1p(s * r) / out.k_norm * g;
            y = v * (pa.am_am(u) / (g * r));
        }
        cross += std::conj(v) * y;
        px += std::norm(v);
        py += std::norm(y);
    }
    if (!(px > 0))
        throw ConfigError("companded_bussgang: zero input power");
    double n = static_cast<double>(x.size());
    cd k = cross / px;
    out.k_l_c = k.real();
    out.sigma_d_c2 = std::max(0.0, py / n - std::norm(k) * px / n);
    return out;
}

CompandedBussgang companded_bussgang(const OfdmConfig& cfg, double mu, double peak, double ibo_db,
                                     const PaModel& pa, int n_symbols, std::uint64_t seed)
{
    OfdmConfig c = cfg;
    c.cp_length = 0;
    auto batch = generate_ofdm(c, n_symbols, seed);
    return companded_bussgang(batch.samples, {mu, peak}, ibo_db, pa);
}

double companding_factor(double mu, double peak)
{
    if (!(mu > 0) || !(peak > 0))
        throw ConfigError("companding factor: mu and A must be positive");
    double l = std::log1p(mu);
    return (l / mu) * (l / mu) + (l / peak) * (l / peak);
}

double noise_distortion_powers(double sigma2, double mu, double peak)
{
    if (sigma2 < 0)
        throw ConfigError("noise_distortion_powers: negative variance");
    return sigma2 * companding_factor(mu, peak);
}

bool CompandedNoiseModel::consistent(double tol) const
{
    double f = companding_factor(mu, peak);
    return std::abs(sigma_w2 - sigma_a2 * f) <= tol * std::max(1.0, std::abs(sigma_w2)) &&
           std::abs(sigma_D2 - sigma_d_c2 * f) <= tol * std::max(1.0, std::abs(sigma_D2));
}

CompandedNoiseModel make_noise_model(double k_l_c, double sigma_d_c2, double mu, double peak, int n, double sigma_a2)
{
    CompandedNoiseModel m;
    m.k_l_c = k_l_c;
    m.sigma_d_c2 = sigma_d_c2;
    m.mu = mu;
    m.peak = peak;
    m.n = n;
    m.sigma_a2 = sigma_a2;
    m.sigma_w2 = noise_distortion_powers(sigma_a2, mu, peak);
    m.sigma_D2 = noise_distortion_powers(sigma_d_c2, mu, peak);
    return m;
}

double companded_snr(double mu, double peak, int n, double sigma_a2, double sigma_d_c2)
{
    if (n < 1)
        throw ConfigError("companded_snr: N must be >= 1");
    if (sigma_a2 < 0 || sigma_d_c2 < 0)
        throw ConfigError("companded_snr: negative variance");
    double noise = sigma_a2 + sigma_d_c2;
    if (noise == 0)
        return std::numeric_limits<double>::infinity();
    return 1.0 / (n * noise * companding_factor(mu, peak));
}

MuPoint evaluate_mu(const CVec& x, double mu, double peak, const PaModel& pa, const MuSearchOptions& opt, int n)
{
    MuPoint pt;
    pt.mu = mu;
    double acc = 0.0;
    for (double ibo : opt.ibo_grid) {
        auto b = companded_bussgang(x, {mu, peak}, ibo, pa);
        // distortion referred to the signal, the SNR formula assumes unit gain
        double sd = b.sigma_d_c2 / (b.k_l_c * b.k_l_c);
        pt.k_l_c.push_back(b.k_l_c);
        pt.sigma_d_c2.push_back(b.sigma_d_c2);
        acc += db10(companded_snr(mu, peak, n, opt.sigma_a2, sd));
    }
    pt.snr_db = acc / static_cast<double>(opt.ibo_grid.size());
    return pt;
}

double golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double c = b - r * (b - a), d = a + r * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc > fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

MuSearch optimize_mu(const CVec& x, double peak, const PaModel& pa, const MuSearchOptions& opt, int n)
{
    if (opt.ibo_grid.empty())
        throw ConfigError("optimize_mu: empty IBO grid");
    RVec grid = opt.mu_grid;
    if (grid.empty())
        for (int i = 1; i <= 60; ++i)
            grid.push_back(0.05 * i);
    std::sort(grid.begin(), grid.end());
    MuSearch s;
    s.peak = peak;
    std::size_t best = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        s.grid.push_back(evaluate_mu(x, grid[i], peak, pa, opt, n));
        if (s.grid[i].snr_db > s.grid[best].snr_db)
            best = i;
    }
    if (grid.size() == 1) {
        s.mu_star = grid[0];
        s.snr_db_star = s.grid[0].snr_db;
        return s;
    }
    double lo = best > 0 ? grid[best - 1] : grid[best];
    double hi = best + 1 < grid.size() ? grid[best + 1] : grid[best];
    auto f = [&](double mu) { return evaluate_mu(x, mu, peak, pa, opt, n).snr_db; };
    s.mu_star = golden_section_max(f, lo, hi, opt.resolution);
    s.snr_db_star = f(s.mu_star);
    if (s.snr_db_star < s.grid[best].snr_db) {
        s.mu_star = grid[best];
        s.snr_db_star = s.grid[best].snr_db;
    }
    return s;
}

MuSearch optimize_mu(const OfdmConfig& cfg, const PaModel& pa, const MuSearchOptions& opt, std::uint64_t seed)
{
    OfdmConfig c = cfg;
    c.cp_length = 0;
    auto batch = generate_ofdm(c, opt.n_symbols, seed);
    double peak = ensemble_peak(batch, PeakMode::SymbolPeakQuantile, 0.999);
    return optimize_mu(batch.samples, peak, pa, opt, c.n_subcarriers);
}

CompandingDesign design_companding_reduction(const CVec& x, OfdmModem& modem, const CompanderParams& p,
                                             const PaModel& pa, double baseline_ibo_db, double tolerance,
                                             double max_db, double step_db)
{
    CompandingDesign d;
    d.params = p;
    CVec xc = compress(x, p);
    d.k_norm = std::sqrt(mean_power(xc));
    for (auto& v : xc)
        v /= d.k_norm;
    d.evm_baseline = inband_evm(modem, x, apply_pa(x, pa, baseline_ibo_db));
    if (pa.kind == PaKind::Linear || d.evm_baseline < 1e-9) {
        // nothing to trade against: report no reduction
        d.evm_companded = d.evm_baseline;
        return d;
    }
    auto metric = [&](double r) { return inband_evm(modem, xc, apply_pa(xc, pa, baseline_ibo_db - r)); };
    auto s = largest_feasible_reduction(metric, tolerance * d.evm_baseline, max_db, step_db);
    d.ibo_reduction_db = s.reduction_db;
    d.evm_companded = s.value_at_reduction;
    return d;
}

CombinedDesign design_combined_reduction(const CVec& x, OfdmModem& modem, const CompanderParams& p,
                                         const PaModel& pa, const Predistorter& pd, double baseline_ibo_db,
                                         double tolerance, double max_db, double step_db)
{
    CombinedDesign d;
    d.companding = design_companding_reduction(x, modem, p, pa, baseline_ibo_db, tolerance, max_db, step_db);
    CVec xc = compress(x, p);
    for (auto& v : xc)
        v /= d.companding.k_norm;
    double ref_ibo = baseline_ibo_db - d.companding.ibo_reduction_db;
    d.evm_reference = inband_evm(modem, xc, apply_pa(xc, pa, ref_ibo));
    d.total_reduction_db = d.companding.ibo_reduction_db;
    if (pa.kind == PaKind::Linear || d.evm_reference < 1e-9) {
        d.evm_combined = d.evm_reference;
        return d;
    }
    CVec u(xc.size());
    auto metric = [&](double r) {
        double g = db_to_amplitude(-(ref_ibo - r));
        for (std::size_t i = 0; i < xc.size(); ++i)
            u[i] = xc[i] * g;
        pd.apply_inplace(u);
        apply_am_am_inplace(u, pa);
        return inband_evm(modem, xc, u);
    };
    auto s = largest_feasible_reduction(metric, tolerance * d.evm_reference, max_db, step_db);
    d.dpd_extra_db = s.reduction_db;
    d.evm_combined = s.value_at_reduction;
    d.total_reduction_db = d.companding.ibo_reduction_db + d.dpd_extra_db;
    return d;
}

}  // namespace swipt
