#include "swipt/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace swipt {

std::string to_string(Technique t)
{
    switch (t) {
    case Technique::Baseline:
        return "baseline";
    case Technique::Dpd:
        return "dpd";
    case Technique::Companding:
        return "companding";
    case Technique::DpdCompanding:
        return "dpd_companding";
    }
    return "?";
}

Technique parse_technique(const std::string& s)
{
    if (s == "baseline")
        return Technique::Baseline;
    if (s == "dpd")
        return Technique::Dpd;
    if (s == "companding")
        return Technique::Companding;
    if (s == "dpd_companding" || s == "both")
        return Technique::DpdCompanding;
    throw ConfigError("unknown technique '" + s + "' (expected baseline, dpd, companding, dpd_companding)");
}

const std::array<Technique, 4>& all_techniques()
{
    static const std::array<Technique, 4> t{Technique::Baseline, Technique::Dpd, Technique::Companding,
                                            Technique::DpdCompanding};
    return t;
}

void Scenario::validate() const
{
    ofdm.validate();
    pa.validate();
    channel.validate();
    split.validate();
    if (!std::isfinite(baseline_ibo_db))
        throw ConfigError("scenario: baseline IBO must be finite");
    if (trials < 1)
        throw ConfigError("scenario: trials must be >= 1");
    if (batches < 1)
        throw ConfigError("scenario: batches must be >= 1");
    if (design_symbols < 1 || peak_symbols < 1)
        throw ConfigError("scenario: design and peak symbol counts must be >= 1");
    if (!(peak_quantile > 0 && peak_quantile < 1))
        throw ConfigError("scenario: peak quantile must be in (0, 1)");
    if (mu && !(*mu > 0))
        throw ConfigError("scenario: mu must be positive");
    if (eh.kind == EhKind::Curve && !eh.curve)
        throw ConfigError("scenario: EH curve model without a curve");
    if (!(evm_tolerance >= 1.0))
        throw ConfigError("scenario: EVM tolerance must be >= 1");
    if (ibo_reduction_db && !std::isfinite(*ibo_reduction_db))
        throw ConfigError("scenario: IBO reduction must be finite");
}

OfdmConfig Scenario::effective_ofdm() const
{
    OfdmConfig c = ofdm;
    c.cp_length = std::max(c.cp_length, channel.delay_spread());
    return c;
}

double TechniqueDesigns::reduction_db(Technique t) const
{
    switch (t) {
    case Technique::Baseline:
        return 0.0;
    case Technique::Dpd:
        return dpd.ibo_reduction_db;
    case Technique::Companding:
        return companding.ibo_reduction_db;
    case Technique::DpdCompanding:
        return combined.total_reduction_db;
    }
    return 0.0;
}

namespace {
std::uint64_t design_seed(std::uint64_t seed) { return splitmix64(seed ^ 0x5eed0d35ULL); }

OfdmConfig without_cp(const OfdmConfig& c)
{
    OfdmConfig o = c;
    o.cp_length = 0;
    return o;
}
}  // namespace

TechniqueDesigns design_techniques(const Scenario& s)
{
    s.validate();
    const OfdmConfig c = without_cp(s.effective_ofdm());
    const std::uint64_t ds = design_seed(s.seed);

    TechniqueDesigns d;
    DpdOptions o = s.dpd;
    o.baseline_ibo_db = s.baseline_ibo_db;
    o.n_symbols = s.design_symbols;
    o.evm_tolerance = s.evm_tolerance;
    DpdFits fits = fit_dpd(s.pa, o, c, ds);
    d.dpd = design_ibo_reduction(s.pa, fits, o, c, ds);
    d.predistorter = Predistorter(fits.inverse_fit);

    d.peak = ensemble_peak(c, s.peak_symbols, splitmix64(ds + 1), s.peak_mode, s.peak_quantile);
    if (s.mu) {
        d.mu = *s.mu;
    } else {
        auto mb = generate_ofdm(c, s.mu_search.n_symbols, splitmix64(ds + 2));
        d.mu_search = optimize_mu(mb.samples, d.peak, s.pa, s.mu_search, c.n_subcarriers);
        d.mu = d.mu_search->mu_star;
    }

    auto batch = generate_ofdm(c, s.design_symbols, ds);
    OfdmModem modem(c);
    CompanderParams cp{d.mu, d.peak};
    d.companding = design_companding_reduction(batch.samples, modem, cp, s.pa, s.baseline_ibo_db, s.evm_tolerance);
    d.k_norm = d.companding.k_norm;
    d.combined = design_combined_reduction(batch.samples, modem, cp, s.pa, d.predistorter, s.baseline_ibo_db,
                                           s.evm_tolerance);
    return d;
}

void TxChain::run(const cd* x, std::size_t n, cd* ref, cd* out) const
{
    const double g = db_to_amplitude(-ibo_db);
    const bool comp = uses_companding(technique);
    const bool pd = uses_dpd(technique);
    for (std::size_t i = 0; i < n; ++i) {
        cd u = x[i];
        if (comp) {
            double r = std::abs(u);
            u = r > 0 ? u * (compress_magnitude(r, compander) / (r * k_norm)) : cd{};
        }
        ref[i] = u;
        cd v = u * g;
        if (pd)
            v = predistorter.apply(v);
        double m = std::abs(v);
        out[i] = m > 0 ? v * (pa.am_am(m) / m) : cd{};
    }
}

double operating_ibo_db(const Scenario& s, const TechniqueDesigns& d, Technique t)
{
    double r = d.reduction_db(t);
    if (s.ibo_reduction_db && t != Technique::Baseline)
        r = *s.ibo_reduction_db;
    return s.baseline_ibo_db - r;
}

TxChain make_chain(const Scenario& s, const TechniqueDesigns& d, Technique t)
{
    TxChain c;
    c.technique = t;
    c.pa = s.pa;
    c.ibo_db = operating_ibo_db(s, d, t);
    c.predistorter = d.predistorter;
    c.compander = {d.mu, d.peak};
    c.k_norm = d.k_norm;
    return c;
}

ChainCalibration calibrate_chain(const TxChain& chain, const OfdmBatch& batch)
{
    const CVec& x = batch.samples;
    CVec ref(x.size()), out(x.size());
    chain.run(x.data(), x.size(), ref.data(), out.data());
    ChainCalibration c;
    cd cross{};
    double pr = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        cross += std::conj(ref[i]) * out[i];
        pr += std::norm(ref[i]);
    }
    if (!(pr > 0))
        throw ConfigError("calibrate_chain: zero reference power");
    c.gain_ref = cross / pr;
    c.vs_input = bussgang_estimate(x, out);
    c.mean_power = mean_power(out);
    c.papr_db = papr_db(out);
    return c;
}

double qfunc(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

MeanCi batch_means(const RVec& v)
{
    MeanCi r;
    if (v.empty())
        return r;
    double n = static_cast<double>(v.size());
    for (double x : v)
        r.mean += x;
    r.mean /= n;
    if (v.size() < 2)
        return r;
    double ss = 0;
    for (double x : v)
        ss += (x - r.mean) * (x - r.mean);
    double sd = std::sqrt(ss / (n - 1));
    // Student-t 97.5% quantile, Cornish-Fisher expansion around the normal one
    const double z = 1.959963984540054;
    double nu = n - 1;
    const double z3 = z * z * z, z5 = z3 * z * z, z7 = z5 * z * z, z9 = z7 * z * z;
    double t = z + (z3 + z) / (4 * nu) + (5 * z5 + 16 * z3 + 3 * z) / (96 * nu * nu) +
               (3 * z7 + 19 * z5 + 17 * z3 - 15 * z) / (384 * std::pow(nu, 3)) +
               (79 * z9 + 776 * z7 + 1482 * z5 - 1920 * z3 - 945 * z) / (92160 * std::pow(nu, 4));
    r.half_width = t * sd / std::sqrt(n);
    return r;
}

LinkMetrics run_scenario(const Scenario& s, const TechniqueDesigns& d, const RunOptions& opt)
{
    s.validate();
    const OfdmConfig cfg = s.effective_ofdm();
    const OfdmConfig nocp = without_cp(cfg);
    const int m = cfg.fft_size();
    const int cp = cfg.cp_length;
    const int len = cfg.symbol_length();
    const Technique tech = s.technique;

    TxChain chain = make_chain(s, d, tech);
    TxChain base = make_chain(s, d, Technique::Baseline);
    auto cal_batch = generate_ofdm(nocp, s.design_symbols, design_seed(s.seed));
    ChainCalibration cal = calibrate_chain(chain, cal_batch);
    ChainCalibration cal_base = calibrate_chain(base, cal_batch);
    if (!(cal.mean_power > 0) || !(cal_base.mean_power > 0))
        throw std::runtime_error("run_scenario: transmit chain produced no power");

    LinkMetrics out;
    out.scenario = s.name;
    out.technique = tech;
    out.channel = s.channel.kind;
    out.ibo_db = chain.ibo_db;
    out.ibo_reduction_db = s.baseline_ibo_db - chain.ibo_db;
    out.eta1 = backoff_efficiency(chain.ibo_db);
    out.papr_out_db = cal.papr_db;
    out.eta1_papr = class_a_efficiency(cal.papr_db);

    const double p_tx = dbm_to_watts(s.p_rf_tx_dbm) * cal.mean_power / cal_base.mean_power;
    const double p_rx = s.eh_rx_dbm ? dbm_to_watts(*s.eh_rx_dbm)
                                    : p_tx * from_db10(path_loss_db(s.channel.carrier_hz, s.channel.distance_m));
    const double a_eh = std::sqrt(p_rx / cal.mean_power);
    SplitConfig eh_split = s.split;
    eh_split.sigma_a2 = eh_split.sigma_p2 = s.eh_snr_db ? p_rx / from_db10(*s.eh_snr_db) : dbm_to_watts(s.eh_noise_dbm);
    const double noise_var = cal_base.mean_power * cfg.oversampling / (2.0 * from_db10(s.ebn0_db));

    std::optional<ExpandParams> expand;
    if (uses_companding(tech))
        expand = ExpandParams{chain.compander, chain.k_norm};

    const std::size_t n = static_cast<std::size_t>(s.trials);
    RVec dc(n, 0.0), rf(n, 0.0);
    std::vector<std::size_t> errs(n, 0);
    parallel_for(n, opt.threads, [&](std::size_t b, std::size_t e, int) {
        OfdmModem modem(nocp);
        OfdmReceiver rx(cfg);
        CVec x(m), ref(m), sig(len), conv(len), y(len), grid(cfg.n_subcarriers);
        for (std::size_t i = b; i < e; ++i) {
            Rng rb = make_rng(s.seed, 1, i);
            auto bits = random_bits(rb, cfg.bits_per_symbol());
            modem.modulate_into(map_bits(bits, cfg.n_subcarriers), x.data(), false);
            chain.run(x.data(), m, ref.data(), sig.data() + cp);
            std::copy(sig.begin() + m, sig.end(), sig.begin());

            Rng rc = make_rng(s.seed, 2, i);
            ChannelRealization h = sample_channel(s.channel, rc, false);
            convolve_block(sig.data(), len, h.taps, conv.data());

            if (opt.eh) {
                Rng re = make_rng(s.seed, 3, i);
                CVec r(conv);
                for (auto& v : r)
                    v *= a_eh;
                auto br = power_split(r, eh_split, re);
                auto hv = harvest_dc(s.eh, br.eh, s.eh_mode);
                dc[i] = hv.dc_watts * len;
                rf[i] = hv.rf_watts * len;
            }
            if (opt.ber) {
                Rng rn = make_rng(s.seed, 4, i);
                for (int k = 0; k < len; ++k)
                    y[k] = conv[k] + cgauss(rn, noise_var);
                rx.set_channel(h.taps, cal.gain_ref);
                rx.equalize(y.data(), grid.data(), expand ? &*expand : nullptr);
                errs[i] = count_bit_errors(grid, bits.data());
            }
        }
    });

    const std::size_t nb = std::min<std::size_t>(static_cast<std::size_t>(s.batches), n);
    RVec eta_b, ber_b;
    double dc_tot = 0, rf_tot = 0;
    std::size_t err_tot = 0;
    for (std::size_t bi = 0; bi < nb; ++bi) {
        std::size_t lo = bi * n / nb, hi = (bi + 1) * n / nb;
        double bd = 0, br = 0;
        std::size_t be = 0;
        for (std::size_t i = lo; i < hi; ++i) {
            bd += dc[i];
            br += rf[i];
            be += errs[i];
        }
        dc_tot += bd;
        rf_tot += br;
        err_tot += be;
        if (br > 0)
            eta_b.push_back(bd / br);
        ber_b.push_back(static_cast<double>(be) / static_cast<double>((hi - lo) * cfg.bits_per_symbol()));
    }
    if (opt.eh) {
        out.eta3 = rf_tot > 0 ? dc_tot / rf_tot : 0.0;
        out.eta3_ci = batch_means(eta_b).half_width;
    }
    if (opt.ber) {
        out.bits = n * cfg.bits_per_symbol();
        out.bit_errors = err_tot;
        out.ber = static_cast<double>(err_tot) / static_cast<double>(out.bits);
        out.ber_ci = batch_means(ber_b).half_width;
    }
    out.eta_e2e = out.eta1 * out.eta3;

    // analytic rate and harvested power on the normalized link (|h|^2 = 1)
    out.k_l = std::abs(cal.vs_input.k_complex);
    out.sigma_d2 = cal.vs_input.sigma_d2;
    const double p = dbm_to_watts(s.p_rf_tx_dbm);
    if (uses_companding(tech)) {
        auto nm = make_noise_model(out.k_l, out.sigma_d2, chain.compander.mu, chain.compander.peak,
                                   cfg.n_subcarriers, s.split.sigma_a2);
        out.rate_bps_hz = achievable_rate(sinr_companded(s.split, nm, 1.0, p));
        out.harvested_norm = harvested_companded(s.split, nm, 1.0, p, s.eh).h_pe;
    } else {
        out.rate_bps_hz = achievable_rate(sinr(s.split, out.k_l, out.sigma_d2, 1.0, p));
        out.harvested_norm = harvested(s.split, out.k_l, out.sigma_d2, 1.0, p, s.eh).h_pe;
    }
    return out;
}

LinkMetrics run_scenario(const Scenario& s, const RunOptions& opt)
{
    return run_scenario(s, design_techniques(s), opt);
}

std::vector<LinkMetrics> table1_pipeline(const Scenario& base, int threads)
{
    Scenario s = base;
    s.channel.kind = ChannelKind::Awgn;
    auto d = design_techniques(s);
    std::vector<LinkMetrics> rows;
    for (Technique t : all_techniques()) {
        s.technique = t;
        rows.push_back(run_scenario(s, d, {true, true, threads}));
    }
    return rows;
}

std::vector<LinkMetrics> table1_pipeline(std::uint64_t seed, int threads)
{
    Scenario s;
    s.name = "table1";
    s.seed = seed;
    return table1_pipeline(s, threads);
}

std::string to_string(SweepAxis a)
{
    switch (a) {
    case SweepAxis::Rho:
        return "rho";
    case SweepAxis::Mu:
        return "mu";
    case SweepAxis::IboReduction:
        return "ibo_reduction";
    case SweepAxis::PRfTx:
        return "p_rf_tx";
    case SweepAxis::Snr:
        return "snr";
    }
    return "?";
}

SweepAxis parse_sweep_axis(const std::string& s)
{
    for (SweepAxis a : {SweepAxis::Rho, SweepAxis::Mu, SweepAxis::IboReduction, SweepAxis::PRfTx, SweepAxis::Snr})
        if (to_string(a) == s)
            return a;
    throw ConfigError("unknown sweep axis '" + s + "' (expected rho, mu, ibo_reduction, p_rf_tx, snr)");
}

SweepResult sweep(SweepAxis axis, const RVec& values, const Scenario& s, const RunOptions& opt)
{
    if (values.empty())
        throw ConfigError("sweep: empty range");
    SweepResult r;
    r.axis = axis;
    r.values = values;
    r.seed = s.seed;
    std::optional<TechniqueDesigns> shared;
    if (axis != SweepAxis::Mu)
        shared = design_techniques(s);
    for (double v : values) {
        Scenario p = s;
        switch (axis) {
        case SweepAxis::Rho:
            p.split.rho = v;
            break;
        case SweepAxis::Mu:
            p.mu = v;
            break;
        case SweepAxis::IboReduction:
            p.ibo_reduction_db = v;
            break;
        case SweepAxis::PRfTx:
            p.p_rf_tx_dbm = v;
            p.eh_rx_dbm.reset();
            break;
        case SweepAxis::Snr:
            p.ebn0_db = v;
            p.eh_snr_db = v;
            break;
        }
        LinkMetrics m = shared ? run_scenario(p, *shared, opt) : run_scenario(p, opt);
        m.axis_value = v;
        r.rows.push_back(m);
    }
    return r;
}

std::vector<BerPoint> ber_curve(const Scenario& s, const TechniqueDesigns& d, const RVec& ebn0_db, int threads)
{
    std::vector<BerPoint> out;
    for (double e : ebn0_db) {
        Scenario p = s;
        p.ebn0_db = e;
        auto m = run_scenario(p, d, {false, true, threads});
        out.push_back({s.channel.kind, s.technique, e, m.bits, m.bit_errors, m.ber, m.ber_ci});
    }
    return out;
}

std::string format_number(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

void write_header(std::ostream& os, const Provenance& p, const std::vector<std::string>& columns)
{
    os << "# swipt " << p.kind << "\n";
    os << "# config_hash: " << p.config_hash << "\n";
    os << "# seed: " << p.seed << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i)
        os << (i ? "," : "") << columns[i];
    os << "\n";
}

void write_metrics_csv(std::ostream& os, const Provenance& p, const std::vector<LinkMetrics>& rows,
                       const std::string& axis_name)
{
    write_header(os, p,
                 {"scenario", "technique", "channel", axis_name, "ibo_db", "ibo_reduction_db", "eta1", "eta1_papr",
                  "papr_out_db", "eta3", "eta3_ci", "eta_e2e", "ber", "ber_ci", "bits", "bit_errors", "rate_bps_hz",
                  "harvested_norm", "k_l", "sigma_d2"});
    for (const auto& r : rows) {
        os << r.scenario << ',' << to_string(r.technique) << ',' << to_string(r.channel) << ','
           << format_number(r.axis_value) << ',' << format_number(r.ibo_db) << ',' << format_number(r.ibo_reduction_db)
           << ',' << format_number(r.eta1) << ',' << format_number(r.eta1_papr) << ',' << format_number(r.papr_out_db)
           << ',' << format_number(r.eta3) << ',' << format_number(r.eta3_ci) << ',' << format_number(r.eta_e2e) << ','
           << format_number(r.ber) << ',' << format_number(r.ber_ci) << ',' << r.bits << ',' << r.bit_errors << ','
           << format_number(r.rate_bps_hz) << ',' << format_number(r.harvested_norm) << ',' << format_number(r.k_l)
           << ',' << format_number(r.sigma_d2) << "\n";
    }
}

}  // namespace swipt
