#include "swipt/config.hpp"
#include "swipt/experiments.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>

using namespace swipt;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Context {
    std::string command;
    RunConfig rc;
    Provenance prov;
    fs::path out;
    json manifest_extra = json::object();
    std::vector<std::string> files;
};

std::ofstream open_out(Context& ctx, const std::string& name)
{
    fs::path p = ctx.out / name;
    std::ofstream f(p, std::ios::binary);
    if (!f)
        throw std::runtime_error("cannot write " + p.string());
    ctx.files.push_back(name);
    return f;
}

Provenance prov_for(const Context& ctx, const std::string& kind) { return {kind, ctx.prov.config_hash, ctx.prov.seed}; }

struct Series {
    std::string name;
    RVec x, y;
};

// Bare-bones line chart; enough to eyeball a curve without a plotting stack.
void write_svg(Context& ctx, const std::string& name, const std::string& title, const std::string& xlabel,
               const std::string& ylabel, const std::vector<Series>& series, bool logy)
{
    const double w = 640, h = 420, ml = 70, mr = 20, mt = 40, mb = 50;
    double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
    auto ty = [&](double v) { return logy ? std::log10(v) : v; };
    for (const auto& s : series)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (logy && !(s.y[i] > 0))
                continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, ty(s.y[i]));
            y1 = std::max(y1, ty(s.y[i]));
        }
    if (!(x1 > x0))
        x1 = x0 + 1;
    if (!(y1 > y0))
        y1 = y0 + 1;
    auto px = [&](double v) { return ml + (v - x0) / (x1 - x0) * (w - ml - mr); };
    auto py = [&](double v) { return h - mb - (ty(v) - y0) / (y1 - y0) * (h - mt - mb); };
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    auto f = open_out(ctx, name);
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    f << "<text x=\"" << w / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title << "</text>\n";
    f << "<rect x=\"" << ml << "\" y=\"" << mt << "\" width=\"" << w - ml - mr << "\" height=\"" << h - mt - mb
      << "\" fill=\"none\" stroke=\"black\"/>\n";
    f << "<text x=\"" << w / 2 << "\" y=\"" << h - 12 << "\" text-anchor=\"middle\" font-size=\"12\">" << xlabel
      << "</text>\n";
    f << "<text x=\"16\" y=\"" << h / 2 << "\" font-size=\"12\" transform=\"rotate(-90 16 " << h / 2
      << ")\" text-anchor=\"middle\">" << ylabel << (logy ? " (log10)" : "") << "</text>\n";
    for (int k = 0; k <= 4; ++k) {
        double xv = x0 + k * (x1 - x0) / 4, yv = y0 + k * (y1 - y0) / 4;
        f << "<text x=\"" << px(xv) << "\" y=\"" << h - mb + 16 << "\" font-size=\"10\" text-anchor=\"middle\">"
          << format_number(std::round(xv * 1000) / 1000) << "</text>\n";
        double yy = h - mb - (yv - y0) / (y1 - y0) * (h - mt - mb);
        f << "<text x=\"" << ml - 6 << "\" y=\"" << yy + 3 << "\" font-size=\"10\" text-anchor=\"end\">"
          << format_number(std::round(yv * 1000) / 1000) << "</text>\n";
    }
    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        f << "<polyline fill=\"none\" stroke=\"" << colors[si % 6] << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i)
            if (!logy || s.y[i] > 0)
                f << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
        f << "\"/>\n";
        f << "<text x=\"" << w - mr - 8 << "\" y=\"" << mt + 16 + 14 * si << "\" font-size=\"11\" text-anchor=\"end\" fill=\""
          << colors[si % 6] << "\">" << s.name << "</text>\n";
    }
    f << "</svg>\n";
}

std::string tag(double v) { return format_number(v); }

void cmd_papr(Context& ctx)
{
    const Scenario& s = ctx.rc.scenario;
    const auto& job = ctx.rc.papr;
    OfdmConfig c = s.ofdm;
    c.cp_length = 0;
    double peak = ensemble_peak(c, s.peak_symbols, splitmix64(s.seed + 11), s.peak_mode, s.peak_quantile);
    RVec thr = threshold_grid(job.lo_db, job.hi_db, job.step_db);
    auto f = open_out(ctx, "papr_ccdf.csv");
    write_header(f, prov_for(ctx, "papr_ccdf"), {"mu", "threshold_db", "ccdf"});
    auto g = open_out(ctx, "papr_summary.csv");
    write_header(g, prov_for(ctx, "papr_summary"), {"mu", "peak", "level", "papr_db", "reduction_db"});
    std::vector<Series> plot;
    double ref = NAN;
    for (double mu : job.mu_grid) {
        RVec v = companded_papr_samples(c, mu, peak, s.trials, s.seed, ctx.rc.threads);
        auto ccdf = empirical_ccdf(v, thr);
        Series sr{"mu=" + tag(mu), {}, {}};
        for (const auto& p : ccdf) {
            f << tag(mu) << ',' << tag(p.threshold_db) << ',' << tag(p.probability) << "\n";
            sr.x.push_back(p.threshold_db);
            sr.y.push_back(p.probability);
        }
        plot.push_back(sr);
        double lvl = exceedance_level(v, job.level);
        if (std::isnan(ref))
            ref = mu == 0.0 ? lvl : exceedance_level(papr_samples(c, s.trials, s.seed, ctx.rc.threads), job.level);
        g << tag(mu) << ',' << tag(peak) << ',' << tag(job.level) << ',' << tag(lvl) << ',' << tag(ref - lvl) << "\n";
    }
    ctx.manifest_extra["peak"] = peak;
    if (ctx.rc.svg)
        write_svg(ctx, "papr_ccdf.svg", "PAPR CCDF", "PAPR threshold [dB]", "P(PAPR > threshold)", plot, true);
    std::cout << "papr: " << job.mu_grid.size() << " curve(s), " << s.trials << " symbols each\n";
}

void cmd_dpd_design(Context& ctx)
{
    const Scenario& s = ctx.rc.scenario;
    OfdmConfig c = s.ofdm;
    c.cp_length = 0;
    DpdOptions o = s.dpd;
    o.baseline_ibo_db = s.baseline_ibo_db;
    o.evm_tolerance = s.evm_tolerance;
    o.n_symbols = s.design_symbols;
    auto d = design_ibo_reduction(s.pa, o, c, s.seed);
    {
        auto f = open_out(ctx, "dpd_design.txt");
        f << d.to_text();
    }
    auto f = open_out(ctx, "dpd_evm.csv");
    write_header(f, prov_for(ctx, "dpd_evm"), {"ibo_reduction_db", "ibo_db", "evm_dpd", "evm_baseline", "eta1"});
    Series sr{"EVM with DPD", {}, {}}, sb{"baseline EVM", {}, {}};
    for (const auto& [r, e] : d.evm_curve) {
        f << tag(r) << ',' << tag(s.baseline_ibo_db - r) << ',' << tag(e) << ',' << tag(d.evm_baseline) << ','
          << tag(backoff_efficiency(s.baseline_ibo_db - r)) << "\n";
        sr.x.push_back(r);
        sr.y.push_back(e);
        sb.x.push_back(r);
        sb.y.push_back(d.evm_baseline);
    }
    if (ctx.rc.svg && !sr.x.empty())
        write_svg(ctx, "dpd_evm.svg", "EVM vs IBO reduction", "IBO reduction [dB]", "EVM", {sr, sb}, false);
    double gain = backoff_efficiency(s.baseline_ibo_db - d.ibo_reduction_db) - backoff_efficiency(s.baseline_ibo_db);
    ctx.manifest_extra["ibo_reduction_db"] = d.ibo_reduction_db;
    ctx.manifest_extra["degenerate"] = d.degenerate;
    std::cout << "dpd-design: IBO reduction " << format_number(d.ibo_reduction_db) << " dB, efficiency gain "
              << format_number(100 * gain) << " pts, EVM " << format_number(d.evm_baseline) << " -> "
              << format_number(d.evm_with_dpd) << (d.degenerate ? " [degenerate]" : "") << "\n";
    if (!d.diagnostics.empty())
        std::cout << "  " << d.diagnostics << "\n";
}

void cmd_mu_sweep(Context& ctx)
{
    const Scenario& s = ctx.rc.scenario;
    OfdmConfig c = s.ofdm;
    c.cp_length = 0;
    const auto& opt = s.mu_search;
    auto batch = generate_ofdm(c, opt.n_symbols, s.seed);
    double peak = ensemble_peak(c, s.peak_symbols, splitmix64(s.seed + 11), s.peak_mode, s.peak_quantile);
    auto ms = optimize_mu(batch.samples, peak, s.pa, opt, c.n_subcarriers);
    auto f = open_out(ctx, "mu_sweep.csv");
    write_header(f, prov_for(ctx, "mu_sweep"),
                 {"mu", "snr_db", "papr_reduction_db", "ibo_db", "k_l_c", "sigma_d_c2"});
    Series sr{"mean SNR", {}, {}};
    for (const auto& p : ms.grid) {
        double red = companded_papr_reduction(c, p.mu, peak, s.trials, s.seed).reduction_db;
        for (std::size_t i = 0; i < opt.ibo_grid.size(); ++i)
            f << tag(p.mu) << ',' << tag(p.snr_db) << ',' << tag(red) << ',' << tag(opt.ibo_grid[i]) << ','
              << tag(p.k_l_c[i]) << ',' << tag(p.sigma_d_c2[i]) << "\n";
        sr.x.push_back(p.mu);
        sr.y.push_back(p.snr_db);
    }
    if (ctx.rc.svg)
        write_svg(ctx, "mu_sweep.svg", "Companded SNR vs mu", "mu", "SNR [dB]", {sr}, false);
    ctx.manifest_extra["mu_star"] = ms.mu_star;
    ctx.manifest_extra["peak"] = peak;
    std::cout << "mu-sweep: mu* = " << format_number(ms.mu_star) << " (SNR " << format_number(ms.snr_db_star)
              << " dB, A = " << format_number(peak) << ")\n";
}

void cmd_e2e(Context& ctx)
{
    const Scenario& s = ctx.rc.scenario;
    const int th = ctx.rc.threads;
    Scenario awgn = s;
    awgn.channel.kind = ChannelKind::Awgn;
    auto d = design_techniques(awgn);
    std::vector<LinkMetrics> table;
    for (Technique t : all_techniques()) {
        awgn.technique = t;
        table.push_back(run_scenario(awgn, d, {true, true, th}));
    }
    {
        auto f = open_out(ctx, "table1.csv");
        write_metrics_csv(f, prov_for(ctx, "table1"), table);
    }
    std::cout << "technique        IBO[dB]  eta1[%]  eta3[%]  eta1*eta3[%]\n";
    for (const auto& r : table) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "%-15s  %6.2f   %6.2f   %6.2f   %6.2f\n", to_string(r.technique).c_str(),
                      r.ibo_db, 100 * r.eta1, 100 * r.eta3, 100 * r.eta_e2e);
        std::cout << buf;
    }

    std::vector<LinkMetrics> ch_rows;
    for (ChannelKind k : ctx.rc.e2e.channels) {
        Scenario p = s;
        p.channel.kind = k;
        // CP follows the channel, so the designs are recomputed per channel kind
        auto dk = design_techniques(p);
        for (Technique t : all_techniques()) {
            p.technique = t;
            ch_rows.push_back(run_scenario(p, dk, {true, true, th}));
        }
    }
    {
        auto f = open_out(ctx, "channels.csv");
        write_metrics_csv(f, prov_for(ctx, "channels"), ch_rows);
    }
    if (ctx.rc.sweep.axis) {
        auto r = sweep(*ctx.rc.sweep.axis, ctx.rc.sweep.values, s, {true, true, th});
        auto name = to_string(r.axis);
        auto f = open_out(ctx, "sweep_" + name + ".csv");
        write_metrics_csv(f, prov_for(ctx, "sweep_" + name), r.rows, name);
    }
    ctx.manifest_extra["mu"] = d.mu;
    ctx.manifest_extra["peak"] = d.peak;
}

void cmd_ber(Context& ctx)
{
    const Scenario& s = ctx.rc.scenario;
    const auto& job = ctx.rc.ber;
    auto f = open_out(ctx, "ber.csv");
    write_header(f, prov_for(ctx, "ber"),
                 {"channel", "technique", "ebn0_db", "bits", "errors", "ber", "ber_ci", "ber_awgn_theory"});
    std::vector<Series> plot;
    for (ChannelKind k : job.channels) {
        Scenario p = s;
        p.channel.kind = k;
        auto d = design_techniques(p);
        for (Technique t : job.techniques) {
            p.technique = t;
            Series sr{to_string(k) + "/" + to_string(t), {}, {}};
            for (const auto& b : ber_curve(p, d, job.ebn0_db, ctx.rc.threads)) {
                f << to_string(k) << ',' << to_string(t) << ',' << tag(b.ebn0_db) << ',' << b.bits << ',' << b.errors
                  << ',' << tag(b.ber) << ',' << tag(b.ci) << ',' << tag(qfunc(std::sqrt(2 * from_db10(b.ebn0_db))))
                  << "\n";
                sr.x.push_back(b.ebn0_db);
                sr.y.push_back(b.ber);
            }
            plot.push_back(sr);
        }
    }
    if (ctx.rc.svg)
        write_svg(ctx, "ber.svg", "Uncoded BER", "Eb/N0 [dB]", "BER", plot, true);
    std::cout << "ber: " << plot.size() << " curve(s) written\n";
}

void cmd_rate_energy(Context& ctx)
{
    const Scenario& s = ctx.rc.scenario;
    const auto& job = ctx.rc.rate_energy;
    RVec rho = job.rho;
    if (rho.empty())
        for (int i = 0; i <= 20; ++i)
            rho.push_back(i / 20.0);
    OfdmConfig c = s.ofdm;
    c.cp_length = 0;
    auto batch = generate_ofdm(c, job.n_symbols, s.seed);
    double peak = ensemble_peak(c, s.peak_symbols, splitmix64(s.seed + 11), s.peak_mode, s.peak_quantile);
    double mu = s.mu ? *s.mu : optimize_mu(batch.samples, peak, s.pa, s.mu_search, c.n_subcarriers).mu_star;
    CompanderParams cp{mu, peak};
    double k_norm = compressed_rms(batch.samples, cp);

    auto f = open_out(ctx, "rate_energy.csv");
    write_header(f, prov_for(ctx, "rate_energy"),
                 {"ibo_db", "rho", "rate_bps_hz", "harvested_norm", "rate_companded", "harvested_norm_companded",
                  "k_l", "sigma_d2", "k_l_c", "sigma_d_c2"});
    std::vector<Series> plot;
    for (double ibo : job.ibo_db) {
        TxChain plain, comp;
        plain.pa = comp.pa = s.pa;
        plain.ibo_db = comp.ibo_db = ibo;
        comp.technique = Technique::Companding;
        comp.compander = cp;
        comp.k_norm = k_norm;
        auto bp = calibrate_chain(plain, batch).vs_input;
        auto bc = calibrate_chain(comp, batch).vs_input;
        double kl = std::abs(bp.k_complex), klc = std::abs(bc.k_complex);
        Series sr{"IBO " + tag(ibo) + " dB", {}, {}};
        for (double r : rho) {
            SplitConfig sp = s.split;
            sp.rho = r;
            auto nm = make_noise_model(klc, bc.sigma_d2, mu, peak, c.n_subcarriers, sp.sigma_a2);
            double rate = achievable_rate(sinr(sp, kl, bp.sigma_d2, job.h_gain2, job.p_rf_tx));
            double hpe = harvested(sp, kl, bp.sigma_d2, job.h_gain2, job.p_rf_tx, s.eh).h_pe;
            double rate_c = achievable_rate(sinr_companded(sp, nm, job.h_gain2, job.p_rf_tx));
            double hpe_c = harvested_companded(sp, nm, job.h_gain2, job.p_rf_tx, s.eh).h_pe;
            f << tag(ibo) << ',' << tag(r) << ',' << tag(rate) << ',' << tag(hpe) << ',' << tag(rate_c) << ','
              << tag(hpe_c) << ',' << tag(kl) << ',' << tag(bp.sigma_d2) << ',' << tag(klc) << ','
              << tag(bc.sigma_d2) << "\n";
            sr.x.push_back(hpe);
            sr.y.push_back(rate);
        }
        plot.push_back(sr);
    }
    if (ctx.rc.svg)
        write_svg(ctx, "rate_energy.svg", "Rate-energy region", "H_P/E", "rate [bit/s/Hz]", plot, false);
    ctx.manifest_extra["mu"] = mu;
    std::cout << "rate-energy: " << job.ibo_db.size() << " IBO value(s) x " << rho.size() << " rho points\n";
}

void append_manifest(const Context& ctx, double seconds)
{
    json m;
    m["command"] = ctx.command;
    m["config_hash"] = ctx.prov.config_hash;
    m["seed"] = ctx.prov.seed;
    m["trials"] = ctx.rc.scenario.trials;
    m["threads"] = ctx.rc.threads;
    m["files"] = ctx.files;
    m["version"] = kVersion;
    m["runtime_s"] = seconds;
    for (auto it = ctx.manifest_extra.begin(); it != ctx.manifest_extra.end(); ++it)
        m[it.key()] = it.value();
    std::ofstream f(ctx.out / "manifest.jsonl", std::ios::app);
    if (!f)
        throw std::runtime_error("cannot write manifest in " + ctx.out.string());
    f << m.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"SWIPT OFDM link simulator: PA efficiency, harvesting and BER experiments"};
    app.require_subcommand(1);
    std::string config_path, out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials, threads;
    app.add_option("--config", config_path, "JSON configuration file");
    app.add_option("--seed", seed, "base random seed");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--trials", trials, "Monte Carlo OFDM symbols");
    app.add_option("--threads", threads, "worker threads");
    app.fallthrough();

    std::map<std::string, void (*)(Context&)> cmds{{"papr", cmd_papr},         {"dpd-design", cmd_dpd_design},
                                                   {"mu-sweep", cmd_mu_sweep}, {"e2e", cmd_e2e},
                                                   {"ber", cmd_ber},           {"rate-energy", cmd_rate_energy}};
    std::map<std::string, std::string> help{{"papr", "PAPR CCDF with optional companding"},
                                            {"dpd-design", "polynomial DPD fit and EVM-matched IBO reduction"},
                                            {"mu-sweep", "companded SNR over mu and the optimal mu"},
                                            {"e2e", "four-technique efficiency table and per-channel metrics"},
                                            {"ber", "uncoded BER curves"},
                                            {"rate-energy", "rate / harvested-power trade-off over rho"}};
    for (const auto& [name, fn] : cmds)
        app.add_subcommand(name, help[name]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    Context ctx;
    for (const auto& [name, fn] : cmds)
        if (app.got_subcommand(name))
            ctx.command = name;

    try {
        json j = config_path.empty() ? json::object() : read_config_file(config_path);
        if (!j.is_object())
            throw ConfigError("config: top level must be an object");
        if (seed)
            j["seed"] = *seed;
        if (trials)
            j["trials"] = *trials;
        if (threads)
            j["threads"] = *threads;
        if (!out_dir.empty())
            j["out"] = out_dir;
        ctx.rc = parse_config(j);
        ctx.prov.config_hash = config_hash(j);
        ctx.prov.seed = ctx.rc.scenario.seed;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }

    try {
        ctx.out = ctx.rc.out_dir;
        fs::create_directories(ctx.out);
        auto t0 = std::chrono::steady_clock::now();
        cmds.at(ctx.command)(ctx);
        double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        append_manifest(ctx, sec);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
