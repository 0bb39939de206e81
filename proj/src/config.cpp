#include "swipt/config.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace swipt {

using nlohmann::json;

namespace {

std::string at(const std::string& path, const std::string& key) { return path + "/" + key; }

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys)
{
    if (!j.is_object())
        throw ConfigError("config: expected an object at " + (path.empty() ? std::string("/") : path));
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : keys)
            ok = ok || it.key() == k;
        if (!ok) {
            std::string allowed;
            for (const char* k : keys)
                allowed += std::string(allowed.empty() ? "" : ", ") + k;
            throw ConfigError("config: unknown key '" + it.key() + "' at " + at(path, it.key()) + " (allowed: " +
                              allowed + ")");
        }
    }
}

[[noreturn]] void type_error(const std::string& where, const char* what)
{
    throw ConfigError(std::string("config: ") + where + " must be " + what);
}

void read(const json& j, const char* key, const std::string& path, double& dst)
{
    if (!j.contains(key))
        return;
    if (!j[key].is_number())
        type_error(at(path, key), "a number");
    dst = j[key].get<double>();
}

void read(const json& j, const char* key, const std::string& path, int& dst)
{
    if (!j.contains(key))
        return;
    if (!j[key].is_number_integer())
        type_error(at(path, key), "an integer");
    dst = j[key].get<int>();
}

void read(const json& j, const char* key, const std::string& path, std::uint64_t& dst)
{
    if (!j.contains(key))
        return;
    if (!j[key].is_number_unsigned())
        type_error(at(path, key), "a non-negative integer");
    dst = j[key].get<std::uint64_t>();
}

void read(const json& j, const char* key, const std::string& path, bool& dst)
{
    if (!j.contains(key))
        return;
    if (!j[key].is_boolean())
        type_error(at(path, key), "true or false");
    dst = j[key].get<bool>();
}

void read(const json& j, const char* key, const std::string& path, std::string& dst)
{
    if (!j.contains(key))
        return;
    if (!j[key].is_string())
        type_error(at(path, key), "a string");
    dst = j[key].get<std::string>();
}

void read(const json& j, const char* key, const std::string& path, RVec& dst)
{
    if (!j.contains(key))
        return;
    const json& a = j[key];
    if (!a.is_array())
        type_error(at(path, key), "an array of numbers");
    RVec v;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number())
            type_error(at(path, key) + "/" + std::to_string(i), "a number");
        v.push_back(a[i].get<double>());
    }
    dst = v;
}

// number or null; null clears
void read(const json& j, const char* key, const std::string& path, std::optional<double>& dst)
{
    if (!j.contains(key))
        return;
    if (j[key].is_null()) {
        dst.reset();
        return;
    }
    if (!j[key].is_number())
        type_error(at(path, key), "a number or null");
    dst = j[key].get<double>();
}

template <class T, class F>
void read_list(const json& j, const char* key, const std::string& path, std::vector<T>& dst, F parse)
{
    if (!j.contains(key))
        return;
    const json& a = j[key];
    if (!a.is_array())
        type_error(at(path, key), "an array of strings");
    std::vector<T> v;
    for (std::size_t i = 0; i < a.size(); ++i) {
        std::string where = at(path, key) + "/" + std::to_string(i);
        if (!a[i].is_string())
            type_error(where, "a string");
        try {
            v.push_back(parse(a[i].get<std::string>()));
        } catch (const ConfigError& e) {
            throw ConfigError(std::string(e.what()) + " at " + where);
        }
    }
    dst = v;
}

template <class F>
auto parse_at(const std::string& where, F f)
{
    try {
        return f();
    } catch (const ConfigError& e) {
        throw ConfigError(std::string(e.what()) + " at " + where);
    }
}

PaModel read_pa(const json& j, const std::string& path)
{
    check_keys(j, path, {"kind", "a_sat", "smoothness", "coeffs"});
    std::string kind = "sspa";
    double a = 1.0, p = 1.2;
    RVec coeffs;
    read(j, "kind", path, kind);
    read(j, "a_sat", path, a);
    read(j, "smoothness", path, p);
    read(j, "coeffs", path, coeffs);
    PaModel pa;
    if (kind == "sspa")
        pa = PaModel::sspa(a, p);
    else if (kind == "soft_limiter")
        pa = PaModel::soft_limiter(a);
    else if (kind == "linear")
        pa = PaModel::linear();
    else if (kind == "polynomial")
        pa = PaModel::polynomial(coeffs, a);
    else
        throw ConfigError("config: unknown PA kind '" + kind + "' at " + at(path, "kind") +
                          " (expected sspa, soft_limiter, linear, polynomial)");
    parse_at(path, [&] {
        pa.validate();
        return 0;
    });
    return pa;
}

}  // namespace

RunConfig parse_config(const json& j)
{
    check_keys(j, "", {"name", "seed", "trials", "threads", "out", "svg", "ofdm", "pa", "baseline_ibo_db",
                       "technique", "channel", "split", "eh", "p_rf_tx_dbm", "eh_rx_dbm", "eh_noise_dbm",
                       "eh_snr_db", "ebn0_db", "dpd", "compander", "mu_search", "ibo_reduction_db", "evm_tolerance",
                       "design_symbols", "batches", "papr", "ber", "sweep", "rate_energy", "e2e"});
    RunConfig rc;
    Scenario& s = rc.scenario;
    read(j, "name", "", s.name);
    read(j, "seed", "", s.seed);
    read(j, "trials", "", s.trials);
    read(j, "threads", "", rc.threads);
    read(j, "out", "", rc.out_dir);
    read(j, "svg", "", rc.svg);
    read(j, "baseline_ibo_db", "", s.baseline_ibo_db);
    read(j, "p_rf_tx_dbm", "", s.p_rf_tx_dbm);
    read(j, "eh_rx_dbm", "", s.eh_rx_dbm);
    read(j, "eh_noise_dbm", "", s.eh_noise_dbm);
    read(j, "eh_snr_db", "", s.eh_snr_db);
    read(j, "ebn0_db", "", s.ebn0_db);
    read(j, "ibo_reduction_db", "", s.ibo_reduction_db);
    read(j, "evm_tolerance", "", s.evm_tolerance);
    read(j, "design_symbols", "", s.design_symbols);
    read(j, "batches", "", s.batches);
    if (j.contains("technique")) {
        std::string t;
        read(j, "technique", "", t);
        s.technique = parse_at("/technique", [&] { return parse_technique(t); });
    }

    if (j.contains("ofdm")) {
        const json& o = j["ofdm"];
        check_keys(o, "/ofdm", {"n_subcarriers", "subcarrier_spacing", "oversampling", "cp_length", "modulation"});
        read(o, "n_subcarriers", "/ofdm", s.ofdm.n_subcarriers);
        read(o, "subcarrier_spacing", "/ofdm", s.ofdm.subcarrier_spacing);
        read(o, "oversampling", "/ofdm", s.ofdm.oversampling);
        read(o, "cp_length", "/ofdm", s.ofdm.cp_length);
        std::string mod = "qpsk";
        read(o, "modulation", "/ofdm", mod);
        if (mod != "qpsk")
            throw ConfigError("config: unsupported modulation '" + mod + "' at /ofdm/modulation (only qpsk)");
    }
    if (j.contains("pa"))
        s.pa = read_pa(j["pa"], "/pa");

    if (j.contains("channel")) {
        const json& c = j["channel"];
        check_keys(c, "/channel", {"kind", "rice_k_db", "pdp_db", "carrier_hz", "distance_m", "tap_spacing"});
        if (c.contains("kind")) {
            std::string k;
            read(c, "kind", "/channel", k);
            s.channel.kind = parse_at("/channel/kind", [&] { return parse_channel_kind(k); });
        }
        read(c, "rice_k_db", "/channel", s.channel.rice_k_db);
        read(c, "pdp_db", "/channel", s.channel.pdp_db);
        read(c, "carrier_hz", "/channel", s.channel.carrier_hz);
        read(c, "distance_m", "/channel", s.channel.distance_m);
        read(c, "tap_spacing", "/channel", s.channel.tap_spacing);
    }
    if (j.contains("split")) {
        const json& c = j["split"];
        check_keys(c, "/split", {"rho", "sigma_a2", "sigma_p2"});
        read(c, "rho", "/split", s.split.rho);
        read(c, "sigma_a2", "/split", s.split.sigma_a2);
        read(c, "sigma_p2", "/split", s.split.sigma_p2);
    }
    if (j.contains("eh")) {
        const json& c = j["eh"];
        check_keys(c, "/eh", {"kind", "eta3", "calibration", "mode"});
        std::string kind = "curve", cal, mode;
        double eta = 0.5;
        read(c, "kind", "/eh", kind);
        read(c, "eta3", "/eh", eta);
        read(c, "calibration", "/eh", cal);
        read(c, "mode", "/eh", mode);
        if (kind == "linear")
            s.eh = parse_at("/eh/eta3", [&] { return EhModel::linear(eta); });
        else if (kind == "curve")
            s.eh = cal.empty() ? EhModel::default_curve()
                               : parse_at("/eh/calibration", [&] { return EhModel::from_curve(load_calibration(cal)); });
        else
            throw ConfigError("config: unknown EH kind '" + kind + "' at /eh/kind (expected curve, linear)");
        if (!mode.empty())
            s.eh_mode = parse_at("/eh/mode", [&] { return parse_harvest_mode(mode); });
    }
    if (j.contains("dpd")) {
        const json& c = j["dpd"];
        check_keys(c, "/dpd", {"pa_order", "inverse_order", "train_max_input", "train_points", "spacing",
                               "add_ofdm_training", "search_max_db", "search_step_db"});
        read(c, "pa_order", "/dpd", s.dpd.pa_order);
        read(c, "inverse_order", "/dpd", s.dpd.inverse_order);
        read(c, "train_max_input", "/dpd", s.dpd.train_max_input);
        read(c, "train_points", "/dpd", s.dpd.train_points);
        read(c, "add_ofdm_training", "/dpd", s.dpd.add_ofdm_training);
        read(c, "search_max_db", "/dpd", s.dpd.search_max_db);
        read(c, "search_step_db", "/dpd", s.dpd.search_step_db);
        std::string sp;
        read(c, "spacing", "/dpd", sp);
        if (sp == "input")
            s.dpd.spacing = RampSpacing::Input;
        else if (sp == "output" || sp.empty())
            s.dpd.spacing = RampSpacing::Output;
        else
            throw ConfigError("config: unknown ramp spacing '" + sp + "' at /dpd/spacing (expected input, output)");
        if (s.dpd.pa_order < 1 || s.dpd.inverse_order < 1 || s.dpd.pa_order > 15 || s.dpd.inverse_order > 15)
            throw ConfigError("config: DPD polynomial orders must be in [1, 15] at /dpd");
        if (s.dpd.train_points < 2 || !(s.dpd.train_max_input > 0))
            throw ConfigError("config: DPD training needs >= 2 points and a positive range at /dpd");
        if (!(s.dpd.search_step_db > 0) || !(s.dpd.search_max_db > 0))
            throw ConfigError("config: DPD search step and range must be positive at /dpd");
    }
    if (j.contains("compander")) {
        const json& c = j["compander"];
        check_keys(c, "/compander", {"mu", "peak_mode", "peak_quantile", "peak_symbols"});
        if (c.contains("mu")) {
            if (c["mu"].is_string() && c["mu"].get<std::string>() == "auto")
                s.mu.reset();
            else if (c["mu"].is_number())
                s.mu = c["mu"].get<double>();
            else
                type_error("/compander/mu", "a number or \"auto\"");
        }
        std::string pm;
        read(c, "peak_mode", "/compander", pm);
        if (pm == "symbol_peak" || pm.empty())
            s.peak_mode = PeakMode::SymbolPeakQuantile;
        else if (pm == "sample")
            s.peak_mode = PeakMode::SampleQuantile;
        else
            throw ConfigError("config: unknown peak mode '" + pm + "' at /compander/peak_mode (expected symbol_peak, sample)");
        read(c, "peak_quantile", "/compander", s.peak_quantile);
        read(c, "peak_symbols", "/compander", s.peak_symbols);
    }
    if (j.contains("mu_search")) {
        const json& c = j["mu_search"];
        check_keys(c, "/mu_search", {"ibo_grid", "mu_grid", "sigma_a2", "resolution", "n_symbols"});
        read(c, "ibo_grid", "/mu_search", s.mu_search.ibo_grid);
        read(c, "mu_grid", "/mu_search", s.mu_search.mu_grid);
        read(c, "sigma_a2", "/mu_search", s.mu_search.sigma_a2);
        read(c, "resolution", "/mu_search", s.mu_search.resolution);
        read(c, "n_symbols", "/mu_search", s.mu_search.n_symbols);
        if (s.mu_search.ibo_grid.empty())
            throw ConfigError("config: empty IBO grid at /mu_search/ibo_grid");
        for (double m : s.mu_search.mu_grid)
            if (!(m > 0))
                throw ConfigError("config: mu grid values must be positive at /mu_search/mu_grid");
        if (!(s.mu_search.resolution > 0) || s.mu_search.n_symbols < 1)
            throw ConfigError("config: mu search resolution and symbol count must be positive at /mu_search");
    }

    if (j.contains("papr")) {
        const json& c = j["papr"];
        check_keys(c, "/papr", {"mu_grid", "lo_db", "hi_db", "step_db", "level"});
        read(c, "mu_grid", "/papr", rc.papr.mu_grid);
        read(c, "lo_db", "/papr", rc.papr.lo_db);
        read(c, "hi_db", "/papr", rc.papr.hi_db);
        read(c, "step_db", "/papr", rc.papr.step_db);
        read(c, "level", "/papr", rc.papr.level);
        if (rc.papr.mu_grid.empty())
            throw ConfigError("config: empty mu grid at /papr/mu_grid");
    }
    if (j.contains("ber")) {
        const json& c = j["ber"];
        check_keys(c, "/ber", {"ebn0_db", "channels", "techniques"});
        read(c, "ebn0_db", "/ber", rc.ber.ebn0_db);
        read_list(c, "channels", "/ber", rc.ber.channels, parse_channel_kind);
        read_list(c, "techniques", "/ber", rc.ber.techniques, parse_technique);
        if (rc.ber.ebn0_db.empty() || rc.ber.channels.empty() || rc.ber.techniques.empty())
            throw ConfigError("config: /ber lists must be non-empty");
    }
    if (j.contains("sweep")) {
        const json& c = j["sweep"];
        check_keys(c, "/sweep", {"axis", "values"});
        std::string ax;
        read(c, "axis", "/sweep", ax);
        if (!ax.empty())
            rc.sweep.axis = parse_at("/sweep/axis", [&] { return parse_sweep_axis(ax); });
        read(c, "values", "/sweep", rc.sweep.values);
        if (rc.sweep.axis && rc.sweep.values.empty())
            throw ConfigError("config: empty range at /sweep/values");
    }
    if (j.contains("rate_energy")) {
        const json& c = j["rate_energy"];
        check_keys(c, "/rate_energy", {"rho", "ibo_db", "h_gain2", "p_rf_tx", "n_symbols"});
        read(c, "rho", "/rate_energy", rc.rate_energy.rho);
        read(c, "ibo_db", "/rate_energy", rc.rate_energy.ibo_db);
        read(c, "h_gain2", "/rate_energy", rc.rate_energy.h_gain2);
        read(c, "p_rf_tx", "/rate_energy", rc.rate_energy.p_rf_tx);
        read(c, "n_symbols", "/rate_energy", rc.rate_energy.n_symbols);
        if (rc.rate_energy.ibo_db.empty())
            throw ConfigError("config: empty IBO list at /rate_energy/ibo_db");
        for (double r : rc.rate_energy.rho)
            if (!(r >= 0 && r <= 1))
                throw ConfigError("config: rho values must be in [0, 1] at /rate_energy/rho");
    }
    if (j.contains("e2e")) {
        const json& c = j["e2e"];
        check_keys(c, "/e2e", {"channels"});
        read_list(c, "channels", "/e2e", rc.e2e.channels, parse_channel_kind);
    }
    if (rc.threads < 1)
        throw ConfigError("config: threads must be >= 1 at /threads");
    parse_at("/", [&] {
        s.validate();
        return 0;
    });
    return rc;
}

json read_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    if (ss.str().find_first_not_of(" \t\r\n") == std::string::npos)
        throw ConfigError("config: '" + path + "' is empty");
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
}

RunConfig load_config(const std::string& path) { return parse_config(read_config_file(path)); }

std::string config_hash(const json& j)
{
    json c = j;
    if (c.is_object()) {
        c.erase("threads");
        c.erase("out");
    }
    std::string s = c.dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace swipt
