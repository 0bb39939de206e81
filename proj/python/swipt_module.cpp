#include "swipt/config.hpp"
#include "swipt/experiments.hpp"

#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

namespace py = pybind11;
using namespace swipt;

namespace {

using CArray = py::array_t<cd, py::array::c_style | py::array::forcecast>;
using RArray = py::array_t<double, py::array::c_style | py::array::forcecast>;

CVec to_cvec(const CArray& a)
{
    auto b = a.unchecked<1>();
    CVec v(b.shape(0));
    for (py::ssize_t i = 0; i < b.shape(0); ++i)
        v[i] = b(i);
    return v;
}

CArray to_array(const CVec& v)
{
    CArray a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

RArray to_array(const RVec& v)
{
    RArray a(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

OfdmConfig ofdm(int n, int l, int cp)
{
    OfdmConfig c;
    c.n_subcarriers = n;
    c.oversampling = l;
    c.cp_length = cp;
    c.validate();
    return c;
}

PaModel pa_from(const std::string& kind, double a_sat, double p)
{
    if (kind == "sspa")
        return PaModel::sspa(a_sat, p);
    if (kind == "soft_limiter")
        return PaModel::soft_limiter(a_sat);
    if (kind == "linear")
        return PaModel::linear();
    throw ConfigError("unknown PA kind '" + kind + "' (expected sspa, soft_limiter, linear)");
}

py::dict metrics_dict(const LinkMetrics& m)
{
    py::dict d;
    d["technique"] = to_string(m.technique);
    d["channel"] = to_string(m.channel);
    d["axis_value"] = m.axis_value;
    d["ibo_db"] = m.ibo_db;
    d["ibo_reduction_db"] = m.ibo_reduction_db;
    d["eta1"] = m.eta1;
    d["eta1_papr"] = m.eta1_papr;
    d["papr_out_db"] = m.papr_out_db;
    d["eta3"] = m.eta3;
    d["eta3_ci"] = m.eta3_ci;
    d["eta_e2e"] = m.eta_e2e;
    d["ber"] = m.ber;
    d["ber_ci"] = m.ber_ci;
    d["bits"] = m.bits;
    d["bit_errors"] = m.bit_errors;
    d["rate_bps_hz"] = m.rate_bps_hz;
    d["harvested_norm"] = m.harvested_norm;
    d["k_l"] = m.k_l;
    d["sigma_d2"] = m.sigma_d2;
    return d;
}

RunConfig config_from(const std::string& json_text)
{
    nlohmann::json j;
    try {
        j = json_text.empty() ? nlohmann::json::object() : nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace

PYBIND11_MODULE(_swipt, m)
{
    m.doc() = "SWIPT OFDM link simulator: PA efficiency, companding, DPD and energy harvesting";
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);

    m.def("class_a_efficiency", &class_a_efficiency, py::arg("papr_db"));
    m.def("backoff_efficiency", &backoff_efficiency, py::arg("ibo_db"));
    m.def("papr_db", [](const CArray& x) { return papr_db(to_cvec(x)); }, py::arg("x"));

    m.def(
        "generate_ofdm",
        [](int n_symbols, std::uint64_t seed, int n, int l, int cp) {
            auto b = generate_ofdm(ofdm(n, l, cp), n_symbols, seed);
            py::array_t<std::uint8_t> bits(static_cast<py::ssize_t>(b.bits.size()));
            std::copy(b.bits.begin(), b.bits.end(), bits.mutable_data());
            return py::make_tuple(to_array(b.samples), bits);
        },
        py::arg("n_symbols"), py::arg("seed") = 1, py::arg("n_subcarriers") = 512, py::arg("oversampling") = 4,
        py::arg("cp_length") = 0, "Unit-power OFDM symbols without CP and their bits.");
    m.def(
        "papr_samples",
        [](std::size_t trials, std::uint64_t seed, int n, int l, int threads) {
            return to_array(papr_samples(ofdm(n, l, 0), trials, seed, threads));
        },
        py::arg("trials"), py::arg("seed") = 1, py::arg("n_subcarriers") = 512, py::arg("oversampling") = 4,
        py::arg("threads") = 1);
    m.def(
        "exceedance_level", [](const RArray& v, double p) {
            RVec x(v.data(), v.data() + v.size());
            return exceedance_level(x, p);
        },
        py::arg("values"), py::arg("probability"));

    m.def("sspa_am_am", static_cast<double (*)(double, double, double)>(&sspa_am_am), py::arg("r"), py::arg("a_sat") = 1.0, py::arg("p") = 1.2);
    m.def(
        "apply_pa",
        [](const CArray& x, double ibo_db, const std::string& kind, double a_sat, double p) {
            return to_array(apply_pa(to_cvec(x), pa_from(kind, a_sat, p), ibo_db));
        },
        py::arg("x"), py::arg("ibo_db"), py::arg("kind") = "sspa", py::arg("a_sat") = 1.0, py::arg("p") = 1.2);
    m.def(
        "bussgang_estimate",
        [](const CArray& x, const CArray& y) {
            auto b = bussgang_estimate(to_cvec(x), to_cvec(y));
            return py::make_tuple(b.k_complex, b.sigma_d2);
        },
        py::arg("x"), py::arg("y"), "LS gain and residual power of y against x.");
    m.def(
        "bussgang_soft_limiter",
        [](double nu) {
            auto a = bussgang_analytic_sl(nu);
            return py::make_tuple(a.params.k_l, a.params.sigma_d2);
        },
        py::arg("nu"));

    m.def(
        "compress", [](const CArray& x, double mu, double peak) { return to_array(compress(to_cvec(x), {mu, peak})); },
        py::arg("x"), py::arg("mu"), py::arg("peak"));
    m.def(
        "expand", [](const CArray& x, double mu, double peak) { return to_array(expand(to_cvec(x), {mu, peak})); },
        py::arg("x"), py::arg("mu"), py::arg("peak"));
    m.def("companding_factor", &companding_factor, py::arg("mu"), py::arg("peak"));
    m.def("companded_snr", &companded_snr, py::arg("mu"), py::arg("peak"), py::arg("n"), py::arg("sigma_a2"),
          py::arg("sigma_d_c2"));

    m.def("path_loss_db", &path_loss_db, py::arg("carrier_hz"), py::arg("distance_m") = 1.0);

    m.def(
        "eta3", [](double p_in_dbm) { return eta3(EhModel::default_curve(), p_in_dbm); }, py::arg("p_in_dbm"),
        "Default rectenna efficiency at an input power.");
    m.def(
        "harvest_dc",
        [](const CArray& x, const std::string& mode, std::optional<double> linear_eta) {
            EhModel eh = linear_eta ? EhModel::linear(*linear_eta) : EhModel::default_curve();
            auto r = harvest_dc(eh, to_cvec(x), parse_harvest_mode(mode));
            return py::make_tuple(r.dc_watts, r.rf_watts);
        },
        py::arg("x"), py::arg("mode") = "instantaneous", py::arg("linear_eta") = py::none(),
        "DC and RF power in watts for samples in sqrt(W).");

    m.def(
        "sinr",
        [](double rho, double k_l, double sigma_d2, double h2, double p, double sigma_a2, double sigma_p2) {
            return sinr({rho, sigma_a2, sigma_p2}, k_l, sigma_d2, h2, p);
        },
        py::arg("rho"), py::arg("k_l"), py::arg("sigma_d2"), py::arg("h_gain2"), py::arg("p_rf_tx"),
        py::arg("sigma_a2") = 1e-3, py::arg("sigma_p2") = 1e-3);
    m.def("achievable_rate", &achievable_rate, py::arg("sinr"));

    m.def(
        "design_dpd",
        [](double baseline_ibo_db, std::uint64_t seed, int n_symbols) {
            DpdOptions o;
            o.baseline_ibo_db = baseline_ibo_db;
            o.n_symbols = n_symbols;
            auto d = design_ibo_reduction(PaModel::sspa(1.0, 1.2), o, OfdmConfig{}, seed);
            py::dict r;
            r["ibo_reduction_db"] = d.ibo_reduction_db;
            r["evm_baseline"] = d.evm_baseline;
            r["evm_with_dpd"] = d.evm_with_dpd;
            r["inverse_coeffs"] = d.inverse_fit.coeffs;
            r["degenerate"] = d.degenerate;
            return r;
        },
        py::arg("baseline_ibo_db") = 8.0, py::arg("seed") = 1, py::arg("n_symbols") = 200);

    m.def(
        "run_scenario",
        [](const std::string& config_json) {
            RunConfig rc = config_from(config_json);
            LinkMetrics r;
            {
                py::gil_scoped_release release;
                r = run_scenario(rc.scenario, RunOptions{true, true, rc.threads});
            }
            return metrics_dict(r);
        },
        py::arg("config_json") = "", "Runs one scenario described by a JSON configuration string.");
    m.def(
        "table1",
        [](const std::string& config_json) {
            RunConfig rc = config_from(config_json);
            std::vector<LinkMetrics> rows;
            {
                py::gil_scoped_release release;
                rows = table1_pipeline(rc.scenario, rc.threads);
            }
            py::list out;
            for (const auto& r : rows)
                out.append(metrics_dict(r));
            return out;
        },
        py::arg("config_json") = "", "Four techniques over AWGN with shared designs.");
    m.def(
        "config_hash", [](const std::string& config_json) { return config_hash(nlohmann::json::parse(config_json)); },
        py::arg("config_json"));
}
