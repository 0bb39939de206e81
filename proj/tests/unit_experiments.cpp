#include "swipt/config.hpp"
#include "swipt/experiments.hpp"

#include <doctest.h>

#include <sstream>

using namespace swipt;

namespace {
Scenario small_scenario()
{
    Scenario s;
    s.name = "small";
    s.ofdm.n_subcarriers = 64;
    s.design_symbols = 30;
    s.peak_symbols = 300;
    s.trials = 40;
    s.batches = 10;
    return s;
}

std::string csv(const std::vector<LinkMetrics>& rows)
{
    std::ostringstream os;
    write_metrics_csv(os, {"test", "0", 1}, rows);
    return os.str();
}
}  // namespace

TEST_CASE("technique and axis names round trip")
{
    for (Technique t : all_techniques())
        CHECK(parse_technique(to_string(t)) == t);
    CHECK(parse_technique("both") == Technique::DpdCompanding);
    CHECK_THROWS_AS(parse_technique("clipping"), ConfigError);
    for (SweepAxis a : {SweepAxis::Rho, SweepAxis::Mu, SweepAxis::IboReduction, SweepAxis::PRfTx, SweepAxis::Snr})
        CHECK(parse_sweep_axis(to_string(a)) == a);
    CHECK_THROWS_AS(parse_sweep_axis("distance"), ConfigError);
}

TEST_CASE("scenario validation")
{
    Scenario s = small_scenario();
    s.trials = 0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_scenario();
    s.mu = -1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = small_scenario();
    s.channel.kind = ChannelKind::RayleighMultitap;
    CHECK(s.effective_ofdm().cp_length == 2);
}

TEST_CASE("a single trial runs end to end")
{
    Scenario s = small_scenario();
    s.trials = 1;
    auto m = run_scenario(s);
    CHECK(m.bits == 128u);
    CHECK(m.eta3 > 0.0);
    CHECK(m.eta3 <= 1.0);
    CHECK(m.eta1 == doctest::Approx(backoff_efficiency(8.0)));
    CHECK(csv({m}).find("small,baseline,awgn") != std::string::npos);
}

TEST_CASE("fixed seed gives byte-identical CSV, independent of thread count")
{
    Scenario s = small_scenario();
    auto d = design_techniques(s);
    std::vector<LinkMetrics> a, b;
    for (Technique t : all_techniques()) {
        s.technique = t;
        a.push_back(run_scenario(s, d, {true, true, 1}));
        b.push_back(run_scenario(s, d, {true, true, 3}));
    }
    CHECK(csv(a) == csv(b));
    Scenario s2 = small_scenario();
    auto d2 = design_techniques(s2);
    s2.technique = Technique::Companding;
    CHECK(csv({run_scenario(s2, d2)}) == csv({a[2]}));
    s2.seed = 2;
    CHECK(csv({run_scenario(s2, d2)}) != csv({a[2]}));
}

TEST_CASE("CSV header carries provenance")
{
    std::ostringstream os;
    write_header(os, {"papr", "00ff", 42}, {"a", "b"});
    CHECK(os.str() == "# swipt papr\n# config_hash: 00ff\n# seed: 42\na,b\n");
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(1.0 / 3.0) == "0.3333333333");
}

TEST_CASE("identity configuration gives equal rows")
{
    Scenario s = small_scenario();
    s.pa = PaModel::linear();
    s.eh = EhModel::linear(0.5);
    auto rows = table1_pipeline(s);
    REQUIRE(rows.size() == 4);
    for (const auto& r : rows) {
        CHECK(r.ibo_reduction_db == 0.0);
        CHECK(r.eta1 == doctest::Approx(rows[0].eta1).epsilon(1e-12));
        CHECK(r.eta3 == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(r.eta_e2e == doctest::Approx(rows[0].eta_e2e).epsilon(1e-12));
    }
}

TEST_CASE("sweeps")
{
    Scenario s = small_scenario();
    CHECK_THROWS_AS(sweep(SweepAxis::Rho, {}, s), ConfigError);
    s.eh = EhModel::linear(0.5);
    auto r = sweep(SweepAxis::Rho, {0.0, 0.25, 0.5, 0.75, 1.0}, s, {false, false, 1});
    REQUIRE(r.rows.size() == 5);
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        CHECK(r.rows[i].axis_value == r.values[i]);
        CHECK(r.rows[i].rate_bps_hz <= r.rows[i - 1].rate_bps_hz);
        CHECK(r.rows[i].harvested_norm >= r.rows[i - 1].harvested_norm);
    }
    auto ib = sweep(SweepAxis::IboReduction, {0.0, 1.0, 2.0}, [] {
        Scenario t = small_scenario();
        t.technique = Technique::Dpd;
        return t;
    }(), {false, false, 1});
    CHECK(ib.rows[2].ibo_db == doctest::Approx(6.0));
    CHECK(ib.rows[2].eta1 > ib.rows[0].eta1);
}

TEST_CASE("batch means")
{
    auto m = batch_means({1.0, 2.0, 3.0, 4.0});
    CHECK(m.mean == 2.5);
    // t(0.975, 3) = 3.182
    CHECK(m.half_width == doctest::Approx(3.182 * std::sqrt(5.0 / 3.0) / 2.0).epsilon(0.005));
    RVec many(20);
    for (int i = 0; i < 20; ++i)
        many[i] = i % 2;
    // t(0.975, 19) = 2.093
    CHECK(batch_means(many).half_width == doctest::Approx(2.093 * std::sqrt(20.0 / 19.0 * 0.25) / std::sqrt(20.0)).epsilon(1e-3));
    CHECK(batch_means({5.0}).half_width == 0.0);
    CHECK(qfunc(0.0) == doctest::Approx(0.5));
}

TEST_CASE("confidence interval shrinks about sqrt(2) when trials double")
{
    Scenario s = small_scenario();
    s.batches = 20;
    s.ebn0_db = 2.0;
    auto d = design_techniques(s);
    double w1 = 0, w2 = 0;
    for (std::uint64_t seed = 1; seed <= 6; ++seed) {
        s.seed = seed;
        s.trials = 200;
        w1 += run_scenario(s, d, {false, true, 2}).ber_ci;
        s.trials = 400;
        w2 += run_scenario(s, d, {false, true, 2}).ber_ci;
    }
    double ratio = w1 / w2;
    MESSAGE("BER CI half-width ratio, 200 vs 400 symbols: " << ratio);
    CHECK(ratio > 1.2);
    CHECK(ratio < 1.65);
}

TEST_CASE("config parsing")
{
    using nlohmann::json;
    auto c = parse_config(json::parse(R"({"seed": 7, "trials": 12, "channel": {"kind": "rice"},
                                          "compander": {"mu": "auto"}, "technique": "both"})"));
    CHECK(c.scenario.seed == 7);
    CHECK(c.scenario.trials == 12);
    CHECK(c.scenario.channel.kind == ChannelKind::RiceFlat);
    CHECK(!c.scenario.mu);
    CHECK(c.scenario.technique == Technique::DpdCompanding);
    try {
        parse_config(json::parse(R"({"channel": {"kind": "awgn", "fading": 1}})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/channel/fading") != std::string::npos);
    }
    try {
        parse_config(json::parse(R"({"trials": "many"})"));
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("/trials") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_config(json::parse(R"({"channel": {"kind": "nakagami"}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"dpd": {"pa_order": 0}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse(R"({"sweep": {"axis": "rho", "values": []}})")), ConfigError);
    CHECK_THROWS_AS(parse_config(json::parse("[1, 2]")), ConfigError);
    CHECK_THROWS_AS(read_config_file("/nonexistent/config.json"), ConfigError);

    auto a = json::parse(R"({"seed": 1, "trials": 10})");
    auto b = json::parse(R"({"trials": 10, "seed": 1})");
    CHECK(config_hash(a) == config_hash(b));
    CHECK(config_hash(a).size() == 16);
    CHECK(config_hash(a) != config_hash(json::parse(R"({"seed": 2, "trials": 10})")));
    CHECK(config_hash(a) == config_hash(json::parse(R"({"seed": 1, "trials": 10, "threads": 8})")));
}
