#include "oracles.hpp"
#include "swipt/channel.hpp"

#include <doctest.h>

#include <algorithm>

using namespace swipt;

TEST_CASE("free-space path loss")
{
    CHECK(wavelength(915e6) == doctest::Approx(0.32764).epsilon(1e-4));
    CHECK(path_loss_db(915e6, 1.0) == doctest::Approx(-31.68).epsilon(2e-4));
    CHECK(path_loss_db(915e6, 2.0) - path_loss_db(915e6, 1.0) == doctest::Approx(-6.0206).epsilon(1e-4));
    double d = wavelength(915e6) / (4 * M_PI);
    CHECK(std::abs(path_loss_db(915e6, d)) < 1e-12);
    CHECK(!is_far_field(915e6, d));
    CHECK(is_far_field(915e6, 1.0));
    CHECK_THROWS_AS(path_loss_db(0.0, 1.0), ConfigError);
    CHECK_THROWS_AS(path_loss_db(915e6, -1.0), ConfigError);
}

TEST_CASE("channel spec validation and parsing")
{
    ChannelSpec s;
    s.pdp_db = {};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.pdp_db = {-1.0, -10.0};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    CHECK_THROWS_AS(parse_channel_kind("nakagami"), ConfigError);
    for (auto k : {ChannelKind::Awgn, ChannelKind::RiceFlat, ChannelKind::RayleighFlat, ChannelKind::RayleighMultitap})
        CHECK(parse_channel_kind(to_string(k)) == k);
}

TEST_CASE("AWGN channel is a single unit tap")
{
    ChannelSpec s;
    Rng r(1);
    for (int i = 0; i < 10; ++i) {
        auto c = sample_channel(s, r);
        REQUIRE(c.taps.size() == 1);
        CHECK(c.taps[0] == cd(1, 0));
    }
    CVec x{{1, 2}, {3, -1}, {0.5, 0.5}};
    auto y = apply_channel(x, sample_channel(s, r, false), 0.0, r, 0);
    CHECK(y == x);
}

TEST_CASE("Rayleigh flat power normalization")
{
    ChannelSpec s;
    s.kind = ChannelKind::RayleighFlat;
    Rng r(2);
    double acc = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i)
        acc += std::norm(sample_channel(s, r).taps[0]);
    CHECK(acc / n == doctest::Approx(1.0).epsilon(0.01));
}

TEST_CASE("Rice K = 20 dB against the Rice distribution")
{
    ChannelSpec s;
    s.kind = ChannelKind::RiceFlat;
    Rng r(3);
    const int n = 100000;
    RVec mag(n), pw(n);
    for (int i = 0; i < n; ++i) {
        mag[i] = std::abs(sample_channel(s, r).taps[0]);
        pw[i] = mag[i] * mag[i];
    }
    double mean = 0, var = 0;
    for (double v : pw)
        mean += v;
    mean /= n;
    for (double v : pw)
        var += (v - mean) * (v - mean);
    var /= n - 1;
    const double k = 100.0, los = k / (k + 1), sc = 1 / (k + 1);
    CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
    // |h|^2 = |LOS + w|^2 with E|w|^2 = sc: variance 2 LOS sc + sc^2
    CHECK(var == doctest::Approx(2 * los * sc + sc * sc).epsilon(0.05));
    CHECK(los == doctest::Approx(100.0 / 101.0));

    // CDF of |h| at its quartiles by quadrature of the Rice density
    const double nu = std::sqrt(los), s2 = sc / 2;
    auto pdf = [&](double x) {
        double z = x * nu / s2;
        // scaled Bessel I0 keeps the exponentials bounded
        return x / s2 * std::exp(-(x - nu) * (x - nu) / (2 * s2)) * std::cyl_bessel_i(0.0, z) * std::exp(-z);
    };
    std::sort(mag.begin(), mag.end());
    for (double q : {0.25, 0.5, 0.75}) {
        double xq = mag[static_cast<std::size_t>(q * n)];
        double cdf = oracle::simpson(pdf, 1e-9, xq, 20000);
        MESSAGE("Rice K=20 dB |h| quantile " << q << ": " << xq);
        CHECK(cdf == doctest::Approx(q).epsilon(0.02));
    }
}

TEST_CASE("noise-only output power")
{
    ChannelSpec s;
    Rng r(4);
    auto c = sample_channel(s, r, false);
    CVec z(1000000, cd{});
    auto y = apply_channel(z, c, 2.5e-3, r, 0);
    CHECK(mean_power(y) == doctest::Approx(2.5e-3).epsilon(0.01));
}

TEST_CASE("multitap channel")
{
    ChannelSpec s;
    s.kind = ChannelKind::RayleighMultitap;
    CHECK(s.delay_spread() == 2);
    Rng r(5);
    const int n = 64, draws = 20000;
    RVec avg(n, 0.0);
    double tap_power = 0;
    for (int i = 0; i < draws; ++i) {
        auto c = sample_channel(s, r, false);
        for (auto t : c.taps)
            tap_power += std::norm(t);
        auto h = frequency_response(c.taps, n);
        for (int k = 0; k < n; ++k)
            avg[k] += std::norm(h[k]) / draws;
    }
    CHECK(tap_power / draws == doctest::Approx(1.0).epsilon(0.02));
    for (double v : avg)
        CHECK(v == doctest::Approx(1.0).epsilon(0.05));

    auto c = sample_channel(s, r, false);
    auto h = frequency_response(c.taps, n);
    std::vector<oracle::cd> taps(n, oracle::cd{});
    std::copy(c.taps.begin(), c.taps.end(), taps.begin());
    double lo = 1e9, hi = 0;
    for (int k = 0; k < n; ++k) {
        CHECK(std::abs(h[k] - oracle::dft_bin(taps, k)) < 1e-12);
        lo = std::min(lo, std::abs(h[k]));
        hi = std::max(hi, std::abs(h[k]));
    }
    CHECK(hi > lo * 1.01);

    // convolution against the direct sum
    CVec x(50);
    for (auto& v : x)
        v = cgauss(r);
    auto y = apply_channel(x, c, 0.0, r, 2);
    for (std::size_t i = 0; i < x.size(); ++i) {
        cd acc{};
        for (std::size_t t = 0; t < c.taps.size() && t <= i; ++t)
            acc += c.taps[t] * x[i - t];
        CHECK(std::abs(y[i] - acc) < 1e-12);
    }
    CHECK_THROWS_AS(apply_channel(x, c, 0.0, r, 1), ConfigError);
}

TEST_CASE("channel sampling is deterministic for a fixed seed")
{
    ChannelSpec s;
    s.kind = ChannelKind::RayleighMultitap;
    Rng a(9), b(9);
    for (int i = 0; i < 5; ++i)
        CHECK(sample_channel(s, a).taps == sample_channel(s, b).taps);
}
