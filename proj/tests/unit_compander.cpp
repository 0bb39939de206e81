#include "swipt/compander.hpp"

#include <doctest.h>

using namespace swipt;

namespace {
OfdmConfig small_cfg()
{
    OfdmConfig c;
    c.n_subcarriers = 512;
    return c;
}

// The mu-law factor written out term by term, as an oracle for the library's factor.
double factor_oracle(double mu, double a)
{
    double l = std::log(1.0 + mu);
    return std::pow(l / mu, 2) + std::pow(l / a, 2);
}
}  // namespace

TEST_CASE("compress fixed points and the small-mu limit")
{
    CompanderParams p{1.25, 2.0};
    CHECK(compress_magnitude(0.0, p) == 0.0);
    CHECK(compress_magnitude(2.0, p) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(expand_magnitude(0.0, p) == 0.0);
    CHECK(expand_magnitude(2.0, p) == doctest::Approx(2.0).epsilon(1e-15));
    CompanderParams tiny{1e-9, 1.0};
    for (double r : {0.01, 0.3, 0.9})
        CHECK(std::abs(compress_magnitude(r, tiny) - r) < 1e-6 * r);
    CHECK_THROWS_AS(CompanderParams({-1.0, 1.0}).validate(), ConfigError);
    CHECK_THROWS_AS(CompanderParams({1.0, 0.0}).validate(), ConfigError);
}

TEST_CASE("compress is magnitude-monotone and phase-preserving")
{
    CompanderParams p{5.0, 1.0};
    double prev = -1;
    for (int i = 0; i <= 1000; ++i) {
        double v = compress_magnitude(i * 1e-3, p);
        CHECK(v > prev);
        prev = v;
    }
    CVec x{std::polar(0.3, 2.1), std::polar(0.8, -0.4)};
    auto y = compress(x, p);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::arg(y[i]) == doctest::Approx(std::arg(x[i])).epsilon(1e-12));
}

TEST_CASE("expand inverts compress on OFDM for mu in [1e-3, 255]")
{
    auto b = generate_ofdm(small_cfg(), 4, 9);
    double a = 0;
    for (auto v : b.samples)
        a = std::max(a, std::abs(v));
    for (double mu : {1e-3, 0.1, 1.25, 10.0, 255.0}) {
        CompanderParams p{mu, a};
        auto back = expand(compress(b.samples, p), p);
        double err = 0;
        for (std::size_t i = 0; i < back.size(); ++i)
            err = std::max(err, std::abs(back[i] - b.samples[i]));
        CHECK(err < 1e-10);
    }
}

TEST_CASE("real-signal law as printed")
{
    CompanderParams p{1.25, 1.0};
    double l = std::log(2.25);
    CHECK(compress_real(-0.5, p) == doctest::Approx(-std::log(1 + 1.25 * 0.5) / l).epsilon(1e-14));
    CHECK(compress_real(0.5, p) == doctest::Approx(std::log(1 + 1.25 * 0.5) / l).epsilon(1e-14));
    for (double x : {-0.9, -0.2, 0.0, 0.4, 1.0})
        CHECK(expand_real(compress_real(x, p), p) == doctest::Approx(x).epsilon(1e-12));
}

TEST_CASE("noise and distortion power factor")
{
    CHECK(companding_factor(1.25, 1.0) == doctest::Approx(factor_oracle(1.25, 1.0)).epsilon(1e-14));
    CHECK(companding_factor(1.25, 1.0) == doctest::Approx(1.0784).epsilon(1e-4));
    CHECK(companding_factor(1e-9, 1.0) == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(noise_distortion_powers(0.0, 1.25, 1.0) == 0.0);
    CHECK(noise_distortion_powers(2e-3, 1.25, 1.0) == doctest::Approx(2e-3 * factor_oracle(1.25, 1.0)));
    CHECK_THROWS_AS(companding_factor(0.0, 1.0), ConfigError);

    auto m = make_noise_model(0.9, 0.01, 1.25, 3.8, 512, 1e-3);
    CHECK(m.consistent());
    CHECK(std::abs(m.sigma_w2 - 1e-3 * factor_oracle(1.25, 3.8)) < 1e-12);
    CHECK(std::abs(m.sigma_D2 - 0.01 * factor_oracle(1.25, 3.8)) < 1e-12);
    m.sigma_D2 *= 1.01;
    CHECK(!m.consistent());
}

TEST_CASE("companded SNR")
{
    double s1 = companded_snr(1.25, 1.0, 256, 1e-3, 1e-3);
    double s2 = companded_snr(1.25, 1.0, 512, 1e-3, 1e-3);
    CHECK(s1 == doctest::Approx(2 * s2).epsilon(1e-14));
    CHECK(s2 == doctest::Approx(1.0 / (512 * 2e-3 * factor_oracle(1.25, 1.0))).epsilon(1e-14));
    CHECK(std::isinf(companded_snr(1.25, 1.0, 512, 0.0, 0.0)));
    CHECK_THROWS_AS(companded_snr(1.25, 1.0, 0, 1e-3, 0.0), ConfigError);
}

TEST_CASE("constant-distortion optimum matches the derivative sign change")
{
    // with sigma fixed, SNR is maximized where the factor is minimized
    const double a = 3.8;
    auto f = [a](double mu) { return factor_oracle(mu, a); };
    double lo = 0.01, hi = 10.0;
    auto dfdmu = [&](double mu) { return (f(mu + 1e-6) - f(mu - 1e-6)) / 2e-6; };
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        (dfdmu(mid) < 0 ? lo : hi) = mid;
    }
    double oracle_mu = 0.5 * (lo + hi);
    double best = golden_section_max([&](double mu) { return db10(companded_snr(mu, a, 512, 1e-3, 1e-2)); },
                                     0.01, 10.0, 1e-6);
    MESSAGE("constant-sigma optimum at A=3.8: " << oracle_mu);
    CHECK(best == doctest::Approx(oracle_mu).epsilon(1e-4));
}

TEST_CASE("optimize_mu with a single-point grid returns that point")
{
    auto b = generate_ofdm(small_cfg(), 10, 3);
    MuSearchOptions o;
    o.mu_grid = {0.7};
    o.ibo_grid = {6.0};
    auto r = optimize_mu(b.samples, 3.8, PaModel::sspa(1.0, 1.2), o, 512);
    CHECK(r.mu_star == 0.7);
    CHECK(r.grid.size() == 1);
}

TEST_CASE("companded Bussgang")
{
    auto b = generate_ofdm(small_cfg(), 40, 21);
    double peak = ensemble_peak(small_cfg(), 2000, 5);
    // identity PA and a vanishing mu reduce the chain to a pass-through
    auto id = companded_bussgang(b.samples, CompanderParams{1e-9, peak}, 0.0, PaModel::linear());
    CHECK(id.k_l_c == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(id.sigma_d_c2 < 1e-10);

    auto pa = PaModel::sspa(1.0, 1.2);
    double prev = 0;
    for (double ibo : {2.0, 4.0, 6.0, 8.0}) {
        auto c = companded_bussgang(b.samples, CompanderParams{1.25, peak}, ibo, pa);
        CHECK(c.k_l_c > prev);
        CHECK(c.k_l_c < 1.0);
        prev = c.k_l_c;
    }
    auto g = companded_bussgang(small_cfg(), 1.25, peak, 6.0, pa, 200, 7);
    MESSAGE("companded Bussgang, mu=1.25, IBO=6 dB, 200 symbols, seed 7: K_L,c=" << g.k_l_c
                                                                               << " sigma_d,c2=" << g.sigma_d_c2);
    CHECK(g.k_l_c > 0.8);
    CHECK(g.k_l_c < 1.0);
    CHECK(g.sigma_d_c2 > 0.0);
}

TEST_CASE("PAPR reduction grows with mu")
{
    auto c = small_cfg();
    double peak = ensemble_peak(c, 2000, 5);
    auto tiny = companded_papr_reduction(c, 1e-6, peak, 3000, 4);
    CHECK(std::abs(tiny.reduction_db) < 1e-3);
    double prev = 0;
    for (double mu : {0.5, 1.25, 5.0, 255.0}) {
        auto r = companded_papr_reduction(c, mu, peak, 3000, 4);
        CHECK(r.reduction_db > 0);
        CHECK(r.reduction_db >= prev);
        prev = r.reduction_db;
        if (mu == 255.0)
            MESSAGE("PAPR at 1e-3 after mu=255, 3000 symbols, seed 4: " << r.papr_after_db << " dB");
    }
}

TEST_CASE("ensemble peak")
{
    auto c = small_cfg();
    double a = ensemble_peak(c, 2000, 5);
    CHECK(a == ensemble_peak(c, 2000, 5));
    // a unit-power Gaussian envelope exceeds sqrt(ln(N L / q)) about q of the time per symbol
    CHECK(a > 3.0);
    CHECK(a < 4.5);
    CHECK(ensemble_peak(c, 2000, 5, PeakMode::SampleQuantile, 0.999) < a);
}
