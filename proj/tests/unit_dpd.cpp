#include "swipt/dpd.hpp"

#include <doctest.h>

#include <Eigen/Dense>

using namespace swipt;

namespace {
RVec linspace(double a, double b, int n)
{
    RVec v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * i / (n - 1);
    return v;
}

double residual(const RVec& x, const RVec& y, const RVec& c)
{
    double s = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double v = 0, p = 1;
        for (double ci : c) {
            v += ci * p;
            p *= x[i];
        }
        s += (v - y[i]) * (v - y[i]);
    }
    return s;
}
}  // namespace

TEST_CASE("exact polynomial fits")
{
    RVec x = linspace(0, 2, 50), y;
    for (double v : x)
        y.push_back(2 * v);
    auto f = fit_pa_polynomial(x, y, 1);
    CHECK(std::abs(f.coeffs[0]) < 1e-10);
    CHECK(f.coeffs[1] == doctest::Approx(2.0).epsilon(1e-10));
    auto inv = fit_inverse_polynomial(y, x, 1);
    CHECK(inv.coeffs[1] == doctest::Approx(0.5).epsilon(1e-10));

    RVec c{0.1, 1.0, -0.3, 0.05, 0.01}, yp;
    for (double v : x)
        yp.push_back(c[0] + c[1] * v + c[2] * v * v + c[3] * v * v * v + c[4] * v * v * v * v);
    auto g = fit_polynomial(x, yp, 4);
    for (int i = 0; i <= 4; ++i)
        CHECK(g.coeffs[i] == doctest::Approx(c[i]).epsilon(1e-8));
}

TEST_CASE("rank-deficient system is rejected")
{
    CHECK_THROWS_AS(fit_polynomial({0.1, 0.1, 0.2, 0.2}, {1, 1, 2, 2}, 3), ConfigError);
    CHECK_THROWS_AS(fit_polynomial({0.1, 0.2}, {1.0}, 1), ConfigError);
}

TEST_CASE("SSPA P=4 fit over [0, 1.2] against the normal equations")
{
    auto pa = PaModel::sspa(1.0, 1.2);
    RVec x = linspace(0, 1.2, 4096), y;
    for (double v : x)
        y.push_back(pa.am_am(v));
    auto f = fit_pa_polynomial(x, y, 4);
    CHECK(f.residual_rms < 1e-2);
    MESSAGE("SSPA P=4 residual RMS on [0, 1.2]: " << f.residual_rms);
    // normal equations as an independent solver
    Eigen::MatrixXd a(5, 5);
    Eigen::VectorXd b(5);
    a.setZero();
    b.setZero();
    for (std::size_t i = 0; i < x.size(); ++i) {
        double pi = 1;
        for (int r = 0; r < 5; ++r) {
            double pj = 1;
            for (int c = 0; c < 5; ++c) {
                a(r, c) += pi * pj;
                pj *= x[i];
            }
            b(r) += pi * y[i];
            pi *= x[i];
        }
    }
    Eigen::VectorXd c = a.ldlt().solve(b);
    for (int i = 0; i < 5; ++i)
        CHECK(f.coeffs[i] == doctest::Approx(c(i)).epsilon(1e-6));
    // LS optimality: perturbing any coefficient does not lower the residual
    double base = residual(x, y, f.coeffs);
    for (int i = 0; i < 5; ++i)
        for (double d : {-1e-3, 1e-3}) {
            RVec p = f.coeffs;
            p[i] += d;
            CHECK(residual(x, y, p) >= base);
        }
}

TEST_CASE("inverse fit linearizes the SSPA")
{
    auto pa = PaModel::sspa(1.0, 1.2);
    auto t = training_ramp(pa, 2.7, 4096, RampSpacing::Output);
    auto q7 = fit_inverse_polynomial(t.out, t.in, 7);
    auto q1 = fit_inverse_polynomial(t.out, t.in, 1);
    CHECK(q1.residual_rms > q7.residual_rms);
    Predistorter pd(q7);
    double err = 0;
    for (double u : linspace(0, 0.9, 901)) {
        double v = pa.am_am(std::abs(pd.apply(cd(u, 0))));
        err = std::max(err, std::abs(v - u));
    }
    MESSAGE("max |F(P(u)) - u| on [0, 0.9]: " << err);
    CHECK(err < 2e-2);
}

TEST_CASE("predistorter basics")
{
    Predistorter id;
    CVec x{{0.1, 0.2}, {-0.5, 0.3}, {0, 0}};
    CHECK(id.apply(x) == x);
    Predistorter unit(PolyFit{1, {0.0, 1.0}, 10.0, 0.0});
    CHECK(unit.apply(x) == x);
    CHECK(unit.apply(cd{}) == cd{});

    auto pa = PaModel::sspa(1.0, 1.2);
    auto t = training_ramp(pa, 2.7);
    Predistorter pd(fit_inverse_polynomial(t.out, t.in, 7));
    PredistortStats st;
    CVec big{std::polar(5.0, 1.1), std::polar(0.3, -2.0)};
    auto y = pd.apply(big, &st);
    CHECK(st.clamped == 1);
    CHECK(std::arg(y[0]) == doctest::Approx(1.1).epsilon(1e-12));
    CHECK(std::arg(y[1]) == doctest::Approx(-2.0).epsilon(1e-12));
}

TEST_CASE("EVM")
{
    Rng r(3);
    CVec ref(200000), noise(200000);
    for (auto& v : ref)
        v = cgauss(r, 1.0);
    CHECK(evm(ref, ref) == 0.0);
    CVec two = ref;
    for (auto& v : two)
        v *= 2.0;
    CHECK(evm(ref, two) < 1e-12);
    // noise at -20 dB, explicitly projected orthogonal to the reference
    for (auto& v : noise)
        v = cgauss(r, 1.0);
    cd proj{};
    double pr = 0, pn = 0;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        proj += std::conj(ref[i]) * noise[i];
        pr += std::norm(ref[i]);
    }
    proj /= pr;
    for (std::size_t i = 0; i < ref.size(); ++i) {
        noise[i] -= proj * ref[i];
        pn += std::norm(noise[i]);
    }
    double s = std::sqrt(0.01 * pr / pn);
    CVec meas = ref;
    for (std::size_t i = 0; i < ref.size(); ++i)
        meas[i] += s * noise[i];
    CHECK(evm(ref, meas) == doctest::Approx(0.1).epsilon(1e-2));
    CHECK(std::abs(evm(ref, meas) - 0.1) < 1e-3);
    CHECK_THROWS_AS(evm(ref, CVec(3)), ConfigError);
}

TEST_CASE("reduction search")
{
    auto s = largest_feasible_reduction([](double r) { return r * r; }, 4.0, 6.0, 0.1);
    CHECK(s.reduction_db == doctest::Approx(2.0).epsilon(1e-4));
    auto none = largest_feasible_reduction([](double) { return 5.0; }, 4.0);
    CHECK(!none.feasible);
    CHECK(none.reduction_db == 0.0);
    auto all = largest_feasible_reduction([](double) { return 0.0; }, 4.0);
    CHECK(all.hit_upper_bound);
    auto nm = largest_feasible_reduction([](double r) { return std::abs(r - 1.0); }, 10.0, 2.0, 0.5);
    CHECK(!nm.non_monotone_at.empty());
}

TEST_CASE("design text round trip")
{
    DpdDesign d;
    d.pa_fit = {2, {0.0, 1.0, -0.2}, 2.7, 1e-3};
    d.inverse_fit = {3, {0.0, 1.1, 0.2, 0.5}, 0.96, 2e-3};
    d.ibo_reduction_db = 2.6718;
    d.evm_baseline = 0.05;
    d.evm_with_dpd = 0.0505;
    d.degenerate = false;
    auto e = DpdDesign::from_text(d.to_text());
    CHECK(e.pa_fit.coeffs == d.pa_fit.coeffs);
    CHECK(e.inverse_fit.coeffs == d.inverse_fit.coeffs);
    CHECK(e.inverse_fit.domain_max == d.inverse_fit.domain_max);
    CHECK(e.ibo_reduction_db == d.ibo_reduction_db);
    CHECK(e.evm_with_dpd == d.evm_with_dpd);
}

TEST_CASE("linear PA design is degenerate with no reduction")
{
    OfdmConfig c;
    c.n_subcarriers = 64;
    DpdOptions o;
    o.n_symbols = 10;
    auto d = design_ibo_reduction(PaModel::linear(), o, c, 1);
    CHECK(d.degenerate);
    CHECK(d.ibo_reduction_db == 0.0);
    CHECK(d.evm_baseline < 1e-9);
}

TEST_CASE("invalid orders are rejected")
{
    OfdmConfig c;
    DpdOptions o;
    o.pa_order = 0;
    CHECK_THROWS_AS(fit_dpd(PaModel::sspa(), o, c, 1), ConfigError);
}
