#include "swipt/dpd.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

namespace swipt {

double PolyFit::eval(double m) const
{
    double v = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it)
        v = v * m + *it;
    return v;
}

PolyFit fit_polynomial(const RVec& x, const RVec& y, int order)
{
    if (order < 0)
        throw ConfigError("polynomial order must be >= 0");
    if (x.size() != y.size())
        throw ConfigError("polynomial fit: x and y lengths differ");
    std::set<double> distinct(x.begin(), x.end());
    if (static_cast<int>(distinct.size()) < order + 1)
        throw ConfigError("polynomial fit: rank-deficient Vandermonde system, " + std::to_string(distinct.size()) +
                          " distinct amplitudes for order " + std::to_string(order) + " (need " +
                          std::to_string(order + 1) + ")");
    const Eigen::Index n = static_cast<Eigen::Index>(x.size());
    Eigen::MatrixXd v(n, order + 1);
    Eigen::VectorXd b(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        double p = 1.0;
        for (int j = 0; j <= order; ++j) {
            v(i, j) = p;
            p *= x[i];
        }
        b(i) = y[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(v);
    if (qr.rank() < order + 1)
        throw ConfigError("polynomial fit: numerically rank-deficient Vandermonde system");
    Eigen::VectorXd c = qr.solve(b);
    PolyFit fit;
    fit.order = order;
    fit.coeffs.assign(c.data(), c.data() + c.size());
    fit.domain_max = *std::max_element(x.begin(), x.end());
    fit.residual_rms = std::sqrt((v * c - b).squaredNorm() / static_cast<double>(n));
    return fit;
}

PolyFit fit_pa_polynomial(const RVec& train_in, const RVec& train_out, int order)
{
    return fit_polynomial(train_in, train_out, order);
}

PolyFit fit_inverse_polynomial(const RVec& train_out, const RVec& train_in, int order)
{
    return fit_polynomial(train_out, train_in, order);
}

TrainingSet training_ramp(const PaModel& pa, double max_input, int n_points, RampSpacing spacing)
{
    if (n_points < 2 || !(max_input > 0))
        throw ConfigError("training ramp needs >= 2 points and a positive range");
    TrainingSet t;
    t.in.resize(n_points);
    t.out.resize(n_points);
    double smax = pa.am_am(max_input);
    for (int i = 0; i < n_points; ++i) {
        double f = static_cast<double>(i) / (n_points - 1);
        if (spacing == RampSpacing::Input) {
            t.in[i] = f * max_input;
        } else {
            t.in[i] = i == n_points - 1 ? max_input : pa.inverse_am_am(f * smax);
        }
        t.out[i] = pa.am_am(t.in[i]);
    }
    return t;
}

void append_training(TrainingSet& t, const PaModel& pa, const CVec& pa_input)
{
    double lim = t.in.empty() ? std::numeric_limits<double>::infinity()
                              : *std::max_element(t.in.begin(), t.in.end());
    for (const auto& v : pa_input) {
        double r = std::abs(v);
        if (r > lim)
            continue;
        t.in.push_back(r);
        t.out.push_back(pa.am_am(r));
    }
}

cd Predistorter::apply(cd u, bool* clamped) const
{
    double r = std::abs(u);
    if (r == 0)
        return {0.0, 0.0};
    double rc = r;
    if (rc > inv_.domain_max) {
        rc = inv_.domain_max;
        if (clamped)
            *clamped = true;
    }
    return u * (inv_.eval(rc) / r);
}

void Predistorter::apply_inplace(CVec& u, PredistortStats* stats) const
{
    std::size_t n = 0;
    for (auto& v : u) {
        bool c = false;
        v = apply(v, &c);
        n += c;
    }
    if (stats)
        stats->clamped += n;
}

CVec Predistorter::apply(const CVec& u, PredistortStats* stats) const
{
    CVec out = u;
    apply_inplace(out, stats);
    return out;
}

ComplexSignal predistort(const ComplexSignal& signal, const PolyFit& inverse_fit, PredistortStats* stats)
{
    Predistorter pd(inverse_fit);
    return {pd.apply(signal.samples, stats), signal.sample_rate};
}

double evm(const cd* ref, const cd* meas, std::size_t n)
{
    cd cross{};
    double pr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        cross += std::conj(ref[i]) * meas[i];
        pr += std::norm(ref[i]);
    }
    if (!(pr > 0))
        throw ConfigError("evm: reference has zero power");
    cd alpha = cross / pr;
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        err += std::norm(meas[i] - alpha * ref[i]);
    double den = std::norm(alpha) * pr;
    if (!(den > 0))
        return err > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    return std::sqrt(err / den);
}

double evm(const CVec& reference, const CVec& measured)
{
    if (reference.size() != measured.size())
        throw ConfigError("evm: length mismatch");
    return evm(reference.data(), measured.data(), reference.size());
}

double inband_evm(OfdmModem& modem, const CVec& reference, const CVec& measured)
{
    const auto& cfg = modem.config();
    const std::size_t m = cfg.fft_size();
    const std::size_t n = cfg.n_subcarriers;
    if (reference.size() != measured.size() || reference.size() % m != 0)
        throw ConfigError("inband_evm: signals must be equal-length multiples of the block size");
    std::size_t nb = reference.size() / m;
    CVec gr(nb * n), gm(nb * n);
    for (std::size_t b = 0; b < nb; ++b) {
        modem.demodulate_block(reference.data() + b * m, gr.data() + b * n);
        modem.demodulate_block(measured.data() + b * m, gm.data() + b * n);
    }
    return evm(gr, gm);
}

ReductionSearch largest_feasible_reduction(const std::function<double(double)>& metric, double target,
                                           double max_db, double step_db, int bisect_steps)
{
    ReductionSearch s;
    s.target = target;
    int n = static_cast<int>(std::floor(max_db / step_db + 1e-9));
    int last_ok = -1;
    double prev = -std::numeric_limits<double>::infinity();
    for (int i = 0; i <= n; ++i) {
        double r = i * step_db;
        double v = metric(r);
        s.grid.emplace_back(r, v);
        if (v < prev * (1 - 1e-9))
            s.non_monotone_at.push_back(r);
        prev = v;
        if (v <= target)
            last_ok = i;
    }
    if (last_ok < 0) {
        s.feasible = false;
        s.reduction_db = 0.0;
        s.value_at_reduction = s.grid.front().second;
        return s;
    }
    if (last_ok == n) {
        s.hit_upper_bound = true;
        s.reduction_db = n * step_db;
        s.value_at_reduction = s.grid.back().second;
        return s;
    }
    double lo = last_ok * step_db, hi = (last_ok + 1) * step_db;
    double vlo = s.grid[last_ok].second;
    for (int k = 0; k < bisect_steps; ++k) {
        double mid = 0.5 * (lo + hi);
        double v = metric(mid);
        if (v <= target) {
            lo = mid;
            vlo = v;
        } else {
            hi = mid;
        }
    }
    s.reduction_db = lo;
    s.value_at_reduction = vlo;
    return s;
}

DpdFits fit_dpd(const PaModel& pa, const DpdOptions& opt, const OfdmConfig& cfg, std::uint64_t seed)
{
    if (opt.pa_order < 1 || opt.inverse_order < 1)
        throw ConfigError("DPD polynomial orders must be >= 1");
    double a = std::isfinite(pa.a_sat) ? pa.a_sat : 1.0;
    TrainingSet t = training_ramp(pa, opt.train_max_input * a, opt.train_points, opt.spacing);
    if (opt.add_ofdm_training) {
        OfdmConfig c = cfg;
        c.cp_length = 0;
        auto batch = generate_ofdm(c, 1, splitmix64(seed + 0x7a1b));
        CVec u = batch.samples;
        double g = db_to_amplitude(-opt.baseline_ibo_db);
        for (auto& v : u)
            v *= g;
        append_training(t, pa, u);
    }
    DpdFits f;
    f.pa_fit = fit_pa_polynomial(t.in, t.out, opt.pa_order);
    f.inverse_fit = fit_inverse_polynomial(t.out, t.in, opt.inverse_order);
    return f;
}

DpdDesign design_ibo_reduction(const PaModel& pa, const DpdFits& fits, const DpdOptions& opt,
                               const OfdmConfig& cfg, std::uint64_t seed)
{
    OfdmConfig c = cfg;
    c.cp_length = 0;
    auto batch = generate_ofdm(c, opt.n_symbols, seed);
    const CVec& x = batch.samples;
    OfdmModem modem(c);
    Predistorter pd(fits.inverse_fit);

    DpdDesign d;
    d.pa_fit = fits.pa_fit;
    d.inverse_fit = fits.inverse_fit;
    d.baseline_ibo_db = opt.baseline_ibo_db;
    d.evm_baseline = inband_evm(modem, x, apply_pa(x, pa, opt.baseline_ibo_db));

    CVec u(x.size());
    auto metric = [&](double r) {
        double g = db_to_amplitude(-(opt.baseline_ibo_db - r));
        for (std::size_t i = 0; i < x.size(); ++i)
            u[i] = x[i] * g;
        pd.apply_inplace(u);
        apply_am_am_inplace(u, pa);
        return inband_evm(modem, x, u);
    };

    if (pa.kind == PaKind::Linear || d.evm_baseline < 1e-9) {
        d.degenerate = true;
        d.ibo_reduction_db = 0.0;
        d.evm_with_dpd = d.evm_baseline;
        d.diagnostics = "degenerate: PA is (numerically) linear, no distortion to compensate";
        return d;
    }

    auto s = largest_feasible_reduction(metric, opt.evm_tolerance * d.evm_baseline, opt.search_max_db,
                                        opt.search_step_db);
    d.ibo_reduction_db = s.reduction_db;
    d.evm_with_dpd = s.value_at_reduction;
    d.evm_curve = s.grid;
    std::ostringstream diag;
    if (!s.feasible)
        diag << "no feasible reduction; ";
    if (s.hit_upper_bound)
        diag << "reduction hit search bound; ";
    if (!s.non_monotone_at.empty()) {
        diag << "non-monotone EVM at r =";
        for (double r : s.non_monotone_at)
            diag << ' ' << r;
    }
    d.diagnostics = diag.str();
    return d;
}

DpdDesign design_ibo_reduction(const PaModel& pa, const DpdOptions& opt, const OfdmConfig& cfg, std::uint64_t seed)
{
    return design_ibo_reduction(pa, fit_dpd(pa, opt, cfg, seed), opt, cfg, seed);
}

namespace {
std::string join(const RVec& v)
{
    std::ostringstream o;
    o << std::setprecision(17);
    for (std::size_t i = 0; i < v.size(); ++i)
        o << (i ? " " : "") << v[i];
    return o.str();
}

RVec split_doubles(const std::string& s)
{
    RVec v;
    std::istringstream in(s);
    double d;
    while (in >> d)
        v.push_back(d);
    return v;
}
}  // namespace

std::string DpdDesign::to_text() const
{
    std::ostringstream o;
    o << std::setprecision(17);
    o << "pa_order=" << pa_fit.order << "\n";
    o << "pa_coeffs=" << join(pa_fit.coeffs) << "\n";
    o << "pa_domain_max=" << pa_fit.domain_max << "\n";
    o << "pa_residual_rms=" << pa_fit.residual_rms << "\n";
    o << "inverse_order=" << inverse_fit.order << "\n";
    o << "inverse_coeffs=" << join(inverse_fit.coeffs) << "\n";
    o << "inverse_domain_max=" << inverse_fit.domain_max << "\n";
    o << "inverse_residual_rms=" << inverse_fit.residual_rms << "\n";
    o << "baseline_ibo_db=" << baseline_ibo_db << "\n";
    o << "ibo_reduction_db=" << ibo_reduction_db << "\n";
    o << "evm_baseline=" << evm_baseline << "\n";
    o << "evm_with_dpd=" << evm_with_dpd << "\n";
    o << "degenerate=" << (degenerate ? 1 : 0) << "\n";
    return o.str();
}

DpdDesign DpdDesign::from_text(const std::string& text)
{
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#')
            continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("DPD design file: malformed line '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    }
    auto get = [&](const char* k) {
        auto it = kv.find(k);
        if (it == kv.end())
            throw ConfigError(std::string("DPD design file: missing key ") + k);
        return it->second;
    };
    DpdDesign d;
    d.pa_fit.order = std::stoi(get("pa_order"));
    d.pa_fit.coeffs = split_doubles(get("pa_coeffs"));
    d.pa_fit.domain_max = std::stod(get("pa_domain_max"));
    d.pa_fit.residual_rms = std::stod(get("pa_residual_rms"));
    d.inverse_fit.order = std::stoi(get("inverse_order"));
    d.inverse_fit.coeffs = split_doubles(get("inverse_coeffs"));
    d.inverse_fit.domain_max = std::stod(get("inverse_domain_max"));
    d.inverse_fit.residual_rms = std::stod(get("inverse_residual_rms"));
    d.baseline_ibo_db = std::stod(get("baseline_ibo_db"));
    d.ibo_reduction_db = std::stod(get("ibo_reduction_db"));
    d.evm_baseline = std::stod(get("evm_baseline"));
    d.evm_with_dpd = std::stod(get("evm_with_dpd"));
    d.degenerate = get("degenerate") == "1";
    if (static_cast<int>(d.pa_fit.coeffs.size()) != d.pa_fit.order + 1 ||
        static_cast<int>(d.inverse_fit.coeffs.size()) != d.inverse_fit.order + 1)
        throw ConfigError("DPD design file: coefficient count does not match order");
    return d;
}

}  // namespace swipt
