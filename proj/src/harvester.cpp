#include "swipt/harvester.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "default_calibration.inc"

namespace swipt {

namespace {

double factorial_ratio(int d, int m)
{
    // d! / (d - m)!
    double r = 1.0;
    for (int i = 0; i < m; ++i)
        r *= d - i;
    return r;
}

std::string trim(const std::string& s)
{
    auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

double RectennaCurve::raw(double p) const
{
    auto it = std::upper_bound(knots_.begin(), knots_.end(), p);
    std::size_t i = it == knots_.begin() ? 0 : static_cast<std::size_t>(it - knots_.begin()) - 1;
    if (i >= seg_.size())
        i = seg_.size() - 1;
    double t = p - knots_[i];
    const auto& c = seg_[i];
    return ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
}

double RectennaCurve::eta(double p, bool* extrapolated) const
{
    if (p < sens_)
        return 0.0;
    double q = p;
    if (p < p_min() || p > p_max()) {
        if (extrapolated)
            *extrapolated = true;
        q = std::clamp(p, p_min(), p_max());
    }
    return std::clamp(raw(q), 0.0, 1.0);
}

double RectennaCurve::max_fit_residual() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < src_p_.size(); ++i)
        m = std::max(m, std::abs(raw(src_p_[i]) - src_eta_[i]));
    return m;
}

double RectennaCurve::max_knot_jump() const
{
    double m = 0.0;
    for (std::size_t i = 1; i < seg_.size(); ++i) {
        double t = knots_[i] - knots_[i - 1];
        const auto& c = seg_[i - 1];
        double left = ((c[3] * t + c[2]) * t + c[1]) * t + c[0];
        m = std::max(m, std::abs(left - seg_[i][0]));
    }
    return m;
}

RectennaCurve RectennaCurve::fit(const RVec& p, const RVec& eta, RVec kn, double sensitivity)
{
    const std::size_t n = p.size();
    if (n < 2 || eta.size() != n)
        throw ConfigError("rectenna calibration: need at least two (p_in_dbm, eta3) rows");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(p[i]) || !std::isfinite(eta[i]))
            throw ConfigError("rectenna calibration: non-finite value in row " + std::to_string(i + 1));
        if (eta[i] < 0.0 || eta[i] > 1.0)
            throw ConfigError("rectenna calibration: eta3 = " + std::to_string(eta[i]) + " at " +
                              std::to_string(p[i]) + " dBm is outside [0, 1] (row " + std::to_string(i + 1) + ")");
        if (i > 0 && !(p[i] > p[i - 1]))
            throw ConfigError("rectenna calibration: input power must be strictly ascending (row " +
                              std::to_string(i + 1) + ")");
    }
    std::sort(kn.begin(), kn.end());
    for (double k : kn)
        if (!(k > p.front() && k < p.back()))
            throw ConfigError("rectenna calibration: knot " + std::to_string(k) + " dBm outside the data range");
    if (std::adjacent_find(kn.begin(), kn.end()) != kn.end())
        throw ConfigError("rectenna calibration: duplicate knot");

    const int deg = static_cast<int>(std::min<std::size_t>(3, n - 1));
    const std::size_t ncol = deg + 1 + kn.size();
    if (n < ncol)
        throw ConfigError("rectenna calibration: " + std::to_string(n) + " points cannot support " +
                          std::to_string(kn.size()) + " knots at degree " + std::to_string(deg));

    const double p0 = p.front();
    const double span = p.back() - p.front();
    RVec ku(kn.size());
    for (std::size_t j = 0; j < kn.size(); ++j)
        ku[j] = (kn[j] - p0) / span;

    Eigen::MatrixXd b(n, ncol);
    Eigen::VectorXd y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double u = (p[i] - p0) / span;
        double v = 1.0;
        for (int m = 0; m <= deg; ++m) {
            b(i, m) = v;
            v *= u;
        }
        for (std::size_t j = 0; j < ku.size(); ++j)
            b(i, deg + 1 + j) = u > ku[j] ? std::pow(u - ku[j], deg) : 0.0;
        y(i) = eta[i];
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(b);
    if (qr.rank() < static_cast<Eigen::Index>(ncol))
        throw ConfigError("rectenna calibration: knot placement leaves segments without data");
    Eigen::VectorXd c = qr.solve(y);

    RectennaCurve rc;
    rc.src_p_ = p;
    rc.src_eta_ = eta;
    rc.sens_ = std::isfinite(sensitivity) ? sensitivity : p.front();
    rc.knots_.push_back(p.front());
    rc.knots_.insert(rc.knots_.end(), kn.begin(), kn.end());
    rc.knots_.push_back(p.back());

    // Right-limit Taylor coefficients at each segment start, converted to dBm units.
    for (std::size_t s = 0; s + 1 < rc.knots_.size(); ++s) {
        double u = (rc.knots_[s] - p0) / span;
        std::array<double, 4> seg{0, 0, 0, 0};
        for (int m = 0; m <= deg; ++m) {
            double dm = 0.0;
            for (int i = m; i <= deg; ++i)
                dm += c(i) * factorial_ratio(i, m) * std::pow(u, i - m);
            for (std::size_t j = 0; j < ku.size(); ++j)
                if (ku[j] <= u + 1e-15)
                    dm += c(deg + 1 + j) * factorial_ratio(deg, m) * std::pow(u - ku[j], deg - m);
            double fact = 1.0;
            for (int i = 2; i <= m; ++i)
                fact *= i;
            seg[m] = dm / fact / std::pow(span, m);
        }
        rc.seg_.push_back(seg);
    }

    // shape checks on a dense grid
    const int ng = 4000;
    RVec g(ng + 1), v(ng + 1);
    for (int i = 0; i <= ng; ++i) {
        g[i] = p.front() + span * i / ng;
        v[i] = rc.raw(g[i]);
        if (v[i] < -1e-3 || v[i] > 1.0 + 1e-3)
            throw ConfigError("rectenna calibration: fitted curve leaves [0, 1] (" + std::to_string(v[i]) + " at " +
                              std::to_string(g[i]) + " dBm)");
    }
    std::size_t imax = static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
    const double tol = 1e-6;
    for (std::size_t i = 1; i <= imax; ++i)
        if (v[i] < v[i - 1] - tol)
            throw ConfigError("rectenna calibration: efficiency must rise to a single maximum; it decreases near " +
                              std::to_string(g[i]) + " dBm before the peak at " + std::to_string(g[imax]) + " dBm");
    for (std::size_t i = imax + 1; i < v.size(); ++i)
        if (v[i] > v[i - 1] + tol)
            throw ConfigError("rectenna calibration: efficiency rises again near " + std::to_string(g[i]) +
                              " dBm after the peak at " + std::to_string(g[imax]) + " dBm");
    rc.sat_ = g[imax];
    return rc;
}

RectennaCurve parse_calibration(const std::string& text, const std::string& origin)
{
    std::istringstream in(text);
    std::string line;
    RVec p, e, knots;
    double sens = std::nan("");
    bool header = false;
    int lineno = 0;
    std::size_t ncols = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string t = trim(line);
        if (t.empty())
            continue;
        if (t[0] == '#') {
            std::string body = trim(t.substr(1));
            auto colon = body.find(':');
            if (colon != std::string::npos) {
                std::string key = trim(body.substr(0, colon));
                std::istringstream vals(body.substr(colon + 1));
                if (key == "knots") {
                    double k;
                    while (vals >> k)
                        knots.push_back(k);
                } else if (key == "sensitivity_dbm") {
                    vals >> sens;
                }
            }
            continue;
        }
        if (!header) {
            std::string h;
            for (char ch : t)
                if (ch != ' ')
                    h += ch;
            if (h != "p_in_dbm,eta3" && h != "p_in_dbm,eta3,p_dc_dbm")
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected header 'p_in_dbm,eta3[,p_dc_dbm]', got '" + t + "'");
            ncols = h.size() > 13 ? 3 : 2;
            header = true;
            continue;
        }
        std::istringstream row(t);
        std::string cell;
        RVec vals;
        while (std::getline(row, cell, ',')) {
            try {
                std::size_t used = 0;
                std::string c = trim(cell);
                double d = std::stod(c, &used);
                if (used != c.size())
                    throw std::invalid_argument("trailing");
                vals.push_back(d);
            } catch (const std::exception&) {
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": not a number: '" + trim(cell) + "'");
            }
        }
        if (vals.size() != ncols)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected " + std::to_string(ncols) +
                              " columns, got " + std::to_string(vals.size()));
        p.push_back(vals[0]);
        e.push_back(vals[1]);
    }
    if (!header)
        throw ConfigError(origin + ": missing header line");
    try {
        return RectennaCurve::fit(p, e, knots, sens);
    } catch (const ConfigError& ex) {
        throw ConfigError(origin + ": " + ex.what());
    }
}

RectennaCurve load_calibration(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw ConfigError("cannot open calibration file '" + path + "'");
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_calibration(ss.str(), path);
}

const std::string& default_calibration_text()
{
    static const std::string text(kDefaultCalibrationCsv);
    return text;
}

const RectennaCurve& default_rectenna()
{
    static const RectennaCurve c = parse_calibration(default_calibration_text(), "data/rectenna_default.csv");
    return c;
}

std::string to_string(HarvestMode m) { return m == HarvestMode::Instantaneous ? "instantaneous" : "average"; }

HarvestMode parse_harvest_mode(const std::string& s)
{
    if (s == "instantaneous")
        return HarvestMode::Instantaneous;
    if (s == "average")
        return HarvestMode::Average;
    throw ConfigError("unknown harvest mode '" + s + "' (expected instantaneous or average)");
}

EhModel EhModel::linear(double eta)
{
    if (!(eta >= 0 && eta <= 1))
        throw ConfigError("linear EH efficiency must be in [0, 1]");
    EhModel m;
    m.kind = EhKind::LinearConstant;
    m.eta3_linear = eta;
    return m;
}

EhModel EhModel::from_curve(RectennaCurve c)
{
    EhModel m;
    m.kind = EhKind::Curve;
    m.curve = std::make_shared<const RectennaCurve>(std::move(c));
    return m;
}

EhModel EhModel::default_curve() { return from_curve(default_rectenna()); }

double eta3(const EhModel& m, double p_in_dbm, bool* extrapolated)
{
    if (m.kind == EhKind::LinearConstant)
        return m.eta3_linear;
    if (!m.curve)
        throw ConfigError("EH model has no rectenna curve loaded");
    return m.curve->eta(p_in_dbm, extrapolated);
}

double watts_to_dbm(double w) { return 10.0 * std::log10(w) + 30.0; }
double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }

HarvestResult harvest_dc(const EhModel& m, const cd* x, std::size_t n, HarvestMode mode)
{
    HarvestResult r;
    r.mode = mode;
    if (n == 0)
        return r;
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        sum += std::norm(x[i]);
    r.rf_watts = sum / static_cast<double>(n);
    if (r.rf_watts <= 0)
        return r;
    if (m.kind == EhKind::LinearConstant) {
        r.dc_watts = m.eta3_linear * r.rf_watts;
    } else if (mode == HarvestMode::Average) {
        bool ex = false;
        r.dc_watts = eta3(m, watts_to_dbm(r.rf_watts), &ex) * r.rf_watts;
        r.extrapolated = ex;
    } else {
        double dc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double pw = std::norm(x[i]);
            if (pw <= 0)
                continue;
            bool ex = false;
            dc += eta3(m, watts_to_dbm(pw), &ex) * pw;
            r.extrapolated += ex;
        }
        r.dc_watts = dc / static_cast<double>(n);
    }
    r.efficiency = r.dc_watts / r.rf_watts;
    return r;
}

HarvestResult harvest_dc(const EhModel& m, const CVec& samples, HarvestMode mode)
{
    return harvest_dc(m, samples.data(), samples.size(), mode);
}

}  // namespace swipt
