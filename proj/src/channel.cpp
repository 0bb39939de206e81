#include "swipt/channel.hpp"
#include "swipt/fft.hpp"

#include <cmath>

namespace swipt {

ChannelKind parse_channel_kind(const std::string& s)
{
    if (s == "awgn")
        return ChannelKind::Awgn;
    if (s == "rice" || s == "rice_flat")
        return ChannelKind::RiceFlat;
    if (s == "rayleigh" || s == "rayleigh_flat")
        return ChannelKind::RayleighFlat;
    if (s == "rayleigh_multitap" || s == "multitap")
        return ChannelKind::RayleighMultitap;
    throw ConfigError("unknown channel kind '" + s + "' (expected awgn, rice, rayleigh, rayleigh_multitap)");
}

std::string to_string(ChannelKind k)
{
    switch (k) {
    case ChannelKind::Awgn:
        return "awgn";
    case ChannelKind::RiceFlat:
        return "rice";
    case ChannelKind::RayleighFlat:
        return "rayleigh";
    case ChannelKind::RayleighMultitap:
        return "rayleigh_multitap";
    }
    return "?";
}

void ChannelSpec::validate() const
{
    if (!std::isfinite(rice_k_db))
        throw ConfigError("channel: Rice K must be finite");
    if (pdp_db.empty() || pdp_db[0] != 0.0)
        throw ConfigError("channel: PDP must be non-empty with first tap at 0 dB");
    if (!(carrier_hz > 0) || !(distance_m > 0))
        throw ConfigError("channel: carrier and distance must be positive");
    if (tap_spacing < 1)
        throw ConfigError("channel: tap spacing must be >= 1 sample");
}

int ChannelSpec::delay_spread() const
{
    if (kind != ChannelKind::RayleighMultitap)
        return 0;
    return static_cast<int>(pdp_db.size() - 1) * tap_spacing;
}

double wavelength(double carrier_hz) { return kSpeedOfLight / carrier_hz; }

double path_loss_db(double carrier_hz, double distance_m)
{
    if (!(carrier_hz > 0) || !(distance_m > 0))
        throw ConfigError("path_loss_db: carrier and distance must be positive");
    return 20.0 * std::log10(wavelength(carrier_hz) / (4.0 * M_PI * distance_m));
}

bool is_far_field(double carrier_hz, double distance_m) { return distance_m >= wavelength(carrier_hz); }

ChannelRealization sample_channel(const ChannelSpec& spec, Rng& rng, bool with_path_loss)
{
    spec.validate();
    ChannelRealization r;
    r.path_loss_db = with_path_loss ? path_loss_db(spec.carrier_hz, spec.distance_m) : 0.0;
    switch (spec.kind) {
    case ChannelKind::Awgn:
        r.taps = {1.0};
        break;
    case ChannelKind::RiceFlat: {
        double k = from_db10(spec.rice_k_db);
        std::uniform_real_distribution<double> ph(0.0, 2.0 * M_PI);
        cd los = std::polar(std::sqrt(k / (k + 1)), ph(rng));
        r.taps = {los + cgauss(rng, 1.0 / (k + 1))};
        break;
    }
    case ChannelKind::RayleighFlat:
        r.taps = {cgauss(rng, 1.0)};
        break;
    case ChannelKind::RayleighMultitap: {
        double tot = 0;
        for (double p : spec.pdp_db)
            tot += from_db10(p);
        r.taps.assign(spec.delay_spread() + 1, cd{});
        for (std::size_t i = 0; i < spec.pdp_db.size(); ++i)
            r.taps[i * spec.tap_spacing] = cgauss(rng, from_db10(spec.pdp_db[i]) / tot);
        break;
    }
    }
    return r;
}

void convolve_block(const cd* in, std::size_t n, const CVec& taps, cd* out)
{
    for (std::size_t i = 0; i < n; ++i) {
        cd acc{};
        std::size_t kmax = std::min(taps.size(), i + 1);
        for (std::size_t k = 0; k < kmax; ++k)
            acc += taps[k] * in[i - k];
        out[i] = acc;
    }
}

CVec apply_channel(const CVec& signal, const ChannelRealization& ch, double noise_var, Rng& rng, int cp_length)
{
    if (ch.taps.empty())
        throw ConfigError("apply_channel: empty channel");
    if (static_cast<int>(ch.taps.size()) - 1 > cp_length)
        throw ConfigError("apply_channel: cyclic prefix of " + std::to_string(cp_length) +
                          " samples is shorter than the channel memory of " + std::to_string(ch.taps.size() - 1));
    CVec out(signal.size());
    convolve_block(signal.data(), signal.size(), ch.taps, out.data());
    double a = std::pow(10.0, ch.path_loss_db / 20.0);
    for (auto& v : out) {
        v *= a;
        if (noise_var > 0)
            v += cgauss(rng, noise_var);
    }
    return out;
}

CVec frequency_response(const CVec& taps, int n)
{
    if (static_cast<int>(taps.size()) > n)
        throw ConfigError("frequency_response: more taps than grid points");
    CVec h(n, cd{});
    std::copy(taps.begin(), taps.end(), h.begin());
    Fft f(n);
    f.forward(h.data());
    return h;
}

}  // namespace swipt
