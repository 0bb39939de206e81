#pragma once

#include "swipt/common.hpp"

#include <string>

namespace swipt {

enum class ChannelKind { Awgn, RiceFlat, RayleighFlat, RayleighMultitap };

ChannelKind parse_channel_kind(const std::string& s);
std::string to_string(ChannelKind k);

struct ChannelSpec {
    ChannelKind kind = ChannelKind::Awgn;
    double rice_k_db = 20.0;
    RVec pdp_db{0.0, -10.0, -20.0};
    double carrier_hz = 915e6;
    double distance_m = 1.0;
    int tap_spacing = 1;  // samples at the oversampled rate

    void validate() const;
    // Number of samples the impulse response spans minus one (CP requirement).
    int delay_spread() const;
};

struct ChannelRealization {
    CVec taps;
    double path_loss_db = 0.0;
};

constexpr double kSpeedOfLight = 2.99792458e8;

double wavelength(double carrier_hz);
double path_loss_db(double carrier_hz, double distance_m);
bool is_far_field(double carrier_hz, double distance_m);

ChannelRealization sample_channel(const ChannelSpec& spec, Rng& rng, bool with_path_loss = true);

// Linear convolution truncated to the input length, path-loss scaling and
// circular Gaussian noise of variance noise_var. cp_length is what the caller's
// framing provides; it must cover the channel memory.
CVec apply_channel(const CVec& signal, const ChannelRealization& ch, double noise_var, Rng& rng, int cp_length);
void convolve_block(const cd* in, std::size_t n, const CVec& taps, cd* out);

// Channel frequency response on an n-point grid (FFT of the zero-padded taps).
CVec frequency_response(const CVec& taps, int n);

}  // namespace swipt
