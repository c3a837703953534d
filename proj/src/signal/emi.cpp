#include "itscf/signal/emi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "itscf/nn/rng.hpp"

namespace itscf::signal {

namespace {
constexpr double kTwoPi = 6.28318530717958647692;
} // namespace

EmiSpec default_emi_spec(uint64_t seed) {
    EmiSpec spec;
    spec.noise_std = 0.08;
    spec.spike_rate_hz = 20.0;
    spec.spike_magnitude = 1.5;
    spec.amplitude_bias = 1.15;
    spec.phase_deviation_rad = 0.1;
    spec.harmonics = {{7, 0.1}};
    spec.affected_channels = {0, 1, 2, 3, 4, 5};
    spec.seed = seed;
    return spec;
}

void validate_emi_spec(const EmiSpec& spec) {
    if (spec.noise_std < 0) throw std::invalid_argument("emi: noise_std must be >= 0");
    if (spec.spike_rate_hz < 0) throw std::invalid_argument("emi: spike_rate_hz must be >= 0");
    if (!(spec.amplitude_bias > 0)) throw std::invalid_argument("emi: amplitude_bias must be > 0");
    for (const auto& [order, amp] : spec.harmonics) {
        (void)amp;
        if (order < 2) throw std::invalid_argument("emi: harmonic orders must be integers >= 2");
    }
    if (spec.affected_channels.empty())
        throw std::invalid_argument("emi: affected_channels must be non-empty");
    for (int c : spec.affected_channels)
        if (c < 0 || c >= kNumChannels)
            throw std::invalid_argument("emi: affected channel out of range");
}

Recording apply_emi(const Recording& rec, const EmiSpec& spec) {
    validate_emi_spec(spec);

    Recording out = rec;
    out.poisoned = true;
    const size_t n = rec.num_samples();
    const double fs = rec.sample_rate_hz;

    for (int c : spec.affected_channels) {
        std::vector<double>& x = out.channels[c];
        const double peak = std::sqrt(2.0) * channel_rms(rec, c);

        if (spec.amplitude_bias != 1.0)
            for (double& v : x) v *= spec.amplitude_bias;

        if (spec.phase_deviation_rad != 0.0) {
            // Phase deviation as a fractional time shift of the waveform,
            // linear interpolation, edges clamped.
            const double shift = spec.phase_deviation_rad / (kTwoPi * spec.fundamental_hz) * fs;
            std::vector<double> shifted(n);
            for (size_t i = 0; i < n; ++i) {
                double src = static_cast<double>(i) - shift;
                src = std::clamp(src, 0.0, static_cast<double>(n - 1));
                const size_t i0 = static_cast<size_t>(src);
                const size_t i1 = std::min(i0 + 1, n - 1);
                const double frac = src - static_cast<double>(i0);
                shifted[i] = x[i0] * (1.0 - frac) + x[i1] * frac;
            }
            x = std::move(shifted);
        }

        if (!spec.harmonics.empty()) {
            for (const auto& [order, amp] : spec.harmonics) {
                const double w = kTwoPi * order * spec.fundamental_hz / fs;
                const double a = amp * peak;
                for (size_t i = 0; i < n; ++i) x[i] += a * std::sin(w * static_cast<double>(i));
            }
        }

        if (spec.noise_std > 0.0) {
            nn::RngStream noise(spec.seed, {nn::RngPurpose::emi, static_cast<uint32_t>(c), 1, 0});
            std::vector<double> g(n);
            for (size_t i = 0; i < n; ++i) g[i] = noise.next_gaussian();
            // 3-tap smoothing limits the bandwidth; 1/sqrt(3) restores unit
            // variance away from the two edge samples.
            const double scale = spec.noise_std * peak / std::sqrt(3.0);
            for (size_t i = 0; i < n; ++i) {
                const double prev = i > 0 ? g[i - 1] : 0.0;
                const double next = i + 1 < n ? g[i + 1] : 0.0;
                x[i] += scale * (prev + g[i] + next);
            }
        }

        if (spec.spike_rate_hz > 0.0 && spec.spike_magnitude != 0.0) {
            nn::RngStream spikes(spec.seed, {nn::RngPurpose::emi, static_cast<uint32_t>(c), 2, 0});
            double t = 0.0;
            while (true) {
                t += -std::log(1.0 - spikes.next_uniform()) / spec.spike_rate_hz;
                const double idx = t * fs;
                if (idx >= static_cast<double>(n)) break;
                const double sign = (spikes.next_u64() & 1) ? 1.0 : -1.0;
                x[static_cast<size_t>(idx)] += sign * spec.spike_magnitude * peak;
            }
        }
    }
    return out;
}

} // namespace itscf::signal
