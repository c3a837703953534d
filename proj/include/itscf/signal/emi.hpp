#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "itscf/signal/recording.hpp"

namespace itscf::signal {

// Sensor-failure model: amplitude bias, phase deviation, harmonics,
// band-limited noise and impulsive spikes on a subset of channels.
// Relative amplitudes are fractions of the channel's nominal peak
// (sqrt(2) times the RMS of the unperturbed channel).
struct EmiSpec {
    double noise_std = 0.0;
    double spike_rate_hz = 0.0;
    double spike_magnitude = 0.0;
    double amplitude_bias = 1.0;
    double phase_deviation_rad = 0.0;
    double fundamental_hz = 60.0;
    std::vector<std::pair<int, double>> harmonics; // (order >= 2, relative amplitude)
    std::vector<int> affected_channels;
    uint64_t seed = 0;
};

// Experiment default: strong enough to visibly contaminate a condition
// without flattening the waveform entirely. Affects all six channels.
EmiSpec default_emi_spec(uint64_t seed);

void validate_emi_spec(const EmiSpec& spec);

// Applies, in order: amplitude bias, phase deviation, harmonic addition,
// band-limited noise, impulsive spikes. Unaffected channels are returned
// bitwise unchanged; the result is always flagged poisoned. Deterministic
// for a fixed spec.seed.
Recording apply_emi(const Recording& rec, const EmiSpec& spec);

} // namespace itscf::signal
