#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "itscf/signal/condition.hpp"

namespace itscf::signal {

// Parametric model for the two-side three-phase current waveforms. The fault
// channel gains severity-scaled amplitude and odd-harmonic distortion; other
// channels receive coupled fractions of the same fault terms. LV couplings
// are stronger and LV base amplitudes nearly equal across phases, so LV
// classes separate less cleanly than HV ones.
struct WaveformModel {
    double fundamental_hz = 60.0;
    double lv_phase_shift_rad = -0.5235987755982988; // -pi/6 vector-group displacement
    // Channel order HA, HB, HC, LA, LB, LC.
    std::array<double, kNumChannels> base_amplitude = {0.95, 1.00, 1.06, 1.985, 2.0, 2.015};
    double severity_amplitude_step = 0.04;
    double third_harmonic_step = 0.015;
    double fifth_harmonic_step = 0.008;
    double cross_side_same_phase_coupling = 0.40;
    double same_side_coupling_hv = 0.03;
    double same_side_coupling_lv = 0.12;
    double cross_side_other_phase_coupling = 0.01;
    double noise_floor = 0.005;              // fraction of channel base amplitude
    double channel_phase_jitter_rad = 0.02;
    int sample_rate_hz = 1000;
    double duration_s = 15.0;
};

struct Recording {
    FaultCondition condition;
    int sample_rate_hz = 1000;
    double duration_s = 15.0;
    bool poisoned = false;
    std::array<std::vector<double>, kNumChannels> channels;

    size_t num_samples() const { return channels[0].size(); }
};

// Coupling factor applied to the fault terms as seen on channel `channel`
// for a fault on (side, phase). 1.0 on the fault channel itself.
double coupling_factor(const WaveformModel& model, const FaultCondition& condition, int channel);

// Deterministic for a fixed (condition, seed): same inputs give bitwise
// identical recordings.
Recording generate_condition(const FaultCondition& condition, uint64_t seed,
                             const WaveformModel& model = {});

double channel_rms(const Recording& rec, int channel);

// One file per condition: a header line
//   itscf-v1,<condition_id>,<side>,<phase>,<severity>,<sample_rate>,<poisoned>
// followed by one comma-separated row of 6 floats per sample, printed with
// 17 significant digits so files round-trip byte-for-byte.
void write_recording(const std::filesystem::path& path, const Recording& rec);
Recording read_recording(const std::filesystem::path& path);

} // namespace itscf::signal
