#include "itscf/signal/recording.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "itscf/nn/rng.hpp"

namespace itscf::signal {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTwoPi = 2.0 * kPi;

double phase_offset(Phase p) {
    switch (p) {
        case Phase::A: return 0.0;
        case Phase::B: return -kTwoPi / 3.0;
        case Phase::C: return kTwoPi / 3.0;
    }
    return 0.0;
}

} // namespace

double coupling_factor(const WaveformModel& model, const FaultCondition& condition, int channel) {
    const int fault_channel = channel_index(condition.side, condition.phase);
    if (channel == fault_channel) return 1.0;
    const Side ch_side = channel < 3 ? Side::HV : Side::LV;
    const Phase ch_phase = static_cast<Phase>(channel % 3);
    if (ch_side != condition.side) {
        return ch_phase == condition.phase ? model.cross_side_same_phase_coupling
                                           : model.cross_side_other_phase_coupling;
    }
    return condition.side == Side::HV ? model.same_side_coupling_hv : model.same_side_coupling_lv;
}

Recording generate_condition(const FaultCondition& condition, uint64_t seed,
                             const WaveformModel& model) {
    if (condition.severity < 1 || condition.severity > kNumSeverities)
        throw std::invalid_argument("severity out of range");

    const uint32_t cid = static_cast<uint32_t>(condition.condition_id());
    const size_t n = static_cast<size_t>(model.sample_rate_hz * model.duration_s);
    const double dt = 1.0 / model.sample_rate_hz;
    const double sev = condition.severity;

    // Condition-wide draws: a global phase (absolute phase carries no class
    // information) and per-condition harmonic phases, so each condition has
    // its own distortion shape rather than one shared template.
    nn::RngStream cond_stream(seed, {nn::RngPurpose::waveform, cid, 0, 0});
    const double global_phase = (cond_stream.next_uniform() * 2.0 - 1.0) * kPi;
    const double theta3 = (cond_stream.next_uniform() * 2.0 - 1.0) * kPi;
    const double theta5 = (cond_stream.next_uniform() * 2.0 - 1.0) * kPi;

    const double amp_gain = model.severity_amplitude_step * sev;
    const double h3_gain = model.third_harmonic_step * sev;
    const double h5_gain = model.fifth_harmonic_step * sev;
    const double omega = kTwoPi * model.fundamental_hz;

    Recording rec;
    rec.condition = condition;
    rec.sample_rate_hz = model.sample_rate_hz;
    rec.duration_s = model.duration_s;
    rec.poisoned = false;

    for (int c = 0; c < kNumChannels; ++c) {
        nn::RngStream ch_stream(seed, {nn::RngPurpose::waveform, cid, 1 + static_cast<uint64_t>(c), 0});
        const double ch_jitter =
            (ch_stream.next_uniform() * 2.0 - 1.0) * model.channel_phase_jitter_rad;
        const double side_shift = c < 3 ? 0.0 : model.lv_phase_shift_rad;
        const double phi = phase_offset(static_cast<Phase>(c % 3)) + side_shift + global_phase + ch_jitter;
        const double amp = model.base_amplitude[c];
        const double kappa = coupling_factor(model, condition, c);
        const double noise_amp = model.noise_floor * amp;

        std::vector<double>& out = rec.channels[c];
        out.resize(n);
        for (size_t i = 0; i < n; ++i) {
            const double arg = omega * (i * dt) + phi;
            double s = std::sin(arg);
            s += kappa * (amp_gain * std::sin(arg) + h3_gain * std::sin(3.0 * arg + theta3) +
                          h5_gain * std::sin(5.0 * arg + theta5));
            out[i] = amp * s + noise_amp * ch_stream.next_gaussian();
        }
    }
    return rec;
}

double channel_rms(const Recording& rec, int channel) {
    const std::vector<double>& x = rec.channels[channel];
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc / static_cast<double>(x.size()));
}

void write_recording(const std::filesystem::path& path, const Recording& rec) {
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
    std::fprintf(f, "itscf-v1,%d,%c,%c,%d,%d,%d\n", rec.condition.condition_id(),
                 side_letter(rec.condition.side), phase_letter(rec.condition.phase),
                 rec.condition.severity, rec.sample_rate_hz, rec.poisoned ? 1 : 0);
    const size_t n = rec.num_samples();
    for (size_t i = 0; i < n; ++i) {
        std::fprintf(f, "%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", rec.channels[0][i],
                     rec.channels[1][i], rec.channels[2][i], rec.channels[3][i],
                     rec.channels[4][i], rec.channels[5][i]);
    }
    if (std::fclose(f) != 0) throw std::runtime_error("write failed: " + path.string());
}

Recording read_recording(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open recording: " + path.string());
    std::string header;
    if (!std::getline(in, header)) throw std::runtime_error("empty recording file: " + path.string());

    std::stringstream hs(header);
    std::string field;
    auto next_field = [&]() {
        if (!std::getline(hs, field, ',')) throw std::runtime_error("bad recording header: " + header);
        return field;
    };
    if (next_field() != "itscf-v1") throw std::runtime_error("unknown recording format: " + header);
    const int cid = std::stoi(next_field());
    const char side = next_field().at(0);
    const char phase = next_field().at(0);
    const int severity = std::stoi(next_field());
    const int rate = std::stoi(next_field());
    const bool poisoned = std::stoi(next_field()) != 0;

    Recording rec;
    rec.condition = FaultCondition{side_from_letter(side), phase_from_letter(phase), severity};
    if (rec.condition.condition_id() != cid)
        throw std::runtime_error("recording header inconsistent with condition id");
    rec.sample_rate_hz = rate;
    rec.poisoned = poisoned;

    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const char* p = line.c_str();
        for (int c = 0; c < kNumChannels; ++c) {
            char* end = nullptr;
            const double v = std::strtod(p, &end);
            if (end == p) throw std::runtime_error("bad sample row in " + path.string());
            rec.channels[c].push_back(v);
            p = end;
            if (*p == ',') ++p;
        }
    }
    rec.duration_s = static_cast<double>(rec.num_samples()) / rate;
    return rec;
}

} // namespace itscf::signal
