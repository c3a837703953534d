#include "itscf/signal/window.hpp"

#include <stdexcept>

namespace itscf::signal {

std::vector<WindowedSample> window_recording(const Recording& rec, int window_len, int stride) {
    const size_t n = rec.num_samples();
    if (stride <= 0) throw std::invalid_argument("window: stride must be positive");
    if (window_len <= 0 || static_cast<size_t>(window_len) > n)
        throw std::invalid_argument("window: window_len must be in [1, recording length]");
    if (stride > window_len) throw std::invalid_argument("window: stride must be <= window_len");

    std::vector<WindowedSample> out;
    const size_t count = (n - static_cast<size_t>(window_len)) / static_cast<size_t>(stride) + 1;
    out.reserve(count);
    for (size_t w = 0; w < count; ++w) {
        const size_t start = w * static_cast<size_t>(stride);
        WindowedSample s;
        s.window_len = window_len;
        s.label = rec.condition.label();
        s.condition_id = rec.condition.condition_id();
        s.window_start = static_cast<int>(start);
        s.poisoned = rec.poisoned;
        s.values.resize(static_cast<size_t>(window_len) * kNumChannels);
        for (int t = 0; t < window_len; ++t)
            for (int c = 0; c < kNumChannels; ++c)
                s.values[static_cast<size_t>(t) * kNumChannels + c] = rec.channels[c][start + t];
        out.push_back(std::move(s));
    }
    return out;
}

} // namespace itscf::signal
