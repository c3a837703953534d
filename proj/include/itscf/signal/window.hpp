#pragma once

#include <vector>

#include "itscf/signal/recording.hpp"

namespace itscf::signal {

// A fixed-length multichannel slice of a recording, stored row-major as
// [time][channel] with the usual HA..LC channel order.
struct WindowedSample {
    std::vector<double> values; // window_len * kNumChannels
    int window_len = 0;
    int label = 0;
    int condition_id = 0;
    int window_start = 0;
    bool poisoned = false;

    double at(int t, int c) const { return values[static_cast<size_t>(t) * kNumChannels + c]; }
};

// Full windows starting at 0, stride, 2*stride, ...; partial tails are
// dropped. Count is floor((N - window_len) / stride) + 1 when a window fits.
std::vector<WindowedSample> window_recording(const Recording& rec, int window_len, int stride);

} // namespace itscf::signal
