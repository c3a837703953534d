#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "itscf/signal/window.hpp"

namespace itscf::signal {

struct ChannelStats {
    std::array<double, kNumChannels> mean{};
    std::array<double, kNumChannels> stddev{};
};

struct DatasetSplit {
    std::vector<WindowedSample> train;
    std::vector<WindowedSample> val;
    std::vector<WindowedSample> test;
    ChannelStats stats; // computed on train only, applied to all subsets
};

// Contiguous 4:1:1 boundaries for n windows in window-start order: train gets
// [0, b1), val [b1, b2), test [b2, n) with b1 = ceil(4n/6), b2 = ceil(5n/6).
// Every count stays within 1 of the exact ratio.
std::pair<size_t, size_t> split_boundaries(size_t n);

// Partitions each condition's windows contiguously 4:1:1 (no temporal
// overlap across subsets for stride < window_len), shuffles within each
// subset, then standardizes every subset with per-channel train statistics.
// Each condition must contribute at least 6 windows.
DatasetSplit split_dataset(const std::vector<std::vector<WindowedSample>>& windows_per_condition,
                           uint64_t shuffle_seed);

// Per-channel population mean/stddev over a set of raw windows.
ChannelStats compute_channel_stats(const std::vector<WindowedSample>& samples);
void standardize(std::vector<WindowedSample>& samples, const ChannelStats& stats);

// Dataset manifest: window parameters, seeds, standardization stats and the
// per-condition recording files.
struct ManifestEntry {
    int condition_id = 0;
    std::string file;
    bool poisoned = false;
};

struct Manifest {
    int window_len = 50;
    int stride = 50;
    uint64_t generation_seed = 0;
    uint64_t shuffle_seed = 0;
    ChannelStats stats;
    std::vector<ManifestEntry> entries;
};

void write_manifest(const std::filesystem::path& path, const Manifest& m);
Manifest read_manifest(const std::filesystem::path& path);

} // namespace itscf::signal
