#include "itscf/signal/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "itscf/nn/rng.hpp"

namespace itscf::signal {

std::pair<size_t, size_t> split_boundaries(size_t n) {
    const size_t b1 = (4 * n + 5) / 6; // ceil(4n/6)
    const size_t b2 = (5 * n + 5) / 6; // ceil(5n/6)
    return {b1, b2};
}

namespace {

void shuffle_subset(std::vector<WindowedSample>& subset, uint64_t shuffle_seed, uint32_t subset_idx) {
    nn::RngStream stream(shuffle_seed, {nn::RngPurpose::split_shuffle, subset_idx, 0, 0});
    for (size_t i = subset.size(); i > 1; --i) {
        const size_t j = stream.next_below(i);
        std::swap(subset[i - 1], subset[j]);
    }
}

} // namespace

ChannelStats compute_channel_stats(const std::vector<WindowedSample>& samples) {
    ChannelStats stats;
    std::array<double, kNumChannels> sum{};
    size_t count = 0;
    for (const WindowedSample& s : samples) {
        for (int t = 0; t < s.window_len; ++t)
            for (int c = 0; c < kNumChannels; ++c) sum[c] += s.at(t, c);
        count += s.window_len;
    }
    if (count == 0) throw std::invalid_argument("stats: no samples");
    for (int c = 0; c < kNumChannels; ++c) stats.mean[c] = sum[c] / static_cast<double>(count);

    std::array<double, kNumChannels> sq{};
    for (const WindowedSample& s : samples)
        for (int t = 0; t < s.window_len; ++t)
            for (int c = 0; c < kNumChannels; ++c) {
                const double d = s.at(t, c) - stats.mean[c];
                sq[c] += d * d;
            }
    for (int c = 0; c < kNumChannels; ++c) {
        stats.stddev[c] = std::sqrt(sq[c] / static_cast<double>(count));
        if (stats.stddev[c] == 0.0) stats.stddev[c] = 1.0;
    }
    return stats;
}

void standardize(std::vector<WindowedSample>& samples, const ChannelStats& stats) {
    for (WindowedSample& s : samples)
        for (int t = 0; t < s.window_len; ++t)
            for (int c = 0; c < kNumChannels; ++c) {
                double& v = s.values[static_cast<size_t>(t) * kNumChannels + c];
                v = (v - stats.mean[c]) / stats.stddev[c];
            }
}

DatasetSplit split_dataset(const std::vector<std::vector<WindowedSample>>& windows_per_condition,
                           uint64_t shuffle_seed) {
    DatasetSplit split;
    for (const auto& windows : windows_per_condition) {
        if (windows.size() < 6)
            throw std::invalid_argument("split: every condition must contribute at least 6 windows");
        std::vector<WindowedSample> sorted = windows;
        std::sort(sorted.begin(), sorted.end(),
                  [](const WindowedSample& a, const WindowedSample& b) {
                      return a.window_start < b.window_start;
                  });
        const auto [b1, b2] = split_boundaries(sorted.size());
        for (size_t i = 0; i < sorted.size(); ++i) {
            if (i < b1)
                split.train.push_back(std::move(sorted[i]));
            else if (i < b2)
                split.val.push_back(std::move(sorted[i]));
            else
                split.test.push_back(std::move(sorted[i]));
        }
    }

    shuffle_subset(split.train, shuffle_seed, 0);
    shuffle_subset(split.val, shuffle_seed, 1);
    shuffle_subset(split.test, shuffle_seed, 2);

    split.stats = compute_channel_stats(split.train);
    standardize(split.train, split.stats);
    standardize(split.val, split.stats);
    standardize(split.test, split.stats);
    return split;
}

namespace {

std::string format_channel_array(const std::array<double, kNumChannels>& a) {
    char buf[64];
    std::string out;
    for (int c = 0; c < kNumChannels; ++c) {
        std::snprintf(buf, sizeof(buf), "%.17g", a[c]);
        if (c) out += ',';
        out += buf;
    }
    return out;
}

std::array<double, kNumChannels> parse_channel_array(const std::string& s) {
    std::array<double, kNumChannels> out{};
    std::stringstream ss(s);
    std::string field;
    for (int c = 0; c < kNumChannels; ++c) {
        if (!std::getline(ss, field, ',')) throw std::runtime_error("manifest: bad channel array");
        out[c] = std::stod(field);
    }
    return out;
}

} // namespace

void write_manifest(const std::filesystem::path& path, const Manifest& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write manifest: " + path.string());
    out << "itscf-manifest-v1\n";
    out << "window_len=" << m.window_len << "\n";
    out << "stride=" << m.stride << "\n";
    out << "generation_seed=" << m.generation_seed << "\n";
    out << "shuffle_seed=" << m.shuffle_seed << "\n";
    out << "mean=" << format_channel_array(m.stats.mean) << "\n";
    out << "std=" << format_channel_array(m.stats.stddev) << "\n";
    for (const ManifestEntry& e : m.entries)
        out << "file=" << e.condition_id << "," << e.file << "," << (e.poisoned ? 1 : 0) << "\n";
    if (!out) throw std::runtime_error("manifest write failed: " + path.string());
}

Manifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open manifest: " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "itscf-manifest-v1")
        throw std::runtime_error("unknown manifest format: " + path.string());

    Manifest m;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) throw std::runtime_error("manifest: bad line: " + line);
        const std::string key = line.substr(0, eq);
        const std::string value = line.substr(eq + 1);
        if (key == "window_len")
            m.window_len = std::stoi(value);
        else if (key == "stride")
            m.stride = std::stoi(value);
        else if (key == "generation_seed")
            m.generation_seed = std::stoull(value);
        else if (key == "shuffle_seed")
            m.shuffle_seed = std::stoull(value);
        else if (key == "mean")
            m.stats.mean = parse_channel_array(value);
        else if (key == "std")
            m.stats.stddev = parse_channel_array(value);
        else if (key == "file") {
            std::stringstream ss(value);
            std::string field;
            ManifestEntry e;
            if (!std::getline(ss, field, ',')) throw std::runtime_error("manifest: bad file line");
            e.condition_id = std::stoi(field);
            if (!std::getline(ss, e.file, ',')) throw std::runtime_error("manifest: bad file line");
            if (!std::getline(ss, field, ',')) throw std::runtime_error("manifest: bad file line");
            e.poisoned = std::stoi(field) != 0;
            m.entries.push_back(std::move(e));
        } else {
            throw std::runtime_error("manifest: unknown key: " + key);
        }
    }
    return m;
}

} // namespace itscf::signal
