#pragma once

#include <cmath>
#include <cstdint>

namespace itscf::nn {

// Stream purposes. Each (purpose, shard, stage, epoch) tuple names an
// independent random stream, so no consumer can disturb another's draws.
enum class RngPurpose : uint32_t {
    dataset_seed = 1,
    waveform = 2,
    emi = 3,
    split_shuffle = 4,
    param_init = 5,
    batch_shuffle = 6,
    dropout = 7,
    probe = 8,
};

struct RngKey {
    RngPurpose purpose{RngPurpose::probe};
    uint32_t shard = 0;
    uint64_t stage = 0;
    uint64_t epoch = 0; // high 32 bits: epoch, low 32 bits: sub-index (e.g. batch)

    static constexpr uint64_t pack(uint64_t major, uint64_t minor) {
        return (major << 32) | (minor & 0xffffffffull);
    }
};

// Counter-based stream: the i-th output is a pure function of (root, key, i),
// independent of how draws interleave across other streams.
class RngStream {
public:
    RngStream() = default;
    RngStream(uint64_t root, RngKey key) : key_(key) {
        uint64_t s = mix(root ^ 0x6a09e667f3bcc908ull);
        s = mix(s + static_cast<uint64_t>(key.purpose));
        s = mix(s + key.shard);
        s = mix(s + key.stage);
        s = mix(s + key.epoch);
        base_ = s;
    }

    static constexpr uint64_t mix(uint64_t z) {
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    uint64_t at(uint64_t index) const { return mix(base_ + index * 0x9e3779b97f4a7c15ull); }

    uint64_t next_u64() { return at(draws_++); }

    // [0, 1) with 53-bit resolution.
    double next_uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Unbiased-enough index in [0, n) via 128-bit widening multiply.
    uint64_t next_below(uint64_t n) {
        return static_cast<uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
    }

    // Box-Muller; always consumes two draws (no cached spare, so the
    // sequence stays a pure function of the draw counter).
    double next_gaussian() {
        double u1 = next_uniform();
        double u2 = next_uniform();
        if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
    }

    const RngKey& key() const { return key_; }
    uint64_t draws() const { return draws_; }
    void seek(uint64_t draws) { draws_ = draws; }

private:
    RngKey key_{};
    uint64_t base_ = 0;
    uint64_t draws_ = 0;
};

// Checkpointable position of a stream: its key packed with the draw counter.
struct RngCursor {
    uint64_t purpose_shard = 0; // purpose in high 32 bits, shard in low 32
    uint64_t stage = 0;
    uint64_t epoch = 0;
    uint64_t draws = 0;

    static RngCursor of(const RngStream& s) {
        const RngKey& k = s.key();
        return RngCursor{RngKey::pack(static_cast<uint64_t>(k.purpose), k.shard), k.stage,
                         k.epoch, s.draws()};
    }
    bool operator==(const RngCursor&) const = default;
};

} // namespace itscf::nn
