#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "itscf/nn/adam.hpp"
#include "itscf/nn/model.hpp"
#include "itscf/nn/rng.hpp"

namespace itscf::sisa {

constexpr uint16_t kCheckpointVersion = 1;

// Full resumable training state of one shard at a stage boundary. Stage 0 is
// the freshly initialized model before any training.
struct Checkpoint {
    uint16_t shard = 0;
    uint16_t stage = 0;
    nn::ModelParams params;
    nn::AdamState adam;
    nn::RngCursor cursor; // position of the last stochastic stream consumed

    bool operator==(const Checkpoint&) const = default;
};

uint64_t fnv1a64(const uint8_t* data, size_t n);

// Wire format: magic "SISA", version u16, shard u16, stage u16, RNG cursor
// as 4 u64s, then one record per tensor (name length u16, name bytes, rank
// u8, dims as u32s, payload as little-endian f64s), and a trailing 8-byte
// FNV-1a digest over all preceding bytes. Round-trips bit-exactly.
std::vector<uint8_t> serialize_checkpoint(const Checkpoint& c);
Checkpoint deserialize_checkpoint(const std::vector<uint8_t>& bytes);

// One file per (shard, stage) under a directory; writes go to a temp file
// followed by an atomic rename so concurrent writers of distinct shards and
// readers never observe partial checkpoints.
class CheckpointStore {
public:
    explicit CheckpointStore(std::filesystem::path dir);

    std::filesystem::path path_for(int shard, int stage) const;
    bool contains(int shard, int stage) const;
    void save(const Checkpoint& c);
    Checkpoint load(int shard, int stage) const; // throws if missing or corrupt
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

} // namespace itscf::sisa
