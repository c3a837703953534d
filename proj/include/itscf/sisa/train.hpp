#pragma once

#include <cstdint>
#include <vector>

#include "itscf/nn/adam.hpp"
#include "itscf/nn/model.hpp"
#include "itscf/signal/window.hpp"
#include "itscf/sisa/checkpoint.hpp"
#include "itscf/sisa/plan.hpp"

namespace itscf::sisa {

struct TrainingConfig {
    int epochs_total = 60;
    int batch_size = 512;
    double lr = 1e-4;
};

void validate_training_config(const TrainingConfig& cfg);

// Stage r (1-based) gets ceil(E/R) epochs, with the final stages trimmed so
// the counts sum to exactly E.
std::vector<int> stage_epoch_allocation(int epochs_total, int slices);

// (stage, epoch) units executed plus finer-grained counters; the work-bound
// comparisons in the benchmarks are made in stage-epoch units.
struct WorkCounters {
    long stage_epochs = 0;
    long batches = 0;
    long presentations = 0; // sample-through-the-model count

    WorkCounters& operator+=(const WorkCounters& o) {
        stage_epochs += o.stage_epochs;
        batches += o.batches;
        presentations += o.presentations;
        return *this;
    }
    bool operator==(const WorkCounters&) const = default;
};

// A trained per-shard model plus a fingerprint of the data it was last
// (re)trained on: FNV-1a over the sorted retained condition ids.
struct ConstituentModel {
    int shard = 0;
    nn::ModelParams params;
    std::vector<int> retained_conditions; // sorted ascending
    uint64_t fingerprint = 0;
};

uint64_t data_fingerprint(const std::vector<int>& sorted_retained_ids);

struct TrainResult {
    ConstituentModel model;
    std::vector<Checkpoint> checkpoints; // stages 0..R
    WorkCounters work;
    double seconds = 0.0;
};

// Trains one shard incrementally: stage r runs on the union of slices 1..r,
// resuming from the stage r-1 checkpoint (params, Adam state). Every
// stochastic draw comes from a stream keyed by (purpose, shard, stage,
// epoch[, batch]), so results are independent of other shards and of what
// data was removed elsewhere. Conditions listed in `removed_conditions` are
// excluded from every stage. Checkpoints are also written to `store` when
// one is given.
TrainResult train_shard(const std::vector<signal::WindowedSample>& train_windows,
                        const ShardSlicePlan& plan, int shard, const nn::ModelConfig& mcfg,
                        const TrainingConfig& tcfg, uint64_t seed_root,
                        CheckpointStore* store = nullptr,
                        const std::vector<int>& removed_conditions = {});

// The exactness oracle: from-scratch training on the retained data with the
// same seed schedule. Identical to train_shard with removals by
// construction; kept as a named entry point so equivalence checks read as
// unlearn(...) versus oracle_retrain(...).
TrainResult oracle_retrain(const std::vector<signal::WindowedSample>& train_windows,
                           const ShardSlicePlan& plan, int shard, const nn::ModelConfig& mcfg,
                           const TrainingConfig& tcfg, uint64_t seed_root,
                           const std::vector<int>& removed_conditions,
                           CheckpointStore* store = nullptr);

// Shared stage runner, exposed for unlearn: runs stages [from_stage..R] on
// the windows of `allowed_conditions`, mutating params/adam in place, and
// reports the cursor of the last stochastic stream it consumed.
struct StageRunResult {
    WorkCounters work;
    nn::RngCursor cursor;
    std::vector<Checkpoint> checkpoints; // stages from_stage..R
};

StageRunResult run_stages(const std::vector<signal::WindowedSample>& train_windows,
                          const ShardSlicePlan& plan, int shard, int from_stage,
                          const std::vector<int>& allowed_conditions, nn::ModelParams& params,
                          nn::AdamState& adam, const nn::ModelConfig& mcfg,
                          const TrainingConfig& tcfg, uint64_t seed_root);

} // namespace itscf::sisa
