#pragma once

#include <map>
#include <vector>

#include "itscf/sisa/checkpoint.hpp"
#include "itscf/sisa/plan.hpp"
#include "itscf/sisa/train.hpp"

namespace itscf::sisa {

struct UnlearnRequest {
    std::vector<int> condition_ids; // non-empty, all valid and currently present
};

// For each shard holding a removed condition: the earliest (1-based) slice
// containing one, i.e. the stage the retraining must restart from.
std::map<int, int> locate_affected(const UnlearnRequest& request, const ShardSlicePlan& plan);

struct UnlearnShardReport {
    int shard = 0;
    int from_stage = 0;   // r*, or 0 when the shard fell back to a full retrain
    bool fallback = false; // missing/corrupt checkpoint forced retraining from stage 0
    double seconds = 0.0;
    WorkCounters work;
};

struct UnlearnResult {
    std::vector<ConstituentModel> models; // same order as the input models
    std::vector<UnlearnShardReport> shards;
    double total_seconds = 0.0;
    WorkCounters total_work;
};

// Exact unlearning: affected shards reload their stage r*-1 checkpoint and
// rerun stages r*..R without the removed conditions, using the same seed
// schedule as original training; unaffected shards are returned bitwise
// unchanged. Retrained checkpoints replace the stale ones in the store.
UnlearnResult unlearn(const UnlearnRequest& request, CheckpointStore& store,
                      const std::vector<signal::WindowedSample>& train_windows,
                      const std::vector<ConstituentModel>& current, const ShardSlicePlan& plan,
                      const nn::ModelConfig& mcfg, const TrainingConfig& tcfg,
                      uint64_t seed_root);

} // namespace itscf::sisa
