#pragma once

#include <array>
#include <vector>

#include "itscf/signal/condition.hpp"

namespace itscf::sisa {

enum class ShardStrategy { severity_grouped, uniform };

// Assignment of the 48 fault conditions to (shard, slice). Slices are
// 1-based so that checkpoint stage r corresponds to "trained on slices
// 1..r" and stage 0 is the initialization checkpoint.
struct ShardSlicePlan {
    int num_shards = 1;
    int slices_per_shard = 8;
    ShardStrategy strategy = ShardStrategy::severity_grouped;
    std::array<int, signal::kNumConditions> shard_of_condition{};
    std::array<int, signal::kNumConditions> slice_of_condition{};

    int shard_of(int condition_id) const;
    int slice_of(int condition_id) const;
    std::vector<int> conditions_in_shard(int shard) const;
    std::vector<int> conditions_in_slice(int shard, int slice) const;
    std::vector<int> severities_in_shard(int shard) const; // sorted, distinct
};

// Builds the assignment. `conditions` must be exactly the 48 distinct fault
// conditions. slices_per_shard 0 means "derive from the label-balance
// invariant"; any other value must equal 48/(6*num_shards).
//
// severity_grouped cuts contiguous severity blocks per shard (shard 0 gets
// the mildest severities); uniform deals severities round-robin across
// shards. Either way, slice k of a shard holds, for each label, the k-th of
// that shard's conditions of the label in severity order.
ShardSlicePlan plan_shards(const std::vector<signal::FaultCondition>& conditions, int num_shards,
                           int slices_per_shard, ShardStrategy strategy);

} // namespace itscf::sisa
