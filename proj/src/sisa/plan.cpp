#include "itscf/sisa/plan.hpp"

#include <algorithm>
#include <stdexcept>

namespace itscf::sisa {

using signal::kNumConditions;
using signal::kNumSeverities;

namespace {

void check_condition_id(int id) {
    if (id < 0 || id >= kNumConditions)
        throw std::invalid_argument("plan: condition id out of range");
}

} // namespace

int ShardSlicePlan::shard_of(int condition_id) const {
    check_condition_id(condition_id);
    return shard_of_condition[condition_id];
}

int ShardSlicePlan::slice_of(int condition_id) const {
    check_condition_id(condition_id);
    return slice_of_condition[condition_id];
}

std::vector<int> ShardSlicePlan::conditions_in_shard(int shard) const {
    std::vector<int> out;
    for (int id = 0; id < kNumConditions; ++id)
        if (shard_of_condition[id] == shard) out.push_back(id);
    return out;
}

std::vector<int> ShardSlicePlan::conditions_in_slice(int shard, int slice) const {
    std::vector<int> out;
    for (int id = 0; id < kNumConditions; ++id)
        if (shard_of_condition[id] == shard && slice_of_condition[id] == slice) out.push_back(id);
    return out;
}

std::vector<int> ShardSlicePlan::severities_in_shard(int shard) const {
    std::vector<int> out;
    for (int id : conditions_in_shard(shard)) {
        const int sev = signal::condition_from_id(id).severity;
        if (std::find(out.begin(), out.end(), sev) == out.end()) out.push_back(sev);
    }
    std::sort(out.begin(), out.end());
    return out;
}

ShardSlicePlan plan_shards(const std::vector<signal::FaultCondition>& conditions, int num_shards,
                           int slices_per_shard, ShardStrategy strategy) {
    if (conditions.size() != static_cast<size_t>(kNumConditions))
        throw std::invalid_argument("plan: expected all 48 fault conditions");
    std::array<bool, kNumConditions> seen{};
    for (const signal::FaultCondition& c : conditions) {
        const int id = c.condition_id();
        if (seen[id]) throw std::invalid_argument("plan: duplicate fault condition");
        seen[id] = true;
    }

    if (num_shards < 1 || kNumConditions % num_shards != 0)
        throw std::invalid_argument("plan: shard count must divide 48");
    const int per_shard = kNumConditions / num_shards;
    if (per_shard % signal::kNumClasses != 0)
        throw std::invalid_argument(
            "plan: each shard must hold a whole number of conditions per label");
    const int derived_slices = per_shard / signal::kNumClasses; // = 8 / num_shards
    if (slices_per_shard == 0) slices_per_shard = derived_slices;
    if (slices_per_shard != derived_slices)
        throw std::invalid_argument(
            "plan: label balance (one condition per label per slice) requires slices = 48/(6*shards)");

    ShardSlicePlan plan;
    plan.num_shards = num_shards;
    plan.slices_per_shard = slices_per_shard;
    plan.strategy = strategy;
    for (const signal::FaultCondition& c : conditions) {
        const int id = c.condition_id();
        const int sev0 = c.severity - 1; // 0..7
        int shard = 0, slice0 = 0;
        if (strategy == ShardStrategy::severity_grouped) {
            const int block = kNumSeverities / num_shards;
            shard = sev0 / block;
            slice0 = sev0 % block;
        } else {
            shard = sev0 % num_shards;
            slice0 = sev0 / num_shards;
        }
        plan.shard_of_condition[id] = shard;
        plan.slice_of_condition[id] = slice0 + 1;
    }
    return plan;
}

} // namespace itscf::sisa
