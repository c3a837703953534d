#include "itscf/sisa/unlearn.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

namespace itscf::sisa {

std::map<int, int> locate_affected(const UnlearnRequest& request, const ShardSlicePlan& plan) {
    if (request.condition_ids.empty())
        throw std::invalid_argument("unlearn: empty request");
    std::map<int, int> affected;
    for (int id : request.condition_ids) {
        const int shard = plan.shard_of(id); // validates the id
        const int slice = plan.slice_of(id);
        auto [it, inserted] = affected.emplace(shard, slice);
        if (!inserted) it->second = std::min(it->second, slice);
    }
    return affected;
}

UnlearnResult unlearn(const UnlearnRequest& request, CheckpointStore& store,
                      const std::vector<signal::WindowedSample>& train_windows,
                      const std::vector<ConstituentModel>& current, const ShardSlicePlan& plan,
                      const nn::ModelConfig& mcfg, const TrainingConfig& tcfg,
                      uint64_t seed_root) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::map<int, int> affected = locate_affected(request, plan);

    std::map<int, const ConstituentModel*> by_shard;
    for (const ConstituentModel& m : current) by_shard[m.shard] = &m;
    for (int s = 0; s < plan.num_shards; ++s)
        if (!by_shard.count(s))
            throw std::invalid_argument("unlearn: missing current model for shard " +
                                        std::to_string(s));
    const std::set<int> removed(request.condition_ids.begin(), request.condition_ids.end());
    for (int id : removed) {
        const ConstituentModel& m = *by_shard.at(plan.shard_of(id));
        if (!std::binary_search(m.retained_conditions.begin(), m.retained_conditions.end(), id))
            throw std::invalid_argument("unlearn: condition " + std::to_string(id) +
                                        " is not present in its shard's model");
    }

    UnlearnResult res;
    res.models = current; // unaffected shards pass through bitwise unchanged
    for (const auto& [shard, r_star] : affected) {
        const auto shard_t0 = std::chrono::steady_clock::now();
        UnlearnShardReport report;
        report.shard = shard;
        report.from_stage = r_star;

        std::vector<int> retained;
        for (int id : by_shard.at(shard)->retained_conditions)
            if (!removed.count(id)) retained.push_back(id);

        ConstituentModel* target = nullptr;
        for (ConstituentModel& m : res.models)
            if (m.shard == shard) target = &m;

        bool resumed = false;
        if (store.contains(shard, r_star - 1)) {
            try {
                Checkpoint start = store.load(shard, r_star - 1);
                nn::ModelParams params = std::move(start.params);
                nn::AdamState adam = std::move(start.adam);
                StageRunResult stages = run_stages(train_windows, plan, shard, r_star, retained,
                                                   params, adam, mcfg, tcfg, seed_root);
                for (const Checkpoint& c : stages.checkpoints) store.save(c);
                target->params = std::move(params);
                report.work = stages.work;
                resumed = true;
            } catch (const std::runtime_error&) {
                resumed = false; // corrupt checkpoint: fall back to full retrain
            }
        }
        if (!resumed) {
            report.fallback = true;
            report.from_stage = 0;
            std::vector<int> removed_for_shard;
            for (int id : plan.conditions_in_shard(shard))
                if (!std::binary_search(retained.begin(), retained.end(), id))
                    removed_for_shard.push_back(id);
            TrainResult full = train_shard(train_windows, plan, shard, mcfg, tcfg, seed_root,
                                           &store, removed_for_shard);
            target->params = std::move(full.model.params);
            report.work = full.work;
        }
        target->retained_conditions = retained;
        target->fingerprint = data_fingerprint(retained);

        report.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - shard_t0).count();
        res.total_work += report.work;
        res.shards.push_back(std::move(report));
    }
    res.total_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

} // namespace itscf::sisa
