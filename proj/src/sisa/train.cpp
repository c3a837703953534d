#include "itscf/sisa/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

#include "itscf/nn/loss.hpp"

namespace itscf::sisa {

using signal::WindowedSample;

void validate_training_config(const TrainingConfig& cfg) {
    if (cfg.epochs_total < 1) throw std::invalid_argument("training: epochs_total must be >= 1");
    if (cfg.batch_size < 1) throw std::invalid_argument("training: batch_size must be >= 1");
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("training: lr must be positive");
}

std::vector<int> stage_epoch_allocation(int epochs_total, int slices) {
    if (epochs_total < 1 || slices < 1)
        throw std::invalid_argument("training: epochs and slices must be >= 1");
    const int per_stage = (epochs_total + slices - 1) / slices; // ceil
    std::vector<int> alloc(slices, per_stage);
    int excess = per_stage * slices - epochs_total;
    for (int r = slices - 1; r >= 0 && excess > 0; --r) {
        const int cut = std::min(excess, alloc[r]);
        alloc[r] -= cut;
        excess -= cut;
    }
    return alloc;
}

uint64_t data_fingerprint(const std::vector<int>& sorted_retained_ids) {
    uint64_t h = 14695981039346656037ull;
    for (int id : sorted_retained_ids) {
        for (int byte = 0; byte < 4; ++byte) {
            h ^= static_cast<uint8_t>(static_cast<uint32_t>(id) >> (8 * byte));
            h *= 1099511628211ull;
        }
    }
    return h;
}

namespace {

// Windows of the given conditions in slices 1..stage, in canonical
// (condition, window_start) order so the subsequent shuffle depends only on
// the retained set and the stream key, never on removal history.
std::vector<const WindowedSample*> stage_samples(const std::vector<WindowedSample>& windows,
                                                 const ShardSlicePlan& plan, int shard, int stage,
                                                 const std::set<int>& allowed) {
    std::vector<const WindowedSample*> out;
    for (const WindowedSample& w : windows) {
        if (plan.shard_of(w.condition_id) != shard) continue;
        if (plan.slice_of(w.condition_id) > stage) continue;
        if (!allowed.count(w.condition_id)) continue;
        out.push_back(&w);
    }
    std::sort(out.begin(), out.end(), [](const WindowedSample* a, const WindowedSample* b) {
        if (a->condition_id != b->condition_id) return a->condition_id < b->condition_id;
        return a->window_start < b->window_start;
    });
    return out;
}

void fisher_yates(std::vector<size_t>& order, nn::RngStream& stream) {
    for (size_t i = order.size(); i > 1; --i) {
        const size_t j = stream.next_below(i);
        std::swap(order[i - 1], order[j]);
    }
}

std::string context_string(int shard, int stage, int epoch, size_t batch) {
    return "shard " + std::to_string(shard) + " stage " + std::to_string(stage) + " epoch " +
           std::to_string(epoch) + " batch " + std::to_string(batch);
}

} // namespace

StageRunResult run_stages(const std::vector<WindowedSample>& train_windows,
                          const ShardSlicePlan& plan, int shard, int from_stage,
                          const std::vector<int>& allowed_conditions, nn::ModelParams& params,
                          nn::AdamState& adam, const nn::ModelConfig& mcfg,
                          const TrainingConfig& tcfg, uint64_t seed_root) {
    nn::validate_config(mcfg);
    validate_training_config(tcfg);
    if (shard < 0 || shard >= plan.num_shards)
        throw std::invalid_argument("training: shard index outside plan");
    if (from_stage < 1 || from_stage > plan.slices_per_shard)
        throw std::invalid_argument("training: stage outside 1..R");
    for (const WindowedSample& w : train_windows)
        if (w.condition_id < 0 || w.condition_id >= signal::kNumConditions)
            throw std::invalid_argument("training: window with condition outside the plan");
    const std::set<int> allowed(allowed_conditions.begin(), allowed_conditions.end());
    for (int id : allowed)
        if (plan.shard_of(id) != shard)
            throw std::invalid_argument("training: allowed condition not in this shard");

    const nn::AdamConfig adam_cfg{.lr = tcfg.lr};
    const int R = plan.slices_per_shard;
    const std::vector<int> alloc = stage_epoch_allocation(tcfg.epochs_total, R);

    StageRunResult res;
    res.cursor = nn::RngCursor{};
    for (int stage = from_stage; stage <= R; ++stage) {
        const std::vector<const WindowedSample*> samples =
            stage_samples(train_windows, plan, shard, stage, allowed);
        const int epochs = alloc[stage - 1];
        for (int epoch = 0; epoch < epochs; ++epoch) {
            nn::RngStream shuffle(seed_root,
                                  {nn::RngPurpose::batch_shuffle, static_cast<uint32_t>(shard),
                                   static_cast<uint64_t>(stage), static_cast<uint64_t>(epoch)});
            std::vector<size_t> order(samples.size());
            for (size_t i = 0; i < order.size(); ++i) order[i] = i;
            fisher_yates(order, shuffle);

            const size_t bs = static_cast<size_t>(tcfg.batch_size);
            const size_t batch_count = (samples.size() + bs - 1) / bs;
            for (size_t b = 0; b < batch_count; ++b) {
                const size_t lo = b * bs;
                const size_t hi = std::min(samples.size(), lo + bs);
                std::vector<const WindowedSample*> batch(hi - lo);
                std::vector<int> labels(hi - lo);
                for (size_t i = lo; i < hi; ++i) {
                    batch[i - lo] = samples[order[i]];
                    labels[i - lo] = samples[order[i]]->label;
                }
                const nn::BatchInput input = nn::make_batch(batch, mcfg);

                nn::RngStream dropout(
                    seed_root, {nn::RngPurpose::dropout, static_cast<uint32_t>(shard),
                                static_cast<uint64_t>(stage), nn::RngKey::pack(epoch, b)});
                nn::ForwardCache cache;
                const nn::Mat logits = nn::forward(mcfg, params, input, true, &dropout, &cache);
                const nn::LossResult loss = nn::softmax_cross_entropy(logits, labels);
                if (!std::isfinite(loss.loss))
                    throw std::runtime_error("training failure: non-finite loss at " +
                                             context_string(shard, stage, epoch, b));
                const nn::Gradients grads = nn::backward(mcfg, params, cache, loss.dlogits);
                nn::adam_step(adam_cfg, adam, params, grads);

                res.work.batches += 1;
                res.work.presentations += static_cast<long>(hi - lo);
                res.cursor = nn::RngCursor::of(dropout);
            }
            res.work.stage_epochs += 1;
        }
        res.checkpoints.push_back(Checkpoint{static_cast<uint16_t>(shard),
                                             static_cast<uint16_t>(stage), params, adam,
                                             res.cursor});
    }
    return res;
}

TrainResult train_shard(const std::vector<WindowedSample>& train_windows,
                        const ShardSlicePlan& plan, int shard, const nn::ModelConfig& mcfg,
                        const TrainingConfig& tcfg, uint64_t seed_root, CheckpointStore* store,
                        const std::vector<int>& removed_conditions) {
    const auto t0 = std::chrono::steady_clock::now();
    nn::validate_config(mcfg);
    validate_training_config(tcfg);
    if (shard < 0 || shard >= plan.num_shards)
        throw std::invalid_argument("training: shard index outside plan");
    const std::set<int> removed(removed_conditions.begin(), removed_conditions.end());
    for (int id : removed)
        (void)plan.shard_of(id); // validates the id

    std::vector<int> retained;
    for (int id : plan.conditions_in_shard(shard))
        if (!removed.count(id)) retained.push_back(id);

    TrainResult res;
    nn::RngStream init(seed_root, {nn::RngPurpose::param_init, static_cast<uint32_t>(shard), 0, 0});
    nn::ModelParams params = nn::init_params(mcfg, init);
    nn::AdamState adam = nn::make_adam_state(mcfg);
    init.seek(0); // record a zero-draw cursor for the untouched stage-0 state
    Checkpoint ck0{static_cast<uint16_t>(shard), 0, params, adam, nn::RngCursor::of(init)};
    res.checkpoints.push_back(ck0);
    if (store) store->save(ck0);

    StageRunResult stages =
        run_stages(train_windows, plan, shard, 1, retained, params, adam, mcfg, tcfg, seed_root);
    res.work = stages.work;
    for (Checkpoint& c : stages.checkpoints) {
        if (store) store->save(c);
        res.checkpoints.push_back(std::move(c));
    }

    res.model.shard = shard;
    res.model.params = std::move(params);
    res.model.retained_conditions = retained;
    res.model.fingerprint = data_fingerprint(retained);
    res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

TrainResult oracle_retrain(const std::vector<WindowedSample>& train_windows,
                           const ShardSlicePlan& plan, int shard, const nn::ModelConfig& mcfg,
                           const TrainingConfig& tcfg, uint64_t seed_root,
                           const std::vector<int>& removed_conditions, CheckpointStore* store) {
    return train_shard(train_windows, plan, shard, mcfg, tcfg, seed_root, store,
                       removed_conditions);
}

} // namespace itscf::sisa
