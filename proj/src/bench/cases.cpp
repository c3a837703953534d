#include "itscf/bench/cases.hpp"

#include <algorithm>
#include <chrono>
#include <set>
#include <stdexcept>

#include "itscf/sisa/ensemble.hpp"

namespace itscf::bench {

using signal::WindowedSample;

namespace {

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

} // namespace

BuiltDataset build_dataset(const ExperimentConfig& cfg) {
    validate_experiment_config(cfg);
    BuiltDataset data;
    data.window_len = cfg.profile.model.window_len;
    data.stride = cfg.profile.stride;
    data.seed = cfg.seed;
    data.poisoned = cfg.poisoned_conditions;
    std::sort(data.poisoned.begin(), data.poisoned.end());
    const std::set<int> poisoned(data.poisoned.begin(), data.poisoned.end());

    std::vector<std::vector<WindowedSample>> per_condition;
    per_condition.reserve(signal::kNumConditions);
    for (const signal::FaultCondition& cond : signal::all_conditions()) {
        const signal::Recording rec = signal::generate_condition(cond, cfg.seed, cfg.waveform);
        std::vector<WindowedSample> windows =
            signal::window_recording(rec, data.window_len, data.stride);
        if (poisoned.count(cond.condition_id())) {
            // Contaminate train+val windows; the test tail keeps the clean
            // values so every case is scored on uncontaminated inputs.
            signal::EmiSpec emi = cfg.emi;
            if (emi.affected_channels.empty())
                for (int c = 0; c < signal::kNumChannels; ++c) emi.affected_channels.push_back(c);
            nn::RngStream derive(cfg.seed, {nn::RngPurpose::emi,
                                            static_cast<uint32_t>(cond.condition_id()), 0, 0});
            emi.seed = derive.next_u64();
            const signal::Recording dirty = signal::apply_emi(rec, emi);
            const std::vector<WindowedSample> dirty_windows =
                signal::window_recording(dirty, data.window_len, data.stride);
            const auto [b1, b2] = signal::split_boundaries(windows.size());
            (void)b1;
            for (size_t i = 0; i < b2; ++i) windows[i] = dirty_windows[i];
        }
        per_condition.push_back(std::move(windows));
    }
    data.split = signal::split_dataset(per_condition, cfg.seed);
    return data;
}

EvalMetrics evaluate_models(const std::vector<sisa::ConstituentModel>& models,
                            const nn::ModelConfig& cfg,
                            const std::vector<WindowedSample>& test) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test set");
    std::vector<const WindowedSample*> ptrs;
    ptrs.reserve(test.size());
    for (const WindowedSample& w : test) ptrs.push_back(&w);
    const sisa::BatchPrediction pred = sisa::aggregate_predict_batch(models, cfg, ptrs);

    EvalMetrics m;
    long correct = 0;
    for (size_t i = 0; i < test.size(); ++i) {
        m.confusion[test[i].label][pred.labels[i]] += 1;
        if (test[i].label == pred.labels[i]) ++correct;
    }
    m.accuracy = static_cast<double>(correct) / static_cast<double>(test.size());
    for (int c = 0; c < signal::kNumClasses; ++c) {
        long row = 0;
        for (int p = 0; p < signal::kNumClasses; ++p) row += m.confusion[c][p];
        m.recall[c] = row > 0 ? static_cast<double>(m.confusion[c][c]) / static_cast<double>(row)
                              : 0.0;
    }
    return m;
}

SisaRun train_sisa(const ExperimentConfig& cfg, const BuiltDataset& data, int num_shards,
                   const std::vector<int>& removed_conditions, sisa::CheckpointStore* store) {
    SisaRun run;
    run.plan = sisa::plan_shards(signal::all_conditions(), num_shards, 0, cfg.strategy);
    const auto t0 = std::chrono::steady_clock::now();
    for (int shard = 0; shard < num_shards; ++shard) {
        sisa::TrainResult r = sisa::train_shard(data.split.train, run.plan, shard,
                                                cfg.profile.model, cfg.profile.train, data.seed,
                                                store, removed_conditions);
        run.work += r.work;
        run.models.push_back(std::move(r.model));
    }
    run.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return run;
}

std::vector<sisa::ConstituentModel> models_from_store(const sisa::CheckpointStore& store,
                                                      const sisa::ShardSlicePlan& plan) {
    std::vector<sisa::ConstituentModel> models;
    for (int shard = 0; shard < plan.num_shards; ++shard) {
        const int final_stage = plan.slices_per_shard;
        if (!store.contains(shard, final_stage))
            throw std::runtime_error(
                "Case 4 requires checkpoints from a prior `train` run (Case 2): missing " +
                store.path_for(shard, final_stage).string());
        sisa::Checkpoint ck = store.load(shard, final_stage);
        sisa::ConstituentModel m;
        m.shard = shard;
        m.params = std::move(ck.params);
        m.retained_conditions = plan.conditions_in_shard(shard);
        m.fingerprint = sisa::data_fingerprint(m.retained_conditions);
        models.push_back(std::move(m));
    }
    return models;
}

namespace {

CaseReport report_from(const ExperimentConfig& cfg, const BuiltDataset& data, int case_id,
                       const SisaRun& run, double seconds) {
    const EvalMetrics m = evaluate_models(run.models, cfg.profile.model, data.split.test);
    CaseReport r;
    r.case_id = case_id;
    r.sweep_shards = run.plan.num_shards;
    r.model_shards = run.plan.num_shards;
    r.accuracy = m.accuracy;
    r.recall = m.recall;
    r.confusion = m.confusion;
    r.seconds = seconds;
    r.stage_epochs = run.work.stage_epochs;
    r.stage_epochs_full =
        static_cast<long>(run.plan.num_shards) * cfg.profile.train.epochs_total;
    return r;
}

} // namespace

CaseReport run_case1(const ExperimentConfig& cfg, const BuiltDataset& data) {
    const SisaRun run = train_sisa(cfg, data, 1, {}, nullptr);
    return report_from(cfg, data, 1, run, run.seconds);
}

CaseReport run_case2(const ExperimentConfig& cfg, const BuiltDataset& data, int num_shards,
                     sisa::CheckpointStore& store, SisaRun* run_out) {
    SisaRun run = train_sisa(cfg, data, num_shards, {}, &store);
    CaseReport r = report_from(cfg, data, 2, run, run.seconds);
    if (run_out) *run_out = std::move(run);
    return r;
}

CaseReport run_case3(const ExperimentConfig& cfg, const BuiltDataset& data) {
    std::vector<double> times;
    const SisaRun first = train_sisa(cfg, data, 1, data.poisoned, nullptr);
    times.push_back(first.seconds);
    for (int rep = 1; rep < cfg.timing_reps; ++rep)
        times.push_back(train_sisa(cfg, data, 1, data.poisoned, nullptr).seconds);
    CaseReport r = report_from(cfg, data, 3, first, median(times));
    return r;
}

CaseReport run_case4(const ExperimentConfig& cfg, const BuiltDataset& data,
                     const SisaRun& case2_run, sisa::CheckpointStore& store,
                     double case3_median_seconds, sisa::UnlearnResult* result_out) {
    if (data.poisoned.empty())
        throw std::invalid_argument("Case 4 needs a non-empty poisoned condition set");
    const sisa::UnlearnRequest request{data.poisoned};

    // Timing repetitions run against scratch copies of the checkpoint store,
    // because unlearning replaces the stale checkpoints it retrains.
    std::vector<double> times;
    for (int rep = 1; rep < cfg.timing_reps; ++rep) {
        const std::filesystem::path scratch =
            store.dir().string() + "_rep" + std::to_string(rep);
        std::filesystem::remove_all(scratch);
        std::filesystem::copy(store.dir(), scratch);
        sisa::CheckpointStore scratch_store(scratch);
        const sisa::UnlearnResult r =
            sisa::unlearn(request, scratch_store, data.split.train, case2_run.models,
                          case2_run.plan, cfg.profile.model, cfg.profile.train, data.seed);
        times.push_back(r.total_seconds);
        std::filesystem::remove_all(scratch);
    }
    sisa::UnlearnResult result =
        sisa::unlearn(request, store, data.split.train, case2_run.models, case2_run.plan,
                      cfg.profile.model, cfg.profile.train, data.seed);
    times.push_back(result.total_seconds);

    const double med = median(times);
    EvalMetrics m = evaluate_models(result.models, cfg.profile.model, data.split.test);
    CaseReport r;
    r.case_id = 4;
    r.sweep_shards = case2_run.plan.num_shards;
    r.model_shards = case2_run.plan.num_shards;
    r.accuracy = m.accuracy;
    r.recall = m.recall;
    r.confusion = m.confusion;
    r.seconds = med;
    r.speedup = med > 0.0 ? case3_median_seconds / med : 0.0;
    r.shards_retrained = static_cast<int>(result.shards.size());
    r.stage_epochs = result.total_work.stage_epochs;
    r.stage_epochs_full =
        static_cast<long>(case2_run.plan.num_shards) * cfg.profile.train.epochs_total;
    if (result_out) *result_out = std::move(result);
    return r;
}

GridOutputs run_grid(const ExperimentConfig& cfg, const BuiltDataset& data) {
    GridOutputs out;
    const CaseReport case1 = run_case1(cfg, data);
    CaseReport case3;
    if (data.poisoned.empty()) { // nothing to remove: Case 3 is the same training as Case 1
        case3 = case1;
        case3.case_id = 3;
    } else {
        case3 = run_case3(cfg, data);
    }
    out.case3_median_seconds = case3.seconds;

    for (int S : cfg.sweep_shards) {
        sisa::CheckpointStore store(cfg.out_dir / "checkpoints" / ("S" + std::to_string(S)));
        SisaRun case2_run;
        const CaseReport case2 = run_case2(cfg, data, S, store, &case2_run);

        CaseReport case4;
        if (data.poisoned.empty()) {
            case4 = case2;
            case4.case_id = 4;
            case4.skipped = true;
            case4.seconds = 0.0;
            case4.stage_epochs = 0;
        } else {
            case4 = run_case4(cfg, data, case2_run, store, out.case3_median_seconds);
        }

        CaseReport c1 = case1, c3 = case3;
        c1.sweep_shards = S;
        c3.sweep_shards = S;
        out.reports.push_back(c1);
        out.reports.push_back(case2);
        out.reports.push_back(c3);
        out.reports.push_back(case4);
    }
    return out;
}

} // namespace itscf::bench
