#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "itscf/bench/experiment.hpp"
#include "itscf/signal/dataset.hpp"
#include "itscf/sisa/checkpoint.hpp"
#include "itscf/sisa/unlearn.hpp"

namespace itscf::bench {

// The experiment corpus: EMI is applied to the poisoned conditions' train
// and validation windows only; the test subset stays clean for every
// condition, so all cases are scored against uncontaminated ground truth.
// Standardization statistics are fixed once, from the (contaminated) train
// subset, and reused by every case.
struct BuiltDataset {
    signal::DatasetSplit split;
    std::vector<int> poisoned; // sorted condition ids
    int window_len = 50;
    int stride = 50;
    uint64_t seed = 0;
};

BuiltDataset build_dataset(const ExperimentConfig& cfg);

struct CaseReport {
    int case_id = 0;
    int sweep_shards = 1;  // the sweep point this row belongs to
    int model_shards = 1;  // shards actually trained (1 for the non-SISA cases)
    bool skipped = false;  // Case 4 with an empty poison set degenerates to Case 2
    double accuracy = 0.0;
    std::array<double, signal::kNumClasses> recall{};
    std::array<std::array<long, signal::kNumClasses>, signal::kNumClasses> confusion{};
    double seconds = 0.0;       // median wall time over the timing repetitions
    double speedup = 0.0;       // case 4: case-3 median seconds / case-4 median seconds
    int shards_retrained = 0;   // cases 2/4
    long stage_epochs = 0;      // (stage, epoch) units executed
    long stage_epochs_full = 0; // S * R * epochs-per-stage bound for this sweep point
};

struct EvalMetrics {
    double accuracy = 0.0;
    std::array<double, signal::kNumClasses> recall{};
    std::array<std::array<long, signal::kNumClasses>, signal::kNumClasses> confusion{};
};

EvalMetrics evaluate_models(const std::vector<sisa::ConstituentModel>& models,
                            const nn::ModelConfig& cfg,
                            const std::vector<signal::WindowedSample>& test);

// One SISA training pass (all shards of one plan).
struct SisaRun {
    sisa::ShardSlicePlan plan;
    std::vector<sisa::ConstituentModel> models;
    double seconds = 0.0;
    sisa::WorkCounters work;
};

SisaRun train_sisa(const ExperimentConfig& cfg, const BuiltDataset& data, int num_shards,
                   const std::vector<int>& removed_conditions, sisa::CheckpointStore* store);

// Reconstructs constituent models from a store's final-stage checkpoints
// (the on-disk handoff between the `train` and `unlearn` subcommands).
std::vector<sisa::ConstituentModel> models_from_store(const sisa::CheckpointStore& store,
                                                      const sisa::ShardSlicePlan& plan);

// Case 1: non-SISA (single-shard) training on the contaminated corpus.
// Case 2: SISA training on the contaminated corpus, checkpoints kept.
// Case 3: non-SISA retraining from scratch with poisoned conditions removed.
// Case 4: SISA unlearning of the poisoned conditions from Case-2 checkpoints.
CaseReport run_case1(const ExperimentConfig& cfg, const BuiltDataset& data);
CaseReport run_case2(const ExperimentConfig& cfg, const BuiltDataset& data, int num_shards,
                     sisa::CheckpointStore& store, SisaRun* run_out = nullptr);
CaseReport run_case3(const ExperimentConfig& cfg, const BuiltDataset& data);
CaseReport run_case4(const ExperimentConfig& cfg, const BuiltDataset& data,
                     const SisaRun& case2_run, sisa::CheckpointStore& store,
                     double case3_median_seconds, sisa::UnlearnResult* result_out = nullptr);

// The paper's full grid: Cases 1-4 at every sweep point. Case 1 and Case 3
// do not depend on the shard count, so their rows repeat per sweep point.
// Case-2 checkpoints are written under out_dir/checkpoints/S<k>.
struct GridOutputs {
    std::vector<CaseReport> reports; // |sweep| * 4 rows, grid order
    double case3_median_seconds = 0.0;
};

GridOutputs run_grid(const ExperimentConfig& cfg, const BuiltDataset& data);

} // namespace itscf::bench
