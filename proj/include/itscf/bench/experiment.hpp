#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "itscf/nn/model.hpp"
#include "itscf/signal/emi.hpp"
#include "itscf/signal/recording.hpp"
#include "itscf/sisa/plan.hpp"
#include "itscf/sisa/train.hpp"

namespace itscf::bench {

enum class ProfileKind { desk, paper };

// Model/training scale. The desk profile is sized so the full grid runs in
// minutes on one core; the paper profile mirrors the published architecture
// (96/48 hidden units, 60 epochs, batch 512, overlapping windows).
struct Profile {
    ProfileKind kind = ProfileKind::desk;
    nn::ModelConfig model;
    sisa::TrainingConfig train;
    int stride = 50;
};

Profile desk_profile();
Profile paper_profile();
Profile profile_by_name(const std::string& name);
std::string profile_name(ProfileKind kind);

std::vector<int> default_single_poison(); // one LA condition
std::vector<int> default_six_poison();    // one condition per label, both sides

struct ExperimentConfig {
    Profile profile = desk_profile();
    uint64_t seed = 2024;
    std::vector<int> sweep_shards{1, 2, 4};
    int shards = 2; // used by the single-case subcommands
    sisa::ShardStrategy strategy = sisa::ShardStrategy::severity_grouped;
    std::vector<int> poisoned_conditions = default_single_poison();
    signal::EmiSpec emi = signal::default_emi_spec(0); // seed is set at dataset build
    signal::WaveformModel waveform;
    std::filesystem::path out_dir = "out";
    bool deterministic = true;
    int timing_reps = 3;
};

void validate_experiment_config(const ExperimentConfig& cfg);

// Flat key=value configuration, one pair per line, '#' starts a comment.
// Unknown keys are errors.
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);
void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path);

} // namespace itscf::bench
