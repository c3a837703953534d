#include "itscf/bench/experiment.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace itscf::bench {

Profile desk_profile() {
    Profile p;
    p.kind = ProfileKind::desk;
    p.model = nn::ModelConfig{.input_dim = 6,
                              .lstm1_hidden = 32,
                              .lstm2_hidden = 16,
                              .fc_hidden = 64,
                              .num_classes = 6,
                              .dropout_rate = 0.30,
                              .window_len = 50};
    // 16 epochs divide evenly across the stage counts of every swept shard
    // configuration (R = 8, 4, 2), so no stage is starved or trimmed.
    p.train = sisa::TrainingConfig{.epochs_total = 16, .batch_size = 128, .lr = 1e-3};
    p.stride = 50;
    return p;
}

Profile paper_profile() {
    Profile p;
    p.kind = ProfileKind::paper;
    p.model = nn::ModelConfig{.input_dim = 6,
                              .lstm1_hidden = 96,
                              .lstm2_hidden = 48,
                              .fc_hidden = 64,
                              .num_classes = 6,
                              .dropout_rate = 0.30,
                              .window_len = 50};
    p.train = sisa::TrainingConfig{.epochs_total = 60, .batch_size = 512, .lr = 1e-4};
    p.stride = 25;
    return p;
}

Profile profile_by_name(const std::string& name) {
    if (name == "desk") return desk_profile();
    if (name == "paper") return paper_profile();
    throw std::invalid_argument("unknown profile '" + name + "' (expected desk or paper)");
}

std::string profile_name(ProfileKind kind) {
    return kind == ProfileKind::desk ? "desk" : "paper";
}

std::vector<int> default_single_poison() {
    // LA, severity 1: the mildest fault of the class named in the paper's
    // single-poison scenario.
    return {signal::FaultCondition{signal::Side::LV, signal::Phase::A, 1}.condition_id()};
}

std::vector<int> default_six_poison() {
    using signal::FaultCondition;
    using signal::Phase;
    using signal::Side;
    return {
        FaultCondition{Side::HV, Phase::A, 1}.condition_id(),
        FaultCondition{Side::HV, Phase::B, 1}.condition_id(),
        FaultCondition{Side::HV, Phase::C, 1}.condition_id(),
        FaultCondition{Side::LV, Phase::A, 5}.condition_id(),
        FaultCondition{Side::LV, Phase::B, 5}.condition_id(),
        FaultCondition{Side::LV, Phase::C, 5}.condition_id(),
    };
}

void validate_experiment_config(const ExperimentConfig& cfg) {
    nn::validate_config(cfg.profile.model);
    sisa::validate_training_config(cfg.profile.train);
    if (cfg.profile.stride < 1) throw std::invalid_argument("config: stride must be >= 1");
    if (cfg.sweep_shards.empty()) throw std::invalid_argument("config: empty shard sweep");
    for (int s : cfg.sweep_shards)
        if (s < 1 || signal::kNumConditions % s != 0 ||
            (signal::kNumConditions / s) % signal::kNumClasses != 0)
            throw std::invalid_argument("config: sweep shard count " + std::to_string(s) +
                                        " does not divide 48 into label-balanced shards");
    if (cfg.shards < 1 || signal::kNumConditions % cfg.shards != 0 ||
        (signal::kNumConditions / cfg.shards) % signal::kNumClasses != 0)
        throw std::invalid_argument("config: invalid shard count " + std::to_string(cfg.shards));
    std::set<int> seen;
    for (int id : cfg.poisoned_conditions) {
        if (id < 0 || id >= signal::kNumConditions)
            throw std::invalid_argument("config: poisoned condition " + std::to_string(id) +
                                        " does not exist");
        if (!seen.insert(id).second)
            throw std::invalid_argument("config: duplicate poisoned condition " +
                                        std::to_string(id));
    }
    if (cfg.timing_reps < 1) throw std::invalid_argument("config: timing_reps must be >= 1");
    signal::EmiSpec emi = cfg.emi;
    if (emi.affected_channels.empty())
        for (int c = 0; c < signal::kNumChannels; ++c) emi.affected_channels.push_back(c);
    signal::validate_emi_spec(emi);
}

namespace {

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const int v = std::stoi(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' needs an integer, got '" + value +
                                    "'");
    }
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: key '" + key + "' needs a number, got '" + value +
                                    "'");
    }
}

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, sep)) parts.push_back(part);
    return parts;
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "profile") {
        cfg.profile = profile_by_name(value);
    } else if (key == "seed") {
        cfg.seed = static_cast<uint64_t>(std::stoull(value));
    } else if (key == "shards") {
        cfg.shards = parse_int(key, value);
    } else if (key == "sweep") {
        cfg.sweep_shards.clear();
        for (const std::string& p : split_on(value, ',')) cfg.sweep_shards.push_back(parse_int(key, trim(p)));
    } else if (key == "strategy") {
        if (value == "severity_grouped")
            cfg.strategy = sisa::ShardStrategy::severity_grouped;
        else if (value == "uniform")
            cfg.strategy = sisa::ShardStrategy::uniform;
        else
            throw std::invalid_argument("config: unknown strategy '" + value + "'");
    } else if (key == "poison") {
        if (value == "single")
            cfg.poisoned_conditions = default_single_poison();
        else if (value == "six")
            cfg.poisoned_conditions = default_six_poison();
        else if (value == "none")
            cfg.poisoned_conditions.clear();
        else {
            cfg.poisoned_conditions.clear();
            for (const std::string& p : split_on(value, ','))
                cfg.poisoned_conditions.push_back(parse_int(key, trim(p)));
        }
    } else if (key == "out") {
        cfg.out_dir = value;
    } else if (key == "timing_reps") {
        cfg.timing_reps = parse_int(key, value);
    } else if (key == "epochs") {
        cfg.profile.train.epochs_total = parse_int(key, value);
    } else if (key == "batch") {
        cfg.profile.train.batch_size = parse_int(key, value);
    } else if (key == "lr") {
        cfg.profile.train.lr = parse_double(key, value);
    } else if (key == "stride") {
        cfg.profile.stride = parse_int(key, value);
    } else if (key == "window") {
        cfg.profile.model.window_len = parse_int(key, value);
    } else if (key == "hidden1") {
        cfg.profile.model.lstm1_hidden = parse_int(key, value);
    } else if (key == "hidden2") {
        cfg.profile.model.lstm2_hidden = parse_int(key, value);
    } else if (key == "fc_hidden") {
        cfg.profile.model.fc_hidden = parse_int(key, value);
    } else if (key == "dropout") {
        cfg.profile.model.dropout_rate = parse_double(key, value);
    } else if (key == "emi.noise_std") {
        cfg.emi.noise_std = parse_double(key, value);
    } else if (key == "emi.spike_rate_hz") {
        cfg.emi.spike_rate_hz = parse_double(key, value);
    } else if (key == "emi.spike_magnitude") {
        cfg.emi.spike_magnitude = parse_double(key, value);
    } else if (key == "emi.amplitude_bias") {
        cfg.emi.amplitude_bias = parse_double(key, value);
    } else if (key == "emi.phase_deviation_rad") {
        cfg.emi.phase_deviation_rad = parse_double(key, value);
    } else if (key == "emi.harmonics") {
        cfg.emi.harmonics.clear();
        if (value != "none")
            for (const std::string& p : split_on(value, ';')) {
                const std::vector<std::string> pair = split_on(trim(p), ':');
                if (pair.size() != 2)
                    throw std::invalid_argument(
                        "config: emi.harmonics expects order:amplitude pairs separated by ';'");
                cfg.emi.harmonics.emplace_back(parse_int(key, pair[0]),
                                               parse_double(key, pair[1]));
            }
    } else if (key == "emi.channels") {
        cfg.emi.affected_channels.clear();
        if (value != "all")
            for (const std::string& p : split_on(value, ','))
                cfg.emi.affected_channels.push_back(parse_int(key, trim(p)));
    } else {
        throw std::invalid_argument("config: unknown key '" + key + "'");
    }
}

void apply_config_file(ExperimentConfig& cfg, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path.string());
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto comment = line.find('#');
        if (comment != std::string::npos) line = line.substr(0, comment);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not key=value: '" + line + "'");
        try {
            apply_config_line(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(path.string() + ":" + std::to_string(lineno) + ": " +
                                        e.what());
        }
    }
}

} // namespace itscf::bench
