#include "itscf/bench/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace itscf::bench {

namespace {

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("reports: cannot write " + path.string());
    out << content;
    if (!out) throw std::runtime_error("reports: short write to " + path.string());
}

} // namespace

std::string summary_csv(const std::vector<CaseReport>& reports) {
    std::string csv =
        "case,sweep_shards,model_shards,status,accuracy,recall_HA,recall_HB,recall_HC,"
        "recall_LA,recall_LB,recall_LC,seconds,speedup,shards_retrained,stage_epochs,"
        "stage_epochs_full\n";
    for (const CaseReport& r : reports) {
        csv += std::to_string(r.case_id) + ',' + std::to_string(r.sweep_shards) + ',' +
               std::to_string(r.model_shards) + ',';
        csv += r.skipped ? "skipped" : (r.case_id == 4 ? "unlearned" : "trained");
        csv += ',' + fixed(r.accuracy, 6);
        for (double rec : r.recall) csv += ',' + fixed(rec, 6);
        csv += ',' + fixed(r.seconds, 3);
        csv += ',';
        if (r.case_id == 4 && !r.skipped) csv += fixed(r.speedup, 3);
        csv += ',' + std::to_string(r.shards_retrained);
        csv += ',' + std::to_string(r.stage_epochs);
        csv += ',' + std::to_string(r.stage_epochs_full);
        csv += '\n';
    }
    return csv;
}

std::string confusion_csv(const CaseReport& report) {
    std::string csv = "true\\pred";
    for (const char* name : signal::kClassNames) csv += std::string(",") + name;
    csv += '\n';
    for (int t = 0; t < signal::kNumClasses; ++t) {
        csv += signal::kClassNames[t];
        for (int p = 0; p < signal::kNumClasses; ++p)
            csv += ',' + std::to_string(report.confusion[t][p]);
        csv += '\n';
    }
    return csv;
}

std::string run_info_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    j["format_version"] = 1;
    j["config"]["profile"] = profile_name(cfg.profile.kind);
    j["config"]["model"] = {{"input_dim", cfg.profile.model.input_dim},
                            {"lstm1_hidden", cfg.profile.model.lstm1_hidden},
                            {"lstm2_hidden", cfg.profile.model.lstm2_hidden},
                            {"fc_hidden", cfg.profile.model.fc_hidden},
                            {"num_classes", cfg.profile.model.num_classes},
                            {"dropout_rate", cfg.profile.model.dropout_rate},
                            {"window_len", cfg.profile.model.window_len}};
    j["config"]["training"] = {{"epochs_total", cfg.profile.train.epochs_total},
                               {"batch_size", cfg.profile.train.batch_size},
                               {"lr", cfg.profile.train.lr}};
    j["config"]["stride"] = cfg.profile.stride;
    j["config"]["seed"] = cfg.seed;
    j["config"]["sweep_shards"] = cfg.sweep_shards;
    j["config"]["shards"] = cfg.shards;
    j["config"]["strategy"] =
        cfg.strategy == sisa::ShardStrategy::severity_grouped ? "severity_grouped" : "uniform";
    j["config"]["poisoned_conditions"] = cfg.poisoned_conditions;
    {
        nlohmann::ordered_json emi;
        emi["noise_std"] = cfg.emi.noise_std;
        emi["spike_rate_hz"] = cfg.emi.spike_rate_hz;
        emi["spike_magnitude"] = cfg.emi.spike_magnitude;
        emi["amplitude_bias"] = cfg.emi.amplitude_bias;
        emi["phase_deviation_rad"] = cfg.emi.phase_deviation_rad;
        emi["fundamental_hz"] = cfg.emi.fundamental_hz;
        nlohmann::ordered_json harm = nlohmann::ordered_json::array();
        for (const auto& [order, amp] : cfg.emi.harmonics)
            harm.push_back({{"order", order}, {"amplitude", amp}});
        emi["harmonics"] = harm;
        emi["affected_channels"] =
            cfg.emi.affected_channels.empty() ? "all" : nlohmann::ordered_json(cfg.emi.affected_channels);
        j["config"]["emi"] = emi;
    }
    j["config"]["out_dir"] = cfg.out_dir.string();
    j["config"]["deterministic"] = cfg.deterministic;
    j["config"]["timing_reps"] = cfg.timing_reps;
    j["environment"]["compiler"] = __VERSION__;
    j["environment"]["cpp_standard"] = static_cast<long>(__cplusplus);
    j["environment"]["float_format"] = "ieee754-binary64";
    return j.dump(2) + "\n";
}

void emit_reports(const std::vector<CaseReport>& reports, const ExperimentConfig& cfg,
                  const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) throw std::runtime_error("reports: cannot create directory " + out_dir.string());

    write_file(out_dir / "summary.csv", summary_csv(reports));
    for (const CaseReport& r : reports) {
        const std::string name =
            "confusion_" + std::to_string(r.case_id) + "_" + std::to_string(r.sweep_shards) +
            ".csv";
        write_file(out_dir / name, confusion_csv(r));
    }
    write_file(out_dir / "run.json", run_info_json(cfg));
}

} // namespace itscf::bench
