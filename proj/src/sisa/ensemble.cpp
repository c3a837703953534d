#include "itscf/sisa/ensemble.hpp"

#include <stdexcept>

#include "itscf/nn/loss.hpp"

namespace itscf::sisa {

int argmax_lowest(const double* values, size_t n) {
    int best = 0;
    for (size_t i = 1; i < n; ++i)
        if (values[i] > values[best]) best = static_cast<int>(i);
    return best;
}

namespace {

void validate_models(const std::vector<ConstituentModel>& models, const nn::ModelConfig& cfg) {
    if (models.empty()) throw std::invalid_argument("aggregate: need at least one model");
    for (const ConstituentModel& m : models)
        if (!nn::params_shape_matches(cfg, m.params))
            throw std::invalid_argument("aggregate: models have heterogeneous configs");
}

} // namespace

EnsemblePrediction aggregate_predict(const std::vector<ConstituentModel>& models,
                                     const nn::ModelConfig& cfg, const signal::WindowedSample& x) {
    validate_models(models, cfg);
    const size_t S = models.size();
    const size_t C = static_cast<size_t>(cfg.num_classes);

    EnsemblePrediction pred;
    pred.per_shard = nn::Mat(S, C);
    pred.aggregated.assign(C, 0.0);
    const nn::BatchInput input = nn::make_batch({&x}, cfg);
    for (size_t s = 0; s < S; ++s) {
        const nn::Mat logits = nn::forward(cfg, models[s].params, input, false, nullptr, nullptr);
        const nn::Mat probs = nn::softmax_rows(logits);
        for (size_t c = 0; c < C; ++c) {
            pred.per_shard(s, c) = probs(0, c);
            pred.aggregated[c] += probs(0, c);
        }
    }
    for (double& v : pred.aggregated) v /= static_cast<double>(S);
    pred.label = argmax_lowest(pred.aggregated.data(), C);
    return pred;
}

BatchPrediction aggregate_predict_batch(const std::vector<ConstituentModel>& models,
                                        const nn::ModelConfig& cfg,
                                        const std::vector<const signal::WindowedSample*>& xs,
                                        size_t eval_batch) {
    validate_models(models, cfg);
    if (eval_batch == 0) throw std::invalid_argument("aggregate: eval_batch must be positive");
    const size_t C = static_cast<size_t>(cfg.num_classes);

    BatchPrediction out;
    out.aggregated = nn::Mat(xs.size(), C);
    out.labels.resize(xs.size());
    for (size_t lo = 0; lo < xs.size(); lo += eval_batch) {
        const size_t hi = std::min(xs.size(), lo + eval_batch);
        const std::vector<const signal::WindowedSample*> chunk(xs.begin() + lo, xs.begin() + hi);
        const nn::BatchInput input = nn::make_batch(chunk, cfg);
        for (const ConstituentModel& m : models) {
            const nn::Mat logits = nn::forward(cfg, m.params, input, false, nullptr, nullptr);
            const nn::Mat probs = nn::softmax_rows(logits);
            for (size_t i = 0; i < chunk.size(); ++i)
                for (size_t c = 0; c < C; ++c) out.aggregated(lo + i, c) += probs(i, c);
        }
    }
    for (size_t i = 0; i < xs.size(); ++i) {
        double* row = out.aggregated.row(i);
        for (size_t c = 0; c < C; ++c) row[c] /= static_cast<double>(models.size());
        out.labels[i] = argmax_lowest(row, C);
    }
    return out;
}

} // namespace itscf::sisa
