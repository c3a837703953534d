#pragma once

#include <vector>

#include "itscf/nn/model.hpp"
#include "itscf/signal/window.hpp"
#include "itscf/sisa/train.hpp"

namespace itscf::sisa {

// Eqs. (1)-(3): per-shard softmax probabilities, their arithmetic mean, and
// the argmax label with ties resolved to the lowest class index.
struct EnsemblePrediction {
    nn::Mat per_shard;       // S x num_classes, one softmax row per shard
    std::vector<double> aggregated; // num_classes
    int label = 0;
};

// Lowest-index argmax.
int argmax_lowest(const double* values, size_t n);

EnsemblePrediction aggregate_predict(const std::vector<ConstituentModel>& models,
                                     const nn::ModelConfig& cfg, const signal::WindowedSample& x);

// Batched eval-mode aggregation over many windows (used for test-set
// metrics); aggregated rows equal what aggregate_predict returns per window.
struct BatchPrediction {
    nn::Mat aggregated; // n x num_classes
    std::vector<int> labels;
};

BatchPrediction aggregate_predict_batch(const std::vector<ConstituentModel>& models,
                                        const nn::ModelConfig& cfg,
                                        const std::vector<const signal::WindowedSample*>& xs,
                                        size_t eval_batch = 256);

} // namespace itscf::sisa
