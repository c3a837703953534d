#pragma once

#include <cstdint>

#include "itscf/nn/model.hpp"

namespace itscf::nn {

struct AdamConfig {
    double lr = 1e-4;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

void validate_adam_config(const AdamConfig& cfg);

// First and second moment estimates plus the shared step counter. The state
// is part of the training trajectory, so it is checkpointed alongside the
// parameters.
struct AdamState {
    ModelParams m;
    ModelParams v;
    uint64_t t = 0;

    bool operator==(const AdamState&) const = default;
};

AdamState make_adam_state(const ModelConfig& cfg);

// One bias-corrected Adam update, applied in place.
void adam_step(const AdamConfig& cfg, AdamState& state, ModelParams& params,
               const Gradients& grads);

} // namespace itscf::nn
