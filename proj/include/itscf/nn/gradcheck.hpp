#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "itscf/nn/model.hpp"

namespace itscf::nn {

struct GradCheckConfig {
    // Small enough that checking every coordinate stays under a few seconds.
    ModelConfig model{.input_dim = 6,
                      .lstm1_hidden = 8,
                      .lstm2_hidden = 4,
                      .fc_hidden = 16,
                      .num_classes = 6,
                      .dropout_rate = 0.30,
                      .window_len = 5};
    int batch = 2;
    double step = 1e-5;
    uint64_t seed = 0;
    // Drops one analytic gradient term (the LSTM1 recurrent weights) before
    // comparing, to demonstrate the check actually detects wrong gradients.
    bool corrupt = false;
};

struct GradCheckTensorReport {
    std::string name;
    double max_rel_error = 0.0;
    size_t coords = 0;
};

struct GradCheckReport {
    double max_rel_error = 0.0;
    std::string worst_tensor;
    size_t total_coords = 0;
    std::vector<GradCheckTensorReport> tensors;
};

// Compares every analytic parameter gradient against central finite
// differences on random data, with dropout masks frozen across evaluations.
// Relative error per coordinate is |a-f| / max(|a|, |f|, 1e-8).
GradCheckReport run_grad_check(const GradCheckConfig& cfg);

} // namespace itscf::nn
