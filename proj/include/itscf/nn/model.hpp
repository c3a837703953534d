#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "itscf/nn/rng.hpp"
#include "itscf/nn/tensor.hpp"
#include "itscf/signal/window.hpp"

namespace itscf::nn {

struct ModelConfig {
    int input_dim = 6;
    int lstm1_hidden = 96;
    int lstm2_hidden = 48;
    int fc_hidden = 64;
    int num_classes = 6;
    double dropout_rate = 0.30;
    int window_len = 50;

    bool operator==(const ModelConfig&) const = default;
};

void validate_config(const ModelConfig& cfg);

// Two stacked LSTM layers, each followed by layer norm and dropout on the
// output path (the recurrent state is the raw cell output), global average
// pooling over time, then fc1 + ReLU + dropout and fc2 logits.
// Gate order inside the stacked 4H dimension is [input, forget, cell, output].
struct ModelParams {
    Mat lstm1_w_ih, lstm1_w_hh;
    Vec lstm1_b;
    Vec ln1_gamma, ln1_beta;
    Mat lstm2_w_ih, lstm2_w_hh;
    Vec lstm2_b;
    Vec ln2_gamma, ln2_beta;
    Mat fc1_w;
    Vec fc1_b;
    Mat fc2_w;
    Vec fc2_b;

    bool operator==(const ModelParams&) const = default;
};

ModelParams zero_params(const ModelConfig& cfg);
bool params_shape_matches(const ModelConfig& cfg, const ModelParams& p);

// Uniform +-1/sqrt(fan_in) weights, zero biases except the LSTM forget-gate
// bias which starts at 1.0. Deterministic for a fixed stream key.
ModelParams init_params(const ModelConfig& cfg, RngStream stream);

struct TensorView {
    const char* name;
    uint8_t rank;           // 1 or 2
    std::array<uint32_t, 2> dims;
    double* data;
    size_t size;
};

// Canonical, fixed tensor order shared by Adam, serialization and digests.
std::vector<TensorView> tensor_views(ModelParams& p);
std::vector<TensorView> tensor_views(const ModelParams& p); // const-casted views, read only

// FNV-1a over the raw little-endian bytes of every tensor in canonical order.
uint64_t params_digest(const ModelParams& p);

// One training batch as per-timestep (batch x input_dim) matrices.
struct BatchInput {
    size_t batch = 0;
    std::vector<Mat> steps;
};

BatchInput make_batch(const std::vector<const signal::WindowedSample*>& samples,
                      const ModelConfig& cfg);

struct LstmStepCache {
    Mat gates; // post-activation, B x 4H
    Mat c, tanh_c, h;
};

struct NormDropStepCache {
    Mat xhat;
    Vec inv_std;
    Mat mask; // empty in eval mode or when dropout is disabled
    Mat out;  // layer output after norm and dropout
};

struct ForwardCache {
    ModelConfig config;
    size_t batch = 0;
    bool train = false;
    std::vector<Mat> x_steps;
    std::vector<LstmStepCache> l1, l2;
    std::vector<NormDropStepCache> n1, n2;
    Mat pooled;
    Mat fc1_pre;
    Mat fc1_mask;
    Mat fc1_out; // post ReLU and dropout
    Mat logits;
};

// Train mode draws inverted-dropout masks from `dropout` (required when
// dropout_rate > 0); eval mode applies no dropout and needs no rescale.
// `cache` may be null when no backward pass will follow.
Mat forward(const ModelConfig& cfg, const ModelParams& params, const BatchInput& input,
            bool train, RngStream* dropout, ForwardCache* cache);

using Gradients = ModelParams;

// Exact analytic gradients for every parameter, backpropagated through both
// LSTM layers, the layer norms and the dropout masks recorded in the cache.
Gradients backward(const ModelConfig& cfg, const ModelParams& params, const ForwardCache& cache,
                   const Mat& dlogits);

} // namespace itscf::nn
