#pragma once

#include <cstddef>
#include <vector>

#include "itscf/nn/tensor.hpp"

namespace itscf::nn {

// Row-wise softmax with max subtraction for numerical stability.
Mat softmax_rows(const Mat& logits);

struct LossResult {
    double loss = 0.0;   // mean cross-entropy over the batch
    Mat dlogits;         // gradient w.r.t. logits, already divided by batch size
    Mat probs;           // row-wise softmax of the logits
};

// Mean softmax cross-entropy over the batch. Labels must be in
// [0, logits.cols); throws std::invalid_argument otherwise.
LossResult softmax_cross_entropy(const Mat& logits, const std::vector<int>& labels);

} // namespace itscf::nn
