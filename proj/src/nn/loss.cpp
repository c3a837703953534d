#include "itscf/nn/loss.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace itscf::nn {

Mat softmax_rows(const Mat& logits) {
    Mat probs(logits.rows, logits.cols);
    for (size_t b = 0; b < logits.rows; ++b) {
        const double* z = logits.row(b);
        double* p = probs.row(b);
        double zmax = z[0];
        for (size_t j = 1; j < logits.cols; ++j) zmax = std::max(zmax, z[j]);
        double sum = 0.0;
        for (size_t j = 0; j < logits.cols; ++j) {
            p[j] = std::exp(z[j] - zmax);
            sum += p[j];
        }
        for (size_t j = 0; j < logits.cols; ++j) p[j] /= sum;
    }
    return probs;
}

LossResult softmax_cross_entropy(const Mat& logits, const std::vector<int>& labels) {
    if (labels.size() != logits.rows)
        throw std::invalid_argument("loss: label count does not match batch size");
    for (int y : labels)
        if (y < 0 || static_cast<size_t>(y) >= logits.cols)
            throw std::invalid_argument("loss: label out of range");
    if (logits.rows == 0) throw std::invalid_argument("loss: empty batch");

    LossResult res;
    res.probs = softmax_rows(logits);
    res.dlogits = res.probs;
    const double inv_b = 1.0 / static_cast<double>(logits.rows);
    double total = 0.0;
    for (size_t b = 0; b < logits.rows; ++b) {
        const double p = res.probs(b, labels[b]);
        total -= std::log(std::max(p, 1e-300));
        res.dlogits(b, labels[b]) -= 1.0;
    }
    for (double& v : res.dlogits.data) v *= inv_b;
    res.loss = total * inv_b;
    return res;
}

} // namespace itscf::nn
