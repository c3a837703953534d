#include "itscf/nn/gradcheck.hpp"

#include <algorithm>
#include <stdexcept>

#include "itscf/nn/loss.hpp"
#include "itscf/nn/rng.hpp"

namespace itscf::nn {

GradCheckReport run_grad_check(const GradCheckConfig& cfg) {
    validate_config(cfg.model);
    if (cfg.batch <= 0) throw std::invalid_argument("gradcheck: batch must be positive");
    if (!(cfg.step > 0.0)) throw std::invalid_argument("gradcheck: step must be positive");

    const ModelConfig& mc = cfg.model;
    RngStream data(cfg.seed, RngKey{RngPurpose::probe, 0, 0, 0});

    BatchInput input;
    input.batch = static_cast<size_t>(cfg.batch);
    input.steps.assign(mc.window_len, Mat(input.batch, mc.input_dim));
    for (Mat& x : input.steps)
        for (double& v : x.data) v = data.next_gaussian();
    std::vector<int> labels(input.batch);
    for (int& y : labels) y = static_cast<int>(data.next_below(mc.num_classes));

    ModelParams params = init_params(mc, RngStream(cfg.seed, RngKey{RngPurpose::param_init, 0, 0, 0}));

    // The dropout stream is recreated from the same key for every loss
    // evaluation, so all perturbed evaluations see the same masks and the
    // loss is a smooth deterministic function of the parameters.
    auto dropout_stream = [&cfg] {
        return RngStream(cfg.seed, RngKey{RngPurpose::dropout, 0, 0, 0});
    };

    ForwardCache cache;
    RngStream ds = dropout_stream();
    const Mat logits = forward(mc, params, input, /*train=*/true, &ds, &cache);
    const LossResult base = softmax_cross_entropy(logits, labels);
    Gradients analytic = backward(mc, params, cache, base.dlogits);
    if (cfg.corrupt)
        for (double& v : analytic.lstm1_w_hh.data) v = 0.0;

    auto loss_at = [&](const ModelParams& p) {
        RngStream s = dropout_stream();
        const Mat lg = forward(mc, p, input, true, &s, nullptr);
        return softmax_cross_entropy(lg, labels).loss;
    };

    GradCheckReport report;
    auto pv = tensor_views(params);
    auto gv = tensor_views(analytic);
    for (size_t k = 0; k < pv.size(); ++k) {
        GradCheckTensorReport tr;
        tr.name = pv[k].name;
        tr.coords = pv[k].size;
        for (size_t i = 0; i < pv[k].size; ++i) {
            double& theta = pv[k].data[i];
            const double orig = theta;
            theta = orig + cfg.step;
            const double lp = loss_at(params);
            theta = orig - cfg.step;
            const double lm = loss_at(params);
            theta = orig;
            const double fd = (lp - lm) / (2.0 * cfg.step);
            const double a = gv[k].data[i];
            const double rel =
                std::abs(a - fd) / std::max({std::abs(a), std::abs(fd), 1e-8});
            tr.max_rel_error = std::max(tr.max_rel_error, rel);
        }
        if (tr.max_rel_error >= report.max_rel_error) {
            report.max_rel_error = tr.max_rel_error;
            report.worst_tensor = tr.name;
        }
        report.total_coords += tr.coords;
        report.tensors.push_back(std::move(tr));
    }
    return report;
}

} // namespace itscf::nn
