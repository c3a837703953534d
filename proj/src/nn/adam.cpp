#include "itscf/nn/adam.hpp"

#include <cmath>
#include <stdexcept>

namespace itscf::nn {

void validate_adam_config(const AdamConfig& cfg) {
    if (!(cfg.lr > 0.0)) throw std::invalid_argument("adam: lr must be positive");
    if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0))
        throw std::invalid_argument("adam: beta1 must be in [0, 1)");
    if (!(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0))
        throw std::invalid_argument("adam: beta2 must be in [0, 1)");
    if (!(cfg.epsilon > 0.0)) throw std::invalid_argument("adam: epsilon must be positive");
}

AdamState make_adam_state(const ModelConfig& cfg) {
    AdamState s;
    s.m = zero_params(cfg);
    s.v = zero_params(cfg);
    s.t = 0;
    return s;
}

void adam_step(const AdamConfig& cfg, AdamState& state, ModelParams& params,
               const Gradients& grads) {
    validate_adam_config(cfg);
    state.t += 1;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.t));

    auto pv = tensor_views(params);
    auto mv = tensor_views(state.m);
    auto vv = tensor_views(state.v);
    auto gv = tensor_views(grads);
    if (pv.size() != gv.size() || pv.size() != mv.size() || pv.size() != vv.size())
        throw std::invalid_argument("adam: state/gradient tensor mismatch");

    for (size_t k = 0; k < pv.size(); ++k) {
        if (pv[k].size != gv[k].size || pv[k].size != mv[k].size || pv[k].size != vv[k].size)
            throw std::invalid_argument("adam: tensor size mismatch");
        double* p = pv[k].data;
        double* m = mv[k].data;
        double* v = vv[k].data;
        const double* g = gv[k].data;
        for (size_t i = 0; i < pv[k].size; ++i) {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            const double mhat = m[i] / bc1;
            const double vhat = v[i] / bc2;
            p[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.epsilon);
        }
    }
}

} // namespace itscf::nn
