#include "itscf/nn/model.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace itscf::nn {

namespace {

constexpr double kLayerNormEps = 1e-5;

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void check_finite(const Mat& m, const char* what) {
    for (double v : m.data)
        if (!std::isfinite(v)) throw std::invalid_argument(std::string("non-finite ") + what);
}

Mat uniform_matrix(size_t rows, size_t cols, double bound, RngStream& stream) {
    Mat m(rows, cols);
    for (double& v : m.data) v = (stream.next_uniform() * 2.0 - 1.0) * bound;
    return m;
}

} // namespace

void validate_config(const ModelConfig& cfg) {
    if (cfg.input_dim <= 0 || cfg.lstm1_hidden <= 0 || cfg.lstm2_hidden <= 0 ||
        cfg.fc_hidden <= 0 || cfg.num_classes <= 0 || cfg.window_len <= 0)
        throw std::invalid_argument("model config: all dimensions must be positive");
    if (!(cfg.dropout_rate >= 0.0 && cfg.dropout_rate < 1.0))
        throw std::invalid_argument("model config: dropout_rate must be in [0, 1)");
}

ModelParams zero_params(const ModelConfig& cfg) {
    const size_t in = cfg.input_dim, h1 = cfg.lstm1_hidden, h2 = cfg.lstm2_hidden;
    const size_t fc = cfg.fc_hidden, nc = cfg.num_classes;
    ModelParams p;
    p.lstm1_w_ih = Mat(4 * h1, in);
    p.lstm1_w_hh = Mat(4 * h1, h1);
    p.lstm1_b = Vec(4 * h1, 0.0);
    p.ln1_gamma = Vec(h1, 0.0);
    p.ln1_beta = Vec(h1, 0.0);
    p.lstm2_w_ih = Mat(4 * h2, h1);
    p.lstm2_w_hh = Mat(4 * h2, h2);
    p.lstm2_b = Vec(4 * h2, 0.0);
    p.ln2_gamma = Vec(h2, 0.0);
    p.ln2_beta = Vec(h2, 0.0);
    p.fc1_w = Mat(fc, h2);
    p.fc1_b = Vec(fc, 0.0);
    p.fc2_w = Mat(nc, fc);
    p.fc2_b = Vec(nc, 0.0);
    return p;
}

bool params_shape_matches(const ModelConfig& cfg, const ModelParams& p) {
    const ModelParams z = zero_params(cfg);
    auto shapes = [](const ModelParams& q) {
        std::vector<std::pair<size_t, size_t>> s;
        for (const TensorView& t : tensor_views(q)) s.emplace_back(t.dims[0], t.dims[1]);
        return s;
    };
    return shapes(z) == shapes(p);
}

ModelParams init_params(const ModelConfig& cfg, RngStream stream) {
    validate_config(cfg);
    const size_t h1 = cfg.lstm1_hidden, h2 = cfg.lstm2_hidden;
    ModelParams p = zero_params(cfg);
    p.lstm1_w_ih = uniform_matrix(4 * h1, cfg.input_dim, 1.0 / std::sqrt(double(cfg.input_dim)), stream);
    p.lstm1_w_hh = uniform_matrix(4 * h1, h1, 1.0 / std::sqrt(double(h1)), stream);
    p.lstm2_w_ih = uniform_matrix(4 * h2, h1, 1.0 / std::sqrt(double(h1)), stream);
    p.lstm2_w_hh = uniform_matrix(4 * h2, h2, 1.0 / std::sqrt(double(h2)), stream);
    p.fc1_w = uniform_matrix(cfg.fc_hidden, h2, 1.0 / std::sqrt(double(h2)), stream);
    p.fc2_w = uniform_matrix(cfg.num_classes, cfg.fc_hidden, 1.0 / std::sqrt(double(cfg.fc_hidden)), stream);
    // Forget-gate bias starts at 1 so early training does not flush state.
    for (size_t j = h1; j < 2 * h1; ++j) p.lstm1_b[j] = 1.0;
    for (size_t j = h2; j < 2 * h2; ++j) p.lstm2_b[j] = 1.0;
    for (double& v : p.ln1_gamma) v = 1.0;
    for (double& v : p.ln2_gamma) v = 1.0;
    return p;
}

namespace {

template <class P>
std::vector<TensorView> tensor_views_impl(P& p) {
    auto mat = [](const char* name, auto& m) {
        return TensorView{name, 2, {static_cast<uint32_t>(m.rows), static_cast<uint32_t>(m.cols)},
                          const_cast<double*>(m.data.data()), m.data.size()};
    };
    auto vec = [](const char* name, auto& v) {
        return TensorView{name, 1, {static_cast<uint32_t>(v.size()), 0},
                          const_cast<double*>(v.data()), v.size()};
    };
    return {
        mat("lstm1.w_ih", p.lstm1_w_ih), mat("lstm1.w_hh", p.lstm1_w_hh), vec("lstm1.b", p.lstm1_b),
        vec("ln1.gamma", p.ln1_gamma),   vec("ln1.beta", p.ln1_beta),
        mat("lstm2.w_ih", p.lstm2_w_ih), mat("lstm2.w_hh", p.lstm2_w_hh), vec("lstm2.b", p.lstm2_b),
        vec("ln2.gamma", p.ln2_gamma),   vec("ln2.beta", p.ln2_beta),
        mat("fc1.w", p.fc1_w),           vec("fc1.b", p.fc1_b),
        mat("fc2.w", p.fc2_w),           vec("fc2.b", p.fc2_b),
    };
}

} // namespace

std::vector<TensorView> tensor_views(ModelParams& p) { return tensor_views_impl(p); }
std::vector<TensorView> tensor_views(const ModelParams& p) { return tensor_views_impl(p); }

uint64_t params_digest(const ModelParams& p) {
    uint64_t h = 14695981039346656037ull;
    auto absorb = [&h](const void* data, size_t n) {
        const unsigned char* b = static_cast<const unsigned char*>(data);
        for (size_t i = 0; i < n; ++i) {
            h ^= b[i];
            h *= 1099511628211ull;
        }
    };
    for (const TensorView& t : tensor_views(p)) absorb(t.data, t.size * sizeof(double));
    return h;
}

BatchInput make_batch(const std::vector<const signal::WindowedSample*>& samples,
                      const ModelConfig& cfg) {
    BatchInput input;
    input.batch = samples.size();
    input.steps.assign(cfg.window_len, Mat(samples.size(), cfg.input_dim));
    for (size_t b = 0; b < samples.size(); ++b) {
        const signal::WindowedSample& s = *samples[b];
        if (s.window_len != cfg.window_len)
            throw std::invalid_argument("batch: window length does not match model config");
        for (int t = 0; t < cfg.window_len; ++t)
            for (int c = 0; c < cfg.input_dim; ++c) input.steps[t](b, c) = s.at(t, c);
    }
    return input;
}

namespace {

struct TransposedLstmWeights {
    Mat w_ih_t, w_hh_t; // (in x 4H), (H x 4H)
};

void lstm_step(const TransposedLstmWeights& w, const Vec& bias, const Mat& x_t, const Mat& h_prev,
               const Mat& c_prev, LstmStepCache& cache) {
    const size_t batch = x_t.rows;
    const size_t h4 = bias.size();
    const size_t hidden = h4 / 4;

    Mat gates(batch, h4);
    add_row_broadcast(gates, bias);
    gemm_nn_acc(gates, x_t, w.w_ih_t);
    gemm_nn_acc(gates, h_prev, w.w_hh_t);

    cache.c = Mat(batch, hidden);
    cache.tanh_c = Mat(batch, hidden);
    cache.h = Mat(batch, hidden);
    for (size_t b = 0; b < batch; ++b) {
        double* g = gates.row(b);
        const double* cp = c_prev.row(b);
        double* c = cache.c.row(b);
        double* tc = cache.tanh_c.row(b);
        double* h = cache.h.row(b);
        for (size_t j = 0; j < hidden; ++j) {
            const double gi = sigmoid(g[j]);
            const double gf = sigmoid(g[hidden + j]);
            const double gg = std::tanh(g[2 * hidden + j]);
            const double go = sigmoid(g[3 * hidden + j]);
            g[j] = gi;
            g[hidden + j] = gf;
            g[2 * hidden + j] = gg;
            g[3 * hidden + j] = go;
            c[j] = gf * cp[j] + gi * gg;
            tc[j] = std::tanh(c[j]);
            h[j] = go * tc[j];
        }
    }
    cache.gates = std::move(gates);
}

void norm_drop_step(const Vec& gamma, const Vec& beta, const Mat& h, double dropout_rate,
                    bool train, RngStream* dropout, NormDropStepCache& cache) {
    const size_t batch = h.rows;
    const size_t hidden = h.cols;
    cache.xhat = Mat(batch, hidden);
    cache.inv_std.assign(batch, 0.0);
    cache.out = Mat(batch, hidden);

    for (size_t b = 0; b < batch; ++b) {
        const double* x = h.row(b);
        double mu = 0.0;
        for (size_t j = 0; j < hidden; ++j) mu += x[j];
        mu /= static_cast<double>(hidden);
        double var = 0.0;
        for (size_t j = 0; j < hidden; ++j) {
            const double d = x[j] - mu;
            var += d * d;
        }
        var /= static_cast<double>(hidden);
        const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
        cache.inv_std[b] = inv;
        double* xh = cache.xhat.row(b);
        double* out = cache.out.row(b);
        for (size_t j = 0; j < hidden; ++j) {
            xh[j] = (x[j] - mu) * inv;
            out[j] = gamma[j] * xh[j] + beta[j];
        }
    }

    if (train && dropout_rate > 0.0) {
        const double keep_scale = 1.0 / (1.0 - dropout_rate);
        cache.mask = Mat(batch, hidden);
        for (size_t i = 0; i < cache.mask.data.size(); ++i) {
            const double m = dropout->next_uniform() >= dropout_rate ? keep_scale : 0.0;
            cache.mask.data[i] = m;
            cache.out.data[i] *= m;
        }
    }
}

// Layer-norm backward for one step; returns gradient w.r.t. the pre-norm
// input and accumulates dgamma/dbeta.
Mat norm_backward(const Vec& gamma, const NormDropStepCache& cache, const Mat& dout, Vec& dgamma,
                  Vec& dbeta) {
    const size_t batch = dout.rows;
    const size_t hidden = dout.cols;
    Mat dx(batch, hidden);
    for (size_t b = 0; b < batch; ++b) {
        const double* dy = dout.row(b);
        const double* xh = cache.xhat.row(b);
        const double inv = cache.inv_std[b];
        double m1 = 0.0, m2 = 0.0;
        for (size_t j = 0; j < hidden; ++j) {
            const double dxh = dy[j] * gamma[j];
            m1 += dxh;
            m2 += dxh * xh[j];
            dgamma[j] += dy[j] * xh[j];
            dbeta[j] += dy[j];
        }
        m1 /= static_cast<double>(hidden);
        m2 /= static_cast<double>(hidden);
        double* out = dx.row(b);
        for (size_t j = 0; j < hidden; ++j)
            out[j] = inv * (dy[j] * gamma[j] - m1 - xh[j] * m2);
    }
    return dx;
}

} // namespace

Mat forward(const ModelConfig& cfg, const ModelParams& params, const BatchInput& input, bool train,
            RngStream* dropout, ForwardCache* cache) {
    validate_config(cfg);
    if (!params_shape_matches(cfg, params))
        throw std::invalid_argument("forward: params do not match config");
    if (static_cast<int>(input.steps.size()) != cfg.window_len)
        throw std::invalid_argument("forward: batch window length does not match config");
    const size_t batch = input.batch;
    for (const Mat& x : input.steps) {
        if (x.rows != batch || x.cols != static_cast<size_t>(cfg.input_dim))
            throw std::invalid_argument("forward: batch shape mismatch");
        check_finite(x, "input");
    }
    const bool need_dropout = train && cfg.dropout_rate > 0.0;
    if (need_dropout && dropout == nullptr)
        throw std::invalid_argument("forward: train mode with dropout requires an rng stream");

    ForwardCache local;
    ForwardCache& cc = cache ? *cache : local;
    cc = ForwardCache{};
    cc.config = cfg;
    cc.batch = batch;
    cc.train = train;
    cc.x_steps = input.steps;

    const int T = cfg.window_len;
    const size_t h1 = cfg.lstm1_hidden, h2 = cfg.lstm2_hidden;

    const TransposedLstmWeights w1{transpose(params.lstm1_w_ih), transpose(params.lstm1_w_hh)};
    const TransposedLstmWeights w2{transpose(params.lstm2_w_ih), transpose(params.lstm2_w_hh)};

    cc.l1.resize(T);
    cc.l2.resize(T);
    cc.n1.resize(T);
    cc.n2.resize(T);

    Mat h1_prev(batch, h1), c1_prev(batch, h1);
    Mat h2_prev(batch, h2), c2_prev(batch, h2);
    Mat pooled(batch, h2);

    for (int t = 0; t < T; ++t) {
        lstm_step(w1, params.lstm1_b, cc.x_steps[t], h1_prev, c1_prev, cc.l1[t]);
        norm_drop_step(params.ln1_gamma, params.ln1_beta, cc.l1[t].h, cfg.dropout_rate, train,
                       dropout, cc.n1[t]);
        lstm_step(w2, params.lstm2_b, cc.n1[t].out, h2_prev, c2_prev, cc.l2[t]);
        norm_drop_step(params.ln2_gamma, params.ln2_beta, cc.l2[t].h, cfg.dropout_rate, train,
                       dropout, cc.n2[t]);
        h1_prev = cc.l1[t].h;
        c1_prev = cc.l1[t].c;
        h2_prev = cc.l2[t].h;
        c2_prev = cc.l2[t].c;
        axpy(pooled.data.data(), cc.n2[t].out.data.data(), 1.0 / static_cast<double>(T),
             pooled.data.size());
    }
    cc.pooled = std::move(pooled);

    cc.fc1_pre = Mat(batch, cfg.fc_hidden);
    add_row_broadcast(cc.fc1_pre, params.fc1_b);
    const Mat fc1_w_t = transpose(params.fc1_w);
    gemm_nn_acc(cc.fc1_pre, cc.pooled, fc1_w_t);

    cc.fc1_out = cc.fc1_pre;
    for (double& v : cc.fc1_out.data) v = v > 0.0 ? v : 0.0;
    if (need_dropout) {
        const double keep_scale = 1.0 / (1.0 - cfg.dropout_rate);
        cc.fc1_mask = Mat(batch, cfg.fc_hidden);
        for (size_t i = 0; i < cc.fc1_mask.data.size(); ++i) {
            const double m = dropout->next_uniform() >= cfg.dropout_rate ? keep_scale : 0.0;
            cc.fc1_mask.data[i] = m;
            cc.fc1_out.data[i] *= m;
        }
    }

    cc.logits = Mat(batch, cfg.num_classes);
    add_row_broadcast(cc.logits, params.fc2_b);
    const Mat fc2_w_t = transpose(params.fc2_w);
    gemm_nn_acc(cc.logits, cc.fc1_out, fc2_w_t);
    return cc.logits;
}

namespace {

// Backward through one LSTM layer with per-step upstream gradients already
// propagated through its norm/dropout. dy_steps[t] is dL/d(raw h_t) from the
// output path only; recurrent contributions are accumulated internally.
// Returns per-step input gradients when requested.
void lstm_backward(const Mat& w_ih, const Mat& w_hh, const std::vector<LstmStepCache>& steps,
                   const std::vector<Mat>& x_steps, const std::vector<Mat>& dy_steps,
                   Mat& dw_ih, Mat& dw_hh, Vec& db, std::vector<Mat>* dx_steps) {
    const int T = static_cast<int>(steps.size());
    const size_t batch = steps[0].h.rows;
    const size_t hidden = steps[0].h.cols;

    Mat dh_next(batch, hidden), dc_next(batch, hidden);
    Mat da(batch, 4 * hidden);

    for (int t = T - 1; t >= 0; --t) {
        const LstmStepCache& s = steps[t];
        for (size_t b = 0; b < batch; ++b) {
            const double* g = s.gates.row(b);
            const double* tc = s.tanh_c.row(b);
            const double* cprev_row = t > 0 ? steps[t - 1].c.row(b) : nullptr;
            const double* dy = dy_steps[t].row(b);
            double* dhn = dh_next.row(b);
            double* dcn = dc_next.row(b);
            double* da_row = da.row(b);
            for (size_t j = 0; j < hidden; ++j) {
                const double gi = g[j];
                const double gf = g[hidden + j];
                const double gg = g[2 * hidden + j];
                const double go = g[3 * hidden + j];
                const double dh = dy[j] + dhn[j];
                const double dout_gate = dh * tc[j];
                double dc = dcn[j] + dh * go * (1.0 - tc[j] * tc[j]);
                const double cprev = cprev_row ? cprev_row[j] : 0.0;
                const double di = dc * gg;
                const double df = dc * cprev;
                const double dg = dc * gi;
                dcn[j] = dc * gf;
                da_row[j] = di * gi * (1.0 - gi);
                da_row[hidden + j] = df * gf * (1.0 - gf);
                da_row[2 * hidden + j] = dg * (1.0 - gg * gg);
                da_row[3 * hidden + j] = dout_gate * go * (1.0 - go);
            }
        }
        gemm_tn_acc(dw_ih, da, x_steps[t]);
        if (t > 0) gemm_tn_acc(dw_hh, da, steps[t - 1].h);
        add_col_sums(db, da);
        if (dx_steps) {
            (*dx_steps)[t] = Mat(batch, w_ih.cols);
            gemm_nn_acc((*dx_steps)[t], da, w_ih);
        }
        dh_next.zero();
        if (t > 0) gemm_nn_acc(dh_next, da, w_hh);
    }
}

Mat apply_mask(const Mat& grad, const Mat& mask) {
    if (mask.data.empty()) return grad;
    Mat out = grad;
    for (size_t i = 0; i < out.data.size(); ++i) out.data[i] *= mask.data[i];
    return out;
}

} // namespace

Gradients backward(const ModelConfig& cfg, const ModelParams& params, const ForwardCache& cache,
                   const Mat& dlogits) {
    if (!(cache.config == cfg))
        throw std::invalid_argument("backward: cache was built with a different config");
    if (!params_shape_matches(cfg, params))
        throw std::invalid_argument("backward: params do not match config");
    if (dlogits.rows != cache.batch || dlogits.cols != static_cast<size_t>(cfg.num_classes))
        throw std::invalid_argument("backward: dlogits shape does not match cache");
    if (cache.l1.size() != static_cast<size_t>(cfg.window_len))
        throw std::invalid_argument("backward: stale or incomplete cache");

    const int T = cfg.window_len;
    const size_t batch = cache.batch;
    Gradients g = zero_params(cfg);

    // Head.
    gemm_tn_acc(g.fc2_w, dlogits, cache.fc1_out);
    add_col_sums(g.fc2_b, dlogits);
    Mat dfc1_out(batch, cfg.fc_hidden);
    gemm_nn_acc(dfc1_out, dlogits, params.fc2_w);

    dfc1_out = apply_mask(dfc1_out, cache.fc1_mask);
    for (size_t i = 0; i < dfc1_out.data.size(); ++i)
        if (cache.fc1_pre.data[i] <= 0.0) dfc1_out.data[i] = 0.0;

    gemm_tn_acc(g.fc1_w, dfc1_out, cache.pooled);
    add_col_sums(g.fc1_b, dfc1_out);
    Mat dpooled(batch, cfg.lstm2_hidden);
    gemm_nn_acc(dpooled, dfc1_out, params.fc1_w);

    // Pooling spreads the gradient evenly over time; then back through each
    // step's dropout and layer norm to the raw LSTM2 outputs.
    const double inv_t = 1.0 / static_cast<double>(T);
    std::vector<Mat> dy2(T);
    for (int t = 0; t < T; ++t) {
        Mat dout(batch, cfg.lstm2_hidden);
        axpy(dout.data.data(), dpooled.data.data(), inv_t, dout.data.size());
        dout = apply_mask(dout, cache.n2[t].mask);
        dy2[t] = norm_backward(params.ln2_gamma, cache.n2[t], dout, g.ln2_gamma, g.ln2_beta);
    }

    std::vector<Mat> x2(T);
    for (int t = 0; t < T; ++t) x2[t] = cache.n1[t].out;
    std::vector<Mat> dx2(T);
    lstm_backward(params.lstm2_w_ih, params.lstm2_w_hh, cache.l2, x2, dy2, g.lstm2_w_ih,
                  g.lstm2_w_hh, g.lstm2_b, &dx2);

    std::vector<Mat> dy1(T);
    for (int t = 0; t < T; ++t) {
        Mat dout = apply_mask(dx2[t], cache.n1[t].mask);
        dy1[t] = norm_backward(params.ln1_gamma, cache.n1[t], dout, g.ln1_gamma, g.ln1_beta);
    }
    lstm_backward(params.lstm1_w_ih, params.lstm1_w_hh, cache.l1, cache.x_steps, dy1, g.lstm1_w_ih,
                  g.lstm1_w_hh, g.lstm1_b, nullptr);
    return g;
}

} // namespace itscf::nn
