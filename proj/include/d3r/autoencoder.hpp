#pragma once

#include <string>
#include <vector>

#include "d3r/errors.hpp"
#include "d3r/layers.hpp"
#include "d3r/rng.hpp"
#include "d3r/tensor.hpp"

namespace d3r::ae {

enum class LayerKind { Conv, ConvTranspose, BatchNorm, ReLU, Sigmoid };

struct LayerSpec {
    LayerKind kind;
    int in_ch = 0;
    int out_ch = 0;
};

// Mirrored encoder/decoder: four conv4x4s2+BN+ReLU blocks down, four
// convtranspose4x4s2 blocks up, sigmoid head, no skip connections.
// encoder_channels is the per-block output width, e.g. {32, 64, 128, 256}.
std::vector<LayerSpec> make_architecture(int in_channels, const std::vector<int>& encoder_channels);

enum class Mode { Train, Eval };

template <typename T>
struct ConvTensors {
    Tensor<T> w; // (out, in, 4, 4)
    Tensor<T> b; // (out)
};

template <typename T>
struct BnTensors {
    Tensor<T> gamma, beta, running_mean, running_var; // (channels)
};

template <typename T>
struct ModelParams {
    std::vector<LayerSpec> arch;
    size_t encoder_layers = 0; // arch prefix length that forms the encoder
    std::vector<ConvTensors<T>> convs;
    std::vector<BnTensors<T>> bns;

    long param_count() const {
        long n = 0;
        for (const auto& c : convs) n += c.w.numel() + c.b.numel();
        for (const auto& b : bns) n += b.gamma.numel() + b.beta.numel();
        return n;
    }
};

template <typename T>
struct Gradients {
    std::vector<Tensor<T>> conv_w, conv_b, bn_gamma, bn_beta;
};

template <typename T>
struct ForwardCache {
    std::vector<Tensor<T>> inputs;                 // per conv/convT/relu layer: the input
    std::vector<Tensor<T>> sigmoid_out;            // per sigmoid layer: the output
    std::vector<nn::BatchNormCache<T>> bn;         // per batchnorm layer
    std::vector<long> batch_shape;
};

constexpr double kBnEps = 1e-5;
constexpr double kBnMomentum = 0.1;

// Kaiming-style init: conv weights ~ N(0, 2/fan_in) with fan_in = in*16,
// zero biases, identity batchnorm, unit running variance.
template <typename T>
ModelParams<T> init_params(uint64_t seed, int in_channels = 3,
                           const std::vector<int>& encoder_channels = {32, 64, 128, 256}) {
    ModelParams<T> p;
    p.arch = make_architecture(in_channels, encoder_channels);
    p.encoder_layers = 3 * encoder_channels.size();
    Rng rng(Rng::key(seed, 0xae));
    for (const auto& layer : p.arch) {
        switch (layer.kind) {
            case LayerKind::Conv:
            case LayerKind::ConvTranspose: {
                ConvTensors<T> c;
                c.w = Tensor<T>({layer.out_ch, layer.in_ch, 4, 4});
                const double stddev = std::sqrt(2.0 / (static_cast<double>(layer.in_ch) * 16.0));
                for (long i = 0; i < c.w.numel(); ++i) c.w[i] = static_cast<T>(rng.normal(0.0, stddev));
                c.b = Tensor<T>({layer.out_ch});
                p.convs.push_back(std::move(c));
                break;
            }
            case LayerKind::BatchNorm: {
                BnTensors<T> b;
                b.gamma = Tensor<T>::full({layer.out_ch}, T(1));
                b.beta = Tensor<T>({layer.out_ch});
                b.running_mean = Tensor<T>({layer.out_ch});
                b.running_var = Tensor<T>::full({layer.out_ch}, T(1));
                p.bns.push_back(std::move(b));
                break;
            }
            default:
                break;
        }
    }
    return p;
}

namespace detail {

inline void check_input(const std::vector<long>& shape) {
    if (shape.size() != 4) throw DataError("autoencoder: expected (N,C,H,W) input");
    if (shape[2] % 16 != 0 || shape[3] % 16 != 0)
        throw DataError("autoencoder: spatial dims must be multiples of 16");
}

} // namespace detail

// Runs the full stack. Train mode uses batch statistics (and updates running
// stats); eval mode is a pure function. cache, when given, retains what
// backward() needs and is only valid for train mode.
template <typename T>
Tensor<T> forward(ModelParams<T>& params, const Tensor<T>& batch, Mode mode,
                  ForwardCache<T>* cache = nullptr, size_t layer_limit = SIZE_MAX) {
    detail::check_input(batch.shape());
    if (mode == Mode::Train && batch.dim(0) < 2)
        throw std::invalid_argument("autoencoder: train-mode forward needs batch size >= 2");
    if (cache) {
        *cache = ForwardCache<T>{};
        cache->batch_shape = batch.shape();
    }
    Tensor<T> x = batch;
    size_t conv_i = 0, bn_i = 0;
    const size_t n_layers = std::min(layer_limit, params.arch.size());
    for (size_t li = 0; li < n_layers; ++li) {
        const auto& layer = params.arch[li];
        switch (layer.kind) {
            case LayerKind::Conv: {
                if (cache) cache->inputs.push_back(x);
                x = nn::conv_forward(x, params.convs[conv_i].w, params.convs[conv_i].b);
                ++conv_i;
                break;
            }
            case LayerKind::ConvTranspose: {
                if (cache) cache->inputs.push_back(x);
                x = nn::convtranspose_forward(x, params.convs[conv_i].w, params.convs[conv_i].b);
                ++conv_i;
                break;
            }
            case LayerKind::BatchNorm: {
                auto& bn = params.bns[bn_i];
                if (mode == Mode::Train) {
                    nn::BatchNormCache<T> bc;
                    x = nn::batchnorm_forward_train(x, bn.gamma, bn.beta, bn.running_mean, bn.running_var,
                                                    static_cast<T>(kBnEps), static_cast<T>(kBnMomentum),
                                                    cache ? &bc : nullptr);
                    if (cache) cache->bn.push_back(std::move(bc));
                } else {
                    x = nn::batchnorm_forward_eval(x, bn.gamma, bn.beta, bn.running_mean, bn.running_var,
                                                   static_cast<T>(kBnEps));
                }
                ++bn_i;
                break;
            }
            case LayerKind::ReLU: {
                if (cache) cache->inputs.push_back(x);
                x = nn::relu_forward(x);
                break;
            }
            case LayerKind::Sigmoid: {
                x = nn::sigmoid_forward(x);
                if (cache) cache->sigmoid_out.push_back(x);
                break;
            }
        }
    }
    return x;
}

// Encoder half only; eval-mode statistics. 256x256 input -> (256, 16, 16).
template <typename T>
Tensor<T> encode(ModelParams<T>& params, const Tensor<T>& batch) {
    return forward(params, batch, Mode::Eval, static_cast<ForwardCache<T>*>(nullptr),
                   params.encoder_layers);
}

// Reverse-mode gradients for every parameter given d loss / d reconstruction.
template <typename T>
Gradients<T> backward(ModelParams<T>& params, const ForwardCache<T>& cache, const Tensor<T>& d_recon) {
    if (cache.batch_shape.empty()) throw DataError("autoencoder: backward requires a train-mode cache");
    Gradients<T> g;
    g.conv_w.resize(params.convs.size());
    g.conv_b.resize(params.convs.size());
    g.bn_gamma.resize(params.bns.size());
    g.bn_beta.resize(params.bns.size());

    Tensor<T> dy = d_recon;
    size_t conv_i = params.convs.size();
    size_t bn_i = params.bns.size();
    size_t input_i = cache.inputs.size();
    size_t sig_i = cache.sigmoid_out.size();

    for (size_t li = params.arch.size(); li-- > 0;) {
        const auto& layer = params.arch[li];
        switch (layer.kind) {
            case LayerKind::Conv: {
                --conv_i;
                --input_i;
                auto cg = nn::conv_backward(cache.inputs[input_i], params.convs[conv_i].w, dy);
                g.conv_w[conv_i] = std::move(cg.dw);
                g.conv_b[conv_i] = std::move(cg.db);
                dy = std::move(cg.dx);
                break;
            }
            case LayerKind::ConvTranspose: {
                --conv_i;
                --input_i;
                auto cg = nn::convtranspose_backward(cache.inputs[input_i], params.convs[conv_i].w, dy);
                g.conv_w[conv_i] = std::move(cg.dw);
                g.conv_b[conv_i] = std::move(cg.db);
                dy = std::move(cg.dx);
                break;
            }
            case LayerKind::BatchNorm: {
                --bn_i;
                auto bg = nn::batchnorm_backward(dy, params.bns[bn_i].gamma, cache.bn[bn_i]);
                g.bn_gamma[bn_i] = std::move(bg.dgamma);
                g.bn_beta[bn_i] = std::move(bg.dbeta);
                dy = std::move(bg.dx);
                break;
            }
            case LayerKind::ReLU: {
                --input_i;
                dy = nn::relu_backward(cache.inputs[input_i], dy);
                break;
            }
            case LayerKind::Sigmoid: {
                --sig_i;
                dy = nn::sigmoid_backward(cache.sigmoid_out[sig_i], dy);
                break;
            }
        }
    }
    return g;
}

template <typename T>
struct AdamState {
    std::vector<Tensor<T>> m, v; // one slot per learnable tensor
    long step = 0;
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

namespace detail {

template <typename T>
std::vector<Tensor<T>*> learnable_tensors(ModelParams<T>& p) {
    std::vector<Tensor<T>*> out;
    for (auto& c : p.convs) {
        out.push_back(&c.w);
        out.push_back(&c.b);
    }
    for (auto& b : p.bns) {
        out.push_back(&b.gamma);
        out.push_back(&b.beta);
    }
    return out;
}

template <typename T>
std::vector<const Tensor<T>*> gradient_tensors(const Gradients<T>& g) {
    std::vector<const Tensor<T>*> out;
    for (size_t i = 0; i < g.conv_w.size(); ++i) {
        out.push_back(&g.conv_w[i]);
        out.push_back(&g.conv_b[i]);
    }
    for (size_t i = 0; i < g.bn_gamma.size(); ++i) {
        out.push_back(&g.bn_gamma[i]);
        out.push_back(&g.bn_beta[i]);
    }
    return out;
}

} // namespace detail

template <typename T>
AdamState<T> init_adam(ModelParams<T>& params) {
    AdamState<T> s;
    for (auto* t : detail::learnable_tensors(params)) {
        s.m.emplace_back(t->shape());
        s.v.emplace_back(t->shape());
    }
    return s;
}

// One Adam update (beta1 0.9, beta2 0.999, eps 1e-8, bias-corrected).
template <typename T>
void adam_step(ModelParams<T>& params, const Gradients<T>& grads, AdamState<T>& state, double lr) {
    auto ps = detail::learnable_tensors(params);
    auto gs = detail::gradient_tensors(grads);
    if (ps.size() != gs.size() || ps.size() != state.m.size())
        throw DataError("adam_step: parameter/gradient/state mismatch");
    state.step += 1;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(state.step));
    for (size_t t = 0; t < ps.size(); ++t) {
        Tensor<T>& p = *ps[t];
        const Tensor<T>& g = *gs[t];
        Tensor<T>& m = state.m[t];
        Tensor<T>& v = state.v[t];
        for (long i = 0; i < p.numel(); ++i) {
            const double gi = g[i];
            const double mi = kAdamBeta1 * m[i] + (1.0 - kAdamBeta1) * gi;
            const double vi = kAdamBeta2 * v[i] + (1.0 - kAdamBeta2) * gi * gi;
            m[i] = static_cast<T>(mi);
            v[i] = static_cast<T>(vi);
            const double mhat = mi / bc1;
            const double vhat = vi / bc2;
            p[i] = static_cast<T>(p[i] - lr * mhat / (std::sqrt(vhat) + kAdamEps));
        }
    }
}

} // namespace d3r::ae
