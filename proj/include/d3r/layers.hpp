#pragma once

#include <cmath>
#include <stdexcept>

#include "d3r/gemm.hpp"
#include "d3r/tensor.hpp"

// Layer primitives for the 4x4 / stride-2 / pad-1 autoencoder stack. Spatial
// sizes exactly halve through conv and exactly double through conv-transpose.
namespace d3r::nn {

constexpr int kKernel = 4;
constexpr int kStride = 2;
constexpr int kPad = 1;

namespace detail {

// im2col for 4x4/s2/p1: cols is (cin*16, ho*wo), row index (ci,ky,kx).
template <typename T>
void im2col(const T* x, long cin, long h, long w, T* cols) {
    const long ho = h / 2, wo = w / 2;
    const long q_count = ho * wo;
    for (long ci = 0; ci < cin; ++ci) {
        const T* plane = x + ci * h * w;
        for (int ky = 0; ky < kKernel; ++ky) {
            for (int kx = 0; kx < kKernel; ++kx) {
                T* row = cols + ((ci * kKernel + ky) * kKernel + kx) * q_count;
                for (long oy = 0; oy < ho; ++oy) {
                    const long iy = 2 * oy + ky - kPad;
                    if (iy < 0 || iy >= h) {
                        for (long ox = 0; ox < wo; ++ox) row[oy * wo + ox] = T(0);
                        continue;
                    }
                    for (long ox = 0; ox < wo; ++ox) {
                        const long ix = 2 * ox + kx - kPad;
                        row[oy * wo + ox] = (ix < 0 || ix >= w) ? T(0) : plane[iy * w + ix];
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatter-add cols back onto the (cin, h, w) grid.
template <typename T>
void col2im_add(const T* cols, long cin, long h, long w, T* x) {
    const long ho = h / 2, wo = w / 2;
    const long q_count = ho * wo;
    for (long ci = 0; ci < cin; ++ci) {
        T* plane = x + ci * h * w;
        for (int ky = 0; ky < kKernel; ++ky) {
            for (int kx = 0; kx < kKernel; ++kx) {
                const T* row = cols + ((ci * kKernel + ky) * kKernel + kx) * q_count;
                for (long oy = 0; oy < ho; ++oy) {
                    const long iy = 2 * oy + ky - kPad;
                    if (iy < 0 || iy >= h) continue;
                    for (long ox = 0; ox < wo; ++ox) {
                        const long ix = 2 * ox + kx - kPad;
                        if (ix >= 0 && ix < w) plane[iy * w + ix] += row[oy * wo + ox];
                    }
                }
            }
        }
    }
}

} // namespace detail

// y(N,cout,H/2,W/2) = conv4x4s2(x(N,cin,H,W); w(cout,cin,4,4), b).
template <typename T>
Tensor<T> conv_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    const long n = x.dim(0), cin = x.dim(1), h = x.dim(2), ww = x.dim(3);
    const long cout = w.dim(0);
    const long ho = h / 2, wo = ww / 2, q = ho * wo;
    Tensor<T> y({n, cout, ho, wo});
    std::vector<T> cols(static_cast<size_t>(cin * 16 * q));
    for (long i = 0; i < n; ++i) {
        detail::im2col(x.data() + i * cin * h * ww, cin, h, ww, cols.data());
        gemm_nn(w.data(), cols.data(), y.data() + i * cout * q, cout, cin * 16, q, false);
        T* yp = y.data() + i * cout * q;
        for (long co = 0; co < cout; ++co) {
            const T bias = b[co];
            for (long p = 0; p < q; ++p) yp[co * q + p] += bias;
        }
    }
    return y;
}

template <typename T>
struct ConvGrads {
    Tensor<T> dx, dw, db;
};

template <typename T>
ConvGrads<T> conv_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy) {
    const long n = x.dim(0), cin = x.dim(1), h = x.dim(2), ww = x.dim(3);
    const long cout = w.dim(0);
    const long q = (h / 2) * (ww / 2);
    ConvGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(w.shape()), Tensor<T>({cout})};

    std::vector<T> cols(static_cast<size_t>(cin * 16 * q));
    std::vector<T> wt(static_cast<size_t>(w.numel()));
    transpose(w.data(), wt.data(), cout, cin * 16);
    std::vector<T> cols_grad(static_cast<size_t>(cin * 16 * q));

    for (long i = 0; i < n; ++i) {
        const T* dyp = dy.data() + i * cout * q;
        detail::im2col(x.data() + i * cin * h * ww, cin, h, ww, cols.data());
        // dW += dY * cols^T ; dX = col2im(W^T * dY)
        gemm_nt(dyp, cols.data(), g.dw.data(), cout, q, cin * 16, true);
        gemm_nn(wt.data(), dyp, cols_grad.data(), cin * 16, cout, q, false);
        detail::col2im_add(cols_grad.data(), cin, h, ww, g.dx.data() + i * cin * h * ww);
        for (long co = 0; co < cout; ++co) {
            T acc = 0;
            for (long p = 0; p < q; ++p) acc += dyp[co * q + p];
            g.db[co] += acc;
        }
    }
    return g;
}

// y(N,cout,2H,2W) = convtranspose4x4s2(x(N,cin,H,W); w(cout,cin,4,4), b).
// Weight storage matches conv: (out_channels, in_channels, 4, 4).
template <typename T>
Tensor<T> convtranspose_forward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
    const long n = x.dim(0), cin = x.dim(1), h = x.dim(2), ww = x.dim(3);
    const long cout = w.dim(0);
    const long oh = 2 * h, ow = 2 * ww, q = h * ww;
    Tensor<T> y({n, cout, oh, ow});

    // m(cout*16, cin): rows ordered (co,ky,kx) for the col2im scatter.
    std::vector<T> m(static_cast<size_t>(cout * 16 * cin));
    for (long co = 0; co < cout; ++co)
        for (long ci = 0; ci < cin; ++ci)
            for (int t = 0; t < 16; ++t)
                m[static_cast<size_t>((co * 16 + t) * cin + ci)] = w[((co * cin + ci) * 16 + t)];

    std::vector<T> cols(static_cast<size_t>(cout * 16 * q));
    for (long i = 0; i < n; ++i) {
        gemm_nn(m.data(), x.data() + i * cin * q, cols.data(), cout * 16, cin, q, false);
        T* yp = y.data() + i * cout * oh * ow;
        detail::col2im_add(cols.data(), cout, oh, ow, yp);
        for (long co = 0; co < cout; ++co) {
            const T bias = b[co];
            for (long p = 0; p < oh * ow; ++p) yp[co * oh * ow + p] += bias;
        }
    }
    return y;
}

template <typename T>
ConvGrads<T> convtranspose_backward(const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& dy) {
    const long n = x.dim(0), cin = x.dim(1), h = x.dim(2), ww = x.dim(3);
    const long cout = w.dim(0);
    const long oh = 2 * h, ow = 2 * ww, q = h * ww;
    ConvGrads<T> g{Tensor<T>(x.shape()), Tensor<T>(w.shape()), Tensor<T>({cout})};

    std::vector<T> m(static_cast<size_t>(cout * 16 * cin));
    for (long co = 0; co < cout; ++co)
        for (long ci = 0; ci < cin; ++ci)
            for (int t = 0; t < 16; ++t)
                m[static_cast<size_t>((co * 16 + t) * cin + ci)] = w[((co * cin + ci) * 16 + t)];
    std::vector<T> mt(static_cast<size_t>(cout * 16 * cin));
    transpose(m.data(), mt.data(), cout * 16, cin);

    std::vector<T> cols(static_cast<size_t>(cout * 16 * q));
    std::vector<T> dm(static_cast<size_t>(cout * 16 * cin), T(0));
    for (long i = 0; i < n; ++i) {
        const T* dyp = dy.data() + i * cout * oh * ow;
        // Gather of dY is the adjoint of the forward scatter.
        detail::im2col(dyp, cout, oh, ow, cols.data());
        // dX = m^T * cols ; dM += cols * x^T
        gemm_nn(mt.data(), cols.data(), g.dx.data() + i * cin * q, cin, cout * 16, q, false);
        gemm_nt(cols.data(), x.data() + i * cin * q, dm.data(), cout * 16, q, cin, true);
        for (long co = 0; co < cout; ++co) {
            T acc = 0;
            for (long p = 0; p < oh * ow; ++p) acc += dyp[co * oh * ow + p];
            g.db[co] += acc;
        }
    }
    for (long co = 0; co < cout; ++co)
        for (long ci = 0; ci < cin; ++ci)
            for (int t = 0; t < 16; ++t)
                g.dw[((co * cin + ci) * 16 + t)] = dm[static_cast<size_t>((co * 16 + t) * cin + ci)];
    return g;
}

template <typename T>
struct BatchNormCache {
    Tensor<T> xhat;
    std::vector<T> inv_std; // per channel
};

// Train-mode batchnorm: normalizes with batch statistics (biased variance) and
// updates running stats with momentum 0.1 (unbiased variance, PyTorch style).
template <typename T>
Tensor<T> batchnorm_forward_train(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                                  Tensor<T>& running_mean, Tensor<T>& running_var, T eps,
                                  T momentum, BatchNormCache<T>* cache) {
    const long n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    const long m = n * h * w;
    if (n < 2) throw std::invalid_argument("batchnorm: train mode needs batch size >= 2");
    Tensor<T> y(x.shape());
    if (cache) {
        cache->xhat = Tensor<T>(x.shape());
        cache->inv_std.assign(static_cast<size_t>(c), T(0));
    }
    for (long ch = 0; ch < c; ++ch) {
        double mean = 0.0;
        for (long i = 0; i < n; ++i) {
            const T* p = x.data() + (i * c + ch) * h * w;
            for (long j = 0; j < h * w; ++j) mean += p[j];
        }
        mean /= static_cast<double>(m);
        double var = 0.0;
        for (long i = 0; i < n; ++i) {
            const T* p = x.data() + (i * c + ch) * h * w;
            for (long j = 0; j < h * w; ++j) {
                const double d = p[j] - mean;
                var += d * d;
            }
        }
        var /= static_cast<double>(m);
        const double inv_std = 1.0 / std::sqrt(var + static_cast<double>(eps));
        const double unbiased = m > 1 ? var * static_cast<double>(m) / static_cast<double>(m - 1) : var;
        running_mean[ch] = static_cast<T>((1.0 - momentum) * running_mean[ch] + momentum * mean);
        running_var[ch] = static_cast<T>((1.0 - momentum) * running_var[ch] + momentum * unbiased);

        const T g = gamma[ch], bt = beta[ch];
        for (long i = 0; i < n; ++i) {
            const T* p = x.data() + (i * c + ch) * h * w;
            T* yp = y.data() + (i * c + ch) * h * w;
            T* xh = cache ? cache->xhat.data() + (i * c + ch) * h * w : nullptr;
            for (long j = 0; j < h * w; ++j) {
                const T xhat = static_cast<T>((p[j] - mean) * inv_std);
                if (xh) xh[j] = xhat;
                yp[j] = g * xhat + bt;
            }
        }
        if (cache) cache->inv_std[static_cast<size_t>(ch)] = static_cast<T>(inv_std);
    }
    return y;
}

// Eval-mode batchnorm: a pure function of the running statistics.
template <typename T>
Tensor<T> batchnorm_forward_eval(const Tensor<T>& x, const Tensor<T>& gamma, const Tensor<T>& beta,
                                 const Tensor<T>& running_mean, const Tensor<T>& running_var, T eps) {
    const long n = x.dim(0), c = x.dim(1), h = x.dim(2), w = x.dim(3);
    Tensor<T> y(x.shape());
    for (long ch = 0; ch < c; ++ch) {
        const double inv_std = 1.0 / std::sqrt(static_cast<double>(running_var[ch]) + static_cast<double>(eps));
        const double mean = running_mean[ch];
        const T g = gamma[ch], bt = beta[ch];
        for (long i = 0; i < n; ++i) {
            const T* p = x.data() + (i * c + ch) * h * w;
            T* yp = y.data() + (i * c + ch) * h * w;
            for (long j = 0; j < h * w; ++j) yp[j] = static_cast<T>(g * ((p[j] - mean) * inv_std) + bt);
        }
    }
    return y;
}

template <typename T>
struct BatchNormGrads {
    Tensor<T> dx, dgamma, dbeta;
};

// Backward through train-mode batchnorm including the batch-statistics path.
template <typename T>
BatchNormGrads<T> batchnorm_backward(const Tensor<T>& dy, const Tensor<T>& gamma,
                                     const BatchNormCache<T>& cache) {
    const long n = dy.dim(0), c = dy.dim(1), h = dy.dim(2), w = dy.dim(3);
    const long m = n * h * w;
    BatchNormGrads<T> g{Tensor<T>(dy.shape()), Tensor<T>({c}), Tensor<T>({c})};
    for (long ch = 0; ch < c; ++ch) {
        double sum_dy = 0.0, sum_dy_xhat = 0.0;
        for (long i = 0; i < n; ++i) {
            const T* dp = dy.data() + (i * c + ch) * h * w;
            const T* xh = cache.xhat.data() + (i * c + ch) * h * w;
            for (long j = 0; j < h * w; ++j) {
                sum_dy += dp[j];
                sum_dy_xhat += static_cast<double>(dp[j]) * xh[j];
            }
        }
        g.dbeta[ch] = static_cast<T>(sum_dy);
        g.dgamma[ch] = static_cast<T>(sum_dy_xhat);
        const double scale = static_cast<double>(gamma[ch]) * cache.inv_std[static_cast<size_t>(ch)] /
                             static_cast<double>(m);
        for (long i = 0; i < n; ++i) {
            const T* dp = dy.data() + (i * c + ch) * h * w;
            const T* xh = cache.xhat.data() + (i * c + ch) * h * w;
            T* dx = g.dx.data() + (i * c + ch) * h * w;
            for (long j = 0; j < h * w; ++j)
                dx[j] = static_cast<T>(scale * (static_cast<double>(m) * dp[j] - sum_dy - xh[j] * sum_dy_xhat));
        }
    }
    return g;
}

template <typename T>
Tensor<T> relu_forward(const Tensor<T>& x) {
    Tensor<T> y(x.shape());
    for (long i = 0; i < x.numel(); ++i) y[i] = x[i] > T(0) ? x[i] : T(0);
    return y;
}

template <typename T>
Tensor<T> relu_backward(const Tensor<T>& x, const Tensor<T>& dy) {
    Tensor<T> dx(x.shape());
    for (long i = 0; i < x.numel(); ++i) dx[i] = x[i] > T(0) ? dy[i] : T(0);
    return dx;
}

template <typename T>
Tensor<T> sigmoid_forward(const Tensor<T>& x) {
    Tensor<T> y(x.shape());
    for (long i = 0; i < x.numel(); ++i) y[i] = static_cast<T>(1.0 / (1.0 + std::exp(-static_cast<double>(x[i]))));
    return y;
}

template <typename T>
Tensor<T> sigmoid_backward(const Tensor<T>& y, const Tensor<T>& dy) {
    Tensor<T> dx(y.shape());
    for (long i = 0; i < y.numel(); ++i) dx[i] = dy[i] * y[i] * (T(1) - y[i]);
    return dx;
}

} // namespace d3r::nn
