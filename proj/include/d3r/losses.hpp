#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "d3r/errors.hpp"
#include "d3r/fft.hpp"
#include "d3r/tensor.hpp"

namespace d3r::losses {

struct LossWeights {
    double mse = 1.0;
    double fft = 1.0;
    double ssim = 0.0;

    void validate() const {
        if (mse < 0 || fft < 0 || ssim < 0) throw DataError("loss weights must be nonnegative");
        if (mse == 0 && fft == 0 && ssim == 0) throw DataError("at least one loss weight must be positive");
    }
};

struct LossBreakdown {
    double mse = 0.0;
    double fft = 0.0;
    double ssim = 0.0;
    double total = 0.0;
};

template <typename T>
struct LossValue {
    double value = 0.0;
    Tensor<T> grad; // d value / d recon, same shape as recon
};

namespace detail {

inline void check_shapes(const std::vector<long>& a, const std::vector<long>& b, const char* who) {
    if (a != b) throw DataError(std::string(who) + ": shape mismatch between reconstruction and target");
    if (a.size() != 4) throw DataError(std::string(who) + ": expected a (N,C,H,W) batch");
}

} // namespace detail

// Mean over all elements of the squared difference.
template <typename T>
LossValue<T> mse_loss(const Tensor<T>& recon, const Tensor<T>& target) {
    detail::check_shapes(recon.shape(), target.shape(), "mse_loss");
    const long n = recon.numel();
    LossValue<T> out;
    out.grad = Tensor<T>(recon.shape());
    double acc = 0.0;
    for (long i = 0; i < n; ++i) {
        const double d = static_cast<double>(recon[i]) - static_cast<double>(target[i]);
        acc += d * d;
        out.grad[i] = static_cast<T>(2.0 * d / static_cast<double>(n));
    }
    out.value = acc / static_cast<double>(n);
    return out;
}

// L1 between channel-wise orthonormal FFT magnitude spectra, averaged over
// every bin. The gradient follows d|z| = Re(conj(z) dz)/|z|, with bins whose
// reconstruction magnitude is below 1e-12 contributing zero.
template <typename T>
LossValue<T> fft_magnitude_loss(const Tensor<T>& recon, const Tensor<T>& target) {
    detail::check_shapes(recon.shape(), target.shape(), "fft_magnitude_loss");
    const long nb = recon.dim(0), c = recon.dim(1), h = recon.dim(2), w = recon.dim(3);
    const long plane = h * w;
    const double denom = static_cast<double>(recon.numel());

    LossValue<T> out;
    out.grad = Tensor<T>(recon.shape());
    double acc = 0.0;
    for (long n = 0; n < nb; ++n) {
        for (long ch = 0; ch < c; ++ch) {
            const T* rp = recon.data() + (n * c + ch) * plane;
            const T* tp = target.data() + (n * c + ch) * plane;
            auto fr = fft::forward_ortho(rp, h, w);
            const auto ft = fft::forward_ortho(tp, h, w);

            // Reuse fr to hold the bin-wise gradient seed g = s * z / |z| / N.
            for (long i = 0; i < plane; ++i) {
                const double mr = std::abs(std::complex<double>(fr[static_cast<size_t>(i)]));
                const double mt = std::abs(std::complex<double>(ft[static_cast<size_t>(i)]));
                const double diff = mr - mt;
                acc += std::abs(diff);
                if (mr < 1e-12 || diff == 0.0) {
                    fr[static_cast<size_t>(i)] = {T(0), T(0)};
                } else {
                    const double s = (diff > 0 ? 1.0 : -1.0) / denom;
                    fr[static_cast<size_t>(i)] *= static_cast<T>(s / mr);
                }
            }
            const auto g = fft::adjoint_ortho_real(std::move(fr), h, w);
            T* gp = out.grad.data() + (n * c + ch) * plane;
            for (long i = 0; i < plane; ++i) gp[i] = g[static_cast<size_t>(i)];
        }
    }
    out.value = acc / denom;
    return out;
}

namespace detail {

// 11-tap Gaussian (sigma 1.5), normalized to sum 1.
template <typename T>
const std::vector<T>& ssim_window() {
    static const std::vector<T> w = [] {
        std::vector<T> v(11);
        double total = 0.0;
        for (int i = 0; i < 11; ++i) {
            const double d = i - 5;
            const double g = std::exp(-d * d / (2.0 * 1.5 * 1.5));
            v[static_cast<size_t>(i)] = static_cast<T>(g);
            total += g;
        }
        for (auto& x : v) x = static_cast<T>(static_cast<double>(x) / total);
        return v;
    }();
    return w;
}

// Separable valid-mode correlation with the SSIM window: (h,w) -> (h-10,w-10).
template <typename T>
std::vector<T> window_valid(const T* src, long h, long w) {
    const auto& k = ssim_window<T>();
    const long vw = w - 10;
    std::vector<T> rows(static_cast<size_t>(h * vw));
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < vw; ++x) {
            T acc = 0;
            for (int t = 0; t < 11; ++t) acc += k[static_cast<size_t>(t)] * src[y * w + x + t];
            rows[static_cast<size_t>(y * vw + x)] = acc;
        }
    const long vh = h - 10;
    std::vector<T> out(static_cast<size_t>(vh * vw));
    for (long y = 0; y < vh; ++y)
        for (long x = 0; x < vw; ++x) {
            T acc = 0;
            for (int t = 0; t < 11; ++t) acc += k[static_cast<size_t>(t)] * rows[static_cast<size_t>((y + t) * vw + x)];
            out[static_cast<size_t>(y * vw + x)] = acc;
        }
    return out;
}

// Adjoint of window_valid: scatters a (h-10,w-10) field back onto (h,w).
template <typename T>
std::vector<T> window_adjoint(const T* field, long h, long w) {
    const auto& k = ssim_window<T>();
    const long vh = h - 10, vw = w - 10;
    std::vector<T> rows(static_cast<size_t>(h * vw), T(0));
    for (long y = 0; y < vh; ++y)
        for (long x = 0; x < vw; ++x) {
            const T f = field[y * vw + x];
            for (int t = 0; t < 11; ++t) rows[static_cast<size_t>((y + t) * vw + x)] += k[static_cast<size_t>(t)] * f;
        }
    std::vector<T> out(static_cast<size_t>(h * w), T(0));
    for (long y = 0; y < h; ++y)
        for (long x = 0; x < vw; ++x) {
            const T f = rows[static_cast<size_t>(y * vw + x)];
            for (int t = 0; t < 11; ++t) out[static_cast<size_t>(y * w + x + t)] += k[static_cast<size_t>(t)] * f;
        }
    return out;
}

} // namespace detail

// 1 - mean SSIM (11x11 Gaussian window, sigma 1.5, C1=0.01^2, C2=0.03^2 for
// unit dynamic range, valid placement), with the analytic gradient.
template <typename T>
LossValue<T> ssim_loss(const Tensor<T>& recon, const Tensor<T>& target) {
    detail::check_shapes(recon.shape(), target.shape(), "ssim_loss");
    const long nb = recon.dim(0), c = recon.dim(1), h = recon.dim(2), w = recon.dim(3);
    if (h < 11 || w < 11) throw DataError("ssim_loss: image smaller than the 11x11 window");

    const double c1 = 0.01 * 0.01;
    const double c2 = 0.03 * 0.03;
    const long vh = h - 10, vw = w - 10;
    const long nv = vh * vw;
    const double denom = static_cast<double>(nb * c * nv);

    LossValue<T> out;
    out.grad = Tensor<T>(recon.shape());
    double acc = 0.0;

    std::vector<T> xx(static_cast<size_t>(h * w)), yy(static_cast<size_t>(h * w)), xy(static_cast<size_t>(h * w));
    for (long n = 0; n < nb; ++n) {
        for (long ch = 0; ch < c; ++ch) {
            const T* x = recon.data() + (n * c + ch) * h * w;
            const T* y = target.data() + (n * c + ch) * h * w;
            for (long i = 0; i < h * w; ++i) {
                xx[static_cast<size_t>(i)] = x[i] * x[i];
                yy[static_cast<size_t>(i)] = y[i] * y[i];
                xy[static_cast<size_t>(i)] = x[i] * y[i];
            }
            const auto mu_x = detail::window_valid(x, h, w);
            const auto mu_y = detail::window_valid(y, h, w);
            const auto m_xx = detail::window_valid(xx.data(), h, w);
            const auto m_yy = detail::window_valid(yy.data(), h, w);
            const auto m_xy = detail::window_valid(xy.data(), h, w);

            // Per-window coefficient fields for the gradient:
            //   dS/dx_i = w * (p1 + p2*(y_i - mu_y) + p3*(x_i - mu_x))
            std::vector<T> p1(static_cast<size_t>(nv)), p2(static_cast<size_t>(nv)), p3(static_cast<size_t>(nv));
            std::vector<T> p2mu(static_cast<size_t>(nv)), p3mu(static_cast<size_t>(nv));
            for (long q = 0; q < nv; ++q) {
                const double mx = mu_x[static_cast<size_t>(q)], my = mu_y[static_cast<size_t>(q)];
                const double sx = m_xx[static_cast<size_t>(q)] - mx * mx;
                const double sy = m_yy[static_cast<size_t>(q)] - my * my;
                const double sxy = m_xy[static_cast<size_t>(q)] - mx * my;
                const double a1 = 2.0 * mx * my + c1;
                const double a2 = 2.0 * sxy + c2;
                const double b1 = mx * mx + my * my + c1;
                const double b2 = sx + sy + c2;
                const double s = (a1 * a2) / (b1 * b2);
                acc += s;
                p1[static_cast<size_t>(q)] = static_cast<T>(2.0 * (my * a2 / (b1 * b2) - s * mx / b1));
                p2[static_cast<size_t>(q)] = static_cast<T>(2.0 * a1 / (b1 * b2));
                p3[static_cast<size_t>(q)] = static_cast<T>(-2.0 * s / b2);
                p2mu[static_cast<size_t>(q)] = static_cast<T>(p2[static_cast<size_t>(q)] * my);
                p3mu[static_cast<size_t>(q)] = static_cast<T>(p3[static_cast<size_t>(q)] * mx);
            }
            // grad = adj(p1 - p2*mu_y - p3*mu_x) + y .* adj(p2) + x .* adj(p3), scaled by -1/denom.
            std::vector<T> base(static_cast<size_t>(nv));
            for (long q = 0; q < nv; ++q)
                base[static_cast<size_t>(q)] = p1[static_cast<size_t>(q)] - p2mu[static_cast<size_t>(q)] - p3mu[static_cast<size_t>(q)];
            const auto g0 = detail::window_adjoint(base.data(), h, w);
            const auto g2 = detail::window_adjoint(p2.data(), h, w);
            const auto g3 = detail::window_adjoint(p3.data(), h, w);
            T* gp = out.grad.data() + (n * c + ch) * h * w;
            for (long i = 0; i < h * w; ++i) {
                const double g = static_cast<double>(g0[static_cast<size_t>(i)]) +
                                 static_cast<double>(y[i]) * g2[static_cast<size_t>(i)] +
                                 static_cast<double>(x[i]) * g3[static_cast<size_t>(i)];
                gp[i] = static_cast<T>(-g / denom);
            }
        }
    }
    out.value = 1.0 - acc / denom;
    return out;
}

// Weighted sum of the enabled terms; components with zero weight are skipped.
template <typename T>
std::pair<LossBreakdown, Tensor<T>> total_loss(const Tensor<T>& recon, const Tensor<T>& target,
                                               const LossWeights& weights) {
    weights.validate();
    LossBreakdown bd;
    Tensor<T> grad(recon.shape());
    auto add = [&](double weight, const LossValue<T>& lv) {
        for (long i = 0; i < grad.numel(); ++i)
            grad[i] += static_cast<T>(weight * static_cast<double>(lv.grad[i]));
    };
    if (weights.mse > 0) {
        const auto lv = mse_loss(recon, target);
        bd.mse = lv.value;
        add(weights.mse, lv);
    }
    if (weights.fft > 0) {
        const auto lv = fft_magnitude_loss(recon, target);
        bd.fft = lv.value;
        add(weights.fft, lv);
    }
    if (weights.ssim > 0) {
        const auto lv = ssim_loss(recon, target);
        bd.ssim = lv.value;
        add(weights.ssim, lv);
    }
    bd.total = weights.mse * bd.mse + weights.fft * bd.fft + weights.ssim * bd.ssim;
    return {bd, std::move(grad)};
}

} // namespace d3r::losses
