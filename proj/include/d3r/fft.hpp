#pragma once

#include <cmath>
#include <complex>
#include <vector>

namespace d3r::fft {

namespace detail {

template <typename T>
std::vector<std::complex<T>> twiddles(long n, bool inverse) {
    // e^{±2*pi*i*m/n} for m in [0, n); sign + for the inverse transform.
    std::vector<std::complex<T>> tw(static_cast<size_t>(n));
    const double sign = inverse ? 1.0 : -1.0;
    for (long m = 0; m < n; ++m) {
        const double ang = sign * 2.0 * 3.14159265358979323846 * static_cast<double>(m) / static_cast<double>(n);
        tw[static_cast<size_t>(m)] = {static_cast<T>(std::cos(ang)), static_cast<T>(std::sin(ang))};
    }
    return tw;
}

template <typename T>
void transform_radix2(std::complex<T>* a, long n, const std::vector<std::complex<T>>& tw) {
    for (long i = 1, j = 0; i < n; ++i) {
        long bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (long len = 2; len <= n; len <<= 1) {
        const long stride = n / len;
        for (long i = 0; i < n; i += len) {
            for (long k = 0; k < len / 2; ++k) {
                const std::complex<T> w = tw[static_cast<size_t>(k * stride)];
                const std::complex<T> u = a[i + k];
                const std::complex<T> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

template <typename T>
void transform_naive(std::complex<T>* a, long n, const std::vector<std::complex<T>>& tw) {
    std::vector<std::complex<T>> out(static_cast<size_t>(n));
    for (long k = 0; k < n; ++k) {
        std::complex<T> acc(0, 0);
        for (long j = 0; j < n; ++j) acc += a[j] * tw[static_cast<size_t>((j * k) % n)];
        out[static_cast<size_t>(k)] = acc;
    }
    for (long k = 0; k < n; ++k) a[k] = out[static_cast<size_t>(k)];
}

inline bool is_pow2(long n) { return n > 0 && (n & (n - 1)) == 0; }

} // namespace detail

// In-place unnormalized 1D DFT along contiguous memory. Direction is baked
// into the twiddle table.
template <typename T>
void transform_1d(std::complex<T>* a, long n, const std::vector<std::complex<T>>& tw) {
    if (n == 1) return;
    if (detail::is_pow2(n))
        detail::transform_radix2(a, n, tw);
    else
        detail::transform_naive(a, n, tw);
}

// 2D DFT with orthonormal scaling (each direction scaled by 1/sqrt(n), so the
// transform is unitary and Parseval holds exactly up to rounding).
// grid is row-major (h, w); inverse applies the conjugate transform.
template <typename T>
void transform_2d_ortho(std::complex<T>* grid, long h, long w, bool inverse) {
    const auto tw_row = detail::twiddles<T>(w, inverse);
    for (long y = 0; y < h; ++y) transform_1d(grid + y * w, w, tw_row);

    const auto tw_col = detail::twiddles<T>(h, inverse);
    std::vector<std::complex<T>> col(static_cast<size_t>(h));
    for (long x = 0; x < w; ++x) {
        for (long y = 0; y < h; ++y) col[static_cast<size_t>(y)] = grid[y * w + x];
        transform_1d(col.data(), h, tw_col);
        for (long y = 0; y < h; ++y) grid[y * w + x] = col[static_cast<size_t>(y)];
    }

    const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(h) * static_cast<double>(w)));
    for (long i = 0; i < h * w; ++i) grid[i] *= scale;
}

// Forward orthonormal 2D DFT of a real grid.
template <typename T>
std::vector<std::complex<T>> forward_ortho(const T* real, long h, long w) {
    std::vector<std::complex<T>> grid(static_cast<size_t>(h * w));
    for (long i = 0; i < h * w; ++i) grid[static_cast<size_t>(i)] = {real[i], T(0)};
    transform_2d_ortho(grid.data(), h, w, false);
    return grid;
}

// Real part of the inverse orthonormal 2D DFT (the adjoint of forward_ortho
// restricted to real inputs).
template <typename T>
std::vector<T> adjoint_ortho_real(std::vector<std::complex<T>> grid, long h, long w) {
    transform_2d_ortho(grid.data(), h, w, true);
    std::vector<T> out(static_cast<size_t>(h * w));
    for (long i = 0; i < h * w; ++i) out[static_cast<size_t>(i)] = grid[static_cast<size_t>(i)].real();
    return out;
}

} // namespace d3r::fft
