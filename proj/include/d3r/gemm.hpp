#pragma once

#include <vector>

#include "d3r/parallel.hpp"

namespace d3r {

// C (m x n) = A (m x k) * B (k x n), row-major, C preset by caller (accumulate
// adds into it). Each C row is owned by one worker and accumulates in fixed
// k order, so results are bit-identical for any thread count.
template <typename T>
void gemm_nn(const T* a, const T* b, T* c, long m, long k, long n, bool accumulate) {
    parallel_for(0, m, [&](long i) {
        T* crow = c + i * n;
        if (!accumulate)
            for (long j = 0; j < n; ++j) crow[j] = T(0);
        const T* arow = a + i * k;
        for (long p = 0; p < k; ++p) {
            const T av = arow[p];
            if (av == T(0)) continue;
            const T* brow = b + p * n;
            for (long j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    });
}

// C (m x n) = A (m x k) * B^T where B is (n x k) row-major.
template <typename T>
void gemm_nt(const T* a, const T* b, T* c, long m, long k, long n, bool accumulate) {
    parallel_for(0, m, [&](long i) {
        const T* arow = a + i * k;
        T* crow = c + i * n;
        for (long j = 0; j < n; ++j) {
            const T* brow = b + j * k;
            T acc = 0;
            for (long p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] = accumulate ? crow[j] + acc : acc;
        }
    });
}

// Row-major transpose: dst (n x m) from src (m x n).
template <typename T>
void transpose(const T* src, T* dst, long m, long n) {
    for (long i = 0; i < m; ++i)
        for (long j = 0; j < n; ++j) dst[j * m + i] = src[i * n + j];
}

} // namespace d3r
