#pragma once

#include <cassert>
#include <cstdint>
#include <numeric>
#include <vector>

namespace d3r {

// Dense row-major tensor of rank 1..4. Shapes are fixed at construction.
template <typename T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<long> shape)
        : shape_(std::move(shape)),
          v_(static_cast<size_t>(count(shape_)), T(0)) {}

    Tensor(std::vector<long> shape, std::vector<T> values)
        : shape_(std::move(shape)), v_(std::move(values)) {
        assert(static_cast<long>(v_.size()) == count(shape_));
    }

    static Tensor zeros(std::vector<long> shape) { return Tensor(std::move(shape)); }

    static Tensor full(std::vector<long> shape, T value) {
        Tensor t(std::move(shape));
        std::fill(t.v_.begin(), t.v_.end(), value);
        return t;
    }

    const std::vector<long>& shape() const { return shape_; }
    int rank() const { return static_cast<int>(shape_.size()); }
    long dim(int i) const { return shape_[static_cast<size_t>(i)]; }
    long numel() const { return static_cast<long>(v_.size()); }
    bool empty() const { return v_.empty(); }

    T* data() { return v_.data(); }
    const T* data() const { return v_.data(); }
    std::vector<T>& values() { return v_; }
    const std::vector<T>& values() const { return v_; }

    T& operator[](long i) { return v_[static_cast<size_t>(i)]; }
    const T& operator[](long i) const { return v_[static_cast<size_t>(i)]; }

    T& at(long a, long b) { return v_[static_cast<size_t>(a * shape_[1] + b)]; }
    const T& at(long a, long b) const { return v_[static_cast<size_t>(a * shape_[1] + b)]; }

    T& at(long a, long b, long c) {
        return v_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
    }
    const T& at(long a, long b, long c) const {
        return v_[static_cast<size_t>((a * shape_[1] + b) * shape_[2] + c)];
    }

    T& at(long a, long b, long c, long d) {
        return v_[static_cast<size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d)];
    }
    const T& at(long a, long b, long c, long d) const {
        return v_[static_cast<size_t>(((a * shape_[1] + b) * shape_[2] + c) * shape_[3] + d)];
    }

    bool same_shape(const Tensor& o) const { return shape_ == o.shape_; }

    void fill(T value) { std::fill(v_.begin(), v_.end(), value); }

    template <typename U>
    Tensor<U> cast() const {
        Tensor<U> out(shape_);
        for (long i = 0; i < numel(); ++i) out[i] = static_cast<U>(v_[static_cast<size_t>(i)]);
        return out;
    }

private:
    static long count(const std::vector<long>& s) {
        long n = 1;
        for (long d : s) n *= d;
        return s.empty() ? 0 : n;
    }

    std::vector<long> shape_;
    std::vector<T> v_;
};

using ImageTensor = Tensor<float>; // (3, H, W), values in [0,1]
using MaskTensor = Tensor<uint8_t>; // (H, W), strictly 0/1

} // namespace d3r
