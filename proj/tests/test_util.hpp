#pragma once

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <string>

#include "d3r/rng.hpp"
#include "d3r/tensor.hpp"

namespace test_util {

inline double rel_err(double a, double b) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-6});
    return std::abs(a - b) / scale;
}

// Central finite difference of a scalar function at coordinate i of x.
template <typename F>
double central_diff(const F& f, d3r::Tensor<double>& x, long i, double h = 1e-5) {
    const double orig = x[i];
    x[i] = orig + h;
    const double plus = f(x);
    x[i] = orig - h;
    const double minus = f(x);
    x[i] = orig;
    return (plus - minus) / (2.0 * h);
}

template <typename T>
d3r::Tensor<T> random_tensor(std::vector<long> shape, d3r::Rng& rng, double lo = 0.0, double hi = 1.0) {
    d3r::Tensor<T> t(std::move(shape));
    for (long i = 0; i < t.numel(); ++i) t[i] = static_cast<T>(rng.uniform(lo, hi));
    return t;
}

// Unique temp directory, removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("d3r_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }
    std::string str() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

} // namespace test_util
