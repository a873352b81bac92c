#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace eegclf {

// Dense row-major tensor. double in test mode (gradient checks), float in
// run mode; the network engine is templated on the element type.
template <class T>
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<T> v;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)), v(count(shape), T(0)) {}
    Tensor(std::vector<std::size_t> s, std::vector<T> data) : shape(std::move(s)), v(std::move(data)) {
        if (v.size() != count(shape)) throw std::invalid_argument("tensor data does not match shape");
    }

    static std::size_t count(const std::vector<std::size_t>& s) {
        return std::accumulate(s.begin(), s.end(), std::size_t{1}, std::multiplies<>());
    }

    std::size_t size() const { return v.size(); }
    T* data() { return v.data(); }
    const T* data() const { return v.data(); }

    T& operator[](std::size_t i) { return v[i]; }
    const T& operator[](std::size_t i) const { return v[i]; }

    void fill(T value) { std::fill(v.begin(), v.end(), value); }

    bool finite() const {
        for (T x : v)
            if (!std::isfinite(static_cast<double>(x))) return false;
        return true;
    }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }

    std::string shape_str() const {
        std::string s = "(";
        for (std::size_t i = 0; i < shape.size(); ++i) {
            if (i) s += "x";
            s += std::to_string(shape[i]);
        }
        return s + ")";
    }
};

} // namespace eegclf
