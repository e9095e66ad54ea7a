#pragma once

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "error.hpp"

namespace radsynth {

// Dense row-major value block. Spatial tensors are laid out (h, w, c) with
// the channel index contiguous; batches prepend the sample index.
template <typename T>
struct TensorT {
    std::vector<std::int64_t> shape;
    std::vector<T> data;

    TensorT() = default;
    explicit TensorT(std::vector<std::int64_t> s) : shape(std::move(s)) {
        data.resize(static_cast<std::size_t>(numel()));
    }
    TensorT(std::vector<std::int64_t> s, std::vector<T> d)
        : shape(std::move(s)), data(std::move(d)) {
        if (data.size() != static_cast<std::size_t>(numel()))
            throw Error(ErrorKind::invalid_argument, "tensor data does not match its shape");
    }

    std::int64_t numel() const {
        std::int64_t n = 1;
        for (std::int64_t d : shape) n *= d;
        return n;
    }
};

using TensorF = TensorT<float>;
using TensorD = TensorT<double>;

template <typename T>
void require_finite(const TensorT<T>& t, const char* where) {
    for (T v : t.data)
        if (!std::isfinite(static_cast<double>(v)))
            throw Error(ErrorKind::domain, std::string("non-finite value after ") + where);
}

}  // namespace radsynth
