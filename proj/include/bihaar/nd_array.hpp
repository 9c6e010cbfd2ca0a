#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "bihaar/errors.hpp"

namespace bihaar {

// Dense q-dimensional array of doubles, q in {1,2,3}, row-major with the
// last axis fastest. 1D: {n}; 2D: {ny, nx}; 3D: {nnu, ny, nx} so that x is
// always the fastest axis.
struct NdArray {
    std::vector<std::size_t> dims;
    std::vector<double> data;

    NdArray() = default;
    explicit NdArray(std::vector<std::size_t> d, double fill = 0.0)
        : dims(std::move(d)),
          data(std::accumulate(dims.begin(), dims.end(), std::size_t{1},
                               std::multiplies<>()),
               fill) {}

    std::size_t rank() const { return dims.size(); }
    std::size_t size() const { return data.size(); }

    double& operator[](std::size_t i) { return data[i]; }
    double operator[](std::size_t i) const { return data[i]; }

    double& at2(std::size_t y, std::size_t x) { return data[y * dims[1] + x]; }
    double at2(std::size_t y, std::size_t x) const { return data[y * dims[1] + x]; }
    double& at3(std::size_t v, std::size_t y, std::size_t x) {
        return data[(v * dims[1] + y) * dims[2] + x];
    }
    double at3(std::size_t v, std::size_t y, std::size_t x) const {
        return data[(v * dims[1] + y) * dims[2] + x];
    }

    auto begin() { return data.begin(); }
    auto end() { return data.end(); }
    auto begin() const { return data.begin(); }
    auto end() const { return data.end(); }

    bool same_shape(const NdArray& o) const { return dims == o.dims; }
};

// A CountGrid is an NdArray whose entries are nonnegative integers
// (photon counts). validate_counts enforces the invariant.
using CountGrid = NdArray;

inline void validate_counts(const NdArray& g, const std::string& ctx = "input") {
    for (double v : g.data) {
        if (!(v >= 0.0) || v != std::floor(v))
            throw domain_error(ctx + ": counts must be nonnegative integers");
    }
}

inline std::string dims_to_string(const std::vector<std::size_t>& d) {
    std::string s = "[";
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(d[i]);
    }
    return s + "]";
}

}  // namespace bihaar
