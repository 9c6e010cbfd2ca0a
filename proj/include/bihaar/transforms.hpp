#pragma once

#include "bihaar/filter_bank.hpp"
#include "bihaar/nd_array.hpp"
#include "bihaar/pyramid.hpp"

namespace bihaar {

// Decimated transforms, periodic boundary. Input lengths along transformed
// axes must be divisible by 2^levels.
Pyramid forward_1d(const NdArray& signal, int levels, const FilterBank& bank,
                   Boundary boundary = Boundary::Periodic);
NdArray inverse_1d(const Pyramid& pyr);

Pyramid forward_2d(const NdArray& image, int levels, const FilterBank& bank,
                   Boundary boundary = Boundary::Periodic);
NdArray inverse_2d(const Pyramid& pyr);

// Complete 2D decomposition of every spectral plane to levels_xy, then 1D
// decomposition along nu of every spatial band to levels_nu.
Pyramid forward_2d1d(const NdArray& volume, int levels_xy, int levels_nu,
                     const FilterBank& bank,
                     Boundary boundary = Boundary::Periodic);
NdArray inverse_2d1d(const Pyramid& pyr);

// Undecimated (translation-invariant) Haar, a-trous dilation per scale,
// shift-averaged reconstruction. Scheme chosen by input rank (1D or 2D).
Pyramid forward_ti(const NdArray& input, int levels, double c = 0.0,
                   Boundary boundary = Boundary::Periodic);
Pyramid forward_ti_2d1d(const NdArray& volume, int levels_xy, int levels_nu,
                        double c = 0.0, Boundary boundary = Boundary::Periodic);
NdArray inverse_ti(const Pyramid& pyr);

// Elementary one-level stages along a single axis; the building blocks of
// the transforms above and of the coarse-to-fine denoising loop.
namespace stages {

// dims must be even along axis; outputs halve that axis.
void analyze_axis(const NdArray& in, std::size_t axis, const FilterBank& fb,
                  NdArray& approx, NdArray& detail);
NdArray synthesize_axis(const NdArray& approx, const NdArray& detail,
                        std::size_t axis, const FilterBank& fb);

// Undecimated variants; outputs keep the input shape.
void ti_analyze_axis(const NdArray& in, std::size_t axis, const FilterBank& fb,
                     std::size_t dilation, NdArray& approx, NdArray& detail);
NdArray ti_synthesize_axis(const NdArray& approx, const NdArray& detail,
                           std::size_t axis, const FilterBank& fb,
                           std::size_t dilation);

}  // namespace stages

}  // namespace bihaar
