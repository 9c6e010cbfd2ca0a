#pragma once

#include <string>

#include "bihaar/denoise.hpp"
#include "bihaar/nd_array.hpp"

namespace bihaar {

// 1D CSV: one value per line, LF endings, '.' decimal point.
NdArray read_csv_1d(const std::string& path);
void write_csv_1d(const std::string& path, const NdArray& x);

// PGM P2 (ASCII) and P5 (binary; 2-byte big-endian samples when maxval > 255).
NdArray read_pgm(const std::string& path);
void write_pgm(const std::string& path, const NdArray& img, unsigned maxval = 65535,
               bool binary = false);

// BHV1 volume: ASCII header "BHV1 nx ny nnu {u32|f64}\n" followed by a
// little-endian payload, x fastest, then y, then nu.
enum class Bhv1Type { U32, F64 };
NdArray read_bhv1(const std::string& path);
void write_bhv1(const std::string& path, const NdArray& volume, Bhv1Type type);

// JSON rendering of a denoising report.
std::string report_to_json(const DenoiseReport& report);

}  // namespace bihaar
