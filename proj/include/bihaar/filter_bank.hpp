#pragma once

#include <cmath>
#include <vector>

namespace bihaar {

enum class Boundary { Periodic };

enum class Wavelet { Haar, BiHaar };

// Two-channel analysis/synthesis bank. Taps are stored as conventionally
// listed, without the 2^{-c} / 2^{c-1} powers, which are applied per stage.
//
// Analysis runs in correlation form,
//   a[k] = 2^{-c} sum_t h[t] x[2k + h_off + t],
// and synthesis scatters the reversed synthesis taps,
//   out[2k + off + t] += 2^{c-1} rev(tap)[t] coeff[k],
// followed by a whole-stage multiplication by 1/r for Bi-Haar (the bank is
// normalized so one factor r enters per analysis stage and must be undone
// per synthesis stage).
struct FilterBank {
    std::vector<double> analysis_low, analysis_high;
    int analysis_low_off = 0, analysis_high_off = 0;
    std::vector<double> synthesis_low, synthesis_high;
    int synthesis_low_off = 0, synthesis_high_off = 0;
    double c = 0.0;
    double r = 1.0;
    Wavelet kind = Wavelet::Haar;

    double analysis_scale() const { return std::exp2(-c); }
    double synthesis_scale() const { return std::exp2(c - 1.0); }
    double stage_r_inv() const { return 1.0 / r; }

    // h = 2^{-c}[1,1], g = 2^{-c}[-1,1]; detail convention
    // d[k] = 2^{-c}(x[2k+1] - x[2k]).
    static FilterBank haar(double c = 0.0) {
        FilterBank fb;
        fb.analysis_low = {1.0, 1.0};
        fb.analysis_high = {-1.0, 1.0};
        fb.synthesis_low = {1.0, 1.0};
        fb.synthesis_high = {1.0, -1.0};
        fb.c = c;
        fb.r = 1.0;
        fb.kind = Wavelet::Haar;
        return fb;
    }

    // h = 2^{-c}[1,1], g = 2^{-c} r [1/8,1/8,-1,1,-1/8,-1/8] with the
    // central -1,+1 taps aligned on the Haar positions 2k, 2k+1.
    static FilterBank bihaar(double c = 0.0) {
        const double r = 1.0 / std::sqrt(1.0 + std::exp2(-5.0));
        FilterBank fb;
        fb.analysis_low = {1.0, 1.0};
        fb.analysis_high = {r / 8, r / 8, -r, r, -r / 8, -r / 8};
        fb.analysis_high_off = -2;
        fb.synthesis_low = {-r / 8, r / 8, r, r, r / 8, -r / 8};
        fb.synthesis_low_off = -2;
        fb.synthesis_high = {1.0, -1.0};
        fb.c = c;
        fb.r = r;
        fb.kind = Wavelet::BiHaar;
        return fb;
    }
};

}  // namespace bihaar
