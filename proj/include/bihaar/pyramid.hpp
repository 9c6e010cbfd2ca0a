#pragma once

#include <string>
#include <vector>

#include "bihaar/filter_bank.hpp"
#include "bihaar/nd_array.hpp"

namespace bihaar {

enum class Scheme { OneD, TwoD, TwoPlusOneD };

enum class Orient { None, Det1D, H, V, D };

inline const char* orient_name(Orient o) {
    switch (o) {
        case Orient::Det1D: return "d";
        case Orient::H: return "H";
        case Orient::V: return "V";
        case Orient::D: return "D";
        default: return "a";
    }
}

// One detail band of a decomposition. For 2D+1D the band is the tensor
// product of a spatial component (approx path or detail at sp_scale with an
// orientation) and a spectral component (approx path or detail at nu_scale).
struct PyrBand {
    bool sp_detail = false;
    int sp_scale = 0;         // spatial depth
    Orient orient = Orient::None;
    bool nu_detail = false;
    int nu_scale = 0;         // spectral depth (0 when scheme has no nu axis)
    NdArray data;

    // Number of elementary one-axis filter stages between the input and this
    // band; the coefficient lattice step is 2^{-c L} and the support of one
    // coefficient covers 2^L input samples.
    int stages(Scheme scheme) const {
        switch (scheme) {
            case Scheme::OneD: return sp_scale;
            case Scheme::TwoD: return 2 * sp_scale;
            default: return 2 * sp_scale + nu_scale;
        }
    }

    std::string label(Scheme scheme) const {
        std::string s;
        if (scheme == Scheme::OneD) return "j" + std::to_string(sp_scale) + ":d";
        s = "j" + std::to_string(sp_scale) + ":" +
            (sp_detail ? orient_name(orient) : "a");
        if (scheme == Scheme::TwoPlusOneD)
            s += "/nu" + std::to_string(nu_scale) + ":" + (nu_detail ? "d" : "a");
        return s;
    }
};

struct Pyramid {
    Scheme scheme = Scheme::OneD;
    FilterBank bank;
    bool undecimated = false;
    std::vector<std::size_t> input_dims;
    int j_spatial = 0;   // J (1D/2D) or J_xy
    int j_spectral = 0;  // J_nu, 2D+1D only
    NdArray approx;      // full approx path (spatial approx x spectral approx)
    std::vector<PyrBand> details;

    std::size_t total_coefficients() const {
        std::size_t n = approx.size();
        for (const auto& b : details) n += b.data.size();
        return n;
    }
};

}  // namespace bihaar
