#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bihaar/nd_array.hpp"
#include "bihaar/pyramid.hpp"
#include "bihaar/thresholds.hpp"

namespace bihaar {

enum class TransformKind { Haar, BiHaar, TiHaar };

enum class SelectionMode { Fpr, Universal, BhFdr };

struct DenoiseConfig {
    TransformKind transform = TransformKind::BiHaar;
    Scheme scheme = Scheme::OneD;
    int levels = 1;      // J, or J_xy for 2D+1D
    int levels_nu = 0;   // J_nu, 2D+1D only
    double alpha = 1e-3;
    ThresholdMethod method = ThresholdMethod::FAB;
    SelectionMode mode = SelectionMode::Fpr;
    double fdr_q = 0.05;                 // BH-FDR rate
    std::optional<double> known_lambda;  // constant intensity when known
    double c = 0.0;                      // filter normalization exponent
};

struct BandReport {
    std::string label;
    int stages = 0;
    std::size_t tested = 0;
    std::size_t kept = 0;
    double lambda_min = 0.0, lambda_median = 0.0, lambda_max = 0.0;
    long long k0_min = 0, k0_max = 0;  // resolved lattice thresholds (0 in BH mode)
    double z = 0.0;
    double seconds = 0.0;  // time spent testing this band
};

struct DenoiseReport {
    std::string transform, scheme, method, mode;
    double alpha = 0.0, c = 0.0, fdr_q = 0.0;
    bool lambda_known = false;
    double lambda_value = 0.0;
    int levels = 0, levels_nu = 0;
    std::vector<BandReport> bands;
    double seconds_total = 0.0;
    double seconds_testing = 0.0;    // sum over bands
    double seconds_transform = 0.0;  // analysis + synthesis stages
    // Filled by front-ends that pad non-dyadic inputs.
    std::vector<std::size_t> original_dims, padded_dims, pad_left;
};

struct DenoiseResult {
    NdArray estimate;
    DenoiseReport report;
};

// Coarse-to-fine hypothesis-test denoising: forward transform, then per
// scale (coarsest first) estimate the local intensity from the running
// approximation, zero detail coefficients that fail the test, reconstruct
// one stage; final positivity projection.
DenoiseResult denoise(const CountGrid& counts, const DenoiseConfig& config);

// lambda_hat = max(2^{c L} a, 0) elementwise, or the constant 2^L lambda
// when the intensity is known. L is the band's elementary stage count.
NdArray estimate_lambda(const NdArray& approx, double c, int stages,
                        std::optional<double> known_lambda);

struct BandTest {
    ThresholdMethod method = ThresholdMethod::FAB;
    double z = 0.0;
    double c = 0.0;
    int stages = 0;
    bool bihaar_lattice = false;  // compare round(8 2^{cL}|d|/r) >= ceil(8 k0/r)
    double r = 1.0;
};

// Hard-thresholds `band` in place against per-location critical values
// derived from lambda_hat; optionally emits the kept mask and band stats.
void threshold_band(NdArray& band, const NdArray& lambda_hat, const BandTest& test,
                    std::vector<std::uint8_t>* kept_mask, BandReport* report);

// Two-sided Haar p-value at the integerized statistic k = round(2^{cL}|d|);
// 1.0 when k == 0. Also used for Bi-Haar coefficients (bounded surrogate).
double coefficient_pvalue(double d, double lambda_hat, double c, int stages);

// Benjamini-Hochberg step-up selection; returns the kept mask.
std::vector<std::uint8_t> bh_fdr_select(const std::vector<double>& pvalues,
                                        double q_fdr);

}  // namespace bihaar
