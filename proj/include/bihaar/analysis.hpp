#pragma once

#include <cstdint>
#include <vector>

#include "bihaar/nd_array.hpp"

namespace bihaar {

// Exact tail probability of a Haar detail coefficient under the constant
// null, Pr(d >= 2^{-cj} k0) with total intensity lambda_j over the support.
double p_haar(long long k0, double lambda_j);

// Exact tail of the Bi-Haar coefficient on its 1/8 lattice,
// Pr(X1 - X2 + 8(X3 - X4) >= ceil(8 k0 / r)), X1,2 ~ P(lambda_j),
// X3,4 ~ P(lambda_j/2). Outer sum truncated at 1e-14 mass.
double p_bihaar_exact(long long k0, double lambda_j);

// Bound term A(lambda_j) relating the two tails: the mass e^{-2L} sum_{n>=9}
// I_n(2L), evaluated cancellation-free from the tail end.
double bound_A(double lambda_j);

// Truncated 2D diagonal bound B_K (inner index limited to [-K, K]); K >= 8.
double bound_B(double lambda_j, int K);
// Upper bound on |B - B_K|: outer tail mass beyond K.
double bound_B_residual(double lambda_j, int K);

struct PValuePair {
    double lambda_j = 0.0;
    long long k0 = 0;
    double p_h = 0.0;
    double p_bh = 0.0;
};

struct TailBoundPoint {
    double lambda_j;
    long long k0;
    double p_h, p_bh, bound;
};

struct TailBoundReport {
    std::size_t points = 0;
    std::vector<TailBoundPoint> violations;       // p_bh > bound + 1e-12
    std::vector<TailBoundPoint> not_below_haar;   // p_bh >= p_h (informational)
};

// Checks p_BH <= p_H + A(lambda_j)(1 - 2 p_H) over the grid.
TailBoundReport verify_tail_bound(const std::vector<double>& lambda_grid,
                                  const std::vector<long long>& k0_grid);

// Mean over replicates of (1/N) sum_i (est_i - truth_i)^2 / truth_i.
double nmise(const std::vector<NdArray>& estimates, const NdArray& truth);

// Deterministic smooth strictly-positive test intensity: a fixed mixture of
// two raised cosines over a positive floor, scaled so max == peak and
// min >= peak/16.
NdArray gen_smooth(double peak, std::size_t length);

enum class AmpSchedule { Linear, Geometric };

struct HyperspectralSpec {
    std::size_t nx = 129, ny = 129, n_nu = 64;
    double amp_first = 2.0;  // A_nu at nu = 0
    double amp_last = 1e-4;  // A_nu at nu = n_nu - 1
    AmpSchedule schedule = AmpSchedule::Linear;
    double background = 0.05;  // counts per bin
    double sigma = 4.0;        // spatial Gaussian width in bins
    double mask_radius_sigmas = 3.0;
};

std::vector<double> amplitude_schedule(const HyperspectralSpec& spec);
NdArray gen_hyperspectral(const HyperspectralSpec& spec);
// Disk support mask over one spatial plane (ny*nx bytes, 1 inside).
std::vector<std::uint8_t> source_mask(const HyperspectralSpec& spec);

// Per-band background-subtracted sum over the mask.
std::vector<double> flux(const NdArray& volume, const std::vector<std::uint8_t>& mask,
                         double background);
// (1/sqrt(N)) l2 distance between flux curves.
double flux_loss(const std::vector<double>& s_hat, const std::vector<double>& s);

// Independent Poisson counts per bin; stream keyed by (seed, replicate, bin).
CountGrid sample_poisson(const NdArray& intensity, std::uint64_t seed,
                         std::uint64_t replicate = 0);

// Even (mirror) extension along one axis by left/right samples (each at most
// the axis length). The periodization of the result is continuous, so
// boundary-straddling filters see no artificial edges. crop_axis undoes it.
NdArray reflect_pad_axis(const NdArray& in, std::size_t axis, std::size_t left,
                         std::size_t right);
NdArray crop_axis(const NdArray& in, std::size_t axis, std::size_t left,
                  std::size_t length);

}  // namespace bihaar
