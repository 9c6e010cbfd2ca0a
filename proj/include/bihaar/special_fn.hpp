#pragma once

#include <vector>

namespace bihaar {

// Intensities of the two Poisson components of a difference X1 - X2.
// The symmetric case mu1 == mu2 == lambda is the null model of a Haar
// detail coefficient.
struct SkellamParams {
    double mu1 = 0.0;
    double mu2 = 0.0;
};

// e^{-x} I_n(x) for integer order n >= 0, x >= 0.
// Relative error <= 1e-12 over x in [0, 1e6]; the exponential scaling keeps
// the value representable for large x.
double bessel_i_scaled(int n, double x);

// e^{-x} I_n(x) for all n in [0, n_max] from a single backward-recurrence
// pass; cheaper than n_max+1 scalar calls when whole tails are needed.
std::vector<double> bessel_i_scaled_table(int n_max, double x);

// Pr(X1 - X2 = n), X1 ~ Poisson(mu1), X2 ~ Poisson(mu2) independent.
double skellam_pmf(long long n, const SkellamParams& p);

// Pr(X1 - X2 >= k0), k0 >= 1. Series of pmf terms, truncated once the
// running term is below 1e-15 of the accumulated sum past the mode.
double skellam_tail(long long k0, const SkellamParams& p);

// Pr(X1 - X2 >= t) for any integer t (t <= 0 resolved by symmetry against
// the swapped-parameter tail). Convenience for bound computations.
double skellam_tail_any(long long t, const SkellamParams& p);

// Phi^{-1}(p) for p in (0,1). Wichura's AS 241 rational approximations,
// absolute error far below the 1e-10 contract.
double normal_quantile(double p);

// 1 - Phi(x).
double normal_sf(double x);

}  // namespace bihaar
