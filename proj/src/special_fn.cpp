#include "bihaar/special_fn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bihaar/errors.hpp"

namespace bihaar {

namespace {

// Scaled power series: e^{-x} (x/2)^n / n! * sum_k (x^2/4)^k / (k! (n+k)_k).
// All terms positive, so no cancellation; used for small x where the term
// count stays modest for any order.
double scaled_series(int n, double x) {
    const double logpref = n * std::log(x / 2.0) - std::lgamma(double(n) + 1.0) - x;
    if (logpref < -745.0) return 0.0;  // below double underflow
    const double x2q = x * x / 4.0;
    double term = 1.0, sum = 1.0;
    for (int k = 1; k < 500; ++k) {
        term *= x2q / (double(k) * (double(n) + k));
        sum += term;
        if (term < 1e-17 * sum) break;
    }
    return std::exp(logpref) * sum;
}

// Miller backward recurrence normalized with e^x = I_0 + 2 sum_{k>=1} I_k.
// Fills out[k] = e^{-x} I_k(x) for k = 0..n_max. Start order carries enough
// margin that the contaminating second solution is suppressed below 1e-15.
void miller_table(int n_max, double x, std::vector<double>& out) {
    const int start =
        std::max(n_max, int(std::ceil(std::sqrt(90.0 * x)))) + 60;
    std::vector<double> u(std::size_t(start) + 1, 0.0);
    double up = 0.0;   // u_{k+1}
    double uc = 1.0;   // u_k
    u[start] = uc;
    double norm = 0.0;
    for (int k = start; k >= 1; --k) {
        const double um = up + (2.0 * k / x) * uc;
        up = uc;
        uc = um;
        norm += 2.0 * up;  // accumulates u_k for k >= 1
        u[k - 1] = uc;
        if (std::abs(uc) > 1e270) {
            const double s = 1e-270;
            uc *= s;
            up *= s;
            norm *= s;
            for (int m = k - 1; m <= start; ++m) u[m] *= s;
        }
    }
    norm += u[0];
    out.resize(std::size_t(n_max) + 1);
    for (int k = 0; k <= n_max; ++k) out[k] = u[k] / norm;
}

double poisson_pmf(long long k, double mu) {
    if (k < 0) return 0.0;
    if (mu == 0.0) return k == 0 ? 1.0 : 0.0;
    const double lp = double(k) * std::log(mu) - mu - std::lgamma(double(k) + 1.0);
    return lp < -745.0 ? 0.0 : std::exp(lp);
}

// Pr(X >= k0) for X ~ Poisson(mu), k0 >= 1.
double poisson_tail(long long k0, double mu) {
    double term = poisson_pmf(k0, mu);
    double sum = term;
    long long n = k0;
    while (true) {
        ++n;
        term *= mu / double(n);
        sum += term;
        if (double(n) > mu && (term == 0.0 || term < 1e-15 * sum)) break;
    }
    return sum;
}

void check_params(const SkellamParams& p) {
    if (!(p.mu1 >= 0.0) || !std::isfinite(p.mu1) || !(p.mu2 >= 0.0) ||
        !std::isfinite(p.mu2))
        throw domain_error("SkellamParams: mu1, mu2 must be finite and >= 0");
}

}  // namespace

double bessel_i_scaled(int n, double x) {
    if (n < 0) throw domain_error("bessel_i_scaled: order must be >= 0");
    if (!(x >= 0.0)) throw domain_error("bessel_i_scaled: argument must be >= 0");
    if (x == 0.0) return n == 0 ? 1.0 : 0.0;
    if (x <= 20.0) return scaled_series(n, x);
    std::vector<double> tab;
    miller_table(n, x, tab);
    return tab[std::size_t(n)];
}

std::vector<double> bessel_i_scaled_table(int n_max, double x) {
    if (n_max < 0) throw domain_error("bessel_i_scaled_table: order must be >= 0");
    if (!(x >= 0.0)) throw domain_error("bessel_i_scaled_table: argument must be >= 0");
    std::vector<double> tab(std::size_t(n_max) + 1, 0.0);
    if (x == 0.0) {
        tab[0] = 1.0;
        return tab;
    }
    if (x <= 20.0) {
        for (int k = 0; k <= n_max; ++k) tab[std::size_t(k)] = scaled_series(k, x);
        return tab;
    }
    miller_table(n_max, x, tab);
    return tab;
}

double skellam_pmf(long long n, const SkellamParams& p) {
    check_params(p);
    if (p.mu1 == 0.0 && p.mu2 == 0.0) return n == 0 ? 1.0 : 0.0;
    if (p.mu2 == 0.0) return poisson_pmf(n, p.mu1);
    if (p.mu1 == 0.0) return poisson_pmf(-n, p.mu2);
    const double s1 = std::sqrt(p.mu1), s2 = std::sqrt(p.mu2);
    const double x = 2.0 * s1 * s2;
    const double logpref =
        -(s1 - s2) * (s1 - s2) + 0.5 * double(n) * (std::log(p.mu1) - std::log(p.mu2));
    if (logpref < -745.0) return 0.0;
    const int an = int(n < 0 ? -n : n);
    return std::exp(logpref) * bessel_i_scaled(an, x);
}

double skellam_tail(long long k0, const SkellamParams& p) {
    check_params(p);
    if (k0 < 1) throw domain_error("skellam_tail: k0 must be >= 1");
    if (p.mu1 == 0.0) return 0.0;  // X1 - X2 <= 0 almost surely
    if (p.mu2 == 0.0) return poisson_tail(k0, p.mu1);

    const double s1 = std::sqrt(p.mu1), s2 = std::sqrt(p.mu2);
    const double x = 2.0 * s1 * s2;
    const double base = -(s1 - s2) * (s1 - s2);
    const double halflog = 0.5 * (std::log(p.mu1) - std::log(p.mu2));
    const double mode = p.mu1 + p.mu2;

    // Estimate the order range once, extend in the unlikely case the
    // truncation criterion is not yet met at the table end.
    long long n_hi =
        k0 + (long long)std::ceil(mode + 12.0 * std::sqrt(mode + 1.0)) + 60;
    while (true) {
        std::vector<double> tab = bessel_i_scaled_table(int(n_hi), x);
        double sum = 0.0;
        bool converged = false;
        for (long long n = k0; n <= n_hi; ++n) {
            const double lp = base + halflog * double(n);
            const double term = lp < -745.0 ? 0.0 : std::exp(lp) * tab[std::size_t(n)];
            sum += term;
            if (double(n) > mode && (term == 0.0 || term < 1e-15 * sum)) {
                converged = true;
                break;
            }
        }
        if (converged || sum == 0.0) return sum;
        n_hi = n_hi * 3 / 2 + 64;
    }
}

double skellam_tail_any(long long t, const SkellamParams& p) {
    if (t >= 1) return skellam_tail(t, p);
    // Pr(X1-X2 >= t) = 1 - Pr(X1-X2 <= t-1) = 1 - Pr(X2-X1 >= 1-t)
    return 1.0 - skellam_tail(1 - t, SkellamParams{p.mu2, p.mu1});
}

// AS 241 (Wichura 1988), PPND16: rational approximations on two regions.
double normal_quantile(double p) {
    if (!(p > 0.0) || !(p < 1.0))
        throw domain_error("normal_quantile: p must lie in (0,1)");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            (((((((2.5090809287301226727e+3 * r + 3.3430575583588128105e+4) * r +
                  6.7265770927008700853e+4) * r + 4.5921953931549871457e+4) * r +
                1.3731693765509461125e+4) * r + 1.9715909503065514427e+3) * r +
              1.3314166789178437745e+2) * r + 3.3871328727963666080e0);
        const double den =
            (((((((5.2264952788528545610e+3 * r + 2.8729085735721942674e+4) * r +
                  3.9307895800092710610e+4) * r + 2.1213794301586595867e+4) * r +
                5.3941960214247511077e+3) * r + 6.8718700749205790830e+2) * r +
              4.2313330701600911252e+1) * r + 1.0);
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
                  2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
                3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
              4.63033784615654529590e0) * r + 1.42343711074968357734e0);
        const double den =
            (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
                  1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
                6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
              2.05319162663775882187e0) * r + 1.0);
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                  1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
                2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
              5.46378491116411436990e0) * r + 6.65790464350110377720e0);
        const double den =
            (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
                  1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
                1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
              5.99832206555887937690e-1) * r + 1.0);
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

double normal_sf(double x) {
    return 0.5 * std::erfc(x * 0.7071067811865475244);
}

}  // namespace bihaar
