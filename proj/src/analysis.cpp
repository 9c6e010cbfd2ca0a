#include "bihaar/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bihaar/errors.hpp"
#include "bihaar/rng.hpp"
#include "bihaar/special_fn.hpp"

namespace bihaar {

namespace {

constexpr double kBiHaarR = 0.98473192783466186;  // (1 + 2^-5)^{-1/2}

// Tails of U ~ Skellam(mu, mu) for a whole range of integer arguments at
// once: tails[t] = Pr(U >= t) for t in [1, t_max], built backward from a
// single scaled-Bessel table.
std::vector<double> skellam_tail_table(long long t_max, double mu) {
    const double x = 2.0 * mu;
    const long long t_top =
        std::max(t_max, (long long)std::ceil(x)) +
        (long long)std::ceil(12.0 * std::sqrt(x + 1.0)) + 100;
    std::vector<double> pmf = bessel_i_scaled_table(int(t_top), x);
    std::vector<double> tails(std::size_t(t_max) + 1, 0.0);
    double run = 0.0;
    for (long long n = t_top; n >= 1; --n) {
        run += pmf[std::size_t(n)];
        if (n <= t_max) tails[std::size_t(n)] = run;
    }
    return tails;
}

// Pr(U + 8 V >= n0), U ~ Skellam(mu_u, mu_u), V ~ Skellam(mu_v, mu_v).
// The outer sum runs until its missing mass is below 1e-14 AND it has
// passed the k ~ n0/8 region where the summand peaks when intensities are
// tiny (pmf_V climbs against the U tail there); beyond that the factorial
// decay of pmf_V makes the remainder relatively negligible.
double u_plus_8v_tail(long long n0, double mu_u, double mu_v) {
    // outer pmf table: e^{-2 mu_v} I_k(2 mu_v)
    const double xv = 2.0 * mu_v;
    const long long k_spread =
        (long long)std::ceil(xv + 12.0 * std::sqrt(xv + 1.0)) + 40;
    const long long k_peak = (std::max<long long>(n0, 0) + 7) / 8;
    const long long k_cap = k_peak + k_spread + 20;
    std::vector<double> outer = bessel_i_scaled_table(int(k_cap), xv);

    long long k_max = 0;
    double mass = outer[0];
    while (k_max < k_cap &&
           (1.0 - mass > 1e-14 || k_max < k_peak + k_spread)) {
        ++k_max;
        mass += 2.0 * outer[std::size_t(k_max)];
    }

    const long long t_max = n0 + 8 * k_max;
    std::vector<double> tails =
        skellam_tail_table(std::max<long long>(t_max, 1), mu_u);
    auto tail_any = [&](long long t) -> double {
        if (t >= 1) return tails[std::size_t(t)];
        return 1.0 - tails[std::size_t(1 - t)];
    };

    double sum = outer[0] * tail_any(n0);
    for (long long k = 1; k <= k_max; ++k)
        sum += outer[std::size_t(k)] * (tail_any(n0 - 8 * k) + tail_any(n0 + 8 * k));
    return sum;
}

void check_lambda(double lambda_j, const char* op) {
    if (!(lambda_j >= 0.0) || !std::isfinite(lambda_j))
        throw domain_error(std::string(op) + ": lambda_j must be finite and >= 0");
}

}  // namespace

double p_haar(long long k0, double lambda_j) {
    check_lambda(lambda_j, "p_haar");
    if (k0 < 1) throw domain_error("p_haar: k0 must be >= 1");
    return skellam_tail(k0, SkellamParams{lambda_j / 2.0, lambda_j / 2.0});
}

double p_bihaar_exact(long long k0, double lambda_j) {
    check_lambda(lambda_j, "p_bihaar_exact");
    if (k0 < 1) throw domain_error("p_bihaar_exact: k0 must be >= 1");
    if (lambda_j == 0.0) return 0.0;
    const long long n0 = (long long)std::ceil(8.0 * double(k0) / kBiHaarR);
    return u_plus_8v_tail(n0, lambda_j, lambda_j / 2.0);
}

double bound_A(double lambda_j) {
    check_lambda(lambda_j, "bound_A");
    if (lambda_j == 0.0) return 0.0;
    // 1/2 [1 - e^{-2L}(I_0 + 2 sum_1^8 I_m)] == e^{-2L} sum_{n>=9} I_n(2L),
    // summed from the tail end to dodge the cancellation at small L.
    return skellam_tail(9, SkellamParams{lambda_j, lambda_j});
}

double bound_B(double lambda_j, int K) {
    check_lambda(lambda_j, "bound_B");
    if (K < 8) throw domain_error("bound_B: K must be >= 8");
    if (lambda_j == 0.0) return 0.0;
    const double mu = 2.0 * lambda_j;  // per-side intensity of U and V

    double b = u_plus_8v_tail(65, mu, mu);

    // + 1/2 Pr(|U + 8V| <= 64, |V| > K) = sum_{k>K} P(V=k) Pr(8k-64 <= U <= 8k+64)
    const double xv = 2.0 * mu;
    const SkellamParams sym{mu, mu};
    std::vector<double> tails = skellam_tail_table(8 * (K + 64) + 80, mu);
    auto tail_at = [&](long long t) -> double {
        if (t < (long long)tails.size()) return tails[std::size_t(t)];
        return skellam_tail(t, sym);
    };
    double acc = 0.0;
    for (long long k = K + 1;; ++k) {
        const double pv = skellam_pmf(k, SkellamParams{mu, mu});
        const double term = pv * (tail_at(8 * k - 64) - tail_at(8 * k + 65));
        acc += term;
        if ((term == 0.0 || term < 1e-16 * (b + acc)) && double(k) > xv) break;
    }
    return b + acc;
}

double bound_B_residual(double lambda_j, int K) {
    check_lambda(lambda_j, "bound_B_residual");
    if (K < 8) throw domain_error("bound_B_residual: K must be >= 8");
    if (lambda_j == 0.0) return 0.0;
    const double mu = 2.0 * lambda_j;
    return skellam_tail(K + 1, SkellamParams{mu, mu});
}

TailBoundReport verify_tail_bound(const std::vector<double>& lambda_grid,
                                  const std::vector<long long>& k0_grid) {
    if (lambda_grid.empty() || k0_grid.empty())
        throw domain_error("verify_tail_bound: grids must be nonempty");
    TailBoundReport rep;
    for (double lam : lambda_grid) {
        const double a = bound_A(lam);
        for (long long k0 : k0_grid) {
            const double ph = p_haar(k0, lam);
            const double pbh = p_bihaar_exact(k0, lam);
            const double bound = ph + a * (1.0 - 2.0 * ph);
            ++rep.points;
            if (pbh > bound + 1e-12)
                rep.violations.push_back({lam, k0, ph, pbh, bound});
            if (lam > 0.0 && !(pbh < ph))
                rep.not_below_haar.push_back({lam, k0, ph, pbh, bound});
        }
    }
    return rep;
}

double nmise(const std::vector<NdArray>& estimates, const NdArray& truth) {
    if (estimates.empty()) throw domain_error("nmise: need at least one estimate");
    for (double t : truth.data)
        if (!(t > 0.0)) throw domain_error("nmise: truth must be strictly positive");
    const double n = double(truth.size());
    double acc = 0.0;
    for (const NdArray& est : estimates) {
        if (!est.same_shape(truth)) throw size_error("nmise: shape mismatch");
        double s = 0.0;
        for (std::size_t i = 0; i < est.size(); ++i) {
            const double d = est[i] - truth[i];
            s += d * d / truth[i];
        }
        acc += s / n;
    }
    return acc / double(estimates.size());
}

NdArray gen_smooth(double peak, std::size_t length) {
    if (!(peak > 0.0)) throw domain_error("gen_smooth: peak must be > 0");
    if (length == 0) throw domain_error("gen_smooth: length must be > 0");
    NdArray out({length});
    constexpr double kTwoPi = 6.283185307179586477;
    double base_max = 0.0;
    for (std::size_t i = 0; i < length; ++i) {
        const double x = (double(i) + 0.5) / double(length);
        const double b = 0.55 * (1.0 + std::cos(kTwoPi * (x - 0.30))) +
                         0.35 * (1.0 + std::cos(2.0 * kTwoPi * (x - 0.75)));
        out[i] = b;
        base_max = std::max(base_max, b);
    }
    const double off = base_max / 15.0;  // keeps min/max >= 1/16 > 1/20
    const double scale = peak / (base_max + off);
    for (double& v : out.data) v = (v + off) * scale;
    return out;
}

std::vector<double> amplitude_schedule(const HyperspectralSpec& spec) {
    std::vector<double> a(spec.n_nu, spec.amp_first);
    if (spec.n_nu <= 1) return a;
    if (spec.schedule == AmpSchedule::Geometric) {
        const double ratio =
            std::log(spec.amp_last / spec.amp_first) / double(spec.n_nu - 1);
        for (std::size_t v = 0; v < spec.n_nu; ++v)
            a[v] = spec.amp_first * std::exp(ratio * double(v));
    } else {
        const double step =
            (spec.amp_last - spec.amp_first) / double(spec.n_nu - 1);
        for (std::size_t v = 0; v < spec.n_nu; ++v)
            a[v] = spec.amp_first + step * double(v);
    }
    return a;
}

NdArray gen_hyperspectral(const HyperspectralSpec& spec) {
    if (spec.nx == 0 || spec.ny == 0 || spec.n_nu == 0)
        throw domain_error("gen_hyperspectral: dims must be positive");
    const std::vector<double> amp = amplitude_schedule(spec);
    NdArray vol({spec.n_nu, spec.ny, spec.nx});
    const double cx = (double(spec.nx) - 1.0) / 2.0;
    const double cy = (double(spec.ny) - 1.0) / 2.0;
    const double inv2s2 = 1.0 / (2.0 * spec.sigma * spec.sigma);
    for (std::size_t v = 0; v < spec.n_nu; ++v)
        for (std::size_t y = 0; y < spec.ny; ++y)
            for (std::size_t x = 0; x < spec.nx; ++x) {
                const double dx = double(x) - cx, dy = double(y) - cy;
                vol.at3(v, y, x) =
                    spec.background + amp[v] * std::exp(-(dx * dx + dy * dy) * inv2s2);
            }
    return vol;
}

std::vector<std::uint8_t> source_mask(const HyperspectralSpec& spec) {
    std::vector<std::uint8_t> mask(spec.ny * spec.nx, 0);
    const double cx = (double(spec.nx) - 1.0) / 2.0;
    const double cy = (double(spec.ny) - 1.0) / 2.0;
    const double r2 = spec.mask_radius_sigmas * spec.sigma *
                      spec.mask_radius_sigmas * spec.sigma;
    for (std::size_t y = 0; y < spec.ny; ++y)
        for (std::size_t x = 0; x < spec.nx; ++x) {
            const double dx = double(x) - cx, dy = double(y) - cy;
            if (dx * dx + dy * dy <= r2) mask[y * spec.nx + x] = 1;
        }
    return mask;
}

std::vector<double> flux(const NdArray& volume, const std::vector<std::uint8_t>& mask,
                         double background) {
    if (volume.rank() != 3) throw size_error("flux: volume must be 3-D");
    const std::size_t plane = volume.dims[1] * volume.dims[2];
    if (mask.size() != plane) throw size_error("flux: mask/plane size mismatch");
    if (std::find(mask.begin(), mask.end(), std::uint8_t(1)) == mask.end())
        throw domain_error("flux: mask is empty");
    std::vector<double> s(volume.dims[0], 0.0);
    for (std::size_t v = 0; v < volume.dims[0]; ++v) {
        double acc = 0.0;
        const double* p = volume.data.data() + v * plane;
        for (std::size_t i = 0; i < plane; ++i)
            if (mask[i]) acc += p[i] - background;
        s[v] = acc;
    }
    return s;
}

double flux_loss(const std::vector<double>& s_hat, const std::vector<double>& s) {
    if (s_hat.size() != s.size() || s.empty())
        throw size_error("flux_loss: curve length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = s_hat[i] - s[i];
        acc += d * d;
    }
    return std::sqrt(acc / double(s.size()));
}

CountGrid sample_poisson(const NdArray& intensity, std::uint64_t seed,
                         std::uint64_t replicate) {
    CountGrid counts(intensity.dims);
    for (std::size_t i = 0; i < intensity.size(); ++i) {
        const double mu = intensity[i];
        if (!(mu >= 0.0) || !std::isfinite(mu))
            throw domain_error("sample_poisson: intensity must be finite and >= 0");
        CounterRng rng(seed, replicate, i);
        counts[i] = double(rng.poisson(mu));
    }
    return counts;
}

namespace {

struct AxisSpan {
    std::size_t outer = 1, n = 1, inner = 1;
    AxisSpan(const std::vector<std::size_t>& dims, std::size_t axis) {
        n = dims[axis];
        for (std::size_t i = 0; i < axis; ++i) outer *= dims[i];
        for (std::size_t i = axis + 1; i < dims.size(); ++i) inner *= dims[i];
    }
};

}  // namespace

NdArray reflect_pad_axis(const NdArray& in, std::size_t axis, std::size_t left,
                         std::size_t right) {
    const AxisSpan v(in.dims, axis);
    if (left > v.n || right > v.n)
        throw size_error("reflect_pad_axis: pad exceeds axis length");
    std::vector<std::size_t> dims = in.dims;
    dims[axis] = v.n + left + right;
    NdArray out(dims);
    for (std::size_t o = 0; o < v.outer; ++o)
        for (std::size_t i = 0; i < v.inner; ++i) {
            const double* src = in.data.data() + (o * v.n) * v.inner + i;
            double* dst = out.data.data() + (o * dims[axis]) * v.inner + i;
            for (std::size_t k = 0; k < left; ++k)
                dst[k * v.inner] = src[(left - 1 - k) * v.inner];
            for (std::size_t k = 0; k < v.n; ++k)
                dst[(left + k) * v.inner] = src[k * v.inner];
            for (std::size_t k = 0; k < right; ++k)
                dst[(left + v.n + k) * v.inner] = src[(v.n - 1 - k) * v.inner];
        }
    return out;
}

NdArray crop_axis(const NdArray& in, std::size_t axis, std::size_t left,
                  std::size_t length) {
    const AxisSpan v(in.dims, axis);
    if (left + length > v.n) throw size_error("crop_axis: window out of range");
    std::vector<std::size_t> dims = in.dims;
    dims[axis] = length;
    NdArray out(dims);
    for (std::size_t o = 0; o < v.outer; ++o)
        for (std::size_t i = 0; i < v.inner; ++i) {
            const double* src = in.data.data() + (o * v.n + left) * v.inner + i;
            double* dst = out.data.data() + (o * length) * v.inner + i;
            for (std::size_t k = 0; k < length; ++k)
                dst[k * v.inner] = src[k * v.inner];
        }
    return out;
}

}  // namespace bihaar
