#include "bihaar/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bihaar/errors.hpp"

namespace bihaar {

namespace {

void check_lz(double lambda_j, double z, const char* op) {
    if (!(lambda_j >= 0.0) || !std::isfinite(lambda_j))
        throw domain_error(std::string(op) + ": lambda_j must be finite and >= 0");
    if (!(z > 0.0) || !std::isfinite(z))
        throw domain_error(std::string(op) + ": z must be finite and > 0");
}

// Largest real root of t^3 + a t^2 + b t + c.
double cubic_largest_root(double a, double b, double c) {
    const double p = b - a * a / 3.0;
    const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    const double disc = q * q / 4.0 + p * p * p / 27.0;
    double y;
    if (disc >= 0.0) {
        const double s = std::sqrt(disc);
        y = std::cbrt(-q / 2.0 + s) + std::cbrt(-q / 2.0 - s);
    } else {
        const double rho = std::sqrt(-p * p * p / 27.0);
        const double theta = std::acos(std::clamp(-q / (2.0 * rho), -1.0, 1.0));
        const double mag = 2.0 * std::sqrt(-p / 3.0);
        y = mag * std::cos(theta / 3.0);  // largest of the three
    }
    return y - a / 3.0;
}

// Real roots (with multiplicity) of the monic quartic
// u^4 + b u^3 + c u^2 + d u + e, by Ferrari factorization into quadratics.
std::vector<double> quartic_real_roots(double b, double c, double d, double e) {
    const double p = c - 3.0 * b * b / 8.0;
    const double q = d - b * c / 2.0 + b * b * b / 8.0;
    const double r = e - b * d / 4.0 + b * b * c / 16.0 - 3.0 * b * b * b * b / 256.0;
    const double shift = -b / 4.0;
    const double mag = 1.0 + std::abs(p) + std::abs(q) + std::abs(r);

    std::vector<double> roots;
    auto push_quad = [&](double bb, double cc) {
        // y^2 + bb y + cc = 0; near-zero negative discriminants are treated
        // as double roots (squaring step of the derivation creates them).
        double disc = bb * bb - 4.0 * cc;
        if (disc < 0.0 && disc > -1e-10 * (bb * bb + std::abs(cc) + 1.0)) disc = 0.0;
        if (disc < 0.0) return;
        const double s = std::sqrt(disc);
        roots.push_back((-bb - s) / 2.0 + shift);
        roots.push_back((-bb + s) / 2.0 + shift);
    };

    if (std::abs(q) <= 1e-14 * mag) {
        // biquadratic: w^2 + p w + r with y = +-sqrt(w)
        double disc = p * p - 4.0 * r;
        if (disc < 0.0 && disc > -1e-12 * mag * mag) disc = 0.0;
        if (disc >= 0.0) {
            const double s = std::sqrt(disc);
            for (double w : {(-p - s) / 2.0, (-p + s) / 2.0}) {
                if (w < 0.0 && w > -1e-12 * mag) w = 0.0;
                if (w >= 0.0) {
                    roots.push_back(-std::sqrt(w) + shift);
                    roots.push_back(std::sqrt(w) + shift);
                }
            }
        }
        return roots;
    }

    const double t = cubic_largest_root(2.0 * p, p * p - 4.0 * r, -q * q);
    if (t <= 0.0) return roots;  // squaring artifact; no real factorization
    const double alpha = std::sqrt(t);
    const double g1 = (p + t - q / alpha) / 2.0;
    const double g2 = (p + t + q / alpha) / 2.0;
    push_quad(alpha, g1);
    push_quad(-alpha, g2);
    return roots;
}

}  // namespace

PatnaikApprox patnaik_approx(double m_j, double lambda_j) {
    const double num = 2.0 * m_j + lambda_j;
    return PatnaikApprox{(2.0 * m_j + 2.0 * lambda_j) / num,
                         num * num / (2.0 * m_j + 2.0 * lambda_j)};
}

double cltb_threshold(double lambda_j, double z, double c, int j, int q) {
    check_lz(lambda_j, z, "cltb_threshold");
    const double z2 = z * z;
    return std::exp2(-c * j * q - 1.0) *
           (z2 + std::sqrt(z2 * z2 + 4.0 * lambda_j * z2));
}

double fab_feasible_lower_bound(double lambda_j, double z) {
    check_lz(lambda_j, z, "fab_feasible_lower_bound");
    const double z2 = z * z;
    return (z2 - 2.0 * lambda_j + 1.0 +
            std::sqrt(z2 * z2 + (12.0 * lambda_j + 2.0) * z2 +
                      4.0 * lambda_j * lambda_j + 12.0 * lambda_j + 1.0)) /
           8.0;
}

double fab_g(double m_j, double lambda_j) {
    const double t = 2.0 * m_j + lambda_j;
    const double den = m_j + lambda_j;
    const double f2m1 = t * t / den - 1.0;
    return std::sqrt(std::max(f2m1, 0.0)) - std::sqrt(lambda_j * t / den);
}

double fab_solve_m(double lambda_j, double z) {
    check_lz(lambda_j, z, "fab_solve_m");
    if (lambda_j == 0.0) return (z * z + 1.0) / 4.0;
    const double lo0 = fab_feasible_lower_bound(lambda_j, z);
    if (fab_g(lo0, lambda_j) >= z) return lo0;  // root sits on the bound
    double lo = lo0;
    double hi = std::max(lo0, 0.25) * 2.0;
    for (int i = 0; i < 300 && fab_g(hi, lambda_j) < z; ++i) hi *= 2.0;

    // G is strictly increasing on [m_lb, inf); plain bisection converges
    // safely and 200 halvings push |G - z| far below 1e-10.
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (fab_g(mid, lambda_j) < z)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double fab_quartic_value(double lambda_j, double z, double m) {
    const double z1 = z * z + 1.0;
    const double l = lambda_j;
    const double a3 = 16.0 * l - 8.0 * z1;
    const double a2 = z1 * z1 - (20.0 * z * z + 12.0) * l + 4.0 * l * l;
    const double a1 = 2.0 * z1 * z1 * l - 16.0 * z * z * l * l - 4.0 * l * l;
    const double a0 = z1 * z1 * l * l - 4.0 * z * z * l * l * l;
    return (((16.0 * m + a3) * m + a2) * m + a1) * m + a0;
}

double fab_quartic_scale(double lambda_j, double z, double m) {
    const double z1 = z * z + 1.0;
    const double l = lambda_j;
    const double a3 = std::abs(16.0 * l - 8.0 * z1);
    const double a2 = std::abs(z1 * z1 - (20.0 * z * z + 12.0) * l + 4.0 * l * l);
    const double a1 =
        std::abs(2.0 * z1 * z1 * l) + 16.0 * z * z * l * l + 4.0 * l * l;
    const double a0 = z1 * z1 * l * l + 4.0 * z * z * l * l * l;
    const double am = std::abs(m);
    return (((16.0 * am + a3) * am + a2) * am + a1) * am + a0;
}

std::vector<double> fab_quartic_roots(double lambda_j, double z) {
    check_lz(lambda_j, z, "fab_quartic_roots");
    const double z1 = z * z + 1.0;
    if (lambda_j == 0.0) return {0.0, 0.0, z1 / 4.0, z1 / 4.0};  // m^2 (4m - z1)^2

    // Monic quartic in the scaled variable u = m / (1 + lambda_j).
    const double s = 1.0 + lambda_j;
    const double l = lambda_j;
    const double b = (16.0 * l - 8.0 * z1) / (16.0 * s);
    const double c =
        (z1 * z1 - (20.0 * z * z + 12.0) * l + 4.0 * l * l) / (16.0 * s * s);
    const double d = (2.0 * z1 * z1 * l - 16.0 * z * z * l * l - 4.0 * l * l) /
                     (16.0 * s * s * s);
    const double e =
        (z1 * z1 * l * l - 4.0 * z * z * l * l * l) / (16.0 * s * s * s * s);

    std::vector<double> roots = quartic_real_roots(b, c, d, e);
    for (double& u : roots) {
        double m = u * s;
        // Newton polish on the original quartic; keep the best iterate.
        double best = m, bestv = std::abs(fab_quartic_value(l, z, m));
        for (int it = 0; it < 6; ++it) {
            const double h = std::max(1e-9, 1e-9 * std::abs(m));
            const double f = fab_quartic_value(l, z, m);
            const double fp =
                (fab_quartic_value(l, z, m + h) - fab_quartic_value(l, z, m - h)) /
                (2.0 * h);
            if (fp == 0.0) break;
            m -= f / fp;
            const double v = std::abs(fab_quartic_value(l, z, m));
            if (v < bestv) {
                bestv = v;
                best = m;
            } else {
                break;
            }
        }
        u = best;
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

double fab_threshold(double lambda_j, double z, double c, int j, int q) {
    return std::exp2(-c * j * q) * fab_solve_m(lambda_j, z);
}

double universal_z(std::size_t n_j) {
    if (n_j < 2) throw domain_error("universal_z: N_j must be >= 2");
    return std::sqrt(2.0 * std::log(double(n_j)));
}

double integerize_threshold(double t_j, double c, int j, int q) {
    if (!(t_j > 0.0)) throw domain_error("integerize_threshold: t_j must be > 0");
    const double scale = std::exp2(c * j * q);
    return std::ceil(scale * t_j) / scale;
}

long long critical_k0(ThresholdMethod method, double lambda_j, double z) {
    const double m = method == ThresholdMethod::FAB
                         ? fab_solve_m(lambda_j, z)
                         : (z * z + std::sqrt(z * z * z * z +
                                              4.0 * lambda_j * z * z)) / 2.0;
    const long long k0 = (long long)std::ceil(m);
    return k0 < 1 ? 1 : k0;
}

}  // namespace bihaar
