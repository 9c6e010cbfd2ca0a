#pragma once

#include <cstdint>
#include <vector>

namespace bihaar {

enum class ThresholdMethod { CLTB, FAB };

// Patnaik central-chi-square surrogate for the noncentral chi-square with
// 2 m_j degrees of freedom and noncentrality lambda_j.
struct PatnaikApprox {
    double gamma;  // (2 m_j + 2 lambda_j) / (2 m_j + lambda_j)
    double f;      // (2 m_j + lambda_j)^2 / (2 m_j + 2 lambda_j)
};

PatnaikApprox patnaik_approx(double m_j, double lambda_j);

// Closed-form CLT-based threshold
//   t_j = 2^{-cjq-1} (z^2 + sqrt(z^4 + 4 lambda_j z^2)).
double cltb_threshold(double lambda_j, double z, double c, int j, int q);

// Right-hand side of the FAB feasibility bound for m_j.
double fab_feasible_lower_bound(double lambda_j, double z);

// Fisher-approximation normal deviate as a function of m_j; strictly
// increasing on the feasible region.
double fab_g(double m_j, double lambda_j);

// Unique feasible solution of G(m) = z, by bracketed monotone root-finding;
// |G(m*) - z| <= 1e-10. lambda_j = 0 degenerates to (z^2+1)/4 exactly.
double fab_solve_m(double lambda_j, double z);

// All real roots (with multiplicity) of the quartic derived from G(m) = z
// by squaring twice; cross-check route for fab_solve_m. Solved by Ferrari's
// resolvent-cubic factorization in the conditioned variable m/(1+lambda_j).
std::vector<double> fab_quartic_roots(double lambda_j, double z);

// Quartic evaluated at m (coefficient form), and a magnitude scale for
// residual comparisons.
double fab_quartic_value(double lambda_j, double z, double m);
double fab_quartic_scale(double lambda_j, double z, double m);

// t_j = 2^{-cjq} m_j*.
double fab_threshold(double lambda_j, double z, double c, int j, int q);

// z for the universal (FWER-flavored) threshold, sqrt(2 ln N_j).
double universal_z(std::size_t n_j);

// t~_j = 2^{-cjq} ceil(2^{cjq} t_j).
double integerize_threshold(double t_j, double c, int j, int q);

// Critical value on the integer coefficient lattice, k0 = ceil(m*) where
// m* = 2^{cjq} t_j; independent of c since the solvers work in m units.
long long critical_k0(ThresholdMethod method, double lambda_j, double z);

// Method / FPR / quantile bundle with the per-scale table of resolved
// thresholds, as resolved by a denoising run.
struct ThresholdSpec {
    ThresholdMethod method = ThresholdMethod::FAB;
    double alpha = 1e-3;
    double z = 0.0;  // z_{alpha/2}, or sqrt(2 ln N_j) in universal mode
    double c = 0.0;
    int q = 1;
    struct ScaleEntry {
        int j = 0;
        double lambda_j = 0.0;
        double t_j = 0.0;
        double t_tilde = 0.0;
    };
    std::vector<ScaleEntry> per_scale;
};

}  // namespace bihaar
