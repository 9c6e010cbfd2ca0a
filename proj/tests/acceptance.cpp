// Acceptance suite: one criterion per function, one PASS/FAIL line each,
// exit code = number of failures. Pass the CLI binary path as argv[1].

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "bihaar/analysis.hpp"
#include "bihaar/denoise.hpp"
#include "bihaar/rng.hpp"
#include "bihaar/special_fn.hpp"
#include "bihaar/thresholds.hpp"
#include "bihaar/transforms.hpp"

using namespace bihaar;

namespace {

std::string g_cli = "./bihaar";

struct Check {
    bool ok = true;
    std::string note;
    void fail(const std::string& why) {
        ok = false;
        if (!note.empty()) note += "; ";
        note += why;
    }
};

std::string run_capture(const std::string& cmd) {
    std::string out;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return out;
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    pclose(p);
    return out;
}

// ---- A1: Table 1 reproduction through the CLI -----------------------------

void a1(Check& c) {
    struct Row {
        double lam;
        long long k0;
        double ph, pbh;
    };
    const Row want[] = {
        {0.1, 2, 1.15e-3, 1.17e-4},   {0.1, 3, 1.91e-5, 1.87e-6},
        {0.1, 4, 2.38e-7, 2.28e-8},   {1.0, 4, 1.12e-3, 4.57e-4},
        {1.0, 5, 1.09e-4, 4.34e-5},   {1.0, 6, 8.90e-6, 3.49e-6},
        {10.0, 9, 3.97e-3, 2.48e-3},  {10.0, 12, 2.12e-4, 1.26e-4},
        {10.0, 15, 6.60e-6, 3.78e-6}, {100.0, 20, 2.56e-2, 2.28e-2},
        {100.0, 30, 1.62e-3, 1.39e-3}, {100.0, 40, 4.22e-5, 3.52e-5},
    };
    const std::string out = run_capture(g_cli + " pvalues");
    std::istringstream lines(out);
    std::string line;
    std::getline(lines, line);  // header
    std::size_t matched = 0;
    while (std::getline(lines, line)) {
        double lam, ph, pbh, bound;
        long long k0;
        if (std::sscanf(line.c_str(), "%lf,%lld,%lf,%lf,%lf", &lam, &k0, &ph, &pbh,
                        &bound) != 5) {
            c.fail("unparseable row: " + line);
            return;
        }
        bool found = false;
        for (const Row& w : want)
            if (std::abs(w.lam - lam) < 1e-9 && w.k0 == k0) {
                found = true;
                ++matched;
                if (std::abs(ph - w.ph) / w.ph > 5e-3)
                    c.fail("p_H mismatch at (" + std::to_string(lam) + "," +
                           std::to_string(k0) + ")");
                if (std::abs(pbh - w.pbh) / w.pbh > 5e-3)
                    c.fail("p_BH mismatch at (" + std::to_string(lam) + "," +
                           std::to_string(k0) + ")");
            }
        if (!found) c.fail("unexpected row: " + line);
    }
    if (matched != 12) c.fail("expected 12 rows, matched " + std::to_string(matched));
}

// ---- A2: analytic tail bound over the wide grid ----------------------------

void a2(Check& c) {
    std::vector<double> lams(20);
    for (int i = 0; i < 20; ++i)
        lams[std::size_t(i)] = 0.05 * std::pow(200.0 / 0.05, i / 19.0);
    std::vector<long long> k0s(50);
    for (int i = 0; i < 50; ++i) k0s[std::size_t(i)] = i + 1;
    const TailBoundReport rep = verify_tail_bound(lams, k0s);
    if (!rep.violations.empty())
        c.fail(std::to_string(rep.violations.size()) + " bound violations (of " +
               std::to_string(rep.points) + " points)");
    // strict p_BH < p_H at the Table 1 points
    const double tl[] = {0.1, 1.0, 10.0, 100.0};
    const long long tk[4][3] = {{2, 3, 4}, {4, 5, 6}, {9, 12, 15}, {20, 30, 40}};
    for (int i = 0; i < 4; ++i)
        for (long long k0 : tk[i])
            if (!(p_bihaar_exact(k0, tl[i]) < p_haar(k0, tl[i])))
                c.fail("p_BH !< p_H at (" + std::to_string(tl[i]) + "," +
                       std::to_string(k0) + ")");
}

// ---- A3: empirical FPR control under the constant null --------------------

void a3(Check& c) {
    const int reps = 200, levels = 5;
    const std::size_t n = 4096;
    for (double lam : {0.1, 1.0, 10.0, 100.0}) {
        NdArray field({n}, lam);
        std::vector<CountGrid> samples;
        samples.reserve(reps);
        for (int r = 0; r < reps; ++r)
            samples.push_back(sample_poisson(field, 20240601, std::uint64_t(r)));
        for (double alpha : {1e-2, 1e-3}) {
            DenoiseConfig cfg;
            cfg.transform = TransformKind::BiHaar;
            cfg.method = ThresholdMethod::FAB;
            cfg.levels = levels;
            cfg.alpha = alpha;
            std::vector<std::size_t> kept(levels + 1, 0), tested(levels + 1, 0);
            for (int r = 0; r < reps; ++r) {
                const DenoiseResult res = denoise(samples[std::size_t(r)], cfg);
                for (const auto& b : res.report.bands) {
                    kept[std::size_t(b.stages)] += b.kept;
                    tested[std::size_t(b.stages)] += b.tested;
                }
            }
            for (int j = 1; j <= levels; ++j) {
                const double fpr =
                    double(kept[std::size_t(j)]) / double(tested[std::size_t(j)]);
                const double margin =
                    alpha + 3.0 * std::sqrt(alpha / double(tested[std::size_t(j)]));
                if (fpr > margin) {
                    char buf[160];
                    std::snprintf(buf, sizeof buf,
                                  "lambda=%g alpha=%g scale %d: fpr %.3e > %.3e",
                                  lam, alpha, j, fpr, margin);
                    c.fail(buf);
                }
            }
        }
    }
}

// ---- A4: FAB solver accuracy and quartic cross-check -----------------------

void a4(Check& c) {
    for (double z : {1.0, 2.0, 3.7}) {
        const double m0 = fab_solve_m(0.0, z);
        if (std::abs(m0 - (z * z + 1.0) / 4.0) > 1e-12)
            c.fail("lambda=0 degenerate form off at z=" + std::to_string(z));
    }
    for (int i = 0; i < 20; ++i) {
        const double lam = 0.1 * std::pow(1000.0, i / 19.0);
        for (double z : {1.0, 2.0, 3.7}) {
            const double m = fab_solve_m(lam, z);
            if (std::abs(fab_g(m, lam) - z) > 1e-10)
                c.fail("G residual at lambda=" + std::to_string(lam));
            const std::vector<double> roots = fab_quartic_roots(lam, z);
            const double mlb = fab_feasible_lower_bound(lam, z);
            int feasible = 0;
            double agree = -1.0;
            for (double root : roots)
                if (root >= mlb - 1e-9 * (1.0 + mlb) &&
                    std::abs(fab_g(root, lam) - z) <= 1e-6) {
                    ++feasible;
                    agree = std::abs(root - m) / m;
                }
            if (feasible != 1)
                c.fail("feasible roots != 1 at lambda=" + std::to_string(lam));
            else if (agree > 1e-8)
                c.fail("route disagreement " + std::to_string(agree) + " at lambda=" +
                       std::to_string(lam));
        }
    }
}

// ---- A5: perfect reconstruction, 100 random cases --------------------------

void a5(Check& c) {
    std::uint64_t state = 99;
    auto rnd = [&state]() {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        return state;
    };
    const double cs[3] = {0.0, 0.5, 1.0};
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
        const int scheme = i % 3, bank = (i / 3) % 3;
        const double cc = cs[(i / 9) % 3];
        NdArray x;
        Pyramid p;
        if (scheme == 0) {
            const std::size_t n = std::size_t(8) << (rnd() % 8);  // 8..1024
            x = NdArray({n});
            for (double& v : x) v = double(rnd() % 2000) / 100.0 - 10.0;
            const int levels = 3;
            p = bank == 2 ? forward_ti(x, levels, cc)
                          : forward_1d(x, levels,
                                       bank ? FilterBank::bihaar(cc)
                                            : FilterBank::haar(cc));
        } else if (scheme == 1) {
            const std::size_t ny = std::size_t(8) << (rnd() % 4);
            const std::size_t nx = std::size_t(8) << (rnd() % 4);
            x = NdArray({ny, nx});
            for (double& v : x) v = double(rnd() % 2000) / 100.0 - 10.0;
            const int levels = 2;
            p = bank == 2 ? forward_ti(x, levels, cc)
                          : forward_2d(x, levels,
                                       bank ? FilterBank::bihaar(cc)
                                            : FilterBank::haar(cc));
        } else {
            const std::size_t nn = std::size_t(4) << (rnd() % 3);
            x = NdArray({nn, 16, 16});
            for (double& v : x) v = double(rnd() % 2000) / 100.0 - 10.0;
            p = bank == 2 ? forward_ti_2d1d(x, 2, 2, cc)
                          : forward_2d1d(x, 2, 2,
                                         bank ? FilterBank::bihaar(cc)
                                              : FilterBank::haar(cc));
        }
        NdArray back;
        if (bank == 2)
            back = inverse_ti(p);
        else if (scheme == 0)
            back = inverse_1d(p);
        else if (scheme == 1)
            back = inverse_2d(p);
        else
            back = inverse_2d1d(p);
        double worst = 0.0;
        for (std::size_t k = 0; k < x.size(); ++k)
            worst = std::max(worst, std::abs(back[k] - x[k]));
        if (worst > 1e-10) ++failures;
    }
    if (failures) c.fail(std::to_string(failures) + "/100 cases exceeded 1e-10");
}

// ---- A6: method ordering (NMISE and flux loss) ------------------------------

void a6(Check& c) {
    const int reps = 100;
    const std::size_t n = 1024;
    for (double peak : {0.1, 1.0, 10.0, 100.0}) {
        const NdArray truth = gen_smooth(peak, n);
        double nm[3] = {0, 0, 0};
        const TransformKind kinds[3] = {TransformKind::Haar, TransformKind::BiHaar,
                                        TransformKind::TiHaar};
        for (int r = 0; r < reps; ++r) {
            const CountGrid counts = sample_poisson(truth, 2024, std::uint64_t(r));
            for (int m = 0; m < 3; ++m) {
                DenoiseConfig cfg;
                cfg.transform = kinds[m];
                cfg.levels = 7;
                cfg.alpha = 1e-3;
                const NdArray est = denoise(counts, cfg).estimate;
                double s = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    const double d = est[i] - truth[i];
                    s += d * d / truth[i];
                }
                nm[m] += s / double(n);
            }
        }
        for (double& v : nm) v /= double(reps);
        char buf[160];
        if (!(nm[1] < nm[0])) {
            std::snprintf(buf, sizeof buf,
                          "peak %g: NMISE bihaar %.4g !< haar %.4g", peak, nm[1],
                          nm[0]);
            c.fail(buf);
        }
        if (!(nm[1] <= 1.3 * nm[2])) {
            std::snprintf(buf, sizeof buf,
                          "peak %g: NMISE bihaar %.4g > 1.3x tihaar %.4g", peak,
                          nm[1], nm[2]);
            c.fail(buf);
        }
    }

    // hyperspectral flux-loss ordering: mirror-extended pipeline (one coarse
    // spectral block per side decouples the bright and faint ends under the
    // periodic transform), losses averaged over count realizations
    HyperspectralSpec spec;
    const NdArray truth = gen_hyperspectral(spec);
    const std::vector<std::uint8_t> mask = source_mask(spec);
    const std::vector<double> s_true = flux(truth, mask, spec.background);
    auto denoise_cube = [&](const CountGrid& counts, TransformKind kind) {
        NdArray p = reflect_pad_axis(counts, 0, 32, 32);
        p = reflect_pad_axis(p, 1, 3, 4);
        p = reflect_pad_axis(p, 2, 3, 4);
        DenoiseConfig cfg;
        cfg.transform = kind;
        cfg.scheme = Scheme::TwoPlusOneD;
        cfg.levels = 3;
        cfg.levels_nu = 5;
        cfg.alpha = 1e-5;
        NdArray est = denoise(p, cfg).estimate;
        est = crop_axis(est, 0, 32, 64);
        est = crop_axis(est, 1, 3, 129);
        return crop_axis(est, 2, 3, 129);
    };
    double loss_h = 0.0, loss_bh = 0.0;
    const int flux_reps = 8;
    for (int rep = 0; rep < flux_reps; ++rep) {
        const CountGrid counts = sample_poisson(truth, 31415, std::uint64_t(rep));
        loss_h += flux_loss(flux(denoise_cube(counts, TransformKind::Haar), mask,
                                 spec.background),
                            s_true) /
                  flux_reps;
        loss_bh += flux_loss(flux(denoise_cube(counts, TransformKind::BiHaar), mask,
                                  spec.background),
                             s_true) /
                   flux_reps;
    }
    if (!(loss_h / loss_bh >= 1.3)) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "flux loss ratio %.3f < 1.3 (haar %.4g, bihaar %.4g)",
                      loss_h / loss_bh, loss_h, loss_bh);
        c.fail(buf);
    }
}

// ---- A7: decimated vs undecimated wall time --------------------------------

void a7(Check& c) {
    HyperspectralSpec spec;
    const NdArray truth = gen_hyperspectral(spec);
    const CountGrid counts = sample_poisson(truth, 2718);
    NdArray padded = reflect_pad_axis(counts, 0, 32, 32);
    padded = reflect_pad_axis(padded, 1, 3, 4);
    padded = reflect_pad_axis(padded, 2, 3, 4);
    auto time_one = [&](TransformKind kind) {
        DenoiseConfig cfg;
        cfg.transform = kind;
        cfg.scheme = Scheme::TwoPlusOneD;
        cfg.levels = 3;
        cfg.levels_nu = 5;
        cfg.alpha = 1e-5;
        const auto t0 = std::chrono::steady_clock::now();
        const DenoiseResult r = denoise(padded, cfg);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    };
    const double t_bh = time_one(TransformKind::BiHaar);
    const double t_ti = time_one(TransformKind::TiHaar);
    char buf[120];
    std::snprintf(buf, sizeof buf, "bihaar %.2fs, tihaar %.2fs, ratio %.1f", t_bh,
                  t_ti, t_ti / t_bh);
    c.note = buf;
    if (!(t_ti / t_bh >= 5.0)) c.fail("speed ratio below 5");
}

// ---- A8: small-intensity asymptotes of the bounds ---------------------------

void a8(Check& c) {
    const double lam = 1e-2;  // lambda; lambda_j = 2^j lambda with j = 1
    const double ratio_a = bound_A(2.0 * lam) * 2835.0 / std::pow(lam, 9);
    if (std::abs(ratio_a - 4.0) / 4.0 > 0.05) {
        char buf[120];
        std::snprintf(buf, sizeof buf, "A asymptote ratio %.4f vs 4 (>5%%)", ratio_a);
        c.fail(buf);
    }
    const double lam_j = 1e-2;
    const double ratio_b =
        bound_B(lam_j, 16) * (567.0 / 8.0) / std::pow(lam_j, 9);
    if (std::abs(ratio_b - 1.0) > 0.05) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "B_K asymptote ratio %.4f deviates %.1f%% (>5%%): the "
                      "o(lambda^9) term is still this large at lambda_j=1e-2 "
                      "(exact value cross-checked independently)",
                      ratio_b, std::abs(ratio_b - 1.0) * 100.0);
        c.fail(buf);
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc > 1) g_cli = argv[1];
    struct Entry {
        const char* name;
        const char* what;
        std::function<void(Check&)> fn;
    };
    const Entry entries[] = {
        {"A1", "reference p-value table via CLI", a1},
        {"A2", "p_BH bound holds on the wide grid", a2},
        {"A3", "empirical FPR control (Bi-Haar + FAB)", a3},
        {"A4", "FAB solver and quartic cross-check", a4},
        {"A5", "perfect reconstruction, 100 cases", a5},
        {"A6", "method ordering: NMISE and flux loss", a6},
        {"A7", "decimated vs undecimated speed", a7},
        {"A8", "small-intensity bound asymptotes", a8},
    };
    int failures = 0;
    for (const Entry& e : entries) {
        Check c;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            e.fn(c);
        } catch (const std::exception& ex) {
            c.fail(std::string("exception: ") + ex.what());
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        std::printf("%s %s (%.1fs) %s%s%s\n", e.name, c.ok ? "PASS" : "FAIL", secs,
                    e.what, c.note.empty() ? "" : ": ", c.note.c_str());
        std::fflush(stdout);
        if (!c.ok) ++failures;
    }
    return failures;
}
