#include "bihaar/denoise.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "bihaar/special_fn.hpp"
#include "bihaar/transforms.hpp"

namespace bihaar {

NdArray estimate_lambda(const NdArray& approx, double c, int stages,
                        std::optional<double> known_lambda) {
    NdArray lam(approx.dims);
    if (known_lambda) {
        const double v = std::exp2(double(stages)) * *known_lambda;
        std::fill(lam.data.begin(), lam.data.end(), v);
        return lam;
    }
    const double scale = std::exp2(c * stages);
    for (std::size_t i = 0; i < approx.size(); ++i)
        lam[i] = std::max(scale * approx[i], 0.0);
    return lam;
}

void threshold_band(NdArray& band, const NdArray& lambda_hat, const BandTest& test,
                    std::vector<std::uint8_t>* kept_mask, BandReport* report) {
    if (!band.same_shape(lambda_hat))
        throw structure_error("threshold_band: band/lambda shape mismatch");
    const double lattice = std::exp2(test.c * test.stages);
    if (kept_mask) kept_mask->assign(band.size(), 0);

    // k0 depends only on lambda_hat; identical values repeat heavily, so a
    // per-band cache keyed on the exact bit pattern pays for itself.
    std::unordered_map<std::uint64_t, long long> cache;
    cache.reserve(256);

    std::size_t kept = 0;
    double lmin = 0.0, lmax = 0.0;
    long long kmin = 0, kmax = 0;
    bool first = true;
    for (std::size_t i = 0; i < band.size(); ++i) {
        const double lam = lambda_hat[i];
        long long k0;
        const std::uint64_t key = std::bit_cast<std::uint64_t>(lam);
        auto it = cache.find(key);
        if (it != cache.end()) {
            k0 = it->second;
        } else {
            k0 = critical_k0(test.method, lam, test.z);
            cache.emplace(key, k0);
        }
        bool keep;
        if (test.bihaar_lattice) {
            const long long stat = std::llround(8.0 * lattice * std::abs(band[i]) / test.r);
            keep = stat >= (long long)std::ceil(8.0 * double(k0) / test.r);
        } else {
            keep = std::llround(lattice * std::abs(band[i])) >= k0;
        }
        if (keep) {
            ++kept;
            if (kept_mask) (*kept_mask)[i] = 1;
        } else {
            band[i] = 0.0;
        }
        if (first) {
            lmin = lmax = lam;
            kmin = kmax = k0;
            first = false;
        } else {
            lmin = std::min(lmin, lam);
            lmax = std::max(lmax, lam);
            kmin = std::min(kmin, k0);
            kmax = std::max(kmax, k0);
        }
    }
    if (report) {
        report->tested = band.size();
        report->kept = kept;
        report->lambda_min = lmin;
        report->lambda_max = lmax;
        report->k0_min = kmin;
        report->k0_max = kmax;
        std::vector<double> med(lambda_hat.data);
        if (!med.empty()) {
            auto mid = med.begin() + med.size() / 2;
            std::nth_element(med.begin(), mid, med.end());
            report->lambda_median = *mid;
        }
    }
}

double coefficient_pvalue(double d, double lambda_hat, double c, int stages) {
    if (!(lambda_hat >= 0.0))
        throw domain_error("coefficient_pvalue: lambda_hat must be >= 0");
    const long long k = std::llround(std::exp2(c * stages) * std::abs(d));
    if (k <= 0) return 1.0;
    const double p =
        2.0 * skellam_tail(k, SkellamParams{lambda_hat / 2.0, lambda_hat / 2.0});
    return std::min(p, 1.0);
}

std::vector<std::uint8_t> bh_fdr_select(const std::vector<double>& pvalues,
                                        double q_fdr) {
    if (!(q_fdr > 0.0) || !(q_fdr < 1.0))
        throw domain_error("bh_fdr_select: q must lie in (0,1)");
    const std::size_t m = pvalues.size();
    std::vector<std::uint8_t> mask(m, 0);
    if (m == 0) return mask;
    std::vector<double> sorted;
    sorted.reserve(m);
    for (double p : pvalues) {
        if (!(p >= 0.0) || !(p <= 1.0))
            throw domain_error("bh_fdr_select: p-values must lie in [0,1]");
        sorted.push_back(p);
    }
    std::sort(sorted.begin(), sorted.end());
    double cutoff = -1.0;
    for (std::size_t i = m; i >= 1; --i) {
        if (sorted[i - 1] <= double(i) * q_fdr / double(m)) {
            cutoff = sorted[i - 1];
            break;
        }
    }
    if (cutoff < 0.0) return mask;
    for (std::size_t i = 0; i < m; ++i)
        if (pvalues[i] <= cutoff) mask[i] = 1;
    return mask;
}

namespace {

// Dispatch between decimated and a-trous elementary stages.
struct StageOps {
    FilterBank fb;
    bool ti = false;

    void analyze(const NdArray& in, std::size_t axis, int level, NdArray& a,
                 NdArray& d) const {
        if (ti)
            stages::ti_analyze_axis(in, axis, fb, std::size_t(1) << (level - 1), a, d);
        else
            stages::analyze_axis(in, axis, fb, a, d);
    }
    NdArray synth(const NdArray& a, const NdArray& d, std::size_t axis,
                  int level) const {
        return ti ? stages::ti_synthesize_axis(a, d, axis, fb,
                                               std::size_t(1) << (level - 1))
                  : stages::synthesize_axis(a, d, axis, fb);
    }
    NdArray low(const NdArray& in, std::size_t axis, int level) const {
        NdArray a, d;
        analyze(in, axis, level, a, d);
        return a;
    }
};

void analyze_level2(const StageOps& ops, const NdArray& in, int level, NdArray& a,
                    NdArray& h, NdArray& v, NdArray& d) {
    const std::size_t ax = in.rank() - 1, ay = in.rank() - 2;
    NdArray lx, hx;
    ops.analyze(in, ax, level, lx, hx);
    ops.analyze(lx, ay, level, a, v);
    ops.analyze(hx, ay, level, h, d);
}

NdArray synth_level2(const StageOps& ops, const NdArray& a, const NdArray& h,
                     const NdArray& v, const NdArray& d, int level) {
    const std::size_t ax = a.rank() - 1, ay = a.rank() - 2;
    NdArray lx = ops.synth(a, v, ay, level);
    NdArray hx = ops.synth(h, d, ay, level);
    return ops.synth(lx, hx, ax, level);
}

NdArray low_level2(const StageOps& ops, const NdArray& in, int level) {
    const std::size_t ax = in.rank() - 1, ay = in.rank() - 2;
    return ops.low(ops.low(in, ax, level), ay, level);
}

struct Engine {
    DenoiseConfig cfg;
    StageOps ops;
    double z_fixed = 0.0;
    DenoiseReport report;

    double z_for(std::size_t band_size) const {
        if (cfg.mode == SelectionMode::Universal)
            return universal_z(std::max<std::size_t>(band_size, 2));
        return z_fixed;
    }

    BandTest make_test(std::size_t band_size, int stages) const {
        BandTest t;
        t.method = cfg.method;
        t.z = z_for(band_size);
        t.c = cfg.c;
        t.stages = stages;
        t.bihaar_lattice = cfg.transform == TransformKind::BiHaar;
        t.r = ops.fb.r;
        return t;
    }

    void test_band(NdArray& band, const NdArray& lam, int stages,
                   const std::string& label) {
        const auto t0 = std::chrono::steady_clock::now();
        const BandTest t = make_test(band.size(), stages);
        BandReport br;
        br.label = label;
        br.stages = stages;
        br.z = t.z;
        threshold_band(band, lam, t, nullptr, &br);
        br.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        report.seconds_testing += br.seconds;
        report.bands.push_back(std::move(br));
    }

    // ---- FPR / universal paths -------------------------------------------

    NdArray run_plain(const CountGrid& counts) {
        const bool two_d = cfg.scheme == Scheme::TwoD;
        const int q = two_d ? 2 : 1;
        const int levels = cfg.levels;
        NdArray a = counts;
        std::vector<NdArray> hb(levels + 1), vb(levels + 1), db(levels + 1);
        for (int j = 1; j <= levels; ++j) {
            if (two_d) {
                NdArray na;
                analyze_level2(ops, a, j, na, hb[j], vb[j], db[j]);
                a = std::move(na);
            } else {
                NdArray na, d;
                ops.analyze(a, 0, j, na, d);
                db[j] = std::move(d);
                a = std::move(na);
            }
        }
        for (int j = levels; j >= 1; --j) {
            const int L = q * j;
            const NdArray lam = estimate_lambda(a, cfg.c, L, cfg.known_lambda);
            const std::string tag = "j" + std::to_string(j);
            if (two_d) {
                test_band(hb[j], lam, L, tag + ":H");
                test_band(vb[j], lam, L, tag + ":V");
                test_band(db[j], lam, L, tag + ":D");
                a = synth_level2(ops, a, hb[j], vb[j], db[j], j);
            } else {
                test_band(db[j], lam, L, tag + ":d");
                a = ops.synth(a, db[j], 0, j);
            }
        }
        return a;
    }

    // Spatial Algorithm-1 pass over a (possibly spectrally transformed)
    // volume; nu_stages elementary spectral stages already applied.
    NdArray spatial_pass(NdArray vol, int nu_stages, const std::string& nu_tag) {
        const int levels = cfg.levels;
        std::vector<NdArray> hb(levels + 1), vb(levels + 1), db(levels + 1);
        NdArray a = std::move(vol);
        for (int j = 1; j <= levels; ++j) {
            NdArray na;
            analyze_level2(ops, a, j, na, hb[j], vb[j], db[j]);
            a = std::move(na);
        }
        for (int j = levels; j >= 1; --j) {
            const int L = 2 * j + nu_stages;
            const NdArray lam = estimate_lambda(a, cfg.c, L, cfg.known_lambda);
            const std::string tag = "j" + std::to_string(j);
            test_band(hb[j], lam, L, tag + ":H/" + nu_tag);
            test_band(vb[j], lam, L, tag + ":V/" + nu_tag);
            test_band(db[j], lam, L, tag + ":D/" + nu_tag);
            a = synth_level2(ops, a, hb[j], vb[j], db[j], j);
        }
        return a;
    }

    // Threshold every coefficient of the spatially transformed spectral
    // detail slab Q; intensities come from the spatial approx ladder of the
    // running spectral approximation V.
    NdArray denoise_slab(NdArray q, const NdArray& v_current, int nu_scale) {
        const int levels = cfg.levels;
        const std::string nu_tag = "nu" + std::to_string(nu_scale) + ":d";

        std::vector<NdArray> ladder(levels + 1);
        ladder[0] = v_current;
        for (int j = 1; j <= levels; ++j)
            ladder[j] = low_level2(ops, ladder[j - 1], j);

        std::vector<NdArray> hb(levels + 1), vb(levels + 1), db(levels + 1);
        NdArray qa = std::move(q);
        for (int j = 1; j <= levels; ++j) {
            NdArray na;
            analyze_level2(ops, qa, j, na, hb[j], vb[j], db[j]);
            qa = std::move(na);
        }
        for (int j = levels; j >= 1; --j) {
            const int L = 2 * j + nu_scale;
            const NdArray lam = estimate_lambda(ladder[j], cfg.c, L, cfg.known_lambda);
            const std::string tag = "j" + std::to_string(j);
            test_band(hb[j], lam, L, tag + ":H/" + nu_tag);
            test_band(vb[j], lam, L, tag + ":V/" + nu_tag);
            test_band(db[j], lam, L, tag + ":D/" + nu_tag);
        }
        {
            const int L = 2 * levels + nu_scale;
            const NdArray lam =
                estimate_lambda(ladder[levels], cfg.c, L, cfg.known_lambda);
            test_band(qa, lam, L, "xyA/" + nu_tag);
        }
        for (int j = levels; j >= 1; --j)
            qa = synth_level2(ops, qa, hb[j], vb[j], db[j], j);
        return qa;
    }

    NdArray run_2d1d(const CountGrid& counts) {
        const int jnu = cfg.levels_nu;
        NdArray v = counts;
        std::vector<NdArray> slabs(jnu + 1);
        for (int t = 1; t <= jnu; ++t) {
            NdArray nv, d;
            ops.analyze(v, 0, t, nv, d);
            slabs[t] = std::move(d);
            v = std::move(nv);
        }
        v = spatial_pass(std::move(v), jnu, "nuA");
        for (int t = jnu; t >= 1; --t) {
            NdArray q = denoise_slab(std::move(slabs[t]), v, t);
            v = ops.synth(v, q, 0, t);
        }
        return v;
    }

    // ---- BH-FDR paths ----------------------------------------------------

    struct PendingBand {
        NdArray* band;
        NdArray lam;
        int stages;
        std::string label;
    };

    void bh_apply(std::vector<PendingBand>& pending) {
        const auto t0 = std::chrono::steady_clock::now();
        std::vector<double> pvals;
        std::size_t total = 0;
        for (auto& pb : pending) total += pb.band->size();
        pvals.reserve(total);
        for (auto& pb : pending)
            for (std::size_t i = 0; i < pb.band->size(); ++i)
                pvals.push_back(
                    coefficient_pvalue((*pb.band)[i], pb.lam[i], cfg.c, pb.stages));
        const std::vector<std::uint8_t> mask = bh_fdr_select(pvals, cfg.fdr_q);
        std::size_t off = 0;
        for (auto& pb : pending) {
            BandReport br;
            br.label = pb.label;
            br.stages = pb.stages;
            br.tested = pb.band->size();
            double lmin = 0.0, lmax = 0.0;
            for (std::size_t i = 0; i < pb.band->size(); ++i) {
                if (i == 0)
                    lmin = lmax = pb.lam[i];
                else {
                    lmin = std::min(lmin, pb.lam[i]);
                    lmax = std::max(lmax, pb.lam[i]);
                }
                if (mask[off + i])
                    ++br.kept;
                else
                    (*pb.band)[i] = 0.0;
            }
            br.lambda_min = lmin;
            br.lambda_max = lmax;
            off += pb.band->size();
            report.bands.push_back(std::move(br));
        }
        report.seconds_testing +=
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
    }

    NdArray run_plain_bh(const CountGrid& counts) {
        const bool two_d = cfg.scheme == Scheme::TwoD;
        const int q = two_d ? 2 : 1;
        const int levels = cfg.levels;
        std::vector<NdArray> hb(levels + 1), vb(levels + 1), db(levels + 1);
        std::vector<NdArray> lams(levels + 1);
        NdArray a = counts;
        for (int j = 1; j <= levels; ++j) {
            if (two_d) {
                NdArray na;
                analyze_level2(ops, a, j, na, hb[j], vb[j], db[j]);
                a = std::move(na);
            } else {
                NdArray na, d;
                ops.analyze(a, 0, j, na, d);
                db[j] = std::move(d);
                a = std::move(na);
            }
            lams[j] = estimate_lambda(a, cfg.c, q * j, cfg.known_lambda);
        }
        std::vector<PendingBand> pending;
        for (int j = 1; j <= levels; ++j) {
            const std::string tag = "j" + std::to_string(j);
            if (two_d) {
                pending.push_back({&hb[j], lams[j], q * j, tag + ":H"});
                pending.push_back({&vb[j], lams[j], q * j, tag + ":V"});
                pending.push_back({&db[j], lams[j], q * j, tag + ":D"});
            } else {
                pending.push_back({&db[j], lams[j], q * j, tag + ":d"});
            }
        }
        bh_apply(pending);
        for (int j = levels; j >= 1; --j)
            a = two_d ? synth_level2(ops, a, hb[j], vb[j], db[j], j)
                      : ops.synth(a, db[j], 0, j);
        return a;
    }

    NdArray run_2d1d_bh(const CountGrid& counts) {
        const int jnu = cfg.levels_nu, jxy = cfg.levels;

        // Raw spectral-approx ladder W_t and its spatial-low ladders P[t][s].
        std::vector<NdArray> w(jnu + 1), slabs(jnu + 1);
        w[0] = counts;
        for (int t = 1; t <= jnu; ++t) {
            NdArray nv, d;
            ops.analyze(w[t - 1], 0, t, nv, d);
            w[t] = std::move(nv);
            slabs[t] = std::move(d);
        }
        auto spatial_ladder = [&](const NdArray& base) {
            std::vector<NdArray> ladder(jxy + 1);
            ladder[0] = base;
            for (int s = 1; s <= jxy; ++s) ladder[s] = low_level2(ops, ladder[s - 1], s);
            return ladder;
        };

        std::vector<PendingBand> pending;

        // Spatial bands of the spectral approx W_{jnu}.
        std::vector<NdArray> hb(jxy + 1), vb(jxy + 1), db(jxy + 1);
        std::vector<NdArray> wl = spatial_ladder(w[jnu]);
        NdArray a = w[jnu];
        for (int j = 1; j <= jxy; ++j) {
            NdArray na;
            analyze_level2(ops, a, j, na, hb[j], vb[j], db[j]);
            a = std::move(na);
        }
        for (int j = 1; j <= jxy; ++j) {
            const int L = 2 * j + jnu;
            NdArray lam = estimate_lambda(wl[j], cfg.c, L, cfg.known_lambda);
            const std::string tag = "j" + std::to_string(j);
            pending.push_back({&hb[j], lam, L, tag + ":H/nuA"});
            pending.push_back({&vb[j], lam, L, tag + ":V/nuA"});
            pending.push_back({&db[j], lam, L, tag + ":D/nuA"});
        }

        // Spatially transformed spectral detail slabs.
        struct SlabBands {
            std::vector<NdArray> h, v, d;
            NdArray approx;
        };
        std::vector<SlabBands> sb(jnu + 1);
        for (int t = 1; t <= jnu; ++t) {
            std::vector<NdArray> pl = spatial_ladder(w[t]);
            sb[t].h.resize(jxy + 1);
            sb[t].v.resize(jxy + 1);
            sb[t].d.resize(jxy + 1);
            NdArray qa = slabs[t];
            for (int j = 1; j <= jxy; ++j) {
                NdArray na;
                analyze_level2(ops, qa, j, na, sb[t].h[j], sb[t].v[j], sb[t].d[j]);
                qa = std::move(na);
            }
            sb[t].approx = std::move(qa);
            const std::string nu_tag = "nu" + std::to_string(t) + ":d";
            for (int j = 1; j <= jxy; ++j) {
                const int L = 2 * j + t;
                NdArray lam = estimate_lambda(pl[j], cfg.c, L, cfg.known_lambda);
                const std::string tag = "j" + std::to_string(j);
                pending.push_back({&sb[t].h[j], lam, L, tag + ":H/" + nu_tag});
                pending.push_back({&sb[t].v[j], lam, L, tag + ":V/" + nu_tag});
                pending.push_back({&sb[t].d[j], lam, L, tag + ":D/" + nu_tag});
            }
            const int La = 2 * jxy + t;
            NdArray lam = estimate_lambda(pl[jxy], cfg.c, La, cfg.known_lambda);
            pending.push_back({&sb[t].approx, lam, La, "xyA/" + nu_tag});
        }

        bh_apply(pending);

        // Reconstruct: spatial inverse of every slab, then spectral synthesis.
        for (int j = jxy; j >= 1; --j)
            a = synth_level2(ops, a, hb[j], vb[j], db[j], j);
        NdArray v = std::move(a);
        for (int t = jnu; t >= 1; --t) {
            NdArray qa = std::move(sb[t].approx);
            for (int j = jxy; j >= 1; --j)
                qa = synth_level2(ops, qa, sb[t].h[j], sb[t].v[j], sb[t].d[j], j);
            v = ops.synth(v, qa, 0, t);
        }
        return v;
    }
};

const char* transform_name(TransformKind t) {
    switch (t) {
        case TransformKind::Haar: return "haar";
        case TransformKind::BiHaar: return "bihaar";
        default: return "tihaar";
    }
}

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::OneD: return "1d";
        case Scheme::TwoD: return "2d";
        default: return "2d1d";
    }
}

const char* mode_name(SelectionMode m) {
    switch (m) {
        case SelectionMode::Fpr: return "fpr";
        case SelectionMode::Universal: return "universal";
        default: return "bh-fdr";
    }
}

}  // namespace

DenoiseResult denoise(const CountGrid& counts, const DenoiseConfig& config) {
    const auto t0 = std::chrono::steady_clock::now();
    validate_counts(counts, "denoise");
    if (!(config.alpha > 0.0) || !(config.alpha < 1.0))
        throw domain_error("denoise: alpha must lie in (0,1)");
    if (config.levels < 1) throw domain_error("denoise: levels must be >= 1");
    if (config.scheme == Scheme::TwoPlusOneD && config.levels_nu < 1)
        throw domain_error("denoise: levels_nu must be >= 1 for the 2D+1D scheme");
    if (config.mode == SelectionMode::BhFdr &&
        (!(config.fdr_q > 0.0) || !(config.fdr_q < 1.0)))
        throw domain_error("denoise: fdr_q must lie in (0,1)");
    if (config.known_lambda && !(*config.known_lambda >= 0.0))
        throw domain_error("denoise: known lambda must be >= 0");
    if (!std::isfinite(config.c)) throw domain_error("denoise: c must be finite");
    const std::size_t want_rank = config.scheme == Scheme::OneD ? 1
                                  : config.scheme == Scheme::TwoD ? 2
                                                                  : 3;
    if (counts.rank() != want_rank)
        throw size_error("denoise: scheme expects a " + std::to_string(want_rank) +
                         "-D input, got " + dims_to_string(counts.dims));
    auto check_div = [](std::size_t n, int levels, const char* axis) {
        if (n % (std::size_t(1) << levels) != 0)
            throw size_error(std::string("denoise: ") + axis + " length " +
                             std::to_string(n) + " not divisible by 2^" +
                             std::to_string(levels));
    };
    if (config.scheme == Scheme::OneD) {
        check_div(counts.dims[0], config.levels, "signal");
    } else if (config.scheme == Scheme::TwoD) {
        check_div(counts.dims[0], config.levels, "y");
        check_div(counts.dims[1], config.levels, "x");
    } else {
        check_div(counts.dims[0], config.levels_nu, "nu");
        check_div(counts.dims[1], config.levels, "y");
        check_div(counts.dims[2], config.levels, "x");
    }

    Engine eng;
    eng.cfg = config;
    eng.ops.ti = config.transform == TransformKind::TiHaar;
    eng.ops.fb = config.transform == TransformKind::BiHaar
                     ? FilterBank::bihaar(config.c)
                     : FilterBank::haar(config.c);
    eng.z_fixed = normal_quantile(1.0 - config.alpha / 2.0);
    eng.report.transform = transform_name(config.transform);
    eng.report.scheme = scheme_name(config.scheme);
    eng.report.method = config.method == ThresholdMethod::FAB ? "fab" : "cltb";
    eng.report.mode = mode_name(config.mode);
    eng.report.alpha = config.alpha;
    eng.report.c = config.c;
    eng.report.fdr_q = config.fdr_q;
    eng.report.lambda_known = config.known_lambda.has_value();
    eng.report.lambda_value = config.known_lambda.value_or(0.0);
    eng.report.levels = config.levels;
    eng.report.levels_nu = config.levels_nu;

    NdArray out;
    if (config.scheme == Scheme::TwoPlusOneD)
        out = config.mode == SelectionMode::BhFdr ? eng.run_2d1d_bh(counts)
                                                  : eng.run_2d1d(counts);
    else
        out = config.mode == SelectionMode::BhFdr ? eng.run_plain_bh(counts)
                                                  : eng.run_plain(counts);

    for (double& v : out.data) v = std::max(v, 0.0);  // positivity projection

    eng.report.seconds_total =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    eng.report.seconds_transform =
        std::max(eng.report.seconds_total - eng.report.seconds_testing, 0.0);
    return DenoiseResult{std::move(out), std::move(eng.report)};
}

}  // namespace bihaar
