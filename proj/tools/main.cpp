#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bihaar/analysis.hpp"
#include "bihaar/denoise.hpp"
#include "bihaar/errors.hpp"
#include "bihaar/io.hpp"
#include "bihaar/special_fn.hpp"

using namespace bihaar;

namespace {

std::string ext_of(const std::string& path) {
    const std::size_t dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string e = path.substr(dot + 1);
    std::transform(e.begin(), e.end(), e.begin(),
                   [](unsigned char c) { return char(std::tolower(c)); });
    return e;
}

std::vector<double> parse_list(const std::string& csv, const char* flag) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        std::size_t comma = csv.find(',', pos);
        if (comma == std::string::npos) comma = csv.size();
        const std::string tok = csv.substr(pos, comma - pos);
        if (tok.empty()) throw parse_error(std::string("bad value in ") + flag);
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (end == tok.c_str() || *end != '\0')
            throw parse_error(std::string("bad numeric list for ") + flag + ": '" +
                              tok + "'");
        out.push_back(v);
        pos = comma + 1;
    }
    if (out.empty()) throw parse_error(std::string("empty list for ") + flag);
    return out;
}

struct CommonDenoiseFlags {
    std::string transform = "bihaar";
    std::string method = "fab";
    double alpha = 1e-3;
    bool universal = false;
    double fdr = -1.0;
    double known_lambda = -1.0;
    double c = 0.0;
};

DenoiseConfig to_config(const CommonDenoiseFlags& f) {
    DenoiseConfig cfg;
    if (f.transform == "haar")
        cfg.transform = TransformKind::Haar;
    else if (f.transform == "bihaar")
        cfg.transform = TransformKind::BiHaar;
    else if (f.transform == "tihaar")
        cfg.transform = TransformKind::TiHaar;
    else
        throw domain_error("--transform must be haar, bihaar or tihaar");
    if (f.method == "fab")
        cfg.method = ThresholdMethod::FAB;
    else if (f.method == "cltb")
        cfg.method = ThresholdMethod::CLTB;
    else
        throw domain_error("--method must be cltb or fab");
    if (!(f.alpha > 0.0) || !(f.alpha < 1.0))
        throw domain_error("--alpha must lie in (0,1)");
    cfg.alpha = f.alpha;
    cfg.mode = SelectionMode::Fpr;
    if (f.universal) cfg.mode = SelectionMode::Universal;
    if (f.fdr >= 0.0) {
        if (!(f.fdr > 0.0) || !(f.fdr < 1.0))
            throw domain_error("--fdr must lie in (0,1)");
        if (f.universal) throw domain_error("--universal and --fdr are exclusive");
        cfg.mode = SelectionMode::BhFdr;
        cfg.fdr_q = f.fdr;
    }
    if (f.known_lambda >= 0.0) cfg.known_lambda = f.known_lambda;
    if (!std::isfinite(f.c)) throw domain_error("--c must be finite");
    cfg.c = f.c;
    return cfg;
}

// Symmetric zero padding up to a multiple of 2^levels per axis.
struct PadPlan {
    std::vector<std::size_t> original, padded, left;
    bool any = false;
};

PadPlan plan_pad(const std::vector<std::size_t>& dims,
                 const std::vector<int>& levels_per_axis) {
    PadPlan plan;
    plan.original = dims;
    plan.padded = dims;
    plan.left.assign(dims.size(), 0);
    for (std::size_t a = 0; a < dims.size(); ++a) {
        const std::size_t block = std::size_t(1) << levels_per_axis[a];
        const std::size_t target = (dims[a] + block - 1) / block * block;
        if (target != dims[a]) {
            plan.any = true;
            plan.padded[a] = target;
            plan.left[a] = (target - dims[a]) / 2;
        }
    }
    return plan;
}

NdArray apply_pad(const NdArray& in, const PadPlan& plan, bool reflect) {
    if (!plan.any) return in;
    if (reflect) {
        NdArray out = in;
        for (std::size_t a = 0; a < in.dims.size(); ++a) {
            const std::size_t right = plan.padded[a] - plan.original[a] - plan.left[a];
            if (plan.left[a] || right)
                out = reflect_pad_axis(out, a, plan.left[a], right);
        }
        return out;
    }
    NdArray out(plan.padded, 0.0);
    const auto& d = in.dims;
    if (d.size() == 1) {
        for (std::size_t i = 0; i < d[0]; ++i) out[plan.left[0] + i] = in[i];
    } else if (d.size() == 2) {
        for (std::size_t y = 0; y < d[0]; ++y)
            for (std::size_t x = 0; x < d[1]; ++x)
                out.at2(plan.left[0] + y, plan.left[1] + x) = in.at2(y, x);
    } else {
        for (std::size_t v = 0; v < d[0]; ++v)
            for (std::size_t y = 0; y < d[1]; ++y)
                for (std::size_t x = 0; x < d[2]; ++x)
                    out.at3(plan.left[0] + v, plan.left[1] + y, plan.left[2] + x) =
                        in.at3(v, y, x);
    }
    return out;
}

NdArray crop_back(const NdArray& in, const PadPlan& plan) {
    if (!plan.any) return in;
    NdArray out(plan.original);
    const auto& d = plan.original;
    if (d.size() == 1) {
        for (std::size_t i = 0; i < d[0]; ++i) out[i] = in[plan.left[0] + i];
    } else if (d.size() == 2) {
        for (std::size_t y = 0; y < d[0]; ++y)
            for (std::size_t x = 0; x < d[1]; ++x)
                out.at2(y, x) = in.at2(plan.left[0] + y, plan.left[1] + x);
    } else {
        for (std::size_t v = 0; v < d[0]; ++v)
            for (std::size_t y = 0; y < d[1]; ++y)
                for (std::size_t x = 0; x < d[2]; ++x)
                    out.at3(v, y, x) =
                        in.at3(plan.left[0] + v, plan.left[1] + y, plan.left[2] + x);
    }
    return out;
}

int cmd_denoise(const std::string& input, const std::string& output,
                const std::string& report_path, const std::string& scheme_flag,
                int scales, int scales_xy, int scales_nu, const std::string& pad,
                const CommonDenoiseFlags& flags) {
    DenoiseConfig cfg = to_config(flags);

    const std::string ie = ext_of(input);
    NdArray data;
    if (ie == "csv") {
        data = read_csv_1d(input);
    } else if (ie == "pgm") {
        data = read_pgm(input);
    } else if (ie == "bhv") {
        data = read_bhv1(input);
    } else {
        throw parse_error("--input must end in .csv, .pgm or .bhv");
    }
    Scheme scheme = data.rank() == 1   ? Scheme::OneD
                    : data.rank() == 2 ? Scheme::TwoD
                                       : Scheme::TwoPlusOneD;
    if (!scheme_flag.empty()) {
        if (scheme_flag != "1d" && scheme_flag != "2d" && scheme_flag != "2d1d")
            throw domain_error("--scheme must be 1d, 2d or 2d1d");
        const Scheme want = scheme_flag == "1d"   ? Scheme::OneD
                            : scheme_flag == "2d" ? Scheme::TwoD
                                                  : Scheme::TwoPlusOneD;
        if (want != scheme)
            throw size_error("--scheme " + scheme_flag + " does not match a " +
                             std::to_string(data.rank()) + "-D input");
    }
    cfg.scheme = scheme;
    cfg.levels = scheme == Scheme::TwoPlusOneD ? scales_xy : scales;
    cfg.levels_nu = scheme == Scheme::TwoPlusOneD ? scales_nu : 0;
    if (cfg.levels < 1 || (scheme == Scheme::TwoPlusOneD && cfg.levels_nu < 1))
        throw domain_error("--scales/--scales-xy/--scales-nu must be >= 1");

    std::vector<int> lv(data.rank(), cfg.levels);
    if (scheme == Scheme::TwoPlusOneD) lv[0] = cfg.levels_nu;
    PadPlan plan = plan_pad(data.dims, lv);
    if (pad != "none" && pad != "zero" && pad != "reflect")
        throw domain_error("--pad must be none, zero or reflect");
    if (plan.any) {
        if (pad == "none")
            throw size_error("input dims " + dims_to_string(data.dims) +
                             " not divisible by the scale blocks; rerun with "
                             "--pad zero|reflect to pad symmetrically");
        std::cerr << "warning: " << pad << "-padding " << dims_to_string(plan.original)
                  << " to " << dims_to_string(plan.padded)
                  << "; output is cropped back\n";
        data = apply_pad(data, plan, pad == "reflect");
    }

    DenoiseResult res = denoise(data, cfg);
    if (plan.any) {
        res.estimate = crop_back(res.estimate, plan);
        res.report.original_dims = plan.original;
        res.report.padded_dims = plan.padded;
        res.report.pad_left = plan.left;
    }

    const std::string oe = ext_of(output);
    if (res.estimate.rank() == 1) {
        if (oe != "csv") throw parse_error("--output for 1-D data must end in .csv");
        write_csv_1d(output, res.estimate);
    } else if (res.estimate.rank() == 2) {
        if (oe == "pgm") {
            write_pgm(output, res.estimate, 65535, false);
        } else if (oe == "bhv") {
            NdArray vol({1, res.estimate.dims[0], res.estimate.dims[1]});
            vol.data = res.estimate.data;
            write_bhv1(output, vol, Bhv1Type::F64);
        } else {
            throw parse_error("--output for 2-D data must end in .pgm or .bhv");
        }
    } else {
        if (oe != "bhv") throw parse_error("--output for 3-D data must end in .bhv");
        write_bhv1(output, res.estimate, Bhv1Type::F64);
    }

    const std::string json = report_to_json(res.report);
    if (report_path.empty()) {
        std::cerr << json << "\n";
    } else {
        std::ofstream rf(report_path, std::ios::trunc);
        if (!rf) throw parse_error(report_path + ": cannot open for writing");
        rf << json << "\n";
    }
    return 0;
}

int cmd_pvalues(const std::string& lambda_list, const std::string& k0_list) {
    struct Row {
        double lam;
        long long k0;
    };
    std::vector<Row> rows;
    if (lambda_list.empty() != k0_list.empty())
        throw parse_error("--lambda-list and --k0-list must be given together");
    if (lambda_list.empty()) {
        const double lams[] = {0.1, 1.0, 10.0, 100.0};
        const long long k0s[4][3] = {{2, 3, 4}, {4, 5, 6}, {9, 12, 15}, {20, 30, 40}};
        for (int i = 0; i < 4; ++i)
            for (long long k : k0s[i]) rows.push_back({lams[i], k});
    } else {
        std::vector<double> lams = parse_list(lambda_list, "--lambda-list");
        std::vector<double> k0s = parse_list(k0_list, "--k0-list");
        std::sort(lams.begin(), lams.end());
        std::sort(k0s.begin(), k0s.end());
        for (double l : lams) {
            if (!(l >= 0.0)) throw domain_error("--lambda-list entries must be >= 0");
            for (double k : k0s) {
                if (!(k >= 1.0) || k != std::floor(k))
                    throw parse_error("--k0-list entries must be integers >= 1");
                rows.push_back({l, (long long)k});
            }
        }
    }
    std::printf("lambda_j,k0,p_H,p_BH,bound\n");
    for (const Row& r : rows) {
        const double ph = p_haar(r.k0, r.lam);
        const double pbh = p_bihaar_exact(r.k0, r.lam);
        const double bound = ph + bound_A(r.lam) * (1.0 - 2.0 * ph);
        std::printf("%.10g,%lld,%.6e,%.6e,%.6e\n", r.lam, r.k0, ph, pbh, bound);
    }
    return 0;
}

struct BenchCommon {
    std::uint64_t seed = 12345;
    double alpha = 1e-3;
    std::string method = "fab";
};

int cmd_bench_nmise(const BenchCommon& bc, const std::string& peaks_list, int reps,
                    std::size_t length, int scales, bool oracle) {
    if (!(bc.alpha > 0.0) || !(bc.alpha < 1.0))
        throw domain_error("--alpha must lie in (0,1)");
    const std::vector<double> peaks = parse_list(peaks_list, "--peaks");
    std::printf("peak,method,nmise\n");
    for (double peak : peaks) {
        const NdArray truth = gen_smooth(peak, length);
        for (const char* method : {"haar", "bihaar", "tihaar"}) {
            CommonDenoiseFlags f;
            f.transform = method;
            f.method = bc.method;
            f.alpha = bc.alpha;
            DenoiseConfig cfg = to_config(f);
            cfg.scheme = Scheme::OneD;
            cfg.levels = scales;
            double acc = 0.0;
            for (int rep = 0; rep < reps; ++rep) {
                const CountGrid counts =
                    sample_poisson(truth, bc.seed, std::uint64_t(rep));
                const NdArray est = oracle ? truth : denoise(counts, cfg).estimate;
                double s = 0.0;
                for (std::size_t i = 0; i < truth.size(); ++i) {
                    const double d = est[i] - truth[i];
                    s += d * d / truth[i];
                }
                acc += s / double(truth.size());
            }
            std::printf("%.10g,%s,%.8e\n", peak, method, acc / double(reps));
        }
    }
    return 0;
}

struct HyperFlags {
    std::size_t nx = 129, ny = 129, nnu = 64;
    double background = 0.05, sigma = 4.0;
    int scales_xy = 3, scales_nu = 5;
};

// Bench pipeline: mirror-extend every axis (the even-periodic extension is
// continuous, so boundary-straddling filters see no artificial edges). The
// spectral axis additionally gets one full coarse block per side, which
// decouples the bright first band from the faint last one under the
// periodic transform; spatial axes pad up to the next block multiple.
NdArray denoise_padded_volume(const CountGrid& counts, DenoiseConfig cfg,
                              const HyperFlags& hf) {
    const std::size_t nnu = counts.dims[0], ny = counts.dims[1], nx = counts.dims[2];
    const std::size_t bnu = std::size_t(1) << hf.scales_nu;
    const std::size_t bxy = std::size_t(1) << hf.scales_xy;
    const std::size_t nu_left = std::min(bnu, nnu);
    const std::size_t nu_total = (nnu + nu_left + bnu + bnu - 1) / bnu * bnu;
    const std::size_t nu_right = nu_total - nnu - nu_left;
    auto split = [](std::size_t n, std::size_t block, std::size_t& l, std::size_t& r) {
        const std::size_t target = (n + block - 1) / block * block;
        l = (target - n) / 2;
        r = target - n - l;
    };
    std::size_t yl, yr, xl, xr;
    split(ny, bxy, yl, yr);
    split(nx, bxy, xl, xr);

    NdArray p = reflect_pad_axis(counts, 0, nu_left, nu_right);
    if (yl || yr) p = reflect_pad_axis(p, 1, yl, yr);
    if (xl || xr) p = reflect_pad_axis(p, 2, xl, xr);
    DenoiseResult res = denoise(p, cfg);
    NdArray est = crop_axis(res.estimate, 0, nu_left, nnu);
    est = crop_axis(est, 1, yl, ny);
    return crop_axis(est, 2, xl, nx);
}

int cmd_bench_flux(const BenchCommon& bc, const HyperFlags& hf, int reps) {
    if (!(bc.alpha > 0.0) || !(bc.alpha < 1.0))
        throw domain_error("--alpha must lie in (0,1)");
    if (reps < 1) throw domain_error("--reps must be >= 1");
    HyperspectralSpec spec;
    spec.nx = hf.nx;
    spec.ny = hf.ny;
    spec.n_nu = hf.nnu;
    spec.background = hf.background;
    spec.sigma = hf.sigma;
    const NdArray truth = gen_hyperspectral(spec);
    const std::vector<std::uint8_t> mask = source_mask(spec);
    const std::vector<double> s_true = flux(truth, mask, spec.background);

    // losses averaged over replicate count realizations; the printed band
    // curves come from the first replicate
    std::vector<std::vector<double>> curves(2);
    double losses[2] = {0.0, 0.0};
    for (int rep = 0; rep < reps; ++rep) {
        const CountGrid counts = sample_poisson(truth, bc.seed, std::uint64_t(rep));
        int mi = 0;
        for (const char* method : {"haar", "bihaar"}) {
            CommonDenoiseFlags f;
            f.transform = method;
            f.method = bc.method;
            f.alpha = bc.alpha;
            DenoiseConfig cfg = to_config(f);
            cfg.scheme = Scheme::TwoPlusOneD;
            cfg.levels = hf.scales_xy;
            cfg.levels_nu = hf.scales_nu;
            const NdArray est = denoise_padded_volume(counts, cfg, hf);
            const std::vector<double> curve = flux(est, mask, spec.background);
            losses[mi] += flux_loss(curve, s_true) / double(reps);
            if (rep == 0) curves[std::size_t(mi)] = curve;
            ++mi;
        }
    }
    std::printf("loss,haar,%.8e\n", losses[0]);
    std::printf("loss,bihaar,%.8e\n", losses[1]);
    for (std::size_t nu = 0; nu < spec.n_nu; ++nu)
        std::printf("band,%zu,%.8e,%.8e,%.8e\n", nu, s_true[nu], curves[0][nu],
                    curves[1][nu]);
    return 0;
}

int cmd_bench_speed(const BenchCommon& bc, const HyperFlags& hf) {
    HyperspectralSpec spec;
    spec.nx = hf.nx;
    spec.ny = hf.ny;
    spec.n_nu = hf.nnu;
    spec.background = hf.background;
    spec.sigma = hf.sigma;
    const NdArray truth = gen_hyperspectral(spec);
    const CountGrid counts = sample_poisson(truth, bc.seed);
    double secs[2] = {0, 0};
    int i = 0;
    for (const char* method : {"bihaar", "tihaar"}) {
        CommonDenoiseFlags f;
        f.transform = method;
        f.method = bc.method;
        f.alpha = bc.alpha;
        DenoiseConfig cfg = to_config(f);
        cfg.scheme = Scheme::TwoPlusOneD;
        cfg.levels = hf.scales_xy;
        cfg.levels_nu = hf.scales_nu;
        const auto t0 = std::chrono::steady_clock::now();
        const NdArray est = denoise_padded_volume(counts, cfg, hf);
        secs[i++] =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        (void)est;
    }
    std::printf("method,seconds\n");
    std::printf("bihaar,%.4f\n", secs[0]);
    std::printf("tihaar,%.4f\n", secs[1]);
    std::printf("ratio,tihaar/bihaar,%.3f\n", secs[1] / secs[0]);
    return 0;
}

int cmd_simulate_smooth(double peak, std::size_t length, std::uint64_t seed,
                        bool intensity, const std::string& out) {
    const NdArray truth = gen_smooth(peak, length);
    if (ext_of(out) != "csv") throw parse_error("--out must end in .csv");
    write_csv_1d(out, intensity ? truth : sample_poisson(truth, seed));
    return 0;
}

int cmd_simulate_hyperspectral(const HyperFlags& hf, std::uint64_t seed,
                               bool intensity, const std::string& out) {
    HyperspectralSpec spec;
    spec.nx = hf.nx;
    spec.ny = hf.ny;
    spec.n_nu = hf.nnu;
    spec.background = hf.background;
    spec.sigma = hf.sigma;
    const NdArray truth = gen_hyperspectral(spec);
    if (ext_of(out) != "bhv") throw parse_error("--out must end in .bhv");
    if (intensity)
        write_bhv1(out, truth, Bhv1Type::F64);
    else
        write_bhv1(out, sample_poisson(truth, seed), Bhv1Type::U32);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson count denoising by hypothesis tests on decimated "
                 "biorthogonal Haar coefficients"};
    app.require_subcommand(1);

    auto* den = app.add_subcommand("denoise", "Denoise a counts file");
    std::string input, output, report_path, scheme_flag, pad = "none";
    int scales = 3, scales_xy = 3, scales_nu = 5;
    CommonDenoiseFlags flags;
    den->add_option("--input", input, "input file (.csv 1D, .pgm 2D, .bhv 3D)")
        ->required();
    den->add_option("--output", output, "output file (.csv/.pgm/.bhv)")->required();
    den->add_option("--report", report_path, "write the JSON report here");
    den->add_option("--transform", flags.transform, "haar|bihaar|tihaar");
    den->add_option("--scheme", scheme_flag, "1d|2d|2d1d (checked against input)");
    den->add_option("--scales", scales, "decomposition depth J (1D/2D)");
    den->add_option("--scales-xy", scales_xy, "spatial depth J_xy (2D+1D)");
    den->add_option("--scales-nu", scales_nu, "spectral depth J_nu (2D+1D)");
    den->add_option("--alpha", flags.alpha, "false positive rate");
    den->add_option("--method", flags.method, "cltb|fab");
    den->add_flag("--universal", flags.universal, "universal threshold z");
    den->add_option("--fdr", flags.fdr, "Benjamini-Hochberg FDR rate");
    den->add_option("--lambda", flags.known_lambda, "known constant intensity");
    den->add_option("--c", flags.c, "filter normalization exponent");
    den->add_option("--pad", pad, "none|zero (zero-pad non-dyadic inputs)");

    auto* pv = app.add_subcommand("pvalues", "Exact (p_H, p_BH) pairs as CSV");
    std::string lambda_list, k0_list;
    pv->add_option("--lambda-list", lambda_list, "comma-separated lambda_j values");
    pv->add_option("--k0-list", k0_list, "comma-separated k0 values");

    auto* bench = app.add_subcommand("bench", "Benchmarks and experiments");
    bench->require_subcommand(1);
    BenchCommon bc;
    HyperFlags hf;
    auto* bn = bench->add_subcommand("nmise", "NMISE vs peak intensity");
    std::string peaks = "0.1,1,10,100";
    int reps = 100;
    std::size_t length = 1024;
    int nm_scales = 7;
    bool oracle = false;
    bn->add_option("--peaks", peaks, "peak intensities");
    bn->add_option("--reps", reps, "replicates per peak")->check(CLI::PositiveNumber);
    bn->add_option("--length", length, "signal length");
    bn->add_option("--scales", nm_scales, "decomposition depth");
    bn->add_option("--seed", bc.seed, "RNG seed");
    bn->add_option("--alpha", bc.alpha, "false positive rate");
    bn->add_option("--method", bc.method, "cltb|fab");
    bn->add_flag("--oracle", oracle, "score the true intensity (harness check)");

    auto* bf = bench->add_subcommand("flux", "hyperspectral flux-loss comparison");
    int flux_reps = 3;
    bf->add_option("--reps", flux_reps, "count realizations to average");
    bf->add_option("--seed", bc.seed, "RNG seed");
    bf->add_option("--alpha", bc.alpha, "false positive rate")->default_val(1e-5);
    bf->add_option("--method", bc.method, "cltb|fab");
    bf->add_option("--nx", hf.nx, "plane width");
    bf->add_option("--ny", hf.ny, "plane height");
    bf->add_option("--nnu", hf.nnu, "spectral bands");
    bf->add_option("--background", hf.background, "background counts per bin");
    bf->add_option("--sigma", hf.sigma, "source width in bins");
    bf->add_option("--scales-xy", hf.scales_xy, "spatial depth");
    bf->add_option("--scales-nu", hf.scales_nu, "spectral depth");

    auto* bs = bench->add_subcommand("speed", "bihaar vs tihaar wall time");
    bs->add_option("--seed", bc.seed, "RNG seed");
    bs->add_option("--alpha", bc.alpha, "false positive rate")->default_val(1e-5);
    bs->add_option("--method", bc.method, "cltb|fab");
    bs->add_option("--nx", hf.nx, "plane width");
    bs->add_option("--ny", hf.ny, "plane height");
    bs->add_option("--nnu", hf.nnu, "spectral bands");
    bs->add_option("--scales-xy", hf.scales_xy, "spatial depth");
    bs->add_option("--scales-nu", hf.scales_nu, "spectral depth");

    auto* sim = app.add_subcommand("simulate", "Write test datasets");
    sim->require_subcommand(1);
    auto* ss = sim->add_subcommand("smooth", "1D smooth intensity / counts");
    double peak = 10.0;
    std::size_t sim_len = 1024;
    std::uint64_t sim_seed = 12345;
    bool sim_intensity = false;
    std::string sim_out;
    ss->add_option("--peak", peak, "peak intensity");
    ss->add_option("--length", sim_len, "signal length");
    ss->add_option("--seed", sim_seed, "RNG seed");
    ss->add_flag("--intensity", sim_intensity, "write the intensity, not counts");
    ss->add_option("--out", sim_out, "output .csv")->required();
    auto* sh = sim->add_subcommand("hyperspectral", "2D+1D source volume");
    sh->add_option("--seed", sim_seed, "RNG seed");
    sh->add_flag("--intensity", sim_intensity, "write the intensity, not counts");
    sh->add_option("--out", sim_out, "output .bhv")->required();
    sh->add_option("--nx", hf.nx, "plane width");
    sh->add_option("--ny", hf.ny, "plane height");
    sh->add_option("--nnu", hf.nnu, "spectral bands");
    sh->add_option("--background", hf.background, "background counts per bin");
    sh->add_option("--sigma", hf.sigma, "source width in bins");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (*den)
            return cmd_denoise(input, output, report_path, scheme_flag, scales,
                               scales_xy, scales_nu, pad, flags);
        if (*pv) return cmd_pvalues(lambda_list, k0_list);
        if (*bench) {
            if (*bn) return cmd_bench_nmise(bc, peaks, reps, length, nm_scales, oracle);
            if (*bf) return cmd_bench_flux(bc, hf, flux_reps);
            if (*bs) return cmd_bench_speed(bc, hf);
        }
        if (*sim) {
            if (*ss)
                return cmd_simulate_smooth(peak, sim_len, sim_seed, sim_intensity,
                                           sim_out);
            if (*sh)
                return cmd_simulate_hyperspectral(hf, sim_seed, sim_intensity, sim_out);
        }
    } catch (const parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const size_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const structure_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
