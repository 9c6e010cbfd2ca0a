#include "bihaar/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bihaar/errors.hpp"

namespace bihaar {

namespace {

std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
    std::ptrdiff_t m = i % std::ptrdiff_t(n);
    if (m < 0) m += std::ptrdiff_t(n);
    return std::size_t(m);
}

struct AxisView {
    std::size_t outer = 1, n = 1, inner = 1;
    AxisView(const std::vector<std::size_t>& dims, std::size_t axis) {
        n = dims[axis];
        for (std::size_t i = 0; i < axis; ++i) outer *= dims[i];
        for (std::size_t i = axis + 1; i < dims.size(); ++i) inner *= dims[i];
    }
};

void gather_line(const NdArray& a, const AxisView& v, std::size_t o,
                 std::size_t in_, std::vector<double>& buf) {
    const double* base = a.data.data() + (o * v.n) * v.inner + in_;
    for (std::size_t i = 0; i < v.n; ++i) buf[i] = base[i * v.inner];
}

void scatter_line(NdArray& a, const AxisView& v, std::size_t o, std::size_t in_,
                  const std::vector<double>& buf) {
    double* base = a.data.data() + (o * v.n) * v.inner + in_;
    for (std::size_t i = 0; i < v.n; ++i) base[i * v.inner] = buf[i];
}

void stage_analyze_line(const std::vector<double>& x, const FilterBank& fb,
                        std::vector<double>& a, std::vector<double>& d) {
    const std::size_t n = x.size(), h = n / 2;
    const double s = fb.analysis_scale();
    a.resize(h);
    d.resize(h);
    for (std::size_t k = 0; k < h; ++k) {
        double sa = 0.0, sd = 0.0;
        const std::ptrdiff_t base = std::ptrdiff_t(2 * k);
        for (std::size_t t = 0; t < fb.analysis_low.size(); ++t)
            sa += fb.analysis_low[t] * x[wrap(base + fb.analysis_low_off + std::ptrdiff_t(t), n)];
        for (std::size_t t = 0; t < fb.analysis_high.size(); ++t)
            sd += fb.analysis_high[t] * x[wrap(base + fb.analysis_high_off + std::ptrdiff_t(t), n)];
        a[k] = s * sa;
        d[k] = s * sd;
    }
}

void stage_synthesize_line(const std::vector<double>& a,
                           const std::vector<double>& d, const FilterBank& fb,
                           std::vector<double>& out) {
    const std::size_t h = a.size(), n = 2 * h;
    const double s = fb.synthesis_scale();
    const double rinv = fb.stage_r_inv();
    out.assign(n, 0.0);
    const std::size_t tl = fb.synthesis_low.size(), th = fb.synthesis_high.size();
    for (std::size_t k = 0; k < h; ++k) {
        const std::ptrdiff_t base = std::ptrdiff_t(2 * k);
        const double av = s * a[k], dv = s * d[k];
        for (std::size_t t = 0; t < tl; ++t)
            out[wrap(base + fb.synthesis_low_off + std::ptrdiff_t(t), n)] +=
                fb.synthesis_low[tl - 1 - t] * av;
        for (std::size_t t = 0; t < th; ++t)
            out[wrap(base + fb.synthesis_high_off + std::ptrdiff_t(t), n)] +=
                fb.synthesis_high[th - 1 - t] * dv;
    }
    if (rinv != 1.0)
        for (double& v : out) v *= rinv;
}

std::vector<std::size_t> halved(std::vector<std::size_t> dims, std::size_t axis) {
    dims[axis] /= 2;
    return dims;
}

void require_even(const NdArray& a, std::size_t axis, const char* op) {
    if (a.dims[axis] % 2 != 0)
        throw size_error(std::string(op) + ": axis length " +
                         std::to_string(a.dims[axis]) + " is odd");
}

void require_divisible(std::size_t n, int levels, const char* what) {
    if (levels < 1) throw domain_error(std::string(what) + ": levels must be >= 1");
    const std::size_t block = std::size_t(1) << levels;
    if (n % block != 0)
        throw size_error(std::string(what) + ": length " + std::to_string(n) +
                         " not divisible by 2^" + std::to_string(levels));
}

}  // namespace

namespace stages {

void analyze_axis(const NdArray& in, std::size_t axis, const FilterBank& fb,
                  NdArray& approx, NdArray& detail) {
    require_even(in, axis, "analyze_axis");
    const AxisView v(in.dims, axis);
    approx = NdArray(halved(in.dims, axis));
    detail = NdArray(halved(in.dims, axis));
    const AxisView vo(approx.dims, axis);
    std::vector<double> line(v.n), a, d;
    for (std::size_t o = 0; o < v.outer; ++o)
        for (std::size_t i = 0; i < v.inner; ++i) {
            gather_line(in, v, o, i, line);
            stage_analyze_line(line, fb, a, d);
            scatter_line(approx, vo, o, i, a);
            scatter_line(detail, vo, o, i, d);
        }
}

NdArray synthesize_axis(const NdArray& approx, const NdArray& detail,
                        std::size_t axis, const FilterBank& fb) {
    if (!approx.same_shape(detail))
        throw structure_error("synthesize_axis: approx/detail shape mismatch");
    std::vector<std::size_t> dims = approx.dims;
    dims[axis] *= 2;
    NdArray out(dims);
    const AxisView vi(approx.dims, axis);
    const AxisView vo(out.dims, axis);
    std::vector<double> a(vi.n), d(vi.n), line;
    for (std::size_t o = 0; o < vi.outer; ++o)
        for (std::size_t i = 0; i < vi.inner; ++i) {
            gather_line(approx, vi, o, i, a);
            gather_line(detail, vi, o, i, d);
            stage_synthesize_line(a, d, fb, line);
            scatter_line(out, vo, o, i, line);
        }
    return out;
}

void ti_analyze_axis(const NdArray& in, std::size_t axis, const FilterBank& fb,
                     std::size_t dilation, NdArray& approx, NdArray& detail) {
    const AxisView v(in.dims, axis);
    approx = NdArray(in.dims);
    detail = NdArray(in.dims);
    const double s = fb.analysis_scale();
    std::vector<double> line(v.n), a(v.n), d(v.n);
    for (std::size_t o = 0; o < v.outer; ++o)
        for (std::size_t i = 0; i < v.inner; ++i) {
            gather_line(in, v, o, i, line);
            for (std::size_t k = 0; k < v.n; ++k) {
                const double x0 = line[k];
                const double x1 = line[(k + dilation) % v.n];
                a[k] = s * (x0 + x1);
                d[k] = s * (x1 - x0);
            }
            scatter_line(approx, v, o, i, a);
            scatter_line(detail, v, o, i, d);
        }
}

NdArray ti_synthesize_axis(const NdArray& approx, const NdArray& detail,
                           std::size_t axis, const FilterBank& fb,
                           std::size_t dilation) {
    if (!approx.same_shape(detail))
        throw structure_error("ti_synthesize_axis: approx/detail shape mismatch");
    NdArray out(approx.dims);
    const AxisView v(out.dims, axis);
    const double s = fb.synthesis_scale();
    std::vector<double> a(v.n), d(v.n), line(v.n);
    for (std::size_t o = 0; o < v.outer; ++o)
        for (std::size_t i = 0; i < v.inner; ++i) {
            gather_line(approx, v, o, i, a);
            gather_line(detail, v, o, i, d);
            for (std::size_t k = 0; k < v.n; ++k) {
                const std::size_t km = (k + v.n - dilation % v.n) % v.n;
                line[k] = 0.5 * (s * (a[k] - d[k]) + s * (a[km] + d[km]));
            }
            scatter_line(out, v, o, i, line);
        }
    return out;
}

}  // namespace stages

Pyramid forward_1d(const NdArray& signal, int levels, const FilterBank& bank,
                   Boundary) {
    if (signal.rank() != 1) throw size_error("forward_1d: input must be 1-D");
    require_divisible(signal.dims[0], levels, "forward_1d");
    Pyramid pyr;
    pyr.scheme = Scheme::OneD;
    pyr.bank = bank;
    pyr.input_dims = signal.dims;
    pyr.j_spatial = levels;
    NdArray a = signal, na, d;
    for (int j = 1; j <= levels; ++j) {
        stages::analyze_axis(a, 0, bank, na, d);
        PyrBand band;
        band.sp_detail = true;
        band.sp_scale = j;
        band.orient = Orient::Det1D;
        band.data = std::move(d);
        pyr.details.push_back(std::move(band));
        a = std::move(na);
    }
    pyr.approx = std::move(a);
    return pyr;
}

NdArray inverse_1d(const Pyramid& pyr) {
    if (pyr.scheme != Scheme::OneD || pyr.undecimated)
        throw structure_error("inverse_1d: pyramid scheme mismatch");
    NdArray a = pyr.approx;
    for (int j = pyr.j_spatial; j >= 1; --j) {
        const PyrBand* band = nullptr;
        for (const auto& b : pyr.details)
            if (b.sp_scale == j) band = &b;
        if (!band || !band->data.same_shape(a))
            throw structure_error("inverse_1d: missing or misshapen band at scale " +
                                  std::to_string(j));
        a = stages::synthesize_axis(a, band->data, 0, pyr.bank);
    }
    return a;
}

namespace {

// One 2D analysis level: x pass then y pass. H = detail along x,
// V = detail along y, D = detail along both. Works on the trailing two axes
// so the same code serves planes of a volume.
void analyze_level_2d(const NdArray& in, const FilterBank& fb, NdArray& a,
                      NdArray& h, NdArray& v, NdArray& d) {
    const std::size_t ax_x = in.rank() - 1, ax_y = in.rank() - 2;
    NdArray lx, hx;
    stages::analyze_axis(in, ax_x, fb, lx, hx);
    stages::analyze_axis(lx, ax_y, fb, a, v);
    stages::analyze_axis(hx, ax_y, fb, h, d);
}

NdArray synthesize_level_2d(const NdArray& a, const NdArray& h, const NdArray& v,
                            const NdArray& d, const FilterBank& fb) {
    const std::size_t ax_x = a.rank() - 1, ax_y = a.rank() - 2;
    NdArray lx = stages::synthesize_axis(a, v, ax_y, fb);
    NdArray hx = stages::synthesize_axis(h, d, ax_y, fb);
    return stages::synthesize_axis(lx, hx, ax_x, fb);
}

}  // namespace

Pyramid forward_2d(const NdArray& image, int levels, const FilterBank& bank,
                   Boundary) {
    if (image.rank() != 2) throw size_error("forward_2d: input must be 2-D");
    require_divisible(image.dims[0], levels, "forward_2d");
    require_divisible(image.dims[1], levels, "forward_2d");
    Pyramid pyr;
    pyr.scheme = Scheme::TwoD;
    pyr.bank = bank;
    pyr.input_dims = image.dims;
    pyr.j_spatial = levels;
    NdArray a = image;
    for (int j = 1; j <= levels; ++j) {
        NdArray na, h, v, d;
        analyze_level_2d(a, bank, na, h, v, d);
        for (auto [orient, arr] : {std::pair<Orient, NdArray*>{Orient::H, &h},
                                   {Orient::V, &v},
                                   {Orient::D, &d}}) {
            PyrBand band;
            band.sp_detail = true;
            band.sp_scale = j;
            band.orient = orient;
            band.data = std::move(*arr);
            pyr.details.push_back(std::move(band));
        }
        a = std::move(na);
    }
    pyr.approx = std::move(a);
    return pyr;
}

namespace {

const PyrBand* find_band(const Pyramid& pyr, bool sp_detail, int sp_scale,
                         Orient orient, bool nu_detail, int nu_scale) {
    for (const auto& b : pyr.details)
        if (b.sp_detail == sp_detail && b.sp_scale == sp_scale &&
            b.orient == orient && b.nu_detail == nu_detail &&
            b.nu_scale == nu_scale)
            return &b;
    return nullptr;
}

const NdArray& need_band(const Pyramid& pyr, bool sp_detail, int sp_scale,
                         Orient orient, bool nu_detail, int nu_scale) {
    const PyrBand* b = find_band(pyr, sp_detail, sp_scale, orient, nu_detail, nu_scale);
    if (!b) throw structure_error("pyramid: missing band");
    return b->data;
}

}  // namespace

NdArray inverse_2d(const Pyramid& pyr) {
    if (pyr.scheme != Scheme::TwoD || pyr.undecimated)
        throw structure_error("inverse_2d: pyramid scheme mismatch");
    NdArray a = pyr.approx;
    for (int j = pyr.j_spatial; j >= 1; --j) {
        const NdArray& h = need_band(pyr, true, j, Orient::H, false, 0);
        const NdArray& v = need_band(pyr, true, j, Orient::V, false, 0);
        const NdArray& d = need_band(pyr, true, j, Orient::D, false, 0);
        if (!h.same_shape(a) || !v.same_shape(a) || !d.same_shape(a))
            throw structure_error("inverse_2d: band shape mismatch at scale " +
                                  std::to_string(j));
        a = synthesize_level_2d(a, h, v, d, pyr.bank);
    }
    return a;
}

Pyramid forward_2d1d(const NdArray& volume, int levels_xy, int levels_nu,
                     const FilterBank& bank, Boundary) {
    if (volume.rank() != 3) throw size_error("forward_2d1d: input must be 3-D");
    require_divisible(volume.dims[1], levels_xy, "forward_2d1d (y)");
    require_divisible(volume.dims[2], levels_xy, "forward_2d1d (x)");
    require_divisible(volume.dims[0], levels_nu, "forward_2d1d (nu)");
    Pyramid pyr;
    pyr.scheme = Scheme::TwoPlusOneD;
    pyr.bank = bank;
    pyr.input_dims = volume.dims;
    pyr.j_spatial = levels_xy;
    pyr.j_spectral = levels_nu;

    // Spatial bands, each still a full-length stack along nu.
    struct SpatialBand { bool detail; int scale; Orient orient; NdArray data; };
    std::vector<SpatialBand> spatial;
    NdArray a = volume;
    for (int j = 1; j <= levels_xy; ++j) {
        NdArray na, h, v, d;
        analyze_level_2d(a, bank, na, h, v, d);
        spatial.push_back({true, j, Orient::H, std::move(h)});
        spatial.push_back({true, j, Orient::V, std::move(v)});
        spatial.push_back({true, j, Orient::D, std::move(d)});
        a = std::move(na);
    }
    spatial.push_back({false, levels_xy, Orient::None, std::move(a)});

    // 1D decomposition along nu of every spatial band.
    for (auto& sb : spatial) {
        NdArray cur = std::move(sb.data), nxt, det;
        for (int t = 1; t <= levels_nu; ++t) {
            stages::analyze_axis(cur, 0, bank, nxt, det);
            PyrBand band;
            band.sp_detail = sb.detail;
            band.sp_scale = sb.scale;
            band.orient = sb.orient;
            band.nu_detail = true;
            band.nu_scale = t;
            band.data = std::move(det);
            pyr.details.push_back(std::move(band));
            cur = std::move(nxt);
        }
        if (!sb.detail) {
            pyr.approx = std::move(cur);
        } else {
            PyrBand band;
            band.sp_detail = true;
            band.sp_scale = sb.scale;
            band.orient = sb.orient;
            band.nu_detail = false;
            band.nu_scale = levels_nu;
            band.data = std::move(cur);
            pyr.details.push_back(std::move(band));
        }
    }
    return pyr;
}

NdArray inverse_2d1d(const Pyramid& pyr) {
    if (pyr.scheme != Scheme::TwoPlusOneD || pyr.undecimated)
        throw structure_error("inverse_2d1d: pyramid scheme mismatch");

    // Spectral synthesis per spatial band, then spatial synthesis.
    auto rebuild_nu = [&](bool sp_detail, int sp_scale, Orient orient) {
        NdArray cur = sp_detail
                          ? need_band(pyr, true, sp_scale, orient, false, pyr.j_spectral)
                          : pyr.approx;
        for (int t = pyr.j_spectral; t >= 1; --t) {
            const NdArray& det = need_band(pyr, sp_detail, sp_scale, orient, true, t);
            if (!det.same_shape(cur))
                throw structure_error("inverse_2d1d: spectral band shape mismatch");
            cur = stages::synthesize_axis(cur, det, 0, pyr.bank);
        }
        return cur;
    };

    NdArray a = rebuild_nu(false, pyr.j_spatial, Orient::None);
    for (int j = pyr.j_spatial; j >= 1; --j) {
        NdArray h = rebuild_nu(true, j, Orient::H);
        NdArray v = rebuild_nu(true, j, Orient::V);
        NdArray d = rebuild_nu(true, j, Orient::D);
        a = synthesize_level_2d(a, h, v, d, pyr.bank);
    }
    return a;
}

Pyramid forward_ti(const NdArray& input, int levels, double c, Boundary) {
    const FilterBank bank = FilterBank::haar(c);
    Pyramid pyr;
    pyr.bank = bank;
    pyr.undecimated = true;
    pyr.input_dims = input.dims;
    pyr.j_spatial = levels;
    if (input.rank() == 1) {
        require_divisible(input.dims[0], levels, "forward_ti");
        pyr.scheme = Scheme::OneD;
        NdArray a = input, na, d;
        for (int j = 1; j <= levels; ++j) {
            stages::ti_analyze_axis(a, 0, bank, std::size_t(1) << (j - 1), na, d);
            PyrBand band;
            band.sp_detail = true;
            band.sp_scale = j;
            band.orient = Orient::Det1D;
            band.data = std::move(d);
            pyr.details.push_back(std::move(band));
            a = std::move(na);
        }
        pyr.approx = std::move(a);
        return pyr;
    }
    if (input.rank() != 2) throw size_error("forward_ti: input must be 1-D or 2-D");
    require_divisible(input.dims[0], levels, "forward_ti");
    require_divisible(input.dims[1], levels, "forward_ti");
    pyr.scheme = Scheme::TwoD;
    NdArray a = input;
    for (int j = 1; j <= levels; ++j) {
        const std::size_t dil = std::size_t(1) << (j - 1);
        NdArray lx, hx, na, hb, vb, db;
        stages::ti_analyze_axis(a, 1, bank, dil, lx, hx);
        stages::ti_analyze_axis(lx, 0, bank, dil, na, vb);
        stages::ti_analyze_axis(hx, 0, bank, dil, hb, db);
        for (auto [orient, arr] : {std::pair<Orient, NdArray*>{Orient::H, &hb},
                                   {Orient::V, &vb},
                                   {Orient::D, &db}}) {
            PyrBand band;
            band.sp_detail = true;
            band.sp_scale = j;
            band.orient = orient;
            band.data = std::move(*arr);
            pyr.details.push_back(std::move(band));
        }
        a = std::move(na);
    }
    pyr.approx = std::move(a);
    return pyr;
}

Pyramid forward_ti_2d1d(const NdArray& volume, int levels_xy, int levels_nu,
                        double c, Boundary) {
    if (volume.rank() != 3)
        throw size_error("forward_ti_2d1d: input must be 3-D");
    require_divisible(volume.dims[1], levels_xy, "forward_ti_2d1d (y)");
    require_divisible(volume.dims[2], levels_xy, "forward_ti_2d1d (x)");
    require_divisible(volume.dims[0], levels_nu, "forward_ti_2d1d (nu)");
    const FilterBank bank = FilterBank::haar(c);
    Pyramid pyr;
    pyr.scheme = Scheme::TwoPlusOneD;
    pyr.bank = bank;
    pyr.undecimated = true;
    pyr.input_dims = volume.dims;
    pyr.j_spatial = levels_xy;
    pyr.j_spectral = levels_nu;

    struct SpatialBand { bool detail; int scale; Orient orient; NdArray data; };
    std::vector<SpatialBand> spatial;
    NdArray a = volume;
    for (int j = 1; j <= levels_xy; ++j) {
        const std::size_t dil = std::size_t(1) << (j - 1);
        NdArray lx, hx, na, hb, vb, db;
        stages::ti_analyze_axis(a, 2, bank, dil, lx, hx);
        stages::ti_analyze_axis(lx, 1, bank, dil, na, vb);
        stages::ti_analyze_axis(hx, 1, bank, dil, hb, db);
        spatial.push_back({true, j, Orient::H, std::move(hb)});
        spatial.push_back({true, j, Orient::V, std::move(vb)});
        spatial.push_back({true, j, Orient::D, std::move(db)});
        a = std::move(na);
    }
    spatial.push_back({false, levels_xy, Orient::None, std::move(a)});

    for (auto& sb : spatial) {
        NdArray cur = std::move(sb.data), nxt, det;
        for (int t = 1; t <= levels_nu; ++t) {
            stages::ti_analyze_axis(cur, 0, bank, std::size_t(1) << (t - 1), nxt, det);
            PyrBand band;
            band.sp_detail = sb.detail;
            band.sp_scale = sb.scale;
            band.orient = sb.orient;
            band.nu_detail = true;
            band.nu_scale = t;
            band.data = std::move(det);
            pyr.details.push_back(std::move(band));
            cur = std::move(nxt);
        }
        if (!sb.detail) {
            pyr.approx = std::move(cur);
        } else {
            PyrBand band;
            band.sp_detail = true;
            band.sp_scale = sb.scale;
            band.orient = sb.orient;
            band.nu_detail = false;
            band.nu_scale = levels_nu;
            band.data = std::move(cur);
            pyr.details.push_back(std::move(band));
        }
    }
    return pyr;
}

NdArray inverse_ti(const Pyramid& pyr) {
    if (!pyr.undecimated)
        throw structure_error("inverse_ti: pyramid is not undecimated");
    const FilterBank& bank = pyr.bank;
    if (pyr.scheme == Scheme::OneD) {
        NdArray a = pyr.approx;
        for (int j = pyr.j_spatial; j >= 1; --j) {
            const NdArray& d = need_band(pyr, true, j, Orient::Det1D, false, 0);
            a = stages::ti_synthesize_axis(a, d, 0, bank, std::size_t(1) << (j - 1));
        }
        return a;
    }
    if (pyr.scheme == Scheme::TwoD) {
        NdArray a = pyr.approx;
        for (int j = pyr.j_spatial; j >= 1; --j) {
            const std::size_t dil = std::size_t(1) << (j - 1);
            const NdArray& h = need_band(pyr, true, j, Orient::H, false, 0);
            const NdArray& v = need_band(pyr, true, j, Orient::V, false, 0);
            const NdArray& d = need_band(pyr, true, j, Orient::D, false, 0);
            NdArray lx = stages::ti_synthesize_axis(a, v, 0, bank, dil);
            NdArray hx = stages::ti_synthesize_axis(h, d, 0, bank, dil);
            a = stages::ti_synthesize_axis(lx, hx, 1, bank, dil);
        }
        return a;
    }
    // 2D+1D
    auto rebuild_nu = [&](bool sp_detail, int sp_scale, Orient orient) {
        NdArray cur = sp_detail
                          ? need_band(pyr, true, sp_scale, orient, false, pyr.j_spectral)
                          : pyr.approx;
        for (int t = pyr.j_spectral; t >= 1; --t) {
            const NdArray& det = need_band(pyr, sp_detail, sp_scale, orient, true, t);
            cur = stages::ti_synthesize_axis(cur, det, 0, bank, std::size_t(1) << (t - 1));
        }
        return cur;
    };
    NdArray a = rebuild_nu(false, pyr.j_spatial, Orient::None);
    for (int j = pyr.j_spatial; j >= 1; --j) {
        const std::size_t dil = std::size_t(1) << (j - 1);
        NdArray h = rebuild_nu(true, j, Orient::H);
        NdArray v = rebuild_nu(true, j, Orient::V);
        NdArray d = rebuild_nu(true, j, Orient::D);
        NdArray lx = stages::ti_synthesize_axis(a, v, 1, bank, dil);
        NdArray hx = stages::ti_synthesize_axis(h, d, 1, bank, dil);
        a = stages::ti_synthesize_axis(lx, hx, 2, bank, dil);
    }
    return a;
}

}  // namespace bihaar
