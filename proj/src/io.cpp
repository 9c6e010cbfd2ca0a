#include "bihaar/io.hpp"

#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "bihaar/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "BHV1 payload I/O assumes a little-endian host");

namespace bihaar {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw parse_error(path + ": cannot open");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw parse_error(path + ": cannot open for writing");
    out.write(bytes.data(), std::streamsize(bytes.size()));
    if (!out) throw parse_error(path + ": write failed");
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Skips whitespace and PGM '#' comments, returns the next unsigned integer.
unsigned long next_pgm_uint(const std::string& s, std::size_t& pos,
                            const std::string& path) {
    while (pos < s.size()) {
        if (std::isspace((unsigned char)s[pos])) {
            ++pos;
        } else if (s[pos] == '#') {
            while (pos < s.size() && s[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    if (pos >= s.size() || !std::isdigit((unsigned char)s[pos]))
        throw parse_error(path + ": expected integer at byte offset " +
                          std::to_string(pos));
    unsigned long v = 0;
    while (pos < s.size() && std::isdigit((unsigned char)s[pos])) {
        v = v * 10 + (unsigned long)(s[pos] - '0');
        ++pos;
    }
    return v;
}

}  // namespace

NdArray read_csv_1d(const std::string& path) {
    const std::string body = read_file(path);
    std::vector<double> vals;
    std::size_t pos = 0, line = 0;
    while (pos < body.size()) {
        std::size_t eol = body.find('\n', pos);
        if (eol == std::string::npos) eol = body.size();
        std::string tok = body.substr(pos, eol - pos);
        if (!tok.empty() && tok.back() == '\r') tok.pop_back();
        ++line;
        if (!tok.empty()) {
            char* end = nullptr;
            const double v = std::strtod(tok.c_str(), &end);
            if (end == tok.c_str() || *end != '\0')
                throw parse_error(path + ": bad number on line " + std::to_string(line) +
                                  " (byte offset " + std::to_string(pos) + ")");
            vals.push_back(v);
        }
        pos = eol + 1;
    }
    if (vals.empty()) throw parse_error(path + ": no samples");
    NdArray out({vals.size()});
    out.data = std::move(vals);
    return out;
}

void write_csv_1d(const std::string& path, const NdArray& x) {
    std::string body;
    body.reserve(x.size() * 8);
    for (double v : x.data) {
        body += fmt_double(v);
        body += '\n';
    }
    write_file(path, body);
}

NdArray read_pgm(const std::string& path) {
    const std::string s = read_file(path);
    if (s.size() < 2 || s[0] != 'P' || (s[1] != '2' && s[1] != '5'))
        throw parse_error(path + ": not a PGM (expected P2/P5 magic at byte offset 0)");
    const bool binary = s[1] == '5';
    std::size_t pos = 2;
    const unsigned long nx = next_pgm_uint(s, pos, path);
    const unsigned long ny = next_pgm_uint(s, pos, path);
    const unsigned long maxval = next_pgm_uint(s, pos, path);
    if (nx == 0 || ny == 0 || maxval == 0 || maxval > 65535)
        throw parse_error(path + ": bad PGM header fields");
    NdArray img({ny, nx});
    if (binary) {
        if (pos >= s.size() || !std::isspace((unsigned char)s[pos]))
            throw parse_error(path + ": missing whitespace after maxval at byte offset " +
                              std::to_string(pos));
        ++pos;  // single whitespace byte, then raster
        const std::size_t bytes_per = maxval > 255 ? 2 : 1;
        const std::size_t need = nx * ny * bytes_per;
        if (s.size() - pos < need)
            throw parse_error(path + ": truncated P5 payload, need " +
                              std::to_string(need) + " bytes, have " +
                              std::to_string(s.size() - pos) + " (at byte offset " +
                              std::to_string(pos) + ")");
        for (std::size_t i = 0; i < nx * ny; ++i) {
            unsigned v;
            if (bytes_per == 2)
                v = (unsigned((unsigned char)s[pos + 2 * i]) << 8) |
                    unsigned((unsigned char)s[pos + 2 * i + 1]);
            else
                v = (unsigned char)s[pos + i];
            img[i] = double(v);
        }
    } else {
        for (std::size_t i = 0; i < nx * ny; ++i)
            img[i] = double(next_pgm_uint(s, pos, path));
    }
    return img;
}

void write_pgm(const std::string& path, const NdArray& img, unsigned maxval,
               bool binary) {
    if (img.rank() != 2) throw size_error("write_pgm: image must be 2-D");
    if (maxval == 0 || maxval > 65535)
        throw domain_error("write_pgm: maxval must lie in [1, 65535]");
    std::string body = binary ? "P5\n" : "P2\n";
    body += std::to_string(img.dims[1]) + " " + std::to_string(img.dims[0]) + "\n";
    body += std::to_string(maxval) + "\n";
    for (std::size_t i = 0; i < img.size(); ++i) {
        long v = std::lround(img[i]);
        v = std::max(0l, std::min(long(maxval), v));
        if (binary) {
            if (maxval > 255) {
                body += char((v >> 8) & 0xff);
                body += char(v & 0xff);
            } else {
                body += char(v & 0xff);
            }
        } else {
            body += std::to_string(v);
            body += (i + 1) % img.dims[1] == 0 ? '\n' : ' ';
        }
    }
    write_file(path, body);
}

NdArray read_bhv1(const std::string& path) {
    const std::string s = read_file(path);
    const std::size_t eol = s.find('\n');
    if (eol == std::string::npos)
        throw parse_error(path + ": missing header newline (byte offset 0)");
    std::istringstream hdr(s.substr(0, eol));
    std::string magic, dtype;
    unsigned long long nx = 0, ny = 0, nnu = 0;
    hdr >> magic >> nx >> ny >> nnu >> dtype;
    if (magic != "BHV1")
        throw parse_error(path + ": bad magic '" + magic + "' (byte offset 0)");
    if (hdr.fail() || nx == 0 || ny == 0 || nnu == 0)
        throw parse_error(path + ": bad header fields (byte offset 0)");
    if (dtype != "u32" && dtype != "f64")
        throw parse_error(path + ": dtype must be u32 or f64 (byte offset 0)");
    const std::size_t count = std::size_t(nx) * ny * nnu;
    const std::size_t elem = dtype == "u32" ? 4 : 8;
    const std::size_t payload = s.size() - (eol + 1);
    if (payload != count * elem)
        throw parse_error(path + ": payload is " + std::to_string(payload) +
                          " bytes, expected " + std::to_string(count * elem) +
                          " (at byte offset " + std::to_string(eol + 1) + ")");
    NdArray vol({std::size_t(nnu), std::size_t(ny), std::size_t(nx)});
    const char* p = s.data() + eol + 1;
    if (dtype == "u32") {
        for (std::size_t i = 0; i < count; ++i) {
            std::uint32_t v;
            std::memcpy(&v, p + 4 * i, 4);
            vol[i] = double(v);
        }
    } else {
        std::memcpy(vol.data.data(), p, count * 8);
    }
    return vol;
}

void write_bhv1(const std::string& path, const NdArray& volume, Bhv1Type type) {
    if (volume.rank() != 3) throw size_error("write_bhv1: volume must be 3-D");
    const std::size_t nnu = volume.dims[0], ny = volume.dims[1], nx = volume.dims[2];
    std::string body = "BHV1 " + std::to_string(nx) + " " + std::to_string(ny) +
                       " " + std::to_string(nnu) + " " +
                       (type == Bhv1Type::U32 ? "u32" : "f64") + "\n";
    if (type == Bhv1Type::U32) {
        for (double d : volume.data) {
            if (!(d >= 0.0) || d != std::floor(d) || d > 4294967295.0)
                throw domain_error("write_bhv1: u32 payload needs integer values in range");
            const std::uint32_t v = std::uint32_t(d);
            char buf[4];
            std::memcpy(buf, &v, 4);
            body.append(buf, 4);
        }
    } else {
        body.append(reinterpret_cast<const char*>(volume.data.data()),
                    volume.size() * 8);
    }
    write_file(path, body);
}

std::string report_to_json(const DenoiseReport& report) {
    nlohmann::json j;
    j["transform"] = report.transform;
    j["scheme"] = report.scheme;
    j["method"] = report.method;
    j["mode"] = report.mode;
    j["alpha"] = report.alpha;
    j["c"] = report.c;
    if (report.mode == "bh-fdr") j["fdr_q"] = report.fdr_q;
    j["lambda_known"] = report.lambda_known;
    if (report.lambda_known) j["lambda"] = report.lambda_value;
    j["levels"] = report.levels;
    if (report.levels_nu > 0) j["levels_nu"] = report.levels_nu;
    j["seconds_total"] = report.seconds_total;
    j["seconds_testing"] = report.seconds_testing;
    j["seconds_transform"] = report.seconds_transform;
    if (!report.original_dims.empty()) j["original_dims"] = report.original_dims;
    if (!report.padded_dims.empty()) j["padded_dims"] = report.padded_dims;
    if (!report.pad_left.empty()) j["pad_left"] = report.pad_left;
    nlohmann::json bands = nlohmann::json::array();
    for (const auto& b : report.bands) {
        nlohmann::json e;
        e["band"] = b.label;
        e["stages"] = b.stages;
        e["tested"] = b.tested;
        e["kept"] = b.kept;
        e["lambda_min"] = b.lambda_min;
        e["lambda_median"] = b.lambda_median;
        e["lambda_max"] = b.lambda_max;
        e["k0_min"] = b.k0_min;
        e["k0_max"] = b.k0_max;
        e["z"] = b.z;
        e["seconds"] = b.seconds;
        bands.push_back(std::move(e));
    }
    j["bands"] = std::move(bands);
    return j.dump(2);
}

}  // namespace bihaar
