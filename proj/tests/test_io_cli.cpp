#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "bihaar/analysis.hpp"
#include "bihaar/errors.hpp"
#include "bihaar/io.hpp"
#include "support.hpp"

using namespace bihaar;
namespace fs = std::filesystem;

namespace {

fs::path tmp_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() /
                     ("bihaar_test_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    const fs::path out = tmp_dir() / "stdout.txt";
    const std::string cmd = std::string(BIHAAR_CLI_PATH) + " " + args + " > " +
                            out.string() + " 2> " + (tmp_dir() / "stderr.txt").string();
    const int rc = std::system(cmd.c_str());
    return RunResult{WEXITSTATUS(rc), slurp(out)};
}

}  // namespace

TEST_CASE("csv codec round trip and errors") {
    const fs::path p = tmp_dir() / "a.csv";
    NdArray x({5});
    x.data = {0.0, 3.0, 17.0, 2.5, 1e-9};
    write_csv_1d(p.string(), x);
    const NdArray y = read_csv_1d(p.string());
    CHECK(testsup::max_abs_diff(x, y) == 0.0);  // %.17g is lossless

    std::ofstream(p) << "1\nnot_a_number\n";
    CHECK_THROWS_AS(read_csv_1d(p.string()), parse_error);
    CHECK_THROWS_AS(read_csv_1d((tmp_dir() / "missing.csv").string()), parse_error);
}

TEST_CASE("pgm codec: P2 and P5 parse identically") {
    const fs::path p2 = tmp_dir() / "img2.pgm", p5 = tmp_dir() / "img5.pgm";
    NdArray img = testsup::random_counts({7, 9}, 4, 250);
    write_pgm(p2.string(), img, 255, false);
    write_pgm(p5.string(), img, 255, true);
    const NdArray a = read_pgm(p2.string());
    const NdArray b = read_pgm(p5.string());
    REQUIRE(a.dims == img.dims);
    CHECK(testsup::max_abs_diff(a, img) == 0.0);
    CHECK(testsup::max_abs_diff(a, b) == 0.0);

    // 16-bit binary samples
    NdArray big = testsup::random_counts({5, 4}, 9, 60000);
    write_pgm(p5.string(), big, 65535, true);
    CHECK(testsup::max_abs_diff(read_pgm(p5.string()), big) == 0.0);

    std::ofstream(p2, std::ios::binary) << "P6 2 2 255\n";
    CHECK_THROWS_AS(read_pgm(p2.string()), parse_error);
    std::ofstream(p2, std::ios::binary) << "P5\n4 4\n255\nab";  // truncated
    CHECK_THROWS_WITH_AS(read_pgm(p2.string()),
                         doctest::Contains("byte offset"), parse_error);
}

TEST_CASE("bhv1 codec round trips and structured errors") {
    const fs::path p = tmp_dir() / "v.bhv";
    NdArray vol = testsup::random_counts({3, 4, 5}, 8, 1000000);
    write_bhv1(p.string(), vol, Bhv1Type::U32);
    CHECK(testsup::max_abs_diff(read_bhv1(p.string()), vol) == 0.0);

    NdArray fvol = testsup::random_reals({2, 3, 4}, 5, -7.0, 7.0);
    write_bhv1(p.string(), fvol, Bhv1Type::F64);
    const NdArray back = read_bhv1(p.string());
    for (std::size_t i = 0; i < fvol.size(); ++i)
        CHECK(back[i] == fvol[i]);  // bit-exact

    std::ofstream(p, std::ios::binary) << "XHV1 2 2 2 u32\n";
    CHECK_THROWS_WITH_AS(read_bhv1(p.string()), doctest::Contains("magic"),
                         parse_error);
    std::ofstream(p, std::ios::binary) << "BHV1 2 2 2 u32\nshort";
    CHECK_THROWS_WITH_AS(read_bhv1(p.string()),
                         doctest::Contains("byte offset"), parse_error);
    std::ofstream(p, std::ios::binary) << "BHV1 2 2 2 f32\n";
    CHECK_THROWS_AS(read_bhv1(p.string()), parse_error);
}

TEST_CASE("cli: zero counts denoise to zeros, deterministically") {
    const fs::path in = tmp_dir() / "zeros.csv", out = tmp_dir() / "est.csv";
    {
        std::ofstream f(in);
        for (int i = 0; i < 64; ++i) f << "0\n";
    }
    const RunResult r = run_cli("denoise --input " + in.string() + " --output " +
                                out.string() + " --scales 4");
    CHECK(r.exit_code == 0);
    const NdArray est = read_csv_1d(out.string());
    REQUIRE(est.size() == 64);
    for (double v : est) CHECK(v == 0.0);

    // byte-identical reruns
    const std::string first = slurp(out);
    run_cli("denoise --input " + in.string() + " --output " + out.string() +
            " --scales 4");
    CHECK(slurp(out) == first);
}

TEST_CASE("cli: flag and domain errors use distinct exit codes") {
    const fs::path in = tmp_dir() / "zeros.csv", out = tmp_dir() / "est.csv";
    CHECK(run_cli("denoise --input " + in.string() + " --output " + out.string() +
                  " --alpha 2").exit_code == 2);
    CHECK(run_cli("denoise --no-such-flag").exit_code == 1);
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("denoise --help").exit_code == 0);
    CHECK(run_cli("pvalues --lambda-list 1,2").exit_code == 1);  // missing k0 list
    CHECK(run_cli("pvalues --lambda-list 1,x --k0-list 2").exit_code == 1);
    // non-dyadic input without --pad
    {
        std::ofstream f(in);
        for (int i = 0; i < 40; ++i) f << "1\n";
    }
    CHECK(run_cli("denoise --input " + in.string() + " --output " + out.string() +
                  " --scales 4").exit_code == 2);
    CHECK(run_cli("denoise --input " + in.string() + " --output " + out.string() +
                  " --scales 4 --pad zero").exit_code == 0);
    CHECK(run_cli("denoise --input " + in.string() + " --output " + out.string() +
                  " --scales 4 --pad reflect").exit_code == 0);
    CHECK(run_cli("denoise --input " + in.string() + " --output " + out.string() +
                  " --scales 4 --pad bogus").exit_code == 2);
}

TEST_CASE("cli: pvalues default grid carries the reference row") {
    const RunResult r = run_cli("pvalues");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    bool found = false;
    while (std::getline(lines, line)) {
        if (line.rfind("1,4,", 0) == 0) {
            double lam, ph, pbh, bound;
            long long k0;
            REQUIRE(std::sscanf(line.c_str(), "%lf,%lld,%lf,%lf,%lf", &lam, &k0,
                                &ph, &pbh, &bound) == 5);
            CHECK(std::abs(ph - 1.12e-3) / 1.12e-3 <= 5e-3);
            CHECK(std::abs(pbh - 4.57e-4) / 4.57e-4 <= 5e-3);
            CHECK(pbh <= bound + 1e-12);
            found = true;
        }
    }
    CHECK(found);
}

TEST_CASE("cli: oracle nmise is identically zero") {
    const RunResult r =
        run_cli("bench nmise --oracle --reps 2 --length 256 --scales 4 "
                "--peaks 1,10");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);  // header
    int rows = 0;
    while (std::getline(lines, line)) {
        double peak, nm;
        char method[32];
        REQUIRE(std::sscanf(line.c_str(), "%lf,%31[^,],%lf", &peak, method, &nm) == 3);
        CHECK(nm == 0.0);
        ++rows;
    }
    CHECK(rows == 6);  // 2 peaks x 3 methods
}

TEST_CASE("cli: miniature flux bench emits 2 loss rows + one row per band") {
    const RunResult r = run_cli(
        "bench flux --nx 33 --ny 33 --nnu 8 --sigma 2 --scales-xy 2 "
        "--scales-nu 2 --alpha 1e-3 --seed 5");
    REQUIRE(r.exit_code == 0);
    std::istringstream lines(r.out);
    std::string line;
    int loss_rows = 0, band_rows = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("loss,", 0) == 0) ++loss_rows;
        if (line.rfind("band,", 0) == 0) ++band_rows;
    }
    CHECK(loss_rows == 2);
    CHECK(band_rows == 8);
}

TEST_CASE("cli: hyperspectral demo settings are accepted end to end") {
    // production-style settings (J_xy = 3, J_nu = 5, FAB, alpha = 1e-5) on a
    // reduced non-dyadic volume; exercises simulate -> pad -> denoise -> bhv
    const fs::path vol = tmp_dir() / "cube.bhv", est = tmp_dir() / "est.bhv",
                   rep = tmp_dir() / "report.json";
    RunResult r = run_cli("simulate hyperspectral --nx 33 --ny 33 --nnu 32 "
                          "--seed 7 --out " + vol.string());
    REQUIRE(r.exit_code == 0);
    r = run_cli("denoise --input " + vol.string() + " --output " + est.string() +
                " --scales-xy 3 --scales-nu 5 --alpha 1e-5 --method fab "
                "--pad zero --report " + rep.string());
    REQUIRE(r.exit_code == 0);
    const NdArray e = read_bhv1(est.string());
    CHECK(e.dims == std::vector<std::size_t>{32, 33, 33});
    for (double v : e) CHECK(v >= 0.0);
    const std::string report = slurp(rep);
    CHECK(report.find("\"padded_dims\"") != std::string::npos);
    CHECK(report.find("\"bands\"") != std::string::npos);
}

TEST_CASE("cli: smooth simulation round trip through 1d denoise") {
    const fs::path sig = tmp_dir() / "sig.csv", est = tmp_dir() / "est.csv";
    RunResult r = run_cli("simulate smooth --peak 20 --length 512 --seed 3 --out " +
                          sig.string());
    REQUIRE(r.exit_code == 0);
    r = run_cli("denoise --input " + sig.string() + " --output " + est.string() +
                " --scales 5 --transform bihaar");
    REQUIRE(r.exit_code == 0);
    const NdArray e = read_csv_1d(est.string());
    CHECK(e.size() == 512);
    // the estimate should track the truth better than raw counts do
    const NdArray truth = gen_smooth(20.0, 512);
    const NdArray counts = read_csv_1d(sig.string());
    double err_est = 0.0, err_raw = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        err_est += (e[i] - truth[i]) * (e[i] - truth[i]) / truth[i];
        err_raw += (counts[i] - truth[i]) * (counts[i] - truth[i]) / truth[i];
    }
    CHECK(err_est < err_raw);
}
