#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <algorithm>
#include <iterator>
#include <sys/wait.h>
#include <unistd.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "phm/cli/commands.hpp"
#include "phm/cli/literals.hpp"
#include "phm/cli/matrix_file.hpp"
#include "phm/errors.hpp"
#include "phm/generators.hpp"
#include "phm/metric_family.hpp"

using namespace phm;
using namespace phm::cli;
using nlohmann::json;
using phm::testing::mat2;
using phm::testing::max_abs_diff;
using phm::testing::sigma_x;
using phm::testing::sigma_z;

namespace fs = std::filesystem;

namespace {

struct Scratch {
    fs::path dir;
    Scratch() {
        dir = fs::temp_directory_path() / ("phm_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Scratch() {
        std::error_code ec;
        fs::remove_all(dir, ec);
    }
    std::string path(const std::string& name) const { return (dir / name).string(); }
    std::string matrix(const std::string& name, const ComplexMatrix& m) const {
        write_matrix_file(path(name), m);
        return path(name);
    }
    std::string text(const std::string& name, const std::string& body) const {
        std::ofstream(path(name)) << body;
        return path(name);
    }
};

const Scratch& scratch() {
    static Scratch s;
    return s;
}

struct Outcome {
    int code;
    json doc;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run(args, out, err);
    Outcome o{code, json(), out.str(), err.str()};
    o.doc = json::parse(o.out);  // throws if stdout is not exactly one document
    return o;
}

ComplexMatrix matrix_of(const json& j) { return from_matrix_json(j); }

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

const ComplexMatrix kDiag12 = mat2(1, 0, 0, 2);
const ComplexMatrix kRotation = mat2(0, 1, -1, 0);

}  // namespace

TEST_CASE("complex literals") {
    CHECK(parse_complex("1") == Complex(1, 0));
    CHECK(parse_complex("-2.5") == Complex(-2.5, 0));
    CHECK(parse_complex("2i") == Complex(0, 2));
    CHECK(parse_complex("-1e-3i") == Complex(0, -1e-3));
    CHECK(parse_complex("1+0i") == Complex(1, 0));
    CHECK(parse_complex("0+1i") == Complex(0, 1));
    CHECK(parse_complex("1.5e2-3.25i") == Complex(150, -3.25));
    CHECK(parse_complex("+1E+1+2E-1i") == Complex(10, 0.2));
    for (const char* bad : {"", "i", "1+i", "1+", "+i", "1 + 2i", "1+2j", "(1,2)", "1+2i3", "nan",
                            "inf", "1++2i", "1e", "abc"}) {
        CAPTURE(bad);
        CHECK_THROWS(parse_complex(bad));
    }
    CHECK(parse_complex_list("1+0i,0+1i,-2").size() == 3);
    CHECK(parse_complex_list("").empty());
    CHECK_THROWS(parse_complex_list("1,,2"));

    CHECK(parse_real("-3") == -3.0);
    CHECK(parse_real("3.14159265358979") == 3.14159265358979);
    CHECK_THROWS(parse_real("1.0x"));
    CHECK_THROWS(parse_real("2i"));
    CHECK(parse_real_list("1,-3") == std::vector<double>{1.0, -3.0});

    CHECK(parse_sign_list("+,-,+") == std::vector<int>{1, -1, 1});
    CHECK_THROWS(parse_sign_list("+,1"));
    CHECK(parse_bit_list("0,1") == std::vector<int>{0, 1});
    CHECK_THROWS(parse_bit_list("2"));
}

TEST_CASE("matrix files") {
    const auto& s = scratch();
    SUBCASE("round trip is exact") {
        const ComplexMatrix h = generate_via_spectrum(GeneratorConfig{5, 3, 1, 2}).h;
        CHECK(read_matrix_file(s.matrix("rt.json", h)) == h);
    }
    SUBCASE("malformed entries name the row and column") {
        const auto path = s.text("bad.json", R"({"schema":1,"n":2,"entries":[[[1,0],[0,0]],[[0,0],[2]]]})");
        const auto o = invoke({"analyze", path});
        CHECK(o.code == kExitInput);
        CHECK(o.doc["error"]["message"].get<std::string>().find("entries[1][1]") != std::string::npos);
        CHECK(o.err.find("entries[1][1]") != std::string::npos);
    }
    SUBCASE("non-square and non-finite inputs") {
        const auto ragged = s.text("ragged.json", R"({"schema":1,"n":2,"entries":[[[1,0],[0,0]]]})");
        CHECK(invoke({"analyze", ragged}).code == kExitInput);
        const auto text = s.text("nan.json", R"({"schema":1,"n":1,"entries":[[["nan",0]]]})");
        CHECK(invoke({"analyze", text}).code == kExitInput);
        const auto junk = s.text("junk.json", "{not json");
        CHECK(invoke({"analyze", junk}).code == kExitInput);
        CHECK(invoke({"analyze", s.path("missing.json")}).code == kExitInput);
    }
}

TEST_CASE("analyze") {
    const auto& s = scratch();
    SUBCASE("diag(1, 2)") {
        const auto o = invoke({"analyze", s.matrix("d12.json", kDiag12)});
        CHECK(o.code == kExitOk);
        CHECK(o.doc["schema"] == 1);
        CHECK(o.doc["command"] == "analyze");
        CHECK(o.doc["r"] == 2);
        CHECK(o.doc["p"] == 0);
        CHECK(o.doc["inertia_floor"] == json::array({0, 0}));
        CHECK(o.doc["class_count"] == 2);
        CHECK(o.doc["is_ph_admissible"] == true);
    }
    SUBCASE("rotation generator") {
        const auto o = invoke({"analyze", s.matrix("rot.json", kRotation)});
        CHECK(o.code == kExitOk);
        CHECK(o.doc["r"] == 0);
        CHECK(o.doc["p"] == 1);
        CHECK(o.doc["inertia_floor"] == json::array({1, 1}));
        CHECK(o.doc["class_count"] == 1);
        // Im z > 0 first
        CHECK(o.doc["eigenvalues"][0][1].get<double>() > 0.0);
    }
    SUBCASE("diag(i, 2) is not admissible") {
        ComplexMatrix h = ComplexMatrix::Zero(2, 2);
        h(0, 0) = Complex(0, 1);
        h(1, 1) = 2.0;
        const auto o = invoke({"analyze", s.matrix("di2.json", h)});
        CHECK(o.code == kExitClassification);
        CHECK(o.doc["is_ph_admissible"] == false);
        CHECK(o.doc["error"]["kind"].is_string());
    }
    SUBCASE("degenerate and ill-conditioned inputs") {
        CHECK(invoke({"analyze", s.matrix("id.json", ComplexMatrix::Identity(2, 2))}).code ==
              kExitDegenerate);
        CHECK(invoke({"analyze", s.matrix("ill.json", mat2(1, 1e10, 0, 2))}).code ==
              kExitIllConditioned);
    }
    SUBCASE("tolerances: flags and environment") {
        const auto near = s.matrix("near.json", mat2(1, 0, 0, 1 + 1e-6));
        CHECK(invoke({"analyze", near}).code == kExitOk);
        CHECK(invoke({"analyze", near, "--gap-tol", "1e-4"}).code == kExitDegenerate);
        ::setenv("PHM_DEFAULT_TOL", "1e-4", 1);
        CHECK(invoke({"analyze", near}).code == kExitDegenerate);
        CHECK(invoke({"analyze", near, "--gap-tol", "1e-8"}).code == kExitOk);
        ::setenv("PHM_DEFAULT_TOL", "soon", 1);
        CHECK(invoke({"analyze", near}).code == kExitInput);
        ::unsetenv("PHM_DEFAULT_TOL");
    }
    SUBCASE("usage errors still emit one JSON document") {
        auto o = invoke({});
        CHECK(o.code == kExitInput);
        CHECK(o.doc["error"]["kind"] == "usage");
        o = invoke({"analyze"});
        CHECK(o.code == kExitInput);
        o = invoke({"frobnicate", "x"});
        CHECK(o.code == kExitInput);
    }
}

TEST_CASE("metric") {
    const auto& s = scratch();
    const auto d12 = s.matrix("d12.json", kDiag12);
    const auto rot = s.matrix("rot.json", kRotation);
    SUBCASE("examples") {
        auto o = invoke({"metric", d12, "--mu", "1,-3"});
        CHECK(o.code == kExitOk);
        CHECK(max_abs_diff(matrix_of(o.doc["M"]), mat2(1, 0, 0, -3)) < 1e-12);
        CHECK(o.doc["inertia"] == json::array({1, 1, 0}));

        o = invoke({"metric", rot, "--tau", "1+0i"});
        CHECK(o.code == kExitOk);
        CHECK(max_abs_diff(matrix_of(o.doc["M"]), sigma_z()) < 1e-12);

        o = invoke({"metric", rot, "--tau", "0+1i"});
        CHECK(o.code == kExitOk);
        CHECK(max_abs_diff(matrix_of(o.doc["M"]), sigma_x()) < 1e-12);
        CHECK(o.doc["inertia"] == json::array({1, 1, 0}));
    }
    SUBCASE("--out writes the metric") {
        const auto out = s.path("m_out.json");
        const auto o = invoke({"metric", rot, "--tau", "1+0i", "--out", out});
        CHECK(o.code == kExitOk);
        CHECK(read_matrix_file(out) == matrix_of(o.doc["M"]));
    }
    SUBCASE("parameter errors") {
        auto o = invoke({"metric", d12, "--mu", "1"});
        CHECK(o.code == kExitParameter);
        CHECK(o.doc["error"]["message"].get<std::string>().find("(2, 0)") != std::string::npos);
        CHECK(invoke({"metric", d12, "--mu", "1,0"}).code == kExitParameter);
        CHECK(invoke({"metric", d12, "--mu", "1,1e-9"}).code == kExitParameter);
        CHECK(invoke({"metric", rot, "--tau", "0"}).code == kExitParameter);
        CHECK(invoke({"metric", rot, "--mu", "1"}).code == kExitParameter);
        CHECK(invoke({"metric", rot, "--tau", "1+i"}).code != kExitOk);
    }
}

TEST_CASE("canonical") {
    const auto& s = scratch();
    const auto d12 = s.matrix("d12.json", kDiag12);
    const auto rot = s.matrix("rot.json", kRotation);
    auto o = invoke({"canonical", d12, "--signs", "+,+"});
    CHECK(o.code == kExitOk);
    CHECK(max_abs_diff(matrix_of(o.doc["M"]), ComplexMatrix::Identity(2, 2)) < 1e-12);
    CHECK(o.doc["inertia"] == json::array({2, 0, 0}));

    o = invoke({"canonical", rot, "--n", "0", "--theta", "0"});
    CHECK(o.code == kExitOk);
    CHECK(max_abs_diff(matrix_of(o.doc["M"]), sigma_z()) < 1e-12);

    o = invoke({"canonical", rot, "--n", "1", "--theta", "3.14159265358979"});
    CHECK(o.code == kExitOk);
    CHECK(max_abs_diff(matrix_of(o.doc["M"]), sigma_z()) < 1e-12);

    // θ is reduced mod 2π
    o = invoke({"canonical", rot, "--n", "0", "--theta", "6.283185307179586"});
    CHECK(o.doc["class"]["theta"][0].get<double>() < 1e-12);

    CHECK(invoke({"canonical", d12, "--signs", "+"}).code == kExitParameter);
    CHECK(invoke({"canonical", rot, "--n", "0"}).code == kExitParameter);
}

TEST_CASE("metric and canonical agree through gauge absorption") {
    const auto& s = scratch();
    Rng rng(77);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const std::size_t n = 2 + seed % 5;
        const std::size_t p = seed % (n / 2 + 1);
        const auto inst = generate_via_spectrum(GeneratorConfig{n, n - 2 * p, p, seed});
        const auto path = s.matrix("agree.json", inst.h);
        const auto sd = analyze_spectrum(inst.h);
        const auto params = random_metric_parameters(sd.r, sd.p, rng);
        const auto gauge = gauge_absorb(sd, params);

        auto join = [](const auto& xs, auto fmt) {
            std::string t;
            for (const auto& x : xs) t += (t.empty() ? "" : ",") + fmt(x);
            return t;
        };
        auto num = [](double v) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.17g", v);
            return std::string(buf);
        };
        auto cplx = [&](Complex z) { return num(z.real()) + (z.imag() < 0 ? "" : "+") + num(z.imag()) + "i"; };

        std::vector<std::string> margs{"metric", path};
        if (sd.r) margs.insert(margs.end(), {"--mu", join(params.mu, num)});
        if (sd.p) margs.insert(margs.end(), {"--tau", join(params.tau, cplx)});
        const auto a = invoke(margs);
        REQUIRE(a.code == kExitOk);

        // Absorbing the gauge into S is not expressible on the command line, so the
        // canonical side is compared in-process against the CLI metric.
        const auto c = canonical_metric(gauge.sd, gauge.cls);
        const ComplexMatrix ma = matrix_of(a.doc["M"]);
        CHECK(max_abs_diff(ma, c.m) <= 1e-12 * ma.cwiseAbs().maxCoeff());
        CHECK(a.doc["inertia"] == json::array({c.inertia.positive, c.inertia.negative, 0}));
    }
}

TEST_CASE("enumerate") {
    const auto& s = scratch();
    auto o = invoke({"enumerate", s.matrix("d12.json", kDiag12)});
    CHECK(o.code == kExitOk);
    REQUIRE(o.doc["classes"].size() == 2);
    CHECK(o.doc["count"] == 2);
    CHECK(o.doc["classes"][0]["inertia"] == json::array({2, 0, 0}));
    CHECK(o.doc["classes"][1]["inertia"] == json::array({1, 1, 0}));
    // one class per line
    CHECK(std::count(o.out.begin(), o.out.end(), '\n') >= 3);

    o = invoke({"enumerate", s.matrix("d12.json", kDiag12), "--no-mod-global"});
    CHECK(o.doc["count"] == 4);

    o = invoke({"enumerate", s.matrix("rot.json", kRotation)});
    REQUIRE(o.doc["classes"].size() == 1);
    CHECK(o.doc["classes"][0]["inertia"] == json::array({1, 1, 0}));

    ComplexMatrix h = ComplexMatrix::Zero(3, 3);
    h(0, 0) = 3.0;
    h.bottomRightCorner(2, 2) = kRotation;
    o = invoke({"enumerate", s.matrix("r1p1.json", h)});
    REQUIRE(o.doc["classes"].size() == 2);
    // μ₁ = +1 on both representatives; they differ in the pair bit. Each {M, −M} orbit
    // carries both signatures, which the unquotiented listing shows.
    CHECK(o.doc["classes"][0]["inertia"] == json::array({2, 1, 0}));
    CHECK(o.doc["classes"][1]["inertia"] == json::array({2, 1, 0}));
    CHECK(o.doc["classes"][0]["n"] != o.doc["classes"][1]["n"]);
    o = invoke({"enumerate", s.path("r1p1.json"), "--no-mod-global"});
    REQUIRE(o.doc["classes"].size() == 4);
    int flipped = 0;
    for (const auto& c : o.doc["classes"]) flipped += c["inertia"] == json::array({1, 2, 0});
    CHECK(flipped == 2);

    ComplexMatrix big = ComplexMatrix::Zero(21, 21);
    for (Eigen::Index i = 0; i < 21; ++i) big(i, i) = static_cast<double>(i + 1);
    o = invoke({"enumerate", s.matrix("big.json", big)});
    CHECK(o.code == kExitCapExceeded);
    CHECK_FALSE(o.doc.contains("classes"));
}

TEST_CASE("oracle") {
    const auto& s = scratch();
    auto o = invoke({"oracle", s.matrix("d12.json", kDiag12)});
    CHECK(o.code == kExitOk);
    CHECK(o.doc["dimension"] == 2);
    CHECK(o.doc["max_projection_defect"].get<double>() <= 1e-8);
    CHECK(o.doc["params_recovered"] == true);

    o = invoke({"oracle", s.matrix("rot.json", kRotation)});
    CHECK(o.code == kExitOk);
    CHECK(o.doc["dimension"] == 2);

    o = invoke({"oracle", s.matrix("id.json", ComplexMatrix::Identity(2, 2))});
    CHECK(o.code == kExitDegenerate);
    CHECK(o.doc["dimension"] == 4);
    CHECK(o.doc["family_complete"] == false);

    o = invoke({"oracle", s.matrix("id33.json", ComplexMatrix::Identity(33, 33))});
    CHECK(o.code == kExitCapExceeded);

    ComplexMatrix h = ComplexMatrix::Zero(4, 4);
    h.diagonal() << 0.0, 1.0, 1.0 + 0.9e-8, 1.0 + 1.8e-8;
    o = invoke({"oracle", s.matrix("blur.json", h), "--gap-tol", "1e-12"});
    CHECK(o.doc["warning"].is_string());
}

TEST_CASE("generate") {
    const auto& s = scratch();
    SUBCASE("spectrum mode round-trips through analyze") {
        const auto out = s.path("g.json");
        auto o = invoke({"generate", "--n", "4", "--r", "2", "--p", "1", "--seed", "1", "--out", out});
        CHECK(o.code == kExitOk);
        CHECK(o.doc["residual"].get<double>() <= 1e-9);
        CHECK(o.doc["metric_out"] == s.path("g.metric.json"));
        const auto a = invoke({"analyze", out});
        CHECK(a.code == kExitOk);
        CHECK(a.doc["r"] == 2);
        CHECK(a.doc["p"] == 1);
        CHECK(invoke({"verify", out, s.path("g.metric.json")}).code == kExitOk);
    }
    SUBCASE("same flags twice give identical files") {
        const auto o1 = invoke({"generate", "--n", "5", "--r", "1", "--p", "2", "--seed", "9", "--out",
                             s.path("a.json")});
        const auto o2 = invoke({"generate", "--n", "5", "--r", "1", "--p", "2", "--seed", "9", "--out",
                             s.path("b.json")});
        CHECK(slurp(s.path("a.json")) == slurp(s.path("b.json")));
        CHECK(slurp(s.path("a.metric.json")) == slurp(s.path("b.metric.json")));
        CHECK(o1.doc["eigenvalues"] == o2.doc["eigenvalues"]);
    }
    SUBCASE("observable mode") {
        const auto m = s.matrix("sz.json", sigma_z());
        const auto out = s.path("phi.json");
        const auto o = invoke({"generate", "--mode", "observable", "--metric", m, "--seed", "3",
                            "--out", out, "--factor-out", s.path("a_factor.json")});
        CHECK(o.code == kExitOk);
        CHECK(o.doc["residual"].get<double>() <= 1e-12);
        const ComplexMatrix phi = read_matrix_file(out);
        CHECK(intertwining_residual(phi, sigma_z()) <= 1e-12);
        CHECK(max_abs_diff(phi, read_matrix_file(s.path("a_factor.json")) * sigma_z()) == 0.0);
        CHECK(invoke({"generate", "--mode", "observable", "--out", out}).code == kExitInput);
    }
    SUBCASE("errors") {
        CHECK(invoke({"generate", "--n", "3", "--r", "2", "--p", "1", "--out", s.path("x.json")}).code ==
              kExitParameter);
        CHECK(invoke({"generate", "--n", "4", "--r", "4", "--cond-max", "1.0001", "--out",
                   s.path("x.json")})
                  .code == kExitGeneration);
        CHECK(invoke({"generate", "--n", "2", "--r", "2"}).code == kExitInput);
        CHECK(invoke({"generate", "--mode", "other", "--out", s.path("x.json")}).code == kExitInput);
    }
}

TEST_CASE("verify") {
    const auto& s = scratch();
    const auto d12 = s.matrix("d12.json", kDiag12);
    auto o = invoke({"verify", d12, s.matrix("m13.json", mat2(1, 0, 0, -3))});
    CHECK(o.code == kExitOk);
    CHECK(o.doc["residual"] == 0.0);

    o = invoke({"verify", s.matrix("rot.json", kRotation), s.matrix("sz.json", sigma_z())});
    CHECK(o.code == kExitOk);
    CHECK(o.doc["residual"] == 0.0);
    CHECK(o.doc["inertia"] == json::array({1, 1, 0}));

    o = invoke({"verify", d12, s.matrix("sx.json", sigma_x())});
    CHECK(o.code != kExitOk);
    CHECK(o.doc["residual"].get<double>() > 1e-9);

    o = invoke({"verify", d12, s.matrix("nh.json", mat2(1, 1, 0, 1))});
    CHECK(o.code == kExitCheckFailed);
    CHECK(o.doc["hermiticity_defect"].get<double>() > 1e-10);

    CHECK(invoke({"verify", d12, s.matrix("i3.json", ComplexMatrix::Identity(3, 3))}).code ==
          kExitInput);
}

TEST_CASE("installed binary") {
    const auto& s = scratch();
    const auto d12 = s.matrix("d12.json", kDiag12);
    const std::string cmd = std::string(PHM_CLI_PATH) + " analyze " + d12 + " 2>/dev/null";
    FILE* pipe = ::popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    char buf[4096];
    while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
    const int status = ::pclose(pipe);
    CHECK(WIFEXITED(status));
    CHECK(WEXITSTATUS(status) == 0);
    const json doc = json::parse(out);
    CHECK(doc["class_count"] == 2);

    const std::string bad = std::string(PHM_CLI_PATH) + " verify " + d12 + " " +
                            s.matrix("sx.json", sigma_x()) + " >/dev/null 2>&1";
    const int st = std::system(bad.c_str());
    CHECK(WEXITSTATUS(st) == kExitCheckFailed);
}
