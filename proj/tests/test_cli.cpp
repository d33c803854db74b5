#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "o2nc/schedule_free.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CmdResult {
    int code = -1;
    std::string out;
};

// Runs the CLI under test (path from O2NC_CLI) with stderr dropped.
CmdResult run_cli(const std::string& args) {
    const char* bin = std::getenv("O2NC_CLI");
    REQUIRE_MESSAGE(bin != nullptr, "O2NC_CLI must point at the built binary");
    const std::string cmd = std::string("\"") + bin + "\" " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CmdResult r;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
    const int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    REQUIRE_MESSAGE(f.good(), "missing file " << p.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void spit(const fs::path& p, const std::string& text) {
    std::ofstream f(p);
    f << text;
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("o2nc_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
};

std::string q(const fs::path& p) { return "\"" + p.string() + "\""; }

}  // namespace

TEST_CASE("params output is the library derivation verbatim") {
    const CmdResult r = run_cli("params --epsilon 0.7 --lambda 1 --G 1");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    const o2nc::ParamSet want = o2nc::derive_params(0.7, 1.0, 1.0, 0.0, 0.0);
    CHECK(doc.at("beta_star").get<double>() == want.beta_star);
    CHECK(doc.at("d_star").get<double>() == want.d_star);
    CHECK(doc.at("mu_star").get<double>() == want.mu_star);
    CHECK(doc.at("eta_star").get<double>() == want.eta_star);
    CHECK(doc.at("zeta_star").get<double>() == want.zeta_star);
    CHECK(doc.at("gamma").get<double>() == want.gamma);
    CHECK(doc.at("t_min").get<long long>() == 100);
}

TEST_CASE("parameter fixtures validate, corrupted ones do not") {
    TempDir tmp;
    const fs::path fixture = tmp.path / "params.json";
    const CmdResult r =
        run_cli("params --epsilon 0.9 --lambda 2 --G 1.5 --sigma 0.1 --cx 16 --out " + q(fixture));
    REQUIRE(r.code == 0);
    CHECK(slurp(fixture) == r.out);

    CHECK(run_cli("verify --params-file " + q(fixture)).code == 0);

    json doc = json::parse(r.out);
    doc["zeta_star"] = doc["zeta_star"].get<double>() * 1.01;
    const fs::path bad = tmp.path / "params_bad.json";
    spit(bad, doc.dump(2));
    const CmdResult v = run_cli("verify --params-file " + q(bad));
    CHECK(v.code == 1);
    CHECK(v.out.find("FAIL") != std::string::npos);
}

TEST_CASE("run prints a summary document and honors flag overrides") {
    TempDir tmp;
    const fs::path cfg_file = tmp.path / "run.json";
    spit(cfg_file, R"({
      "problem": "abs_sum",
      "dim": 4,
      "strategy": "OPTION_II",
      "epsilon": 0.8,
      "sigma": 0.1,
      "T": 30,
      "seeds": 2,
      "master_seed": 5
    })");
    const CmdResult r = run_cli("run --config " + q(cfg_file) + " --strategy OPTION_I");
    REQUIRE(r.code == 0);
    const json doc = json::parse(r.out);
    CHECK(doc.at("schema_version").get<int>() == 1);
    CHECK(doc.at("config").at("strategy").get<std::string>() == "OPTION_I");  // flag wins
    CHECK(doc.at("config").at("T").get<std::size_t>() == 30);
    CHECK(doc.at("seeds").size() == 2);
    CHECK(doc.at("aggregate").contains("expected_certificate"));
    for (const auto& s : doc.at("seeds")) {
        CHECK(s.at("expected_certificate").get<double>() > 0.0);
        CHECK(s.at("stability_factor").get<double>() <= 1.0 + 1e-12);
        CHECK_FALSE(s.contains("wall_ms"));  // timings must not enter the artifact
    }
}

TEST_CASE("rerunning a config reproduces artifact bytes; a new master seed does not") {
    TempDir tmp;
    const fs::path out_dir = tmp.path / "artifacts";
    const std::string base = "run --problem abs_sum --dim 4 --strategy OPTION_III "
                             "--epsilon 0.8 --sigma 0.1 --T 25 --seeds 2 --master-seed 9 --out " +
                             q(out_dir);
    REQUIRE(run_cli(base).code == 0);
    const std::string summary_first = slurp(out_dir / "summary.json");
    const std::string trace_first = slurp(out_dir / "trace_seed0.csv");
    REQUIRE(fs::exists(out_dir / "trace_seed1.csv"));

    REQUIRE(run_cli(base).code == 0);
    CHECK(slurp(out_dir / "summary.json") == summary_first);
    CHECK(slurp(out_dir / "trace_seed0.csv") == trace_first);

    const fs::path other_dir = tmp.path / "artifacts_other";
    const std::string reseeded = "run --problem abs_sum --dim 4 --strategy OPTION_III "
                                 "--epsilon 0.8 --sigma 0.1 --T 25 --seeds 2 --master-seed 10 --out " +
                                 q(other_dir);
    REQUIRE(run_cli(reseeded).code == 0);
    const json a = json::parse(summary_first);
    const json b = json::parse(slurp(other_dir / "summary.json"));
    CHECK(a.at("seeds")[0].at("expected_certificate").get<double>() !=
          b.at("seeds")[0].at("expected_certificate").get<double>());
}

TEST_CASE("configuration mistakes exit with code 2") {
    CHECK(run_cli("run --strategy OPTION_IV --T 5").code == 2);
    CHECK(run_cli("run --strategy OPTION_III --dim 4 --T 5 --gamma 0.5").code == 2);
    CHECK(run_cli("params --epsilon 0.5").code == 2);       // missing required flags
    CHECK(run_cli("params --epsilon 10 --lambda 1 --G 1").code == 2);  // out of regime
    CHECK(run_cli("verify --suite nonsense").code == 2);
    CHECK(run_cli("").code == 2);                           // a subcommand is required
    CHECK(run_cli("--help").code == 0);
}

TEST_CASE("unknown config keys are rejected loudly") {
    TempDir tmp;
    const fs::path cfg_file = tmp.path / "typo.json";
    spit(cfg_file, R"({"problem": "abs_sum", "dim": 4, "stratgy": "OPTION_I"})");
    CHECK(run_cli("run --config " + q(cfg_file)).code == 2);
}

TEST_CASE("divergent runs exit with code 3") {
    TempDir tmp;
    const fs::path drift = tmp.path / "drift.json";
    // constant unit slope: plain SGD with gamma near DBL_MAX overflows fast
    spit(drift, R"({
      "name": "drift1d",
      "dim": 1,
      "lipschitz_G": 1.0,
      "pieces": [{"value": {"coeffs": [1.0], "offset": 0.0}}]
    })");
    const CmdResult r = run_cli("run --problem-file " + q(drift) +
                                " --strategy SF_SGD --sigma 0 --epsilon 0.5 --gamma 1e308 --T 10");
    CHECK(r.code == 3);

    // the same problem file drives an ordinary run fine
    const CmdResult ok = run_cli("run --problem-file " + q(drift) +
                                 " --strategy OPTION_II --sigma 0 --epsilon 0.5 --T 10");
    CHECK(ok.code == 0);
}

TEST_CASE("identity suite passes end to end") {
    const CmdResult r = run_cli("verify --suite identities --master-seed 3");
    CHECK(r.code == 0);
    CHECK(r.out.find("PASS identities/") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
}

TEST_CASE("equivalence subcommand reports its discrepancies") {
    const CmdResult r = run_cli("equivalence --T 100 --dim 4 --epsilon 1 --master-seed 2");
    CHECK(r.code == 0);
    CHECK(r.out.rfind("PASS equivalence", 0) == 0);
}
