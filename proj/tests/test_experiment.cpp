#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "srcid/checks.hpp"
#include "srcid/experiment.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / ("srcid_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void spit(const fs::path& path, const std::string& text)
{
    std::ofstream(path, std::ios::binary) << text;
}

int run_cli(const std::string& args)
{
    const std::string command = std::string(SRCID_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

const char* example1_text = R"(# first example, written out in full
name = example1

[source]
kind = exponential_decay
amplitude = 6.51
cutoff = 20

[params]
alpha2 = 0.01
beta = 0.5
nu = 1.51
x0 = 2

[grid]
n = 4096
t_total = 40
pad = 1

[sweep]
p = 2
deltas = 0.01, 0.02, 0.03, 0.04, 0.05, 0.06, 0.07, 0.08, 0.09, 0.1
seeds = 1-20
mu_rule = theorem2
noise = gaussian
)";

std::string expect_config_error(const std::string& text)
{
    try {
        srcid::parse_config(text, "cfg");
    } catch (const srcid::ConfigError& e) {
        return e.what();
    }
    FAIL("expected a ConfigError");
    return {};
}

} // namespace

TEST_CASE("presets")
{
    const auto e1 = srcid::preset("example1");
    CHECK(e1.alpha2 == 0.01);
    CHECK(e1.nu == 1.51);
    CHECK(e1.p == 2.0);
    CHECK(e1.deltas.size() == 10);
    CHECK(e1.deltas.back() == doctest::Approx(0.1));
    CHECK(e1.seeds.size() == 20);
    const auto e2 = srcid::preset("example2");
    CHECK(e2.x0 == 3.0);
    CHECK(e2.p == 3.0);
    CHECK(std::holds_alternative<srcid::PiecewiseConstant<double>>(e2.source));
    CHECK_THROWS_AS(srcid::preset("example3"), srcid::ConfigError);
    CHECK_NOTHROW(srcid::validate(e1));
    CHECK_NOTHROW(srcid::validate(e2));
}

TEST_CASE("overrides")
{
    auto c = srcid::preset("example1");
    srcid::apply_override(c, "params.x0", "3.5");
    srcid::apply_override(c, "sweep.seeds", "1-3, 7");
    srcid::apply_override(c, "sweep.mu_rule", "manual:0.2");
    CHECK(c.x0 == 3.5);
    CHECK(c.seeds == std::vector<std::uint64_t>{1, 2, 3, 7});
    CHECK(c.mu_rule == srcid::MuRule::manual(0.2));

    try {
        srcid::apply_override(c, "params.gamma", "1");
        FAIL("expected a ConfigError");
    } catch (const srcid::ConfigError& e) {
        CHECK(e.key() == "params.gamma");
        CHECK(std::string(e.what()).find("params.gamma") != std::string::npos);
    }
    CHECK_THROWS_AS(srcid::apply_override(c, "params.nu", "lots"), srcid::ConfigError);
    CHECK_THROWS_AS(srcid::apply_override(c, "source.pieces", "0:1:1"), srcid::ConfigError);
    CHECK_THROWS_AS(srcid::apply_override(c, "sweep.noise", "pink"), srcid::ConfigError);
    CHECK(srcid::config_keys().size() >= 17);
}

TEST_CASE("config parsing")
{
    const auto c = srcid::parse_config(example1_text);
    CHECK(c.name == "example1");
    CHECK(c.alpha2 == 0.01);
    CHECK(c.grid.n == 4096);
    CHECK(c.deltas == srcid::preset("example1").deltas);
    CHECK(c.seeds == srcid::preset("example1").seeds);

    const auto from_preset = srcid::parse_config("preset = example2\n[params]\nx0 = 4\n");
    CHECK(from_preset.x0 == 4.0);
    CHECK(from_preset.p == 3.0);

    const auto pieces = srcid::parse_config(
        "[source]\nkind = piecewise_constant\npieces = 0:5:1, 5:inf:0\n[params]\nalpha2=1\nbeta=0\nnu=1\nx0=1\n"
        "[grid]\nn=64\nt_total=10\n[sweep]\np=1\n");
    CHECK(std::get<srcid::PiecewiseConstant<double>>(pieces.source).pieces.size() == 2);
}

TEST_CASE("config errors carry line and key")
{
    try {
        srcid::parse_config("preset = example1\n\n[params]\nx0 = two\n", "cfg");
        FAIL("expected a ConfigError");
    } catch (const srcid::ConfigError& e) {
        CHECK(e.line() == 4);
        CHECK(e.key() == "params.x0");
        CHECK(std::string(e.what()).find("cfg:4") != std::string::npos);
    }
    CHECK(expect_config_error("preset = example1\n[params\n").find("cfg:2") != std::string::npos);
    CHECK(expect_config_error("preset = example1\njust words\n").find("cfg:2") != std::string::npos);
    CHECK(expect_config_error("preset = example1\n[mystery]\nkey = 1\n").find("mystery.key") != std::string::npos);
}

TEST_CASE("invalid parameters are rejected")
{
    CHECK(expect_config_error("preset = example1\n[params]\nnu = 0\n").find("nu") != std::string::npos);
    CHECK(expect_config_error("preset = example1\n[params]\nalpha2 = -1\n").find("alpha") != std::string::npos);
    CHECK(expect_config_error("preset = example1\n[sweep]\ndeltas = 0.1, 1.5\n").find("delta") != std::string::npos);
    CHECK(expect_config_error("preset = example1\n[sweep]\np = 0\n").find("p > 0") != std::string::npos);
    CHECK(expect_config_error("preset = example1\n[grid]\nn = 1000\n").find("power of two") != std::string::npos);
    CHECK(expect_config_error("preset = example2\n[grid]\nt_total = 10\n").size() > 0);
    CHECK_THROWS_AS(srcid::load_config("/nonexistent/srcid.cfg"), srcid::ConfigError);
}

TEST_CASE("number formatting")
{
    CHECK(srcid::format_number(0.1) == "0.1");
    CHECK(srcid::format_number(2.0) == "2");
    CHECK(srcid::format_number(1e-10) == "1e-10");
    CHECK(srcid::reconstruction_filename(0.05) == "reconstruction_0.05.csv");
    CHECK(srcid::fnv1a64("") == 0xcbf29ce484222325ull);
    CHECK(srcid::fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("running an experiment writes the tables")
{
    const auto dir = scratch("run");
    const auto result = srcid::run_preset(
        "example2", {{"sweep.seeds", "1-3"}, {"sweep.deltas", "0.01,0.1"}, {"output.dir", dir.string()}});
    REQUIRE(result.rows.size() == 2);
    CHECK(result.reports.size() == 6);
    CHECK(result.files.size() == 4);

    const auto errors = slurp(dir / "errors.csv");
    CHECK(errors.rfind("delta,mu,err_unreg_mean,err_unreg_min,err_unreg_max,err_reg_mean,err_reg_min,err_reg_max,"
                       "bound,rule,seeds\n",
                       0) == 0);
    CHECK(std::count(errors.begin(), errors.end(), '\n') == 3);
    const auto rec = slurp(dir / "reconstruction_0.01.csv");
    CHECK(rec.rfind("t,f_true,f_unreg,f_reg\n", 0) == 0);
    CHECK(std::count(rec.begin(), rec.end(), '\n') == 4097);
    CHECK(slurp(dir / "manifest.txt").find("x0") != std::string::npos);
}

TEST_CASE("config file and preset produce byte-identical tables")
{
    const auto a = scratch("preset");
    const auto b = scratch("config");
    srcid::run_preset("example1", {{"output.dir", a.string()}});
    spit(b / "example1.cfg", std::string(example1_text) + "[output]\ndir = " + b.string() + "\n");
    const auto result = srcid::run_config(b / "example1.cfg");
    CHECK(slurp(a / "errors.csv") == slurp(b / "errors.csv"));
    CHECK(slurp(a / "reconstruction_0.05.csv") == slurp(b / "reconstruction_0.05.csv"));
    CHECK(result.rows.size() == 10);
}

TEST_CASE("rate measurement")
{
    auto c = srcid::preset("example1");
    srcid::apply_override(c, "sweep.deltas", "1e-4, 1e-3, 1e-2, 1e-1");
    srcid::apply_override(c, "sweep.seeds", "1-4");
    srcid::apply_override(c, "sweep.mu_rule", "section5");
    const auto r = srcid::measure_rate(c);
    CHECK(r.theoretical == 0.5);
    CHECK(r.estimated > 0);
    CHECK(r.rows.size() == 4);

    srcid::apply_override(c, "sweep.deltas", "0.01, 0.1");
    CHECK_THROWS_AS(srcid::measure_rate(c), srcid::ConfigError);
}

TEST_CASE("command line exit codes")
{
    const auto dir = scratch("cli");
    CHECK(run_cli("run --preset example2 --seeds 1-2 --deltas 0.01,0.05 --out " + dir.string()) == 0);
    CHECK(fs::exists(dir / "errors.csv"));
    CHECK(run_cli("run --preset example2 --bogus-flag 1") == 2);
    CHECK(run_cli("run --preset example9") == 2);
    CHECK(run_cli("run --preset example1 --deltas 0.1,1.5 --out " + dir.string()) == 2);
    CHECK(run_cli("run") == 2);
    CHECK(run_cli("") == 2);

    spit(dir / "bad.cfg", "preset = example1\n[params]\nnu = 0\n");
    CHECK(run_cli("run --config " + (dir / "bad.cfg").string()) == 2);
    CHECK(run_cli("run --config " + (dir / "missing.cfg").string()) == 2);

    CHECK(run_cli("rate --preset example2 --deltas 1e-4,1e-3,1e-2,1e-1 --seeds 1-2") == 0);
    CHECK(run_cli("rate --preset example2 --deltas 0.1,0.2") == 2);
    // The stated multiplier constant is known to fail on the first example.
    CHECK(run_cli("check --random-sets 2") == 3);
}
