#include "tmnn/experiment.hpp"

#include "tmnn/io.hpp"
#include "tmnn/metrics.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

using namespace tmnn;

namespace {

namespace fs = std::filesystem;

fs::path work_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "tmnn_exp_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Every line minus its final column (wall time is never reproducible).
std::string drop_last_column(const std::string& csv) {
    std::string out;
    std::istringstream is(csv);
    std::string line;
    while (std::getline(is, line)) {
        const auto comma = line.rfind(',');
        out += line.substr(0, comma);
        out += '\n';
    }
    return out;
}

void expect_parse_error(const std::string& text, const std::string& needle) {
    try {
        parse_spec_text(text);
        FAIL("expected SpecParseError for:\n" << text);
    } catch (const SpecParseError& e) {
        const std::string msg = e.what();
        if (msg.find(needle) == std::string::npos)
            FAIL("message `" << msg << "` does not mention `" << needle << "`");
    }
}

}  // namespace

TEST_CASE("empty spec yields the documented defaults") {
    const ExperimentSpec spec = parse_spec_text("");
    CHECK(spec.phantom.kind == PhantomKind::cine);
    CHECK(spec.phantom.n1 == 64);
    CHECK(spec.phantom.n2 == 64);
    CHECK(spec.phantom.n3 == 10);
    CHECK(spec.phantom.seed == 1);
    CHECK(spec.mask.kind == MaskKind::radial);
    CHECK(spec.mask.lines == 30);
    CHECK(spec.mask.seed == 2);
    CHECK(spec.mask.vary_per_frame);
    CHECK(!spec.noise.snr_db.has_value());
    CHECK(spec.noise.seed == 3);
    CHECK(spec.output_dir == "tmnn_out");
    REQUIRE(spec.solvers.size() == 1);
    CHECK(spec.solvers[0].name == "tmnn");
    CHECK(spec.solvers[0].config.lambda1 == 2.5e-3);
    CHECK(spec.solvers[0].config.lambda2 == 7.5e-3);
    CHECK(!spec.solvers[0].config.mu1.has_value());
    CHECK(spec.solvers[0].config.max_iters == 200);
    CHECK(spec.solvers[0].config.rel_tol == 1e-4);
    CHECK(spec.solvers[0].config.variant == SolverVariant::kspace_fast);
}

TEST_CASE("noise presence switches the default penalty pair") {
    const ExperimentSpec noisy = parse_spec_text("noise.snr_db = 20\n");
    CHECK(noisy.solvers[0].config.lambda1 == 0.1);
    CHECK(noisy.solvers[0].config.lambda2 == 0.1);

    // +inf is the no-noise sentinel
    const ExperimentSpec clean = parse_spec_text("noise.snr_db = inf\n");
    CHECK(!clean.noise.snr_db.has_value());
    CHECK(clean.solvers[0].config.lambda1 == 2.5e-3);
}

TEST_CASE("full spec round trip") {
    const std::string text =
        "# dynamic study           \n"
        "phantom.kind = perfusion  # comment after value\n"
        "phantom.n1 = 32\n"
        "phantom.n2 = 24\n"
        "phantom.n3 = 12\n"
        "phantom.seed = 7\n"
        "phantom.uptake_rate = 1.5\n"
        "\n"
        "mask.kind = random\n"
        "mask.ratio = 0.25\n"
        "mask.seed = 8\n"
        "mask.vary_per_frame = false\n"
        "noise.snr_db = 15.5\n"
        "noise.seed = 9\n"
        "output.dir = /tmp/somewhere\n"
        "solver.fast.lambda1 = 0.05\n"
        "solver.fast.lambda2 = 0.02\n"
        "solver.fast.mu1 = 0.3\n"
        "solver.fast.mu2 = 0.4\n"
        "solver.fast.max_iters = 77\n"
        "solver.fast.rel_tol = 1e-5\n"
        "solver.fast.variant = image_domain\n";
    const ExperimentSpec spec = parse_spec_text(text);
    CHECK(spec.phantom.kind == PhantomKind::perfusion);
    CHECK(spec.phantom.n1 == 32);
    CHECK(spec.phantom.n2 == 24);
    CHECK(spec.phantom.n3 == 12);
    CHECK(spec.phantom.seed == 7);
    CHECK(spec.phantom.uptake_rate == 1.5);
    CHECK(spec.mask.kind == MaskKind::random);
    CHECK(spec.mask.ratio == 0.25);
    CHECK(spec.mask.seed == 8);
    CHECK(!spec.mask.vary_per_frame);
    REQUIRE(spec.noise.snr_db.has_value());
    CHECK(*spec.noise.snr_db == 15.5);
    CHECK(spec.noise.seed == 9);
    CHECK(spec.output_dir == "/tmp/somewhere");
    REQUIRE(spec.solvers.size() == 1);
    const SolverConfig& c = spec.solvers[0].config;
    CHECK(spec.solvers[0].name == "fast");
    CHECK(c.lambda1 == 0.05);
    CHECK(c.lambda2 == 0.02);
    CHECK(c.mu1 == 0.3);
    CHECK(c.mu2 == 0.4);
    CHECK(c.max_iters == 77);
    CHECK(c.rel_tol == 1e-5);
    CHECK(c.variant == SolverVariant::image_domain);
}

TEST_CASE("solvers keep their declaration order") {
    const ExperimentSpec spec = parse_spec_text(
        "solver.mnn.lambda2 = 0.1\n"
        "solver.tnn.lambda1 = 0.1\n"
        "solver.mnn.max_iters = 10\n");
    REQUIRE(spec.solvers.size() == 2);
    CHECK(spec.solvers[0].name == "mnn");
    CHECK(spec.solvers[1].name == "tnn");
    // a set lambda zeroes its unset partner instead of pulling defaults
    CHECK(spec.solvers[0].config.lambda1 == 0.0);
    CHECK(spec.solvers[1].config.lambda2 == 0.0);
}

TEST_CASE("parse diagnostics cite lines and fields") {
    expect_parse_error("phantom.n1\n", "line 1: expected `key = value`");
    expect_parse_error("= 3\n", "missing key");
    expect_parse_error("phantom.n1 =\n", "missing value for key `phantom.n1`");
    expect_parse_error("phantom.bogus = 1\n", "line 1: unknown key `phantom.bogus`");
    expect_parse_error("weird.key = 1\n", "unknown key `weird.key`");
    expect_parse_error("\nphantom.n1 = 16\nphantom.n1 = 32\n",
                       "line 3: duplicate key `phantom.n1` (first set at line 2)");
    expect_parse_error("phantom.n1 = twelve\n", "phantom.n1: expected an integer, got `twelve`");
    expect_parse_error("phantom.n1 = 4\n", "phantom.n1: out of range, must be >= 8");
    expect_parse_error("phantom.n3 = 1\n", "phantom.n3: out of range, must be >= 2");
    expect_parse_error("phantom.seed = -4\n", "seed must be nonnegative");
    expect_parse_error("phantom.kind = blob\n", "expected cine or perfusion");
    expect_parse_error("phantom.motion_amplitude = big\n", "expected a real number, got `big`");
    expect_parse_error("noise.snr_db = nan\n", "must not be NaN");
    expect_parse_error("mask.kind = spiral\n", "expected radial, random, or full");
    expect_parse_error("mask.ratio = 0.2\n", "mask.ratio applies only when mask.kind = random");
    expect_parse_error("mask.kind = random\nmask.ratio = 1.5\n",
                       "mask.ratio: out of range, must lie in (0, 1)");
    expect_parse_error("mask.kind = random\nmask.lines = 12\n",
                       "mask.lines applies only when mask.kind = radial");
    expect_parse_error("mask.lines = 0\n", "mask.lines: out of range, must be >= 1");
    expect_parse_error("mask.vary_per_frame = yes\n", "expected true or false, got `yes`");
    expect_parse_error("solver.x = 3\n", "solver keys look like solver.<name>.<field>");
    expect_parse_error("solver.a b.lambda1 = 1\n", "invalid solver name `a b`");
    expect_parse_error("solver.a.bogus = 1\n", "unknown key `solver.a.bogus`");
    expect_parse_error("solver.a.lambda1 = -1\n", "solver.a.lambda1: must be nonnegative");
    expect_parse_error("solver.a.mu1 = 0\n", "solver.a.mu1: must be positive");
    expect_parse_error("solver.a.rel_tol = 2\n", "rel_tol: out of range");
    expect_parse_error("solver.a.max_iters = 0\n", "max_iters: must be >= 1");
    expect_parse_error("solver.a.variant = gpu\n", "expected image_domain or kspace_fast");
    expect_parse_error("solver.a.lambda1 = 0\nsolver.a.lambda2 = 0\n",
                       "solver.a: lambda1 and lambda2 are both zero");
}

TEST_CASE("parse errors are config errors") {
    CHECK_THROWS_AS(parse_spec_text("junk\n"), ConfigError);
    CHECK_THROWS_AS(parse_spec("/nonexistent/path/spec.conf"), ConfigError);
}

TEST_CASE("spec files parse like spec text") {
    const fs::path dir = work_dir("parse_file");
    const fs::path p = dir / "exp.conf";
    std::ofstream(p) << "phantom.n1 = 16\nphantom.n2 = 16\nphantom.n3 = 4\n";
    const ExperimentSpec spec = parse_spec(p.string());
    CHECK(spec.phantom.n1 == 16);
    CHECK(spec.phantom.n3 == 4);
}

TEST_CASE("results csv formatting") {
    ResultRow row;
    row.phantom = "cine-16x16x4";
    row.mask = "radial-6";
    row.ratio = 0.3125;
    row.noise = "none";
    row.method = "tmnn";
    row.snr_db = 12.345678949;
    row.iters = 42;
    row.wall_time_s = 0.25;
    row.ok = true;
    CHECK(format_results_csv({row}) ==
          "phantom,mask,ratio,noise,method,snr_db,iters,wall_time_s\n"
          "cine-16x16x4,radial-6,0.312500,none,tmnn,12.345679,42,0.250000\n");

    row.ok = false;
    row.snr_db = std::numeric_limits<double>::quiet_NaN();
    row.iters = 0;
    row.wall_time_s = 0.0;
    CHECK(format_results_csv({row}).find("tmnn,nan,0,0.000000") != std::string::npos);
}

TEST_CASE("experiment run persists every artifact") {
    const fs::path dir = work_dir("artifacts");
    ExperimentSpec spec = parse_spec_text(
        "phantom.n1 = 16\n"
        "phantom.n2 = 16\n"
        "phantom.n3 = 4\n"
        "mask.kind = radial\n"
        "mask.lines = 6\n"
        "solver.tmnn.max_iters = 60\n"
        "solver.tmnn.rel_tol = 1e-4\n");
    spec.output_dir = (dir / "out").string();

    const ExperimentResult result = run_experiment(spec);
    REQUIRE(result.rows.size() == 1);
    CHECK(result.all_ok);
    const ResultRow& row = result.rows[0];
    CHECK(row.ok);
    CHECK(row.phantom == "cine-16x16x4");
    CHECK(row.mask == "radial-6");
    CHECK(row.noise == "none");
    CHECK(row.method == "tmnn");
    CHECK(row.iters >= 1);
    CHECK(row.iters <= 60);
    CHECK(std::isfinite(row.snr_db));

    const fs::path out = dir / "out";
    CHECK(fs::exists(out / "phantom.ctn3"));
    CHECK(fs::exists(out / "mask.ctn3"));
    CHECK(fs::exists(out / "kspace.ctn3"));
    CHECK(fs::exists(out / "results.csv"));
    for (int t = 0; t < 4; ++t) {
        char name[32];
        std::snprintf(name, sizeof name, "ref_f%03d.pgm", t);
        CHECK(fs::exists(out / name));
        std::snprintf(name, sizeof name, "recon_f%03d.pgm", t);
        CHECK(fs::exists(out / "tmnn" / name));
        std::snprintf(name, sizeof name, "error_f%03d.pgm", t);
        CHECK(fs::exists(out / "tmnn" / name));
    }
    CHECK(fs::exists(out / "tmnn" / "reconstruction.ctn3"));
    const std::string trace = slurp(out / "tmnn" / "trace.csv");
    CHECK(trace.rfind("iteration,cost,residual_z,residual_m,elapsed_s\n", 0) == 0);
    CHECK(std::count(trace.begin(), trace.end(), '\n') == row.iters + 1);

    CHECK(slurp(out / "results.csv") == format_results_csv(result.rows));
    CHECK(result.results_csv_path == (out / "results.csv").string());

    // realized ratio matches the stored mask
    const SamplingMask mask = load_mask((out / "mask.ctn3").string());
    CHECK(row.ratio == mask.ratio());

    // the reconstruction on disk is the one scored in the row
    const ComplexTensor3 phantom = load_tensor((out / "phantom.ctn3").string());
    const ComplexTensor3 recon = load_tensor((out / "tmnn" / "reconstruction.ctn3").string());
    CHECK(snr_db(phantom, recon) == row.snr_db);
}

TEST_CASE("reruns reproduce everything but the timings") {
    const fs::path dir = work_dir("rerun");
    ExperimentSpec spec = parse_spec_text(
        "phantom.n1 = 16\nphantom.n2 = 16\nphantom.n3 = 4\n"
        "mask.kind = radial\nmask.lines = 6\n"
        "noise.snr_db = 20\n"
        "solver.tmnn.max_iters = 40\n");

    spec.output_dir = (dir / "a").string();
    const ExperimentResult ra = run_experiment(spec);
    spec.output_dir = (dir / "b").string();
    const ExperimentResult rb = run_experiment(spec);
    REQUIRE(ra.all_ok);
    REQUIRE(rb.all_ok);

    CHECK(drop_last_column(slurp(dir / "a" / "results.csv")) ==
          drop_last_column(slurp(dir / "b" / "results.csv")));
    for (const char* f : {"phantom.ctn3", "mask.ctn3", "kspace.ctn3"})
        CHECK(slurp(dir / "a" / f) == slurp(dir / "b" / f));
    CHECK(slurp(dir / "a" / "tmnn" / "reconstruction.ctn3") ==
          slurp(dir / "b" / "tmnn" / "reconstruction.ctn3"));
}

TEST_CASE("seed override reseeds every stream") {
    const fs::path dir = work_dir("seeds");
    ExperimentSpec spec = parse_spec_text(
        "phantom.n1 = 16\nphantom.n2 = 16\nphantom.n3 = 4\n"
        "mask.kind = random\nmask.ratio = 0.4\n"
        "noise.snr_db = 20\n"
        "solver.tmnn.max_iters = 5\n");

    spec.output_dir = (dir / "a").string();
    RunOptions opts;
    run_experiment(spec, opts);
    spec.output_dir = (dir / "b").string();
    opts.seed_override = 1234;
    run_experiment(spec, opts);
    spec.output_dir = (dir / "c").string();
    run_experiment(spec, opts);

    CHECK(slurp(dir / "a" / "phantom.ctn3") != slurp(dir / "b" / "phantom.ctn3"));
    CHECK(slurp(dir / "a" / "mask.ctn3") != slurp(dir / "b" / "mask.ctn3"));
    CHECK(slurp(dir / "a" / "kspace.ctn3") != slurp(dir / "b" / "kspace.ctn3"));
    CHECK(slurp(dir / "b" / "phantom.ctn3") == slurp(dir / "c" / "phantom.ctn3"));
    CHECK(slurp(dir / "b" / "kspace.ctn3") == slurp(dir / "c" / "kspace.ctn3"));
}

TEST_CASE("solver comparison study") {
    const fs::path dir = work_dir("comparison");
    ExperimentSpec spec = parse_spec_text(
        "phantom.n1 = 24\nphantom.n2 = 24\nphantom.n3 = 6\n"
        "mask.kind = radial\nmask.lines = 8\n"
        "noise.snr_db = 20\n"
        "solver.tnn.lambda1 = 0.1\n"
        "solver.mnn.lambda2 = 0.1\n"
        "solver.tmnn.lambda1 = 0.1\n"
        "solver.tmnn.lambda2 = 0.1\n");
    spec.output_dir = (dir / "out").string();

    RunOptions opts;
    opts.threads = 3;
    const ExperimentResult result = run_experiment(spec, opts);
    REQUIRE(result.rows.size() == 3);
    CHECK(result.all_ok);
    CHECK(result.rows[0].method == "tnn");
    CHECK(result.rows[1].method == "mnn");
    CHECK(result.rows[2].method == "tmnn");
    for (const ResultRow& row : result.rows) {
        CHECK(row.ok);
        CHECK(std::isfinite(row.snr_db));
        CHECK(row.snr_db > 0.0);
    }
    const double tmnn = result.rows[2].snr_db;
    CHECK(tmnn >= std::max(result.rows[0].snr_db, result.rows[1].snr_db) - 1.0);
}

TEST_CASE("a failing solver is recorded without stopping the others") {
    const fs::path dir = work_dir("failure");
    // -inf target noise floods the measurements with non-finite values;
    // the solver rejects them and the run records the failure
    ExperimentSpec spec = parse_spec_text(
        "phantom.n1 = 16\nphantom.n2 = 16\nphantom.n3 = 4\n"
        "noise.snr_db = -inf\n"
        "solver.tmnn.max_iters = 5\n");
    spec.output_dir = (dir / "out").string();

    const ExperimentResult result = run_experiment(spec);
    REQUIRE(result.rows.size() == 1);
    CHECK(!result.all_ok);
    CHECK(!result.rows[0].ok);
    CHECK(!result.rows[0].error.empty());
    CHECK(std::isnan(result.rows[0].snr_db));
    CHECK(fs::exists(dir / "out" / "results.csv"));
    CHECK(slurp(dir / "out" / "results.csv").find("nan") != std::string::npos);
}

TEST_CASE("unusable output locations are reported as config errors") {
    const fs::path dir = work_dir("io_error");
    std::ofstream(dir / "blocker") << "x";
    ExperimentSpec spec = parse_spec_text("phantom.n1 = 16\nphantom.n2 = 16\nphantom.n3 = 4\n");
    spec.output_dir = (dir / "blocker" / "out").string();
    CHECK_THROWS_AS(run_experiment(spec), ConfigError);
}
