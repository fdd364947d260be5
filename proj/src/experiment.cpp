#include "tmnn/experiment.hpp"

#include "tmnn/io.hpp"
#include "tmnn/metrics.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;

namespace tmnn {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string at_line(int line) { return "line " + std::to_string(line) + ": "; }

struct Entry {
    std::string value;
    int line = 0;
};

/// Raw scan result: validated key set with per-key source lines, plus
/// solver section names in first-appearance order.
struct RawSpec {
    std::map<std::string, Entry> kv;
    std::vector<std::string> solver_names;

    bool has(const std::string& key) const { return kv.count(key) != 0; }
    const Entry& at(const std::string& key) const { return kv.at(key); }
};

const std::set<std::string>& plain_keys() {
    static const std::set<std::string> keys = {
        "phantom.kind", "phantom.n1",   "phantom.n2",
        "phantom.n3",   "phantom.seed", "phantom.motion_amplitude",
        "phantom.uptake_rate",
        "mask.kind",    "mask.lines",   "mask.ratio",
        "mask.seed",    "mask.vary_per_frame",
        "noise.snr_db", "noise.seed",
        "output.dir",
    };
    return keys;
}

const std::set<std::string>& solver_fields() {
    static const std::set<std::string> keys = {
        "lambda1", "lambda2", "mu1",     "mu2",
        "max_iters", "rel_tol", "variant", "allow_pure_data_consistency",
    };
    return keys;
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isalnum((unsigned char)c) && c != '_' && c != '-') return false;
    return true;
}

RawSpec scan_lines(const std::string& text) {
    RawSpec raw;
    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        line = trim(line);
        if (line.empty()) continue;

        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw SpecParseError(at_line(lineno) + "expected `key = value`");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw SpecParseError(at_line(lineno) + "missing key before `=`");
        if (value.empty())
            throw SpecParseError(at_line(lineno) + "missing value for key `" + key + "`");

        if (key.rfind("solver.", 0) == 0) {
            const std::string rest = key.substr(7);
            const auto dot = rest.find('.');
            if (dot == std::string::npos)
                throw SpecParseError(at_line(lineno) +
                                     "solver keys look like solver.<name>.<field>");
            const std::string name = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            if (!valid_name(name))
                throw SpecParseError(at_line(lineno) + "invalid solver name `" + name +
                                     "` (use letters, digits, `_`, `-`)");
            if (!solver_fields().count(field))
                throw SpecParseError(at_line(lineno) + "unknown key `" + key + "`");
            if (std::find(raw.solver_names.begin(), raw.solver_names.end(), name) ==
                raw.solver_names.end())
                raw.solver_names.push_back(name);
        } else if (!plain_keys().count(key)) {
            throw SpecParseError(at_line(lineno) + "unknown key `" + key + "`");
        }

        if (const auto it = raw.kv.find(key); it != raw.kv.end())
            throw SpecParseError(at_line(lineno) + "duplicate key `" + key +
                                 "` (first set at line " + std::to_string(it->second.line) + ")");
        raw.kv[key] = {value, lineno};
    }
    return raw;
}

long long parse_int(const Entry& e, const std::string& key) {
    try {
        size_t pos = 0;
        const long long v = std::stoll(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
        return v;
    } catch (const std::exception&) {
        throw SpecParseError(at_line(e.line) + key + ": expected an integer, got `" + e.value +
                             "`");
    }
}

std::uint64_t parse_seed(const Entry& e, const std::string& key) {
    const long long v = parse_int(e, key);
    if (v < 0) throw SpecParseError(at_line(e.line) + key + ": seed must be nonnegative");
    return std::uint64_t(v);
}

double parse_real(const Entry& e, const std::string& key, bool allow_inf = false) {
    double v = 0.0;
    try {
        size_t pos = 0;
        v = std::stod(e.value, &pos);
        if (pos != e.value.size()) throw std::invalid_argument("");
    } catch (const std::exception&) {
        throw SpecParseError(at_line(e.line) + key + ": expected a real number, got `" + e.value +
                             "`");
    }
    if (std::isnan(v)) throw SpecParseError(at_line(e.line) + key + ": must not be NaN");
    if (!allow_inf && std::isinf(v))
        throw SpecParseError(at_line(e.line) + key + ": must be finite");
    return v;
}

bool parse_bool(const Entry& e, const std::string& key) {
    if (e.value == "true") return true;
    if (e.value == "false") return false;
    throw SpecParseError(at_line(e.line) + key + ": expected true or false, got `" + e.value +
                         "`");
}

PhantomSpec build_phantom(const RawSpec& raw) {
    PhantomKind kind = PhantomKind::cine;
    if (raw.has("phantom.kind")) {
        const Entry& e = raw.at("phantom.kind");
        if (e.value == "cine")
            kind = PhantomKind::cine;
        else if (e.value == "perfusion")
            kind = PhantomKind::perfusion;
        else
            throw SpecParseError(at_line(e.line) +
                                 "phantom.kind: expected cine or perfusion, got `" + e.value +
                                 "`");
    }
    PhantomSpec p = PhantomSpec::defaults(kind);
    const auto dim = [&](const char* key, Index& slot, long long lo) {
        if (!raw.has(key)) return;
        const long long v = parse_int(raw.at(key), key);
        if (v < lo)
            throw SpecParseError(at_line(raw.at(key).line) + key + ": out of range, must be >= " +
                                 std::to_string(lo));
        slot = Index(v);
    };
    dim("phantom.n1", p.n1, 8);
    dim("phantom.n2", p.n2, 8);
    dim("phantom.n3", p.n3, 2);
    if (raw.has("phantom.seed")) p.seed = parse_seed(raw.at("phantom.seed"), "phantom.seed");
    if (raw.has("phantom.motion_amplitude"))
        p.motion_amplitude =
            parse_real(raw.at("phantom.motion_amplitude"), "phantom.motion_amplitude");
    if (raw.has("phantom.uptake_rate"))
        p.uptake_rate = parse_real(raw.at("phantom.uptake_rate"), "phantom.uptake_rate");
    return p;
}

MaskSpec build_mask(const RawSpec& raw) {
    MaskSpec m;
    if (raw.has("mask.kind")) {
        const Entry& e = raw.at("mask.kind");
        if (e.value == "radial")
            m.kind = MaskKind::radial;
        else if (e.value == "random")
            m.kind = MaskKind::random;
        else if (e.value == "full")
            m.kind = MaskKind::full;
        else
            throw SpecParseError(at_line(e.line) +
                                 "mask.kind: expected radial, random, or full, got `" + e.value +
                                 "`");
    }
    if (raw.has("mask.lines")) {
        if (m.kind != MaskKind::radial)
            throw SpecParseError(at_line(raw.at("mask.lines").line) +
                                 "mask.lines applies only when mask.kind = radial");
        const long long v = parse_int(raw.at("mask.lines"), "mask.lines");
        if (v < 1)
            throw SpecParseError(at_line(raw.at("mask.lines").line) +
                                 "mask.lines: out of range, must be >= 1");
        m.lines = int(v);
    }
    if (raw.has("mask.ratio")) {
        if (m.kind != MaskKind::random)
            throw SpecParseError(at_line(raw.at("mask.ratio").line) +
                                 "mask.ratio applies only when mask.kind = random");
        const double v = parse_real(raw.at("mask.ratio"), "mask.ratio");
        if (!(v > 0.0 && v < 1.0))
            throw SpecParseError(at_line(raw.at("mask.ratio").line) +
                                 "mask.ratio: out of range, must lie in (0, 1)");
        m.ratio = v;
    }
    if (raw.has("mask.seed")) m.seed = parse_seed(raw.at("mask.seed"), "mask.seed");
    if (raw.has("mask.vary_per_frame"))
        m.vary_per_frame = parse_bool(raw.at("mask.vary_per_frame"), "mask.vary_per_frame");
    return m;
}

NoiseSpec build_noise(const RawSpec& raw) {
    NoiseSpec n;
    if (raw.has("noise.snr_db")) {
        const double v = parse_real(raw.at("noise.snr_db"), "noise.snr_db", true);
        if (!(std::isinf(v) && v > 0)) n.snr_db = v;
        // +inf is the documented no-noise sentinel, same as omitting the key
        else
            n.snr_db.reset();
    }
    if (raw.has("noise.seed")) n.seed = parse_seed(raw.at("noise.seed"), "noise.seed");
    return n;
}

SolverConfig build_solver(const RawSpec& raw, const std::string& name, bool noisy) {
    const std::string p = "solver." + name + ".";
    SolverConfig c;

    const bool l1set = raw.has(p + "lambda1");
    const bool l2set = raw.has(p + "lambda2");
    const auto nonneg = [&](const char* field) {
        const std::string key = p + field;
        const double v = parse_real(raw.at(key), key);
        if (v < 0.0)
            throw SpecParseError(at_line(raw.at(key).line) + key + ": must be nonnegative");
        return v;
    };
    if (l1set) c.lambda1 = nonneg("lambda1");
    if (l2set) c.lambda2 = nonneg("lambda2");
    if (!l1set && !l2set) {
        // Documented defaults: the noiseless pair (2.5e-3, 7.5e-3) or the
        // noisy pair (0.1, 0.1).
        c.lambda1 = noisy ? 0.1 : 2.5e-3;
        c.lambda2 = noisy ? 0.1 : 7.5e-3;
    } else if (!l1set) {
        c.lambda1 = 0.0;
    } else if (!l2set) {
        c.lambda2 = 0.0;
    }

    const auto positive = [&](const char* field) {
        const std::string key = p + field;
        const double v = parse_real(raw.at(key), key);
        if (!(v > 0.0)) throw SpecParseError(at_line(raw.at(key).line) + key + ": must be positive");
        return v;
    };
    if (raw.has(p + "mu1")) c.mu1 = positive("mu1");
    if (raw.has(p + "mu2")) c.mu2 = positive("mu2");
    if (raw.has(p + "max_iters")) {
        const long long v = parse_int(raw.at(p + "max_iters"), p + "max_iters");
        if (v < 1)
            throw SpecParseError(at_line(raw.at(p + "max_iters").line) + p +
                                 "max_iters: must be >= 1");
        c.max_iters = int(v);
    }
    if (raw.has(p + "rel_tol")) {
        const double v = parse_real(raw.at(p + "rel_tol"), p + "rel_tol");
        if (!(v > 0.0 && v < 1.0))
            throw SpecParseError(at_line(raw.at(p + "rel_tol").line) + p +
                                 "rel_tol: out of range, must lie in (0, 1)");
        c.rel_tol = v;
    }
    if (raw.has(p + "variant")) {
        const Entry& e = raw.at(p + "variant");
        if (e.value == "image_domain")
            c.variant = SolverVariant::image_domain;
        else if (e.value == "kspace_fast")
            c.variant = SolverVariant::kspace_fast;
        else
            throw SpecParseError(at_line(e.line) + p +
                                 "variant: expected image_domain or kspace_fast, got `" + e.value +
                                 "`");
    } else {
        c.variant = SolverVariant::kspace_fast;
    }
    if (raw.has(p + "allow_pure_data_consistency"))
        c.allow_pure_data_consistency =
            parse_bool(raw.at(p + "allow_pure_data_consistency"), p + "allow_pure_data_consistency");

    if (c.lambda1 == 0.0 && c.lambda2 == 0.0 && !c.allow_pure_data_consistency)
        throw SpecParseError("solver." + name +
                             ": lambda1 and lambda2 are both zero; set solver." + name +
                             ".allow_pure_data_consistency = true to run pure data consistency");
    return c;
}

std::string fmt_fixed(double v, int prec) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

std::string fmt_compact(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string phantom_id(const PhantomSpec& p) {
    const char* kind = p.kind == PhantomKind::cine ? "cine" : "perfusion";
    return std::string(kind) + "-" + std::to_string(p.n1) + "x" + std::to_string(p.n2) + "x" +
           std::to_string(p.n3);
}

std::string mask_id(const MaskSpec& m) {
    switch (m.kind) {
        case MaskKind::radial: return "radial-" + std::to_string(m.lines);
        case MaskKind::random: return "random-" + fmt_compact(m.ratio);
        case MaskKind::full: return "full";
    }
    return "?";
}

std::string frame_name(const char* stem, Index t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_f%03lld.pgm", stem, (long long)t);
    return buf;
}

void write_magnitude_pgm(const std::string& path, const ComplexTensor3& x, Index t,
                         double scale) {
    RealMatrix mag(x.n1(), x.n2());
    for (Index j = 0; j < x.n2(); ++j)
        for (Index i = 0; i < x.n1(); ++i) mag(i, j) = std::abs(x(i, j, t));
    write_pgm(path, quantize_for_pgm(mag, scale));
}

void write_trace_csv(const std::string& path, const SolverResult& res) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw TensorIoError("write_trace_csv: cannot open " + path);
    os << "iteration,cost,residual_z,residual_m,elapsed_s\n";
    for (size_t k = 0; k < res.cost_trace.size(); ++k)
        os << (k + 1) << ',' << fmt_compact(res.cost_trace[k]) << ','
           << fmt_compact(res.primal_residuals[k].first) << ','
           << fmt_compact(res.primal_residuals[k].second) << ','
           << fmt_fixed(res.elapsed_trace[k], 6) << '\n';
    os.flush();
    if (!os) throw TensorIoError("write_trace_csv: write failed for " + path);
}

}  // namespace

void ExperimentSpec::validate() const {
    phantom.validate();
    if (mask.kind == MaskKind::radial && mask.lines < 1)
        throw ConfigError("ExperimentSpec: mask.lines must be >= 1");
    if (mask.kind == MaskKind::random && !(mask.ratio > 0.0 && mask.ratio < 1.0))
        throw ConfigError("ExperimentSpec: mask.ratio must lie in (0, 1)");
    if (noise.snr_db && std::isnan(*noise.snr_db))
        throw ConfigError("ExperimentSpec: noise.snr_db must not be NaN");
    if (solvers.empty()) throw ConfigError("ExperimentSpec: at least one solver is required");
    std::set<std::string> seen;
    for (const NamedSolver& ns : solvers) {
        if (!valid_name(ns.name))
            throw ConfigError("ExperimentSpec: invalid solver name `" + ns.name + "`");
        if (!seen.insert(ns.name).second)
            throw ConfigError("ExperimentSpec: duplicate solver name `" + ns.name + "`");
        ns.config.validate();
    }
    if (output_dir.empty()) throw ConfigError("ExperimentSpec: output_dir must not be empty");
}

ExperimentSpec parse_spec_text(const std::string& text) {
    const RawSpec raw = scan_lines(text);

    ExperimentSpec spec;
    spec.phantom = build_phantom(raw);
    spec.mask = build_mask(raw);
    spec.noise = build_noise(raw);
    if (raw.has("output.dir")) spec.output_dir = raw.at("output.dir").value;

    const bool noisy = spec.noise.snr_db.has_value();
    if (raw.solver_names.empty()) {
        spec.solvers.push_back({"tmnn", build_solver(raw, "tmnn", noisy)});
    } else {
        for (const std::string& name : raw.solver_names)
            spec.solvers.push_back({name, build_solver(raw, name, noisy)});
    }
    spec.validate();
    return spec;
}

ExperimentSpec parse_spec(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("parse_spec: cannot open " + path);
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_spec_text(ss.str());
}

std::string format_results_csv(const std::vector<ResultRow>& rows) {
    std::string out = "phantom,mask,ratio,noise,method,snr_db,iters,wall_time_s\n";
    for (const ResultRow& r : rows) {
        out += r.phantom + ',' + r.mask + ',' + fmt_fixed(r.ratio, 6) + ',' + r.noise + ',' +
               r.method + ',' + fmt_fixed(r.snr_db, 6) + ',' + std::to_string(r.iters) + ',' +
               fmt_fixed(r.wall_time_s, 6) + '\n';
    }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec, const RunOptions& opts) {
    ExperimentSpec s = spec;
    if (opts.seed_override) {
        // One knob reseeds every randomness source, on distinct streams.
        s.phantom.seed = *opts.seed_override;
        s.mask.seed = *opts.seed_override + 1;
        s.noise.seed = *opts.seed_override + 2;
    }
    s.validate();

    std::error_code ec;
    fs::create_directories(s.output_dir, ec);
    if (ec) throw ConfigError("run_experiment: cannot create output directory " + s.output_dir +
                              ": " + ec.message());

    const ComplexTensor3 phantom = make_phantom(s.phantom);

    SamplingMask mask = [&] {
        switch (s.mask.kind) {
            case MaskKind::radial:
                return pseudo_radial_mask(s.phantom.n1, s.phantom.n2, s.phantom.n3, s.mask.lines,
                                          s.mask.seed, s.mask.vary_per_frame);
            case MaskKind::random:
                return variable_density_mask(s.phantom.n1, s.phantom.n2, s.phantom.n3,
                                             s.mask.ratio, s.mask.seed, s.mask.vary_per_frame);
            case MaskKind::full:
            default:
                return SamplingMask::full(s.phantom.n1, s.phantom.n2, s.phantom.n3);
        }
    }();

    KSpaceData b = apply_A(phantom, mask);
    if (s.noise.snr_db) b = add_noise(b, mask, *s.noise.snr_db, s.noise.seed);

    const fs::path root(s.output_dir);
    save_tensor((root / "phantom.ctn3").string(), phantom);
    save_mask((root / "mask.ctn3").string(), mask);
    save_tensor((root / "kspace.ctn3").string(), b.grid);

    double ref_scale = 0.0;
    for (Index k = 0; k < phantom.size(); ++k)
        ref_scale = std::max(ref_scale, std::abs(phantom.data()[k]));
    if (ref_scale == 0.0) ref_scale = 1.0;
    for (Index t = 0; t < phantom.n3(); ++t)
        write_magnitude_pgm((root / frame_name("ref", t)).string(), phantom, t, ref_scale);

    const std::string phantom_name = phantom_id(s.phantom);
    const std::string mask_name = mask_id(s.mask);
    const std::string noise_name = s.noise.snr_db ? fmt_compact(*s.noise.snr_db) : "none";
    const double realized_ratio = mask.ratio();

    ExperimentResult result;
    result.rows.resize(s.solvers.size());
    std::mutex echo_lock;

    const auto run_one = [&](size_t idx) {
        const NamedSolver& ns = s.solvers[idx];
        ResultRow row;
        row.phantom = phantom_name;
        row.mask = mask_name;
        row.ratio = realized_ratio;
        row.noise = noise_name;
        row.method = ns.name;
        try {
            const SolverResult res = solve(b, mask, ns.config);
            row.snr_db = snr_db(phantom, res.reconstruction);
            row.iters = res.iters_run;
            row.wall_time_s = res.wall_time;
            row.ok = true;

            const fs::path dir = root / ns.name;
            fs::create_directories(dir);
            save_tensor((dir / "reconstruction.ctn3").string(), res.reconstruction);
            write_trace_csv((dir / "trace.csv").string(), res);
            for (Index t = 0; t < phantom.n3(); ++t) {
                write_magnitude_pgm((dir / frame_name("recon", t)).string(), res.reconstruction,
                                    t, ref_scale);
                write_pgm((dir / frame_name("error", t)).string(),
                          quantize_for_pgm(error_image(phantom, res.reconstruction, t),
                                           ref_scale));
            }
            if (opts.echo_trace) {
                std::lock_guard<std::mutex> g(echo_lock);
                std::printf("# trace %s\n", ns.name.c_str());
                for (size_t k = 0; k < res.cost_trace.size(); ++k)
                    std::printf("%s,%zu,%s,%s,%s,%s\n", ns.name.c_str(), k + 1,
                                fmt_compact(res.cost_trace[k]).c_str(),
                                fmt_compact(res.primal_residuals[k].first).c_str(),
                                fmt_compact(res.primal_residuals[k].second).c_str(),
                                fmt_fixed(res.elapsed_trace[k], 6).c_str());
            }
        } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
            row.snr_db = std::numeric_limits<double>::quiet_NaN();
            row.iters = 0;
            row.wall_time_s = 0.0;
        }
        result.rows[idx] = std::move(row);
    };

    const int threads =
        std::max(1, std::min<int>(opts.threads, int(s.solvers.size())));
    if (threads <= 1) {
        for (size_t i = 0; i < s.solvers.size(); ++i) run_one(i);
    } else {
        std::atomic<size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(size_t(threads));
        for (int w = 0; w < threads; ++w)
            pool.emplace_back([&] {
                for (size_t i = next.fetch_add(1); i < s.solvers.size(); i = next.fetch_add(1))
                    run_one(i);
            });
        for (std::thread& th : pool) th.join();
    }

    result.results_csv_path = (root / "results.csv").string();
    std::ofstream os(result.results_csv_path, std::ios::binary | std::ios::trunc);
    if (!os) throw TensorIoError("run_experiment: cannot open " + result.results_csv_path);
    os << format_results_csv(result.rows);
    os.flush();
    if (!os)
        throw TensorIoError("run_experiment: write failed for " + result.results_csv_path);

    result.all_ok = std::all_of(result.rows.begin(), result.rows.end(),
                                [](const ResultRow& r) { return r.ok; });
    return result;
}

}  // namespace tmnn
