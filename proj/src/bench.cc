#include "sketchla/bench.hh"

#include "sketchla/blas.hh"
#include "sketchla/errors.hh"
#include "sketchla/lsq.hh"
#include "sketchla/sketch.hh"
#include "sketchla/timer.hh"

#include <omp.h>
#include <unistd.h>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace sketchla {

const char* const kCsvHeader =
    "method,d,n,k,rep,seed,phase,elapsed_seconds,bytes_moved,flops,relative_residual,status,kappa";

const char* to_string(BenchCommand command) {
    switch (command) {
    case BenchCommand::Sketch:
        return "sketch";
    case BenchCommand::Lsq:
        return "lsq";
    case BenchCommand::KappaSweep:
        return "kappa-sweep";
    }
    return "?";
}

std::optional<BenchCommand> parse_command(const std::string& text) {
    for (auto c : {BenchCommand::Sketch, BenchCommand::Lsq, BenchCommand::KappaSweep})
        if (text == to_string(c))
            return c;
    return std::nullopt;
}

const std::vector<std::string>& known_methods(BenchCommand command) {
    static const std::vector<std::string> sketch{"gram", "gaussian", "countsketch", "srht",
                                                 "multisketch"};
    static const std::vector<std::string> lsq{"normal",          "sas-gaussian", "sas-countsketch",
                                              "sas-srht",        "sas-multisketch", "randcholqr",
                                              "qr-reference"};
    return command == BenchCommand::Sketch ? sketch : lsq;
}

BenchConfig default_config(BenchCommand command) {
    BenchConfig cfg;
    cfg.command = command;
    switch (command) {
    case BenchCommand::Sketch:
        cfg.d = {1u << 16, 1u << 18};
        cfg.n = {16, 32, 64, 128};
        cfg.methods = known_methods(command);
        break;
    case BenchCommand::Lsq:
        cfg.d = {1u << 16, 1u << 18};
        cfg.n = {16, 32, 64, 128};
        cfg.methods = {"normal",          "sas-gaussian", "sas-countsketch",
                       "sas-multisketch", "randcholqr",   "qr-reference"};
        cfg.kappa = {1e2};
        cfg.noise = NoiseMode::Easy;
        break;
    case BenchCommand::KappaSweep:
        cfg.d = {1u << 17};
        cfg.n = {16};
        cfg.methods = {"normal", "sas-multisketch", "randcholqr", "qr-reference"};
        for (int e = 2; e <= 14; e += 2)
            cfg.kappa.push_back(std::pow(10.0, e));
        cfg.noise = NoiseMode::Consistent;
        break;
    }
    return cfg;
}

namespace {

std::uint64_t physical_memory() {
    const long pages = sysconf(_SC_PHYS_PAGES);
    const long page = sysconf(_SC_PAGE_SIZE);
    if (pages <= 0 || page <= 0)
        return std::uint64_t{1} << 34;
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
}

}  // namespace

void finalize_config(BenchConfig& cfg) {
    const BenchConfig def = default_config(cfg.command);
    if (cfg.d.empty())
        cfg.d = def.d;
    if (cfg.n.empty())
        cfg.n = def.n;
    if (cfg.methods.empty())
        cfg.methods = def.methods;
    if (cfg.kappa.empty())
        cfg.kappa = def.kappa.empty() ? std::vector<double>{1e2} : def.kappa;
    if (cfg.memory_budget == 0)
        cfg.memory_budget = physical_memory() / 10 * 8;

    if (cfg.reps < 1)
        throw ConfigError("--reps must be at least 1");
    if (cfg.threads < 0)
        throw ConfigError("--threads must be nonnegative");
    for (auto d : cfg.d)
        if (d < 1)
            throw ConfigError("--d entries must be positive");
    for (auto n : cfg.n)
        if (n < 1)
            throw ConfigError("--n entries must be positive");
    for (auto k : cfg.kappa)
        if (!(k >= 1.0) || !std::isfinite(k))
            throw ConfigError("--kappa entries must be finite and >= 1");
    if (cfg.block_threshold < 4 || !std::has_single_bit(cfg.block_threshold))
        throw ConfigError("--block-threshold must be a power of two >= 4");
    const auto& known = known_methods(cfg.command);
    for (const auto& m : cfg.methods)
        if (std::find(known.begin(), known.end(), m) == known.end())
            throw ConfigError("unknown method '" + m + "' for command " + to_string(cfg.command));
}

// -----------------------------------------------------------------------------
// CSV

namespace {

std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.16e", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ','))
        out.push_back(field);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

template <class T>
T parse_unsigned(const std::string& s, const char* what) {
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
        throw std::runtime_error(std::string("CSV: bad ") + what + " '" + s + "'");
    return value;
}

double parse_real(const std::string& s, const char* what) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size())
        throw std::runtime_error(std::string("CSV: bad ") + what + " '" + s + "'");
    return v;
}

}  // namespace

void write_csv_header(std::ostream& out) { out << kCsvHeader << '\n'; }

void write_csv_record(std::ostream& out, const BenchRecord& r) {
    out << r.method << ',' << r.d << ',' << r.n << ',' << r.k << ',' << r.rep << ',' << r.seed
        << ',' << r.phase << ',' << format_real(r.elapsed_seconds) << ',' << r.bytes_moved << ','
        << r.flops << ',' << (r.relative_residual ? format_real(*r.relative_residual) : "") << ','
        << r.status << ',' << (r.kappa ? format_real(*r.kappa) : "") << '\n';
}

std::vector<BenchRecord> parse_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader)
        throw std::runtime_error("CSV: missing or unexpected header");
    std::vector<BenchRecord> out;
    while (std::getline(in, line)) {
        if (line.empty())
            continue;
        const auto f = split(line);
        if (f.size() != 13)
            throw std::runtime_error("CSV: expected 13 fields, got " + std::to_string(f.size()));
        BenchRecord r;
        r.method = f[0];
        r.d = parse_unsigned<std::size_t>(f[1], "d");
        r.n = parse_unsigned<std::size_t>(f[2], "n");
        r.k = parse_unsigned<std::size_t>(f[3], "k");
        r.rep = parse_unsigned<std::size_t>(f[4], "rep");
        r.seed = parse_unsigned<std::uint64_t>(f[5], "seed");
        r.phase = f[6];
        r.elapsed_seconds = parse_real(f[7], "elapsed_seconds");
        r.bytes_moved = parse_unsigned<std::uint64_t>(f[8], "bytes_moved");
        r.flops = parse_unsigned<std::uint64_t>(f[9], "flops");
        if (!f[10].empty())
            r.relative_residual = parse_real(f[10], "relative_residual");
        r.status = f[11];
        if (!f[12].empty())
            r.kappa = parse_real(f[12], "kappa");
        out.push_back(std::move(r));
    }
    return out;
}

// -----------------------------------------------------------------------------
// Drivers

namespace {

constexpr std::uint64_t kStreamInput = 0xA;
constexpr std::uint64_t kStreamOperator = 0x0B;

std::size_t first_rep(const BenchConfig& cfg) { return cfg.keep_warmup ? 0 : 1; }

std::uint64_t log2_ceil(std::size_t d) { return std::bit_width(d - 1); }

// Operator built from a fixed stream, so every rep sketches with the same matrix.
SketchOperator build_operator(const std::string& family, std::size_t d, std::size_t n,
                              const BenchConfig& cfg) {
    RngStream stream(cfg.seed, kStreamOperator);
    const SketchDims dims = default_sketch_dims(n);
    if (family == "gaussian")
        return make_gaussian(dims.gaussian, d, stream);
    if (family == "countsketch")
        return make_countsketch(d, dims.countsketch, stream);
    if (family == "srht")
        return make_srht(d, dims.srht, stream, cfg.block_threshold);
    return make_multisketch(d, dims.multi_k1, dims.multi_k2, stream);
}

std::size_t sketch_dim(const std::string& family, std::size_t n) {
    const SketchDims dims = default_sketch_dims(n);
    if (family == "gaussian")
        return dims.gaussian;
    if (family == "countsketch")
        return dims.countsketch;
    if (family == "srht")
        return dims.srht;
    if (family == "multisketch")
        return dims.multi_k2;
    return 0;
}

// Bytes held by the operator and its intermediates beyond A itself.
std::uint64_t operator_footprint(const std::string& family, std::size_t d, std::size_t n) {
    const SketchDims dims = default_sketch_dims(n);
    if (family == "gaussian")
        return 8ull * dims.gaussian * (d + n);
    if (family == "countsketch")
        return 5ull * d + 8ull * dims.countsketch * n;
    if (family == "srht")
        return 8ull * std::bit_ceil(d) * n + 8ull * d * n + 5ull * d;
    if (family == "multisketch")
        return 5ull * d + 8ull * dims.multi_k1 * (n + dims.multi_k2);
    return 8ull * n * n;
}

// Analytic flop and byte counts for a full solver run (not per phase).
struct CostModel {
    std::uint64_t flops = 0;
    std::uint64_t bytes = 0;
};

CostModel sketch_cost(const std::string& family, std::size_t d, std::size_t n) {
    const SketchDims dims = default_sketch_dims(n);
    const std::uint64_t dn = std::uint64_t{d} * n;
    if (family == "gaussian")
        return {2ull * dims.gaussian * dn, 8ull * (dims.gaussian * d + dn)};
    if (family == "countsketch")
        return {dn, 16ull * dn + 5ull * d};
    if (family == "srht")
        return {std::bit_ceil(d) * log2_ceil(std::bit_ceil(d)) * n, 8ull * 4 * dn};
    return {dn + 2ull * dims.multi_k2 * dims.multi_k1 * n, 16ull * dn + 5ull * d};
}

CostModel solver_cost(const std::string& method, std::size_t d, std::size_t n) {
    const std::uint64_t dn = std::uint64_t{d} * n, dnn = dn * n, nnn = std::uint64_t{n} * n * n;
    if (method == "normal")
        return {2 * dnn + 2 * dn + nnn / 3 + 2ull * n * n, 8 * 2 * dn};
    if (method == "qr-reference")
        return {2 * dnn - 2 * nnn / 3 + 4 * dn, 8 * (dn * n / 2 + 2 * dn)};
    if (method == "randcholqr") {
        const CostModel s = sketch_cost("multisketch", d, n);
        const std::uint64_t k = default_sketch_dims(n).multi_k2;
        return {s.flops + 2 * k * n * n + 3 * dnn + nnn + 2 * dn, s.bytes + 8 * 5 * dn};
    }
    const std::string family = method.substr(4);
    const CostModel s = sketch_cost(family, d, n);
    const std::uint64_t k = sketch_dim(family, n);
    return {s.flops + 2 * k * n * n + 2 * dn, s.bytes + 8 * 2 * dn};
}

struct RunKey {
    std::string method;
    std::size_t d, n, k, rep;
    std::uint64_t seed;
    std::optional<double> kappa;
};

BenchRecord make_record(const RunKey& key, std::string phase, double seconds) {
    BenchRecord r;
    r.method = key.method;
    r.d = key.d;
    r.n = key.n;
    r.k = key.k;
    r.rep = key.rep;
    r.seed = key.seed;
    r.phase = std::move(phase);
    r.elapsed_seconds = seconds;
    r.kappa = key.kappa;
    return r;
}

void emit_capacity(const RunKey& key, bool solver, const RecordSink& sink) {
    BenchRecord r = make_record(key, "total", 0.0);
    r.status = "CapacityExceeded";
    if (solver)
        r.relative_residual = std::numeric_limits<double>::infinity();
    sink(r);
}

void run_sketch_once(const RunKey& key, const DenseMatrix& a, const BenchConfig& cfg,
                     const RecordSink& sink) {
    const std::size_t d = key.d, n = key.n;
    std::vector<BenchRecord> rows;
    if (key.method == "gram") {
        Stopwatch watch;
        const DenseMatrix g = multiply(a, Op::Trans, a, Op::NoTrans);
        BenchRecord r = make_record(key, "apply", watch.seconds());
        r.bytes_moved = 8ull * (std::uint64_t{d} * n + std::uint64_t{n} * n);
        r.flops = 2ull * d * n * n;
        rows.push_back(r);
    } else {
        Stopwatch watch;
        const SketchOperator op = build_operator(key.method, d, n, cfg);
        BenchRecord gen = make_record(key, "generate", watch.seconds());
        rows.push_back(gen);
        SketchStats stats;
        apply_sketch(op, a, &stats);
        for (const auto& ph : stats.phases) {
            BenchRecord r = make_record(key, ph.name, ph.seconds);
            r.bytes_moved = ph.bytes_read + ph.bytes_written;
            r.flops = ph.flops;
            rows.push_back(r);
        }
    }
    BenchRecord total = make_record(key, "total", 0.0);
    for (auto& r : rows) {
        r.status = "OK";
        total.elapsed_seconds += r.elapsed_seconds;
        total.bytes_moved += r.bytes_moved;
        total.flops += r.flops;
        sink(r);
    }
    total.status = "OK";
    sink(total);
}

LsqReport run_solver(const std::string& method, const LsqProblem& p, const SketchOperator* op) {
    if (method == "normal")
        return solve_normal_equations(p);
    if (method == "qr-reference")
        return solve_qr_reference(p);
    if (method == "randcholqr")
        return solve_randcholqr_lsq(p, *op);
    return solve_sketch_and_solve(p, *op);
}

void run_solver_once(const RunKey& key, const LsqProblem& p, const BenchConfig& cfg,
                     const RecordSink& sink) {
    const std::string& method = key.method;
    const bool sketched = method.rfind("sas-", 0) == 0 || method == "randcholqr";
    std::optional<SketchOperator> op;
    double build_seconds = 0.0;
    if (sketched) {
        Stopwatch watch;
        op = build_operator(method == "randcholqr" ? "multisketch" : method.substr(4), key.d, key.n,
                            cfg);
        build_seconds = watch.seconds();
    }

    LsqReport rep;
    std::string status;
    try {
        rep = run_solver(method, p, op ? &*op : nullptr);
        status = to_string(rep.status);
    } catch (const std::exception&) {
        // Shape or capacity problems inside a solver are recorded, not fatal.
        rep.relative_residual = std::numeric_limits<double>::infinity();
        status = "Error";
    }

    if (sketched) {
        BenchRecord r = make_record(key, "generate", build_seconds);
        r.status = status;
        sink(r);
    }
    for (const auto& ph : rep.phases) {
        BenchRecord r = make_record(key, ph.name, ph.seconds);
        r.status = status;
        sink(r);
    }
    const CostModel cost = solver_cost(method, key.d, key.n);
    BenchRecord total = make_record(key, "total", build_seconds + rep.wall_seconds);
    total.bytes_moved = cost.bytes;
    total.flops = cost.flops;
    total.relative_residual = rep.relative_residual;
    total.status = status;
    sink(total);
}

void solver_grid(const BenchConfig& cfg, const RecordSink& sink) {
    for (auto d : cfg.d)
        for (auto n : cfg.n)
            for (double kappa : cfg.kappa) {
                const std::uint64_t problem_bytes = 8ull * 5 * d * n + 8ull * d;
                std::optional<LsqProblem> problem;
                for (const auto& method : cfg.methods) {
                    const bool sketched = method != "normal" && method != "qr-reference";
                    const std::string family =
                        method == "randcholqr" ? "multisketch" : (sketched ? method.substr(4) : "");
                    const std::uint64_t need =
                        problem_bytes + (sketched ? operator_footprint(family, d, n) : 0);
                    for (std::size_t rep = 0; rep <= cfg.reps; ++rep) {
                        RunKey key{method, d, n, sketched ? sketch_dim(family, n) : 0, rep, cfg.seed,
                                   kappa};
                        if (n > d || need > cfg.memory_budget) {
                            if (rep >= first_rep(cfg))
                                emit_capacity(key, true, sink);
                            continue;
                        }
                        if (!problem)
                            problem = gen_problem({d, n, kappa, cfg.noise, cfg.seed});
                        if (rep >= first_rep(cfg))
                            run_solver_once(key, *problem, cfg, sink);
                        else
                            run_solver_once(key, *problem, cfg, [](const BenchRecord&) {});
                    }
                }
            }
}

}  // namespace

void cmd_sketch(const BenchConfig& cfg, const RecordSink& sink) {
    for (auto d : cfg.d)
        for (auto n : cfg.n) {
            const std::uint64_t a_bytes = 8ull * d * n;
            std::optional<DenseMatrix> a;
            for (const auto& method : cfg.methods) {
                const std::uint64_t need = a_bytes + operator_footprint(method, d, n);
                for (std::size_t rep = 0; rep <= cfg.reps; ++rep) {
                    RunKey key{method, d, n, sketch_dim(method, n), rep, cfg.seed, std::nullopt};
                    if (need > cfg.memory_budget) {
                        if (rep >= first_rep(cfg))
                            emit_capacity(key, false, sink);
                        continue;
                    }
                    if (!a) {
                        RngStream stream(cfg.seed, kStreamInput);
                        a = gaussian_fill(d, n, stream, Layout::RowMajor);
                    }
                    if (rep >= first_rep(cfg))
                        run_sketch_once(key, *a, cfg, sink);
                    else
                        run_sketch_once(key, *a, cfg, [](const BenchRecord&) {});
                }
            }
        }
}

void cmd_lsq(const BenchConfig& cfg, const RecordSink& sink) { solver_grid(cfg, sink); }

void cmd_kappa_sweep(const BenchConfig& cfg, const RecordSink& sink) {
    solver_grid(cfg, sink);
}

void run_bench(BenchConfig cfg, std::ostream& out) {
    finalize_config(cfg);
    if (cfg.threads > 0)
        omp_set_num_threads(cfg.threads);
    write_csv_header(out);
    const RecordSink sink = [&out](const BenchRecord& r) {
        write_csv_record(out, r);
        out.flush();
    };
    switch (cfg.command) {
    case BenchCommand::Sketch:
        cmd_sketch(cfg, sink);
        break;
    case BenchCommand::Lsq:
        cmd_lsq(cfg, sink);
        break;
    case BenchCommand::KappaSweep:
        cmd_kappa_sweep(cfg, sink);
        break;
    }
}

}  // namespace sketchla
