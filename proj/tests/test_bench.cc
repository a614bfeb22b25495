#include "sketchla/bench.hh"

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <limits>
#include <map>
#include <sstream>

using namespace sketchla;

namespace {

std::vector<BenchRecord> collect(BenchConfig cfg) {
    finalize_config(cfg);
    std::vector<BenchRecord> out;
    const RecordSink sink = [&out](const BenchRecord& r) { out.push_back(r); };
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
    return out;
}

BenchConfig small(BenchCommand command) {
    BenchConfig cfg = default_config(command);
    cfg.d = {2048};
    cfg.n = {8};
    cfg.reps = 2;
    cfg.seed = 7;
    return cfg;
}

std::map<std::string, double> totals_by_method(const std::vector<BenchRecord>& records,
                                               std::size_t rep = 1) {
    std::map<std::string, double> out;
    for (const auto& r : records)
        if (r.phase == "total" && r.rep == rep)
            out[r.method] = *r.relative_residual;
    return out;
}

}  // namespace

TEST(BenchConfig, DefaultsFollowDeskScale) {
    const auto s = default_config(BenchCommand::Sketch);
    EXPECT_EQ(s.d, (std::vector<std::size_t>{1u << 16, 1u << 18}));
    EXPECT_EQ(s.n, (std::vector<std::size_t>{16, 32, 64, 128}));
    const auto k = default_config(BenchCommand::KappaSweep);
    EXPECT_EQ(k.d, (std::vector<std::size_t>{1u << 17}));
    EXPECT_EQ(k.kappa.size(), 7u);
    EXPECT_DOUBLE_EQ(k.kappa.back(), 1e14);
    EXPECT_EQ(k.noise, NoiseMode::Consistent);
}

TEST(BenchConfig, RejectsBadValues) {
    auto cfg = small(BenchCommand::Lsq);
    cfg.reps = 0;
    EXPECT_THROW(finalize_config(cfg), ConfigError);
    cfg = small(BenchCommand::Lsq);
    cfg.methods = {"gram"};
    EXPECT_THROW(finalize_config(cfg), ConfigError);
    cfg = small(BenchCommand::Lsq);
    cfg.kappa = {0.5};
    EXPECT_THROW(finalize_config(cfg), ConfigError);
    cfg = small(BenchCommand::Sketch);
    cfg.block_threshold = 100;
    EXPECT_THROW(finalize_config(cfg), ConfigError);
    EXPECT_FALSE(parse_command("sweep").has_value());
    EXPECT_EQ(parse_command("kappa-sweep"), BenchCommand::KappaSweep);
}

TEST(BenchCsv, RoundTrip) {
    BenchRecord a;
    a.method = "sas-multisketch";
    a.d = 1 << 17;
    a.n = 16;
    a.k = 32;
    a.rep = 3;
    a.seed = 18446744073709551615ull;
    a.phase = "qr";
    a.elapsed_seconds = 0.1 + 0.2;
    a.bytes_moved = 123456789;
    a.flops = 42;
    a.relative_residual = 1.0 / 3.0;
    a.status = "OK";
    a.kappa = 1e10;
    BenchRecord b = a;
    b.relative_residual.reset();
    b.kappa.reset();
    b.phase = "total";
    BenchRecord c = a;
    c.relative_residual = std::numeric_limits<double>::infinity();
    c.status = "CholeskyFailed";

    std::stringstream ss;
    write_csv_header(ss);
    for (const auto& r : {a, b, c})
        write_csv_record(ss, r);
    const auto back = parse_csv(ss);
    ASSERT_EQ(back.size(), 3u);
    EXPECT_EQ(back[0], a);
    EXPECT_EQ(back[1], b);
    EXPECT_EQ(back[2], c);
}

TEST(BenchCsv, MalformedInputRejected) {
    std::stringstream bad_header("method,d\n");
    EXPECT_THROW(parse_csv(bad_header), std::runtime_error);
    std::stringstream bad_row(std::string(kCsvHeader) + "\nx,1,2\n");
    EXPECT_THROW(parse_csv(bad_row), std::runtime_error);
}

TEST(BenchSketch, RecordsPhasesAndTotals) {
    const auto records = collect(small(BenchCommand::Sketch));
    std::size_t totals = 0;
    for (const auto& r : records) {
        EXPECT_GE(r.rep, 1u);  // warm-up dropped
        EXPECT_FALSE(r.relative_residual.has_value());
        EXPECT_EQ(r.status, "OK");
        EXPECT_GT(r.elapsed_seconds, 0.0) << r.method << " " << r.phase;
        totals += r.phase == "total";
    }
    EXPECT_EQ(totals, 5u * 2u);
}

TEST(BenchSketch, KeepWarmupAddsRepZero) {
    auto cfg = small(BenchCommand::Sketch);
    cfg.methods = {"countsketch"};
    cfg.keep_warmup = true;
    const auto records = collect(cfg);
    EXPECT_EQ(records.front().rep, 0u);
    EXPECT_EQ(records.back().rep, 2u);
}

TEST(BenchSketch, CapacityExceededIsRecorded) {
    auto cfg = small(BenchCommand::Sketch);
    cfg.memory_budget = 1024;
    const auto records = collect(cfg);
    ASSERT_FALSE(records.empty());
    for (const auto& r : records)
        EXPECT_EQ(r.status, "CapacityExceeded");
}

TEST(BenchSketch, CountSketchByteAccounting) {
    auto cfg = small(BenchCommand::Sketch);
    cfg.methods = {"countsketch"};
    cfg.d = {1 << 14};
    cfg.n = {32};
    cfg.reps = 1;
    for (const auto& r : collect(cfg))
        if (r.phase == "apply") {
            const double model = 8.0 * 2 * r.d * r.n + 5.0 * r.d;
            EXPECT_LE(std::abs(double(r.bytes_moved) - model) / model, 0.1);
        }
}

TEST(BenchLsq, HardNoiseAllOkAndReferenceIsBest) {
    auto cfg = small(BenchCommand::Lsq);
    cfg.d = {4096};
    cfg.noise = NoiseMode::Hard;
    const auto records = collect(cfg);
    for (const auto& r : records)
        EXPECT_EQ(r.status, "OK");
    const auto res = totals_by_method(records);
    for (const auto& [method, value] : res)
        EXPECT_GE(value, res.at("qr-reference") - 1e-12) << method;
}

TEST(BenchLsq, ResidualsReproducibleAcrossRunsAndThreads) {
    auto cfg = small(BenchCommand::Lsq);
    cfg.threads = 1;
    const int saved = omp_get_max_threads();
    omp_set_num_threads(1);
    const auto one = totals_by_method(collect(cfg));
    const auto again = totals_by_method(collect(cfg));
    omp_set_num_threads(4);
    const auto four = totals_by_method(collect(cfg));
    omp_set_num_threads(saved);
    EXPECT_EQ(one, again);
    for (const auto& [method, value] : one)
        EXPECT_NEAR(four.at(method), value, 1e-10) << method;
}

TEST(BenchLsq, RepsAgreeOnResiduals) {
    const auto records = collect(small(BenchCommand::Lsq));
    EXPECT_EQ(totals_by_method(records, 1), totals_by_method(records, 2));
}

TEST(BenchKappaSweep, SmallScaleCrossover) {
    auto cfg = default_config(BenchCommand::KappaSweep);
    cfg.d = {8192};
    cfg.reps = 1;
    cfg.kappa = {1e2, 1e10};
    const auto records = collect(cfg);
    for (const auto& r : records) {
        if (r.phase != "total")
            continue;
        ASSERT_TRUE(r.kappa.has_value());
        const double res = *r.relative_residual;
        if (*r.kappa == 1e2) {
            EXPECT_LE(res, 1e-10) << r.method;
        } else if (r.method == "normal") {
            EXPECT_TRUE(r.status == "CholeskyFailed" || res > 1e-2) << r.status << " " << res;
        } else {
            EXPECT_LE(res, 1e-6) << r.method;
        }
    }
}

TEST(BenchRun, WritesParseableCsv) {
    auto cfg = small(BenchCommand::KappaSweep);
    cfg.kappa = {1e3};
    cfg.reps = 1;
    std::stringstream ss;
    run_bench(cfg, ss);
    const auto records = parse_csv(ss);
    EXPECT_FALSE(records.empty());
    for (const auto& r : records)
        EXPECT_EQ(r.seed, 7u);
}
