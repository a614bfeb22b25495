#include "sketchla/sketch.hh"

#include "sketchla/errors.hh"
#include "sketchla/timer.hh"

#include <omp.h>

#include <atomic>
#include <string>

namespace sketchla {

namespace {

void require_row_major_input(const CountSketchOperator& s, const DenseMatrix& a, const char* who) {
    if (a.layout() != Layout::RowMajor)
        throw LayoutError(std::string(who) + ": A must be row-major");
    if (a.rows() != s.d)
        throw ShapeError(std::string(who) + ": A has " + std::to_string(a.rows()) +
                         " rows, operator expects " + std::to_string(s.d));
}

// dn floating reads, d index reads, d sign reads, dn floating writes.
void record_apply(SketchStats* stats, double seconds, const CountSketchOperator& s, std::size_t n) {
    if (!stats)
        return;
    SketchPhase& ph = stats->add("apply");
    ph.seconds = seconds;
    ph.bytes_read = 8ull * s.d * n + (sizeof(std::uint32_t) + sizeof(std::uint8_t)) * s.d;
    ph.bytes_written = 8ull * s.d * n;
    ph.flops = static_cast<std::uint64_t>(s.d) * n;
}

inline void accumulate_row(double* dst, const double* src, std::size_t n, bool positive) {
    if (positive)
        for (std::size_t c = 0; c < n; ++c)
            dst[c] += src[c];
    else
        for (std::size_t c = 0; c < n; ++c)
            dst[c] -= src[c];
}

}  // namespace

CountSketchOperator make_countsketch(std::size_t d, std::size_t k, RngStream& stream) {
    if (d < 1 || k < 1)
        throw ShapeError("make_countsketch: d and k must be >= 1");
    CountSketchOperator op;
    op.d = d;
    op.k = k;
    op.row = uniform_index_fill(d, k, stream);
    const auto signs = rademacher_fill(d, stream);
    op.positive.resize(d);
    for (std::size_t j = 0; j < d; ++j)
        op.positive[j] = signs[j] > 0 ? 1 : 0;
    return op;
}

void validate(const CountSketchOperator& op) {
    if (op.row.size() != op.d || op.positive.size() != op.d)
        throw ShapeError("CountSketchOperator: arrays must have length d");
    for (std::uint32_t r : op.row)
        if (r >= op.k)
            throw ShapeError("CountSketchOperator: row index out of range");
}

DenseMatrix apply_countsketch(const CountSketchOperator& s, const DenseMatrix& a,
                              SketchStats* stats) {
    require_row_major_input(s, a, "apply_countsketch");
    const std::size_t n = a.cols();
    Stopwatch watch;
    DenseMatrix y(s.k, n, Layout::RowMajor);
    double* out = y.data().data();
    const double* in = a.data().data();
    const std::int64_t d = static_cast<std::int64_t>(s.d);

    if (omp_get_max_threads() == 1 || omp_in_parallel()) {
        for (std::int64_t j = 0; j < d; ++j)
            accumulate_row(out + s.row[j] * n, in + j * n, n, s.positive[j] != 0);
    } else {
#pragma omp parallel for schedule(static)
        for (std::int64_t j = 0; j < d; ++j) {
            double* dst = out + s.row[static_cast<std::size_t>(j)] * n;
            const double* src = in + static_cast<std::size_t>(j) * n;
            if (s.positive[static_cast<std::size_t>(j)])
                for (std::size_t c = 0; c < n; ++c)
                    std::atomic_ref<double>(dst[c]).fetch_add(src[c], std::memory_order_relaxed);
            else
                for (std::size_t c = 0; c < n; ++c)
                    std::atomic_ref<double>(dst[c]).fetch_sub(src[c], std::memory_order_relaxed);
        }
    }
    record_apply(stats, watch.seconds(), s, n);
    return y;
}

DenseMatrix apply_countsketch_deterministic(const CountSketchOperator& s, const DenseMatrix& a,
                                            SketchStats* stats) {
    require_row_major_input(s, a, "apply_countsketch_deterministic");
    const std::size_t n = a.cols();
    Stopwatch watch;

    // Bucket input rows by destination; counting sort keeps them in increasing j.
    std::vector<std::size_t> start(s.k + 1, 0);
    for (std::uint32_t r : s.row)
        ++start[r + 1];
    for (std::size_t m = 0; m < s.k; ++m)
        start[m + 1] += start[m];
    std::vector<std::uint32_t> order(s.d);
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t j = 0; j < s.d; ++j)
            order[fill[s.row[j]]++] = static_cast<std::uint32_t>(j);
    }

    DenseMatrix y(s.k, n, Layout::RowMajor);
    double* out = y.data().data();
    const double* in = a.data().data();
    const std::int64_t k = static_cast<std::int64_t>(s.k);
#pragma omp parallel for schedule(dynamic, 64) if (s.d * n > (1u << 15))
    for (std::int64_t m = 0; m < k; ++m) {
        double* dst = out + static_cast<std::size_t>(m) * n;
        for (std::size_t q = start[static_cast<std::size_t>(m)]; q < start[static_cast<std::size_t>(m) + 1]; ++q) {
            const std::size_t j = order[q];
            accumulate_row(dst, in + j * n, n, s.positive[j] != 0);
        }
    }
    record_apply(stats, watch.seconds(), s, n);
    return y;
}

}  // namespace sketchla
