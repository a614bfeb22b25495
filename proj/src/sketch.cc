#include "sketchla/sketch.hh"

#include "sketchla/blas.hh"
#include "sketchla/errors.hh"
#include "sketchla/timer.hh"

#include <bit>
#include <cmath>
#include <string>

namespace sketchla {

// -----------------------------------------------------------------------------
// Stats

SketchPhase& SketchStats::add(std::string name) {
    phases.push_back(SketchPhase{std::move(name)});
    return phases.back();
}

const SketchPhase* SketchStats::find(const std::string& name) const {
    for (const auto& ph : phases)
        if (ph.name == name)
            return &ph;
    return nullptr;
}

double SketchStats::total_seconds() const {
    double s = 0.0;
    for (const auto& ph : phases)
        s += ph.seconds;
    return s;
}

std::uint64_t SketchStats::bytes_moved() const {
    std::uint64_t b = 0;
    for (const auto& ph : phases)
        b += ph.bytes_read + ph.bytes_written;
    return b;
}

std::uint64_t SketchStats::flops() const {
    std::uint64_t f = 0;
    for (const auto& ph : phases)
        f += ph.flops;
    return f;
}

// -----------------------------------------------------------------------------
// Dimensions

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void record_layout(SketchStats* stats, double seconds, std::size_t elements) {
    if (!stats || elements == 0)
        return;
    SketchPhase& ph = stats->add("layout");
    ph.seconds = seconds;
    ph.bytes_read = 8ull * elements;
    ph.bytes_written = 8ull * elements;
}

DenseMatrix convert_layout(const DenseMatrix& a, Layout target, SketchStats* stats) {
    Stopwatch watch;
    LayoutStats ls;
    DenseMatrix out = transpose_to_layout(a, target, &ls);
    record_layout(stats, watch.seconds(), ls.elements_transposed);
    return out;
}

DenseMatrix convert_layout(DenseMatrix&& a, Layout target, SketchStats* stats) {
    Stopwatch watch;
    LayoutStats ls;
    DenseMatrix out = transpose_to_layout(std::move(a), target, &ls);
    record_layout(stats, watch.seconds(), ls.elements_transposed);
    return out;
}

void require_rows(const DenseMatrix& a, std::size_t d, const char* who) {
    if (a.rows() != d)
        throw ShapeError(std::string(who) + ": A has " + std::to_string(a.rows()) +
                         " rows, operator expects " + std::to_string(d));
}

}  // namespace

std::size_t input_dim(const SketchOperator& op) {
    return std::visit(overloaded{[](const IdentityOperator& o) { return o.d; },
                                 [](const CountSketchOperator& o) { return o.d; },
                                 [](const GaussianOperator& o) { return o.d; },
                                 [](const SrhtOperator& o) { return o.d; },
                                 [](const MultiSketchOperator& o) { return o.stage1.d; }},
                      op);
}

std::size_t output_dim(const SketchOperator& op) {
    return std::visit(overloaded{[](const IdentityOperator& o) { return o.d; },
                                 [](const CountSketchOperator& o) { return o.k; },
                                 [](const GaussianOperator& o) { return o.k; },
                                 [](const SrhtOperator& o) { return o.k; },
                                 [](const MultiSketchOperator& o) { return o.stage2.k; }},
                      op);
}

std::string operator_name(const SketchOperator& op) {
    return std::visit(overloaded{[](const IdentityOperator&) { return std::string("identity"); },
                                 [](const CountSketchOperator&) { return std::string("countsketch"); },
                                 [](const GaussianOperator&) { return std::string("gaussian"); },
                                 [](const SrhtOperator&) { return std::string("srht"); },
                                 [](const MultiSketchOperator&) { return std::string("multisketch"); }},
                      op);
}

// -----------------------------------------------------------------------------
// Construction

GaussianOperator make_gaussian(std::size_t k, std::size_t d, RngStream& stream) {
    if (k < 1 || d < 1)
        throw ShapeError("make_gaussian: k and d must be >= 1");
    GaussianOperator op;
    op.k = k;
    op.d = d;
    op.g = gaussian_fill(k, d, stream, Layout::RowMajor);
    op.scale = 1.0 / std::sqrt(static_cast<double>(k));
    return op;
}

SrhtOperator make_srht(std::size_t d, std::size_t k, RngStream& stream,
                       std::size_t block_threshold) {
    if (d < 1 || k < 1)
        throw ShapeError("make_srht: d and k must be >= 1");
    SrhtOperator op;
    op.d = d;
    op.d_pad = std::max<std::size_t>(2, std::bit_ceil(d));
    op.k = k;
    op.signs = rademacher_fill(d, stream);
    op.sample = uniform_index_fill(k, op.d_pad, stream);
    op.scale = 1.0 / std::sqrt(static_cast<double>(k));
    op.plan = make_fwht_plan(op.d_pad, block_threshold);
    return op;
}

MultiSketchOperator make_multisketch(std::size_t d, std::size_t k1, std::size_t k2,
                                     RngStream& stream) {
    MultiSketchOperator op;
    op.stage1 = make_countsketch(d, k1, stream);
    op.stage2 = make_gaussian(k2, k1, stream);
    return op;
}

void validate(const SrhtOperator& op) {
    if (op.d_pad < op.d || !std::has_single_bit(op.d_pad) || (op.d_pad / 2 >= op.d && op.d_pad > 2))
        throw ShapeError("SrhtOperator: d_pad must be the least power of two >= d");
    if (op.signs.size() != op.d || op.sample.size() != op.k)
        throw ShapeError("SrhtOperator: signs/sample lengths must be d/k");
    for (std::uint32_t s : op.sample)
        if (s >= op.d_pad)
            throw ShapeError("SrhtOperator: sample index out of range");
    if (op.plan.d != op.d_pad)
        throw ShapeError("SrhtOperator: plan length must equal d_pad");
}

void validate(const MultiSketchOperator& op) {
    validate(op.stage1);
    if (op.stage1.k != op.stage2.d)
        throw ShapeError("MultiSketchOperator: stage1.k must equal stage2.d");
    if (op.stage2.g.rows() != op.stage2.k || op.stage2.g.cols() != op.stage2.d)
        throw ShapeError("MultiSketchOperator: stage2 matrix shape");
}

// -----------------------------------------------------------------------------
// Application

DenseMatrix apply_gaussian(const GaussianOperator& g, const DenseMatrix& a, SketchStats* stats) {
    require_rows(a, g.d, "apply_gaussian");
    if (g.g.rows() != g.k || g.g.cols() != g.d)
        throw ShapeError("apply_gaussian: operator matrix is not k x d");
    Stopwatch watch;
    const std::size_t n = a.cols();
    DenseMatrix y(g.k, n, Layout::ColMajor);
    gemm(g.scale, g.g.view(), Op::NoTrans, a.view(), Op::NoTrans, 0.0, y.view());
    if (stats) {
        SketchPhase& ph = stats->add("apply");
        ph.seconds = watch.seconds();
        ph.bytes_read = 8ull * (g.k * g.d + g.d * n);
        ph.bytes_written = 8ull * g.k * n;
        ph.flops = 2ull * g.k * g.d * n;
    }
    return y;
}

DenseMatrix apply_srht(const SrhtOperator& s, const DenseMatrix& a, SketchStats* stats) {
    if (a.layout() != Layout::ColMajor)
        throw LayoutError("apply_srht: A must be column-major");
    require_rows(a, s.d, "apply_srht");
    Stopwatch watch;
    const std::size_t n = a.cols();

    DenseMatrix work(s.d_pad, n, Layout::ColMajor);
    const std::int64_t cols = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (s.d * n > (1u << 16))
    for (std::int64_t c = 0; c < cols; ++c) {
        const auto src = a.major_slice(static_cast<std::size_t>(c));
        auto dst = work.major_slice(static_cast<std::size_t>(c));
        for (std::size_t i = 0; i < s.d; ++i)
            dst[i] = s.signs[i] > 0 ? src[i] : -src[i];
    }

    FwhtTraffic traffic;
    fwht_matrix(work, s.plan, &traffic);

    DenseMatrix y(s.k, n, Layout::ColMajor);
    for (std::size_t c = 0; c < n; ++c) {
        const auto src = work.major_slice(c);
        auto dst = y.major_slice(c);
        for (std::size_t i = 0; i < s.k; ++i)
            dst[i] = s.scale * src[s.sample[i]];
    }
    if (stats) {
        SketchPhase& ph = stats->add("apply");
        ph.seconds = watch.seconds();
        ph.bytes_read = 8ull * s.d * n + s.d + 8ull * traffic.reads + 8ull * s.k * n + 4ull * s.k;
        ph.bytes_written = 8ull * s.d_pad * n + 8ull * traffic.writes + 8ull * s.k * n;
        const auto log2d = static_cast<std::uint64_t>(std::countr_zero(s.d_pad));
        ph.flops = static_cast<std::uint64_t>(s.d_pad) * log2d * n + s.k * n;
    }
    return y;
}

DenseMatrix apply_multisketch(const MultiSketchOperator& m, const DenseMatrix& a,
                              SketchStats* stats) {
    if (a.layout() != Layout::RowMajor)
        throw LayoutError("apply_multisketch: A must be row-major");
    require_rows(a, m.stage1.d, "apply_multisketch");
    const std::size_t n = a.cols();
    const std::size_t k1 = m.stage1.k, k2 = m.stage2.k;
    if (m.stage2.d != k1)
        throw ShapeError("apply_multisketch: stage1.k != stage2.d");

    DenseMatrix y = apply_countsketch(m.stage1, a, stats);  // k1 x n row-major

    Stopwatch watch;
    // Y row-major is Y^T column-major: Z^T (n x k2) = scale * Y^T G^T.
    const DenseMatrix yt = reinterpret_transposed(std::move(y));
    DenseMatrix zt(n, k2, Layout::ColMajor);
    gemm(m.stage2.scale, yt.view(), Op::NoTrans, m.stage2.g.view(), Op::Trans, 0.0, zt.view());
    if (stats) {
        SketchPhase& ph = stats->add("stage2");
        ph.seconds = watch.seconds();
        ph.bytes_read = 8ull * (k1 * n + k2 * k1);
        ph.bytes_written = 8ull * k2 * n;
        ph.flops = 2ull * k2 * k1 * n;
    }
    // Z^T column-major is Z row-major; transposing only k2 x n entries.
    return convert_layout(reinterpret_transposed(std::move(zt)), Layout::ColMajor, stats);
}

DenseMatrix apply_sketch(const SketchOperator& op, const DenseMatrix& a, SketchStats* stats) {
    require_rows(a, input_dim(op), "apply_sketch");
    return std::visit(
        overloaded{
            [&](const IdentityOperator& o) {
                DenseMatrix y = convert_layout(a, Layout::ColMajor, stats);
                if (o.scale != 1.0)
                    for (double& v : y.data())
                        v *= o.scale;
                return y;
            },
            [&](const CountSketchOperator& o) {
                if (a.layout() == Layout::RowMajor)
                    return convert_layout(apply_countsketch(o, a, stats), Layout::ColMajor, stats);
                const DenseMatrix rm = convert_layout(a, Layout::RowMajor, stats);
                return convert_layout(apply_countsketch(o, rm, stats), Layout::ColMajor, stats);
            },
            [&](const GaussianOperator& o) { return apply_gaussian(o, a, stats); },
            [&](const SrhtOperator& o) {
                if (a.layout() == Layout::ColMajor)
                    return apply_srht(o, a, stats);
                return apply_srht(o, convert_layout(a, Layout::ColMajor, stats), stats);
            },
            [&](const MultiSketchOperator& o) {
                if (a.layout() == Layout::RowMajor)
                    return apply_multisketch(o, a, stats);
                return apply_multisketch(o, convert_layout(a, Layout::RowMajor, stats), stats);
            }},
        op);
}

Vector apply_sketch(const SketchOperator& op, const Vector& b, SketchStats* stats) {
    // A single column is layout-invariant: label it with whatever the operator prefers.
    const bool wants_row_major = std::holds_alternative<CountSketchOperator>(op) ||
                                 std::holds_alternative<MultiSketchOperator>(op);
    const DenseMatrix col = DenseMatrix::from_buffer(
        b.size(), 1, wants_row_major ? Layout::RowMajor : Layout::ColMajor, b.values());
    DenseMatrix y = apply_sketch(op, col, stats);
    return Vector(y.release());
}

// -----------------------------------------------------------------------------
// Densify

namespace {

inline double hadamard_entry(std::size_t row, std::size_t col) {
    return (std::popcount(row & col) & 1) ? -1.0 : 1.0;
}

void guard_densify(std::size_t k, std::size_t d) {
    if (k * d > kDensifyLimit)
        throw CapacityError("densify: " + std::to_string(k) + " x " + std::to_string(d) +
                            " exceeds the test-scale limit");
}

}  // namespace

DenseMatrix densify(const SketchOperator& op) {
    const std::size_t k = output_dim(op), d = input_dim(op);
    guard_densify(k, d);
    DenseMatrix out(k, d, Layout::ColMajor);
    std::visit(overloaded{
                   [&](const IdentityOperator& o) {
                       for (std::size_t i = 0; i < d; ++i)
                           out(i, i) = o.scale;
                   },
                   [&](const CountSketchOperator& o) {
                       for (std::size_t j = 0; j < d; ++j)
                           out(o.row[j], j) = o.positive[j] ? 1.0 : -1.0;
                   },
                   [&](const GaussianOperator& o) {
                       for (std::size_t j = 0; j < d; ++j)
                           for (std::size_t i = 0; i < k; ++i)
                               out(i, j) = o.scale * o.g(i, j);
                   },
                   [&](const SrhtOperator& o) {
                       for (std::size_t j = 0; j < d; ++j)
                           for (std::size_t i = 0; i < k; ++i)
                               out(i, j) = o.scale * hadamard_entry(o.sample[i], j) *
                                           static_cast<double>(o.signs[j]);
                   },
                   [&](const MultiSketchOperator& o) {
                       // Column j of G C is +-G(:, r_j).
                       for (std::size_t j = 0; j < d; ++j) {
                           const double sign = o.stage1.positive[j] ? 1.0 : -1.0;
                           const std::size_t r = o.stage1.row[j];
                           for (std::size_t i = 0; i < k; ++i)
                               out(i, j) = sign * (o.stage2.scale * o.stage2.g(i, r));
                       }
                   }},
               op);
    return out;
}

}  // namespace sketchla
