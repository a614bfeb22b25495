#ifndef sketchla_sketch_hh
#define sketchla_sketch_hh

#include "sketchla/dense.hh"
#include "sketchla/fwht.hh"
#include "sketchla/rng.hh"

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

namespace sketchla {

// =============================================================================
// Operators. All are immutable once built and safe to share across threads.

/// k x d matrix with exactly one +-1 per column: column j is
/// (positive[j] ? +1 : -1) * e_{row[j]}.
struct CountSketchOperator {
    std::size_t d = 0;
    std::size_t k = 0;
    std::vector<std::uint32_t> row;
    std::vector<std::uint8_t> positive;
};

/// scale * G, G k x d with i.i.d. standard normal entries. G keeps unit
/// variance; the 1/sqrt(k) factor is applied at multiply time.
struct GaussianOperator {
    std::size_t k = 0;
    std::size_t d = 0;
    DenseMatrix g;  // k x d, row-major
    double scale = 1.0;
};

/// (1/sqrt(k)) P H D on a zero-padded length d_pad >= d.
struct SrhtOperator {
    std::size_t d = 0;
    std::size_t d_pad = 0;
    std::size_t k = 0;
    std::vector<std::int8_t> signs;     // length d
    std::vector<std::uint32_t> sample;  // length k, entries < d_pad, with replacement
    double scale = 1.0;
    FwhtPlan plan;
};

/// Count-Gauss: CountSketch (d -> k1) followed by a Gaussian (k1 -> k2).
struct MultiSketchOperator {
    CountSketchOperator stage1;
    GaussianOperator stage2;
};

/// scale * I_d. The degenerate operator, useful as a test fixture.
struct IdentityOperator {
    std::size_t d = 0;
    double scale = 1.0;
};

using SketchOperator = std::variant<IdentityOperator, CountSketchOperator, GaussianOperator,
                                    SrhtOperator, MultiSketchOperator>;

std::size_t input_dim(const SketchOperator& op);
std::size_t output_dim(const SketchOperator& op);
std::string operator_name(const SketchOperator& op);

// =============================================================================
/// Per-phase accounting. Byte and flop counts are analytic, from the cost
/// model of each kernel, not from hardware counters.
struct SketchPhase {
    std::string name;
    double seconds = 0.0;
    std::uint64_t bytes_read = 0;
    std::uint64_t bytes_written = 0;
    std::uint64_t flops = 0;
};

struct SketchStats {
    std::vector<SketchPhase> phases;

    SketchPhase& add(std::string name);
    const SketchPhase* find(const std::string& name) const;
    double total_seconds() const;
    std::uint64_t bytes_moved() const;
    std::uint64_t flops() const;
};

// =============================================================================
// Construction

CountSketchOperator make_countsketch(std::size_t d, std::size_t k, RngStream& stream);
GaussianOperator make_gaussian(std::size_t k, std::size_t d, RngStream& stream);
SrhtOperator make_srht(std::size_t d, std::size_t k, RngStream& stream,
                       std::size_t block_threshold = kDefaultFwhtBlock);
MultiSketchOperator make_multisketch(std::size_t d, std::size_t k1, std::size_t k2,
                                     RngStream& stream);

/// Validates the invariants of a hand-built operator; throws ShapeError.
void validate(const CountSketchOperator& op);
void validate(const SrhtOperator& op);
void validate(const MultiSketchOperator& op);

// =============================================================================
// Application

/// Y = S A via signed row scatter-add. A must be row-major with S.d rows; Y is
/// k x n row-major. Rows of A are split across threads and accumulated into Y
/// with atomic adds, so the summation order (and the last bits) may vary
/// between runs with more than one thread.
DenseMatrix apply_countsketch(const CountSketchOperator& s, const DenseMatrix& a,
                              SketchStats* stats = nullptr);

/// Same product, each output row owned by one thread and accumulated in
/// increasing input-row order. Bitwise reproducible for any thread count.
DenseMatrix apply_countsketch_deterministic(const CountSketchOperator& s, const DenseMatrix& a,
                                            SketchStats* stats = nullptr);

/// scale * G * A. Any input layout; column-major output.
DenseMatrix apply_gaussian(const GaussianOperator& g, const DenseMatrix& a,
                           SketchStats* stats = nullptr);

/// Column-major in, k x n column-major out. Throws LayoutError otherwise.
DenseMatrix apply_srht(const SrhtOperator& s, const DenseMatrix& a, SketchStats* stats = nullptr);

/// Row-major in, k2 x n column-major out. The CountSketch output Y (row-major)
/// is read as Y^T in column-major order, Z^T = scale * Y^T G^T is formed by
/// GEMM, and only the small k2 x n result is transposed.
DenseMatrix apply_multisketch(const MultiSketchOperator& m, const DenseMatrix& a,
                              SketchStats* stats = nullptr);

/// Dispatching front end used by the solvers. Converts A's layout where the
/// operator demands it (recorded as a "layout" phase) and always returns a
/// column-major result.
DenseMatrix apply_sketch(const SketchOperator& op, const DenseMatrix& a,
                         SketchStats* stats = nullptr);
Vector apply_sketch(const SketchOperator& op, const Vector& b, SketchStats* stats = nullptr);

// =============================================================================
/// Largest k * d that densify will materialize.
inline constexpr std::size_t kDensifyLimit = std::size_t{1} << 24;

/// Explicit k x d (column-major) matrix of the operator. Throws CapacityError
/// beyond kDensifyLimit entries.
DenseMatrix densify(const SketchOperator& op);

// =============================================================================
// Block-row partitioned application: A = [A1; ...; Ap], S = [S1 ... Sp],
// S A = sum_i S_i A_i.

struct BlockedFamily {
    enum class Kind { CountSketch, Gaussian, MultiSketch };
    Kind kind = Kind::CountSketch;
    std::size_t k = 0;   // output dim (k1 for multisketch)
    std::size_t k2 = 0;  // multisketch stage-2 output dim
    std::uint64_t seed = 0;
};

/// Stream id reserved for the stage-2 Gaussian shared by every block.
inline constexpr std::uint64_t kSharedStageStream = ~std::uint64_t{0};

/// Row ranges [first, last) of a balanced contiguous partition. Throws
/// PartitionError when p < 1 or p > rows.
std::vector<std::pair<std::size_t, std::size_t>> partition_rows(std::size_t rows, std::size_t p);

/// The per-block operator for block `index` of height `rows`, drawn from
/// stream (seed, index).
SketchOperator make_block_operator(const BlockedFamily& family, std::size_t index,
                                   std::size_t rows);

/// The monolithic operator [S1 ... Sp] for a p-way partition of `rows` rows.
SketchOperator concatenate_blocks(const BlockedFamily& family, std::size_t rows, std::size_t p);

/// sum_i S_i A_i, each term computed on a private copy of the row block and
/// reduced in block order. Column-major result.
DenseMatrix apply_blocked(const BlockedFamily& family, const DenseMatrix& a, std::size_t p);

}  // namespace sketchla

#endif
