#ifndef sketchla_fwht_hh
#define sketchla_fwht_hh

#include "sketchla/dense.hh"

#include <cstdint>
#include <span>

namespace sketchla {

/// Default span, in doubles, processed entirely inside one cache-resident
/// block (256 KiB).
inline constexpr std::size_t kDefaultFwhtBlock = 32768;

// =============================================================================
/// Execution plan for an unnormalized Walsh-Hadamard transform of length d.
///
/// Radix-4 stages run with stride d/4, d/16, ... down to 1. When log2(d) is
/// odd a single radix-2 stage with stride 1 closes the sequence. Every stage
/// whose butterfly group spans more than `block_threshold` entries sweeps the
/// whole vector; the remaining stages run block by block on a local copy of
/// `block_threshold` entries, so they cost one read and one write per entry
/// in total.
struct FwhtPlan {
    std::size_t d = 0;
    std::size_t block_threshold = 0;
    /// 2 when log2(d) is odd, else 4.
    int remainder_radix = 4;
};

/// Throws ShapeError unless d is a power of two >= 2. The threshold is clamped
/// to [4, d] and rounded down to a power of two.
FwhtPlan make_fwht_plan(std::size_t d, std::size_t block_threshold = kDefaultFwhtBlock);

/// Element reads and writes against the vector's home storage.
struct FwhtTraffic {
    std::uint64_t reads = 0;
    std::uint64_t writes = 0;
    std::uint64_t total() const { return reads + writes; }
};

/// Number of stages that sweep the full vector under `plan`.
std::size_t fwht_global_stages(const FwhtPlan& plan);

/// Traffic predicted for one transform of length plan.d.
FwhtTraffic fwht_expected_traffic(const FwhtPlan& plan);

/// In place: a <- H_d a.
void fwht_inplace(std::span<double> a, const FwhtPlan& plan, FwhtTraffic* traffic = nullptr);
void fwht_inplace(Vector& a, const FwhtPlan& plan, FwhtTraffic* traffic = nullptr);

/// Transforms every column of a column-major matrix in place. Throws
/// LayoutError for row-major input.
void fwht_matrix(DenseMatrix& a, const FwhtPlan& plan, FwhtTraffic* traffic = nullptr);

}  // namespace sketchla

#endif
