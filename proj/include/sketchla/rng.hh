#ifndef sketchla_rng_hh
#define sketchla_rng_hh

#include "sketchla/dense.hh"

#include <array>
#include <cstdint>
#include <vector>

namespace sketchla {

/// Philox4x32-10 block function (Salmon et al., SC'11). Maps a 128-bit
/// counter and 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

// =============================================================================
/// Counter-based random stream. The key is the seed; the counter is
/// (block index, stream id). Every generated value is a pure function of
/// (seed, stream_id, block index), so a fill may be split across threads by
/// block ranges and still reproduce the serial result bit for bit.
///
/// Each counter block yields two 64-bit words. The fills below consume one
/// word per element (two elements per block), except Gaussians, which take
/// both words of a block for one Box-Muller pair:
///
///     z0 = sqrt(-2 ln u1) cos(2 pi u2),   z1 = sqrt(-2 ln u1) sin(2 pi u2)
///
/// with u1, u2 in (0, 1) built from the top 53 bits of each word.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id) : seed_(seed), stream_id_(stream_id) {}

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }
    /// Next unused block index.
    std::uint64_t counter() const { return counter_; }

    /// Both 64-bit words of block `counter() + offset`. Does not advance.
    std::array<std::uint64_t, 2> block(std::uint64_t offset) const;

    /// Reserves `blocks` blocks and returns the first reserved index.
    std::uint64_t advance(std::uint64_t blocks);

    /// Bits at an absolute block index.
    std::array<std::uint64_t, 2> block_at(std::uint64_t index) const;

  private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::uint64_t counter_ = 0;
};

/// rows x cols matrix of standard normals. Logical element (i, j) takes the
/// variate with index i * cols + j regardless of `layout`.
DenseMatrix gaussian_fill(std::size_t rows, std::size_t cols, RngStream& stream,
                          Layout layout = Layout::RowMajor);

/// Standard normals into an existing buffer.
void gaussian_fill(std::span<double> out, RngStream& stream);

/// +1 / -1 with equal probability.
std::vector<std::int8_t> rademacher_fill(std::size_t len, RngStream& stream);

/// Uniform over {0, ..., k - 1}. Requires 1 <= k <= 2^32.
std::vector<std::uint32_t> uniform_index_fill(std::size_t len, std::uint64_t k, RngStream& stream);

}  // namespace sketchla

#endif
