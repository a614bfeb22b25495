#include "sketchla/rng.hh"

#include "sketchla/errors.hh"

#include <cmath>
#include <numbers>

namespace sketchla {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

// Top 53 bits mapped into the open interval (0, 1).
inline double open_unit(std::uint64_t word) {
    return (static_cast<double>(word >> 11) + 0.5) * 0x1.0p-53;
}

inline std::size_t blocks_for(std::size_t elements) { return (elements + 1) / 2; }

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kPhiloxM0, c[0], hi0, lo0);
        mulhilo(kPhiloxM1, c[2], hi1, lo1);
        c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
        k[0] += kPhiloxW0;
        k[1] += kPhiloxW1;
    }
    return c;
}

std::array<std::uint64_t, 2> RngStream::block_at(std::uint64_t index) const {
    const auto out = philox4x32(
        {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
         static_cast<std::uint32_t>(stream_id_), static_cast<std::uint32_t>(stream_id_ >> 32)},
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)});
    return {(static_cast<std::uint64_t>(out[1]) << 32) | out[0],
            (static_cast<std::uint64_t>(out[3]) << 32) | out[2]};
}

std::array<std::uint64_t, 2> RngStream::block(std::uint64_t offset) const {
    return block_at(counter_ + offset);
}

std::uint64_t RngStream::advance(std::uint64_t blocks) {
    const std::uint64_t first = counter_;
    counter_ += blocks;
    return first;
}

void gaussian_fill(std::span<double> out, RngStream& stream) {
    const std::size_t len = out.size();
    const std::uint64_t base = stream.advance(blocks_for(len));
    const std::int64_t nblocks = static_cast<std::int64_t>(blocks_for(len));
#pragma omp parallel for schedule(static) if (len > (1u << 15))
    for (std::int64_t b = 0; b < nblocks; ++b) {
        const auto words = stream.block_at(base + static_cast<std::uint64_t>(b));
        const double radius = std::sqrt(-2.0 * std::log(open_unit(words[0])));
        const double angle = 2.0 * std::numbers::pi * open_unit(words[1]);
        const std::size_t i = 2 * static_cast<std::size_t>(b);
        out[i] = radius * std::cos(angle);
        if (i + 1 < len)
            out[i + 1] = radius * std::sin(angle);
    }
}

DenseMatrix gaussian_fill(std::size_t rows, std::size_t cols, RngStream& stream, Layout layout) {
    std::vector<double> values(rows * cols);
    gaussian_fill(values, stream);
    auto row_major = DenseMatrix::from_buffer(rows, cols, Layout::RowMajor, std::move(values));
    return transpose_to_layout(std::move(row_major), layout);
}

std::vector<std::int8_t> rademacher_fill(std::size_t len, RngStream& stream) {
    std::vector<std::int8_t> out(len);
    const std::uint64_t base = stream.advance(blocks_for(len));
#pragma omp parallel for schedule(static) if (len > (1u << 16))
    for (std::size_t i = 0; i < len; ++i) {
        const auto words = stream.block_at(base + i / 2);
        out[i] = (words[i % 2] >> 63) ? std::int8_t{1} : std::int8_t{-1};
    }
    return out;
}

std::vector<std::uint32_t> uniform_index_fill(std::size_t len, std::uint64_t k, RngStream& stream) {
    if (k < 1 || k > (std::uint64_t{1} << 32))
        throw std::invalid_argument("uniform_index_fill: k must lie in [1, 2^32]");
    std::vector<std::uint32_t> out(len);
    const std::uint64_t base = stream.advance(blocks_for(len));
#pragma omp parallel for schedule(static) if (len > (1u << 16))
    for (std::size_t i = 0; i < len; ++i) {
        const auto words = stream.block_at(base + i / 2);
        // Multiply-shift range reduction; bias is below k / 2^64.
        const auto wide = static_cast<unsigned __int128>(words[i % 2]) * k;
        out[i] = static_cast<std::uint32_t>(wide >> 64);
    }
    return out;
}

}  // namespace sketchla
