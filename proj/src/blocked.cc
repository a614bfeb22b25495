#include "sketchla/sketch.hh"

#include "sketchla/errors.hh"

#include <string>

namespace sketchla {

std::vector<std::pair<std::size_t, std::size_t>> partition_rows(std::size_t rows, std::size_t p) {
    if (p < 1 || p > rows)
        throw PartitionError("partition_rows: block count " + std::to_string(p) +
                             " must lie in [1, " + std::to_string(rows) + "]");
    std::vector<std::pair<std::size_t, std::size_t>> out;
    out.reserve(p);
    const std::size_t base = rows / p, extra = rows % p;
    std::size_t first = 0;
    for (std::size_t i = 0; i < p; ++i) {
        const std::size_t len = base + (i < extra ? 1 : 0);
        out.emplace_back(first, first + len);
        first += len;
    }
    return out;
}

namespace {

GaussianOperator shared_stage2(const BlockedFamily& family) {
    RngStream stream(family.seed, kSharedStageStream);
    return make_gaussian(family.k2, family.k, stream);
}

}  // namespace

SketchOperator make_block_operator(const BlockedFamily& family, std::size_t index,
                                   std::size_t rows) {
    RngStream stream(family.seed, index);
    switch (family.kind) {
    case BlockedFamily::Kind::CountSketch:
        return make_countsketch(rows, family.k, stream);
    case BlockedFamily::Kind::Gaussian:
        return make_gaussian(family.k, rows, stream);
    case BlockedFamily::Kind::MultiSketch:
        return MultiSketchOperator{make_countsketch(rows, family.k, stream), shared_stage2(family)};
    }
    throw std::logic_error("make_block_operator: unknown family");
}

SketchOperator concatenate_blocks(const BlockedFamily& family, std::size_t rows, std::size_t p) {
    const auto ranges = partition_rows(rows, p);
    if (family.kind == BlockedFamily::Kind::Gaussian) {
        GaussianOperator whole;
        whole.k = family.k;
        whole.d = rows;
        whole.g = DenseMatrix(family.k, rows, Layout::RowMajor);
        for (std::size_t b = 0; b < ranges.size(); ++b) {
            const auto [first, last] = ranges[b];
            const auto block = std::get<GaussianOperator>(make_block_operator(family, b, last - first));
            whole.scale = block.scale;
            for (std::size_t i = 0; i < family.k; ++i)
                for (std::size_t j = first; j < last; ++j)
                    whole.g(i, j) = block.g(i, j - first);
        }
        return whole;
    }
    CountSketchOperator stage1;
    stage1.d = rows;
    stage1.k = family.k;
    for (std::size_t b = 0; b < ranges.size(); ++b) {
        const auto [first, last] = ranges[b];
        const SketchOperator op = make_block_operator(family, b, last - first);
        const CountSketchOperator& c = family.kind == BlockedFamily::Kind::CountSketch
                                           ? std::get<CountSketchOperator>(op)
                                           : std::get<MultiSketchOperator>(op).stage1;
        stage1.row.insert(stage1.row.end(), c.row.begin(), c.row.end());
        stage1.positive.insert(stage1.positive.end(), c.positive.begin(), c.positive.end());
    }
    if (family.kind == BlockedFamily::Kind::CountSketch)
        return stage1;
    return MultiSketchOperator{std::move(stage1), shared_stage2(family)};
}

DenseMatrix apply_blocked(const BlockedFamily& family, const DenseMatrix& a, std::size_t p) {
    const auto ranges = partition_rows(a.rows(), p);
    DenseMatrix sum;
    for (std::size_t b = 0; b < ranges.size(); ++b) {
        const auto [first, last] = ranges[b];
        const DenseMatrix local = a.row_block(first, last);
        const SketchOperator op = make_block_operator(family, b, last - first);
        DenseMatrix term = apply_sketch(op, local);
        if (b == 0) {
            sum = std::move(term);
            continue;
        }
        auto dst = sum.data();
        const auto src = term.data();
        for (std::size_t i = 0; i < dst.size(); ++i)
            dst[i] += src[i];
    }
    return sum;
}

}  // namespace sketchla
