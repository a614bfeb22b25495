#include "sketchla/dense.hh"

#include "sketchla/errors.hh"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

namespace sketchla {

const char* to_string(Layout layout) {
    return layout == Layout::RowMajor ? "RowMajor" : "ColMajor";
}

ConstMatrixView ConstMatrixView::row_block(std::size_t first, std::size_t last) const {
    if (first > last || last > rows)
        throw ShapeError("row_block: range out of bounds");
    return {data + static_cast<std::ptrdiff_t>(first) * row_stride, last - first, cols, row_stride,
            col_stride};
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, Layout layout)
    : rows_(rows), cols_(cols), layout_(layout), data_(rows * cols, 0.0) {}

DenseMatrix DenseMatrix::from_rows(std::initializer_list<std::initializer_list<double>> rows,
                                   Layout layout) {
    const std::size_t m = rows.size();
    const std::size_t n = m == 0 ? 0 : rows.begin()->size();
    DenseMatrix out(m, n, layout);
    std::size_t i = 0;
    for (const auto& row : rows) {
        if (row.size() != n)
            throw ShapeError("from_rows: ragged initializer");
        std::size_t j = 0;
        for (double v : row)
            out(i, j++) = v;
        ++i;
    }
    return out;
}

DenseMatrix DenseMatrix::identity(std::size_t n, Layout layout) {
    DenseMatrix out(n, n, layout);
    for (std::size_t i = 0; i < n; ++i)
        out(i, i) = 1.0;
    return out;
}

DenseMatrix DenseMatrix::from_buffer(std::size_t rows, std::size_t cols, Layout layout,
                                     std::vector<double> data) {
    if (data.size() != rows * cols)
        throw ShapeError("from_buffer: buffer length " + std::to_string(data.size()) +
                         " != rows*cols");
    DenseMatrix out;
    out.rows_ = rows;
    out.cols_ = cols;
    out.layout_ = layout;
    out.data_ = std::move(data);
    return out;
}

ConstMatrixView DenseMatrix::view() const {
    if (layout_ == Layout::RowMajor)
        return {data_.data(), rows_, cols_, static_cast<std::ptrdiff_t>(cols_), 1};
    return {data_.data(), rows_, cols_, 1, static_cast<std::ptrdiff_t>(rows_)};
}

MatrixView DenseMatrix::view() {
    if (layout_ == Layout::RowMajor)
        return {data_.data(), rows_, cols_, static_cast<std::ptrdiff_t>(cols_), 1};
    return {data_.data(), rows_, cols_, 1, static_cast<std::ptrdiff_t>(rows_)};
}

std::span<double> DenseMatrix::major_slice(std::size_t i) {
    const std::size_t len = layout_ == Layout::RowMajor ? cols_ : rows_;
    return std::span<double>(data_).subspan(i * len, len);
}

std::span<const double> DenseMatrix::major_slice(std::size_t i) const {
    const std::size_t len = layout_ == Layout::RowMajor ? cols_ : rows_;
    return std::span<const double>(data_).subspan(i * len, len);
}

DenseMatrix DenseMatrix::row_block(std::size_t first, std::size_t last) const {
    return materialize(view().row_block(first, last), layout_);
}

DenseMatrix DenseMatrix::leading_columns(std::size_t count) const {
    if (count > cols_)
        throw ShapeError("leading_columns: count exceeds cols");
    return materialize(view().t().row_block(0, count).t(), layout_);
}

std::vector<double> DenseMatrix::release() {
    rows_ = cols_ = 0;
    return std::move(data_);
}

DenseMatrix materialize(ConstMatrixView v, Layout layout) {
    DenseMatrix out(v.rows, v.cols, layout);
    if (layout == Layout::ColMajor) {
#pragma omp parallel for schedule(static) if (v.rows * v.cols > (1u << 16))
        for (std::size_t j = 0; j < v.cols; ++j) {
            double* dst = out.data().data() + j * v.rows;
            for (std::size_t i = 0; i < v.rows; ++i)
                dst[i] = v(i, j);
        }
    } else {
#pragma omp parallel for schedule(static) if (v.rows * v.cols > (1u << 16))
        for (std::size_t i = 0; i < v.rows; ++i) {
            double* dst = out.data().data() + i * v.cols;
            for (std::size_t j = 0; j < v.cols; ++j)
                dst[j] = v(i, j);
        }
    }
    return out;
}

namespace {

// Cache-blocked out-of-place reorder.
DenseMatrix reorder(const DenseMatrix& a, Layout target) {
    constexpr std::size_t tile = 32;
    DenseMatrix out(a.rows(), a.cols(), target);
    const ConstMatrixView src = a.view();
    const MatrixView dst = out.view();
    const std::size_t row_tiles = (a.rows() + tile - 1) / tile;
#pragma omp parallel for schedule(static) if (a.rows() * a.cols() > (1u << 16))
    for (std::size_t ti = 0; ti < row_tiles; ++ti) {
        const std::size_t i0 = ti * tile;
        const std::size_t i1 = std::min(a.rows(), i0 + tile);
        for (std::size_t j0 = 0; j0 < a.cols(); j0 += tile) {
            const std::size_t j1 = std::min(a.cols(), j0 + tile);
            for (std::size_t i = i0; i < i1; ++i)
                for (std::size_t j = j0; j < j1; ++j)
                    dst(i, j) = src(i, j);
        }
    }
    return out;
}

}  // namespace

DenseMatrix transpose_to_layout(const DenseMatrix& a, Layout target, LayoutStats* stats) {
    if (a.layout() == target)
        return a;
    if (a.rows() == 1 || a.cols() == 1) {
        std::vector<double> copy(a.data().begin(), a.data().end());
        return DenseMatrix::from_buffer(a.rows(), a.cols(), target, std::move(copy));
    }
    if (stats) {
        stats->elements_transposed += a.rows() * a.cols();
        ++stats->conversions;
    }
    return reorder(a, target);
}

DenseMatrix transpose_to_layout(DenseMatrix&& a, Layout target, LayoutStats* stats) {
    if (a.layout() == target)
        return std::move(a);
    // Vectors are layout-invariant; relabel without touching the buffer.
    if (a.rows() == 1 || a.cols() == 1) {
        const std::size_t m = a.rows(), n = a.cols();
        return DenseMatrix::from_buffer(m, n, target, a.release());
    }
    if (stats) {
        stats->elements_transposed += a.rows() * a.cols();
        ++stats->conversions;
    }
    return reorder(a, target);
}

DenseMatrix reinterpret_transposed(DenseMatrix&& a) {
    const std::size_t m = a.rows(), n = a.cols();
    const Layout flipped = a.layout() == Layout::RowMajor ? Layout::ColMajor : Layout::RowMajor;
    return DenseMatrix::from_buffer(n, m, flipped, a.release());
}

double frobenius_norm(ConstMatrixView a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.cols; ++j)
            sum += a(i, j) * a(i, j);
    return std::sqrt(sum);
}

double frobenius_norm(const DenseMatrix& a) {
    double sum = 0.0;
    for (double v : a.data())
        sum += v * v;
    return std::sqrt(sum);
}

double norm2(std::span<const double> x) {
    double sum = 0.0;
    for (double v : x)
        sum += v * v;
    return std::sqrt(sum);
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size())
        throw ShapeError("dot: length mismatch");
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        sum += x[i] * y[i];
    return sum;
}

namespace {

void require_same_shape(const DenseMatrix& a, const DenseMatrix& b, const char* who) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ShapeError(std::string(who) + ": shape mismatch " + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) + "x" +
                         std::to_string(b.cols()));
}

}  // namespace

double relative_difference(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "relative_difference");
    double diff = 0.0, ref = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double d = a(i, j) - b(i, j);
            diff += d * d;
            ref += b(i, j) * b(i, j);
        }
    return ref > 0.0 ? std::sqrt(diff / ref) : std::sqrt(diff);
}

double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b) {
    require_same_shape(a, b, "max_abs_difference");
    double worst = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i)
            worst = std::max(worst, std::abs(a(i, j) - b(i, j)));
    return worst;
}

bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        return false;
    for (std::size_t j = 0; j < a.cols(); ++j)
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double x = a(i, j), y = b(i, j);
            if (std::memcmp(&x, &y, sizeof(double)) != 0)
                return false;
        }
    return true;
}

}  // namespace sketchla
