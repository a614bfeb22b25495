#ifndef sketchla_dense_hh
#define sketchla_dense_hh

#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

namespace sketchla {

enum class Layout : char { RowMajor = 'R', ColMajor = 'C' };

const char* to_string(Layout layout);

// =============================================================================
/// Non-owning strided view of a matrix. Element (i, j) lives at
/// data[i * row_stride + j * col_stride]. A transpose is a stride swap.
struct ConstMatrixView {
    const double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::ptrdiff_t row_stride = 0;
    std::ptrdiff_t col_stride = 0;

    double operator()(std::size_t i, std::size_t j) const {
        return data[static_cast<std::ptrdiff_t>(i) * row_stride +
                    static_cast<std::ptrdiff_t>(j) * col_stride];
    }

    ConstMatrixView t() const { return {data, cols, rows, col_stride, row_stride}; }

    /// Rows [first, last).
    ConstMatrixView row_block(std::size_t first, std::size_t last) const;
};

struct MatrixView {
    double* data = nullptr;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::ptrdiff_t row_stride = 0;
    std::ptrdiff_t col_stride = 0;

    double& operator()(std::size_t i, std::size_t j) const {
        return data[static_cast<std::ptrdiff_t>(i) * row_stride +
                    static_cast<std::ptrdiff_t>(j) * col_stride];
    }

    MatrixView t() const { return {data, cols, rows, col_stride, row_stride}; }

    operator ConstMatrixView() const { return {data, rows, cols, row_stride, col_stride}; }
};

// =============================================================================
/// Dense real matrix with an explicit storage order and no padding:
/// data().size() == rows() * cols() always.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols, Layout layout = Layout::ColMajor);

    /// Row-by-row literal, stored in the requested layout.
    static DenseMatrix from_rows(std::initializer_list<std::initializer_list<double>> rows,
                                 Layout layout = Layout::RowMajor);
    static DenseMatrix identity(std::size_t n, Layout layout = Layout::ColMajor);
    /// Takes ownership of a buffer already in `layout` order.
    static DenseMatrix from_buffer(std::size_t rows, std::size_t cols, Layout layout,
                                   std::vector<double> data);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    Layout layout() const { return layout_; }
    bool empty() const { return data_.empty(); }

    std::span<double> data() { return data_; }
    std::span<const double> data() const { return data_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[offset(i, j)]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[offset(i, j)]; }

    ConstMatrixView view() const;
    MatrixView view();

    /// Contiguous row (RowMajor) or column (ColMajor) number `i`.
    std::span<double> major_slice(std::size_t i);
    std::span<const double> major_slice(std::size_t i) const;

    /// Copy of rows [first, last), same layout.
    DenseMatrix row_block(std::size_t first, std::size_t last) const;

    /// Leading `count` columns, same layout.
    DenseMatrix leading_columns(std::size_t count) const;

    /// Releases the buffer; the matrix becomes empty.
    std::vector<double> release();

  private:
    std::size_t offset(std::size_t i, std::size_t j) const {
        return layout_ == Layout::RowMajor ? i * cols_ + j : j * rows_ + i;
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Layout layout_ = Layout::ColMajor;
    std::vector<double> data_;
};

/// Dense real vector.
class Vector {
  public:
    Vector() = default;
    explicit Vector(std::size_t len, double value = 0.0) : data_(len, value) {}
    Vector(std::initializer_list<double> values) : data_(values) {}
    explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

    std::size_t size() const { return data_.size(); }
    double& operator[](std::size_t i) { return data_[i]; }
    double operator[](std::size_t i) const { return data_[i]; }
    std::span<double> span() { return data_; }
    std::span<const double> span() const { return data_; }
    const std::vector<double>& values() const { return data_; }

    /// Viewed as a len x 1 matrix. Layout-invariant.
    ConstMatrixView as_column() const { return {data_.data(), data_.size(), 1, 1, 1}; }
    MatrixView as_column() { return {data_.data(), data_.size(), 1, 1, 1}; }

  private:
    std::vector<double> data_;
};

/// Copies a strided view into an owning matrix with the requested layout.
DenseMatrix materialize(ConstMatrixView view, Layout layout);

/// Statistics recorded by layout conversions.
struct LayoutStats {
    std::size_t elements_transposed = 0;
    std::size_t conversions = 0;
};

/// Same logical matrix with physical storage `target`. When the layout
/// already matches nothing is reordered and the stats record zero elements.
DenseMatrix transpose_to_layout(const DenseMatrix& a, Layout target, LayoutStats* stats = nullptr);
/// Rvalue overload: moves the buffer through untouched when the layout already matches.
DenseMatrix transpose_to_layout(DenseMatrix&& a, Layout target, LayoutStats* stats = nullptr);

/// Reinterprets the buffer as the transpose in the opposite layout. No data moves.
DenseMatrix reinterpret_transposed(DenseMatrix&& a);

double frobenius_norm(ConstMatrixView a);
double frobenius_norm(const DenseMatrix& a);
double norm2(std::span<const double> x);
double dot(std::span<const double> x, std::span<const double> y);

/// ||a - b||_F / ||b||_F (||a - b||_F when b is zero). Layout-agnostic.
double relative_difference(const DenseMatrix& a, const DenseMatrix& b);
double max_abs_difference(const DenseMatrix& a, const DenseMatrix& b);

/// Logical equality, element by element, bitwise on the doubles.
bool bitwise_equal(const DenseMatrix& a, const DenseMatrix& b);

}  // namespace sketchla

#endif
