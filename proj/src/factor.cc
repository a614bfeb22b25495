#include "sketchla/blas.hh"

#include "sketchla/errors.hh"

#include <cmath>
#include <string>

namespace sketchla {

namespace {

void require_square_upper(const DenseMatrix& r, const char* who) {
    if (r.rows() != r.cols())
        throw ShapeError(std::string(who) + ": triangular factor must be square");
}

void require_nonzero_diagonal(const DenseMatrix& r, const char* who) {
    for (std::size_t i = 0; i < r.rows(); ++i)
        if (r(i, i) == 0.0)
            throw SingularError(std::string(who) + ": zero diagonal at index " + std::to_string(i));
}

void solve_in_place(const DenseMatrix& r, Op trans, double* x, std::ptrdiff_t stride) {
    const std::size_t n = r.rows();
    if (trans == Op::NoTrans) {
        for (std::size_t ii = n; ii-- > 0;) {
            double s = x[static_cast<std::ptrdiff_t>(ii) * stride];
            for (std::size_t j = ii + 1; j < n; ++j)
                s -= r(ii, j) * x[static_cast<std::ptrdiff_t>(j) * stride];
            x[static_cast<std::ptrdiff_t>(ii) * stride] = s / r(ii, ii);
        }
    } else {
        for (std::size_t i = 0; i < n; ++i) {
            double s = x[static_cast<std::ptrdiff_t>(i) * stride];
            for (std::size_t j = 0; j < i; ++j)
                s -= r(j, i) * x[static_cast<std::ptrdiff_t>(j) * stride];
            x[static_cast<std::ptrdiff_t>(i) * stride] = s / r(i, i);
        }
    }
}

}  // namespace

DenseMatrix cholesky(const DenseMatrix& g) {
    if (g.rows() != g.cols())
        throw ShapeError("cholesky: matrix must be square");
    const std::size_t n = g.rows();
    DenseMatrix r(n, n, Layout::ColMajor);
    for (std::size_t j = 0; j < n; ++j) {
        double pivot = g(j, j);
        for (std::size_t p = 0; p < j; ++p)
            pivot -= r(p, j) * r(p, j);
        if (!(pivot > 0.0))
            throw NotPositiveDefinite(j, pivot);
        const double rjj = std::sqrt(pivot);
        r(j, j) = rjj;
        for (std::size_t k = j + 1; k < n; ++k) {
            double s = g(j, k);
            for (std::size_t p = 0; p < j; ++p)
                s -= r(p, j) * r(p, k);
            r(j, k) = s / rjj;
        }
    }
    return r;
}

Vector tri_solve(const DenseMatrix& r, Op trans_r, const Vector& b) {
    require_square_upper(r, "tri_solve");
    if (b.size() != r.rows())
        throw ShapeError("tri_solve: right-hand side length mismatch");
    require_nonzero_diagonal(r, "tri_solve");
    Vector x = b;
    solve_in_place(r, trans_r, x.span().data(), 1);
    return x;
}

DenseMatrix tri_solve(const DenseMatrix& r, Op trans_r, const DenseMatrix& b) {
    require_square_upper(r, "tri_solve");
    if (b.rows() != r.rows())
        throw ShapeError("tri_solve: right-hand side rows mismatch");
    require_nonzero_diagonal(r, "tri_solve");
    DenseMatrix x = b;
    MatrixView xv = x.view();
#pragma omp parallel for schedule(static) if (b.cols() > 16)
    for (std::size_t j = 0; j < b.cols(); ++j)
        solve_in_place(r, trans_r, &xv(0, j), xv.row_stride);
    return x;
}

DenseMatrix tri_solve_right(const DenseMatrix& a, const DenseMatrix& r) {
    require_square_upper(r, "tri_solve_right");
    if (a.cols() != r.rows())
        throw ShapeError("tri_solve_right: A.cols != R.rows");
    require_nonzero_diagonal(r, "tri_solve_right");
    // x R = a  <=>  R^T x^T = a^T: forward substitution on each row.
    DenseMatrix x = a;
    MatrixView xv = x.view();
    const std::int64_t m = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) if (m > 1024)
    for (std::int64_t i = 0; i < m; ++i)
        solve_in_place(r, Op::Trans, &xv(static_cast<std::size_t>(i), 0), xv.col_stride);
    return x;
}

DenseMatrix upper_times_upper(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
        throw ShapeError("upper_times_upper: expected equal square factors");
    const std::size_t n = a.rows();
    DenseMatrix c(n, n, Layout::ColMajor);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i) {
            double s = 0.0;
            for (std::size_t p = i; p <= j; ++p)
                s += a(i, p) * b(p, j);
            c(i, j) = s;
        }
    return c;
}

}  // namespace sketchla
