#ifndef sketchla_blas_hh
#define sketchla_blas_hh

#include "sketchla/dense.hh"

#include <utility>

namespace sketchla {

enum class Op : bool { NoTrans = false, Trans = true };

// -----------------------------------------------------------------------------
// GEMM

/// C <- alpha * op(A) * op(B) + beta * C, for any mix of storage orders.
/// Packed, cache-blocked, parallel over disjoint tiles of C. When C is small
/// and the inner dimension long (a Gram matrix), the inner dimension is split
/// across threads and the partial products are summed in thread order.
void gemm(double alpha, ConstMatrixView a, Op trans_a, ConstMatrixView b, Op trans_b, double beta,
          MatrixView c);

/// alpha * op(A) * op(B) + beta * C as a new matrix; inputs untouched.
DenseMatrix gemm(double alpha, const DenseMatrix& a, Op trans_a, const DenseMatrix& b, Op trans_b,
                 double beta, const DenseMatrix& c);

/// op(A) * op(B) into a fresh matrix of the given layout.
DenseMatrix multiply(const DenseMatrix& a, Op trans_a, const DenseMatrix& b, Op trans_b,
                     Layout layout = Layout::ColMajor);

/// y <- op(A) x.
Vector gemv(const DenseMatrix& a, Op trans_a, const Vector& x);

/// b - A x, row-parallel.
Vector residual(const DenseMatrix& a, const Vector& x, const Vector& b);

// -----------------------------------------------------------------------------
// Triangular

/// Upper-triangular R with R^T R = G. Reads the upper triangle of G only.
/// Throws NotPositiveDefinite on the first pivot that is not > 0.
DenseMatrix cholesky(const DenseMatrix& g);

/// op(R)^{-1} b for upper-triangular R.
Vector tri_solve(const DenseMatrix& r, Op trans_r, const Vector& b);
/// op(R)^{-1} B, column by column.
DenseMatrix tri_solve(const DenseMatrix& r, Op trans_r, const DenseMatrix& b);

/// A R^{-1}: each row x of the result solves x R = a. Keeps A's layout.
DenseMatrix tri_solve_right(const DenseMatrix& a, const DenseMatrix& r);

/// Product of two upper-triangular n x n matrices.
DenseMatrix upper_times_upper(const DenseMatrix& a, const DenseMatrix& b);

// -----------------------------------------------------------------------------
// Householder QR

/// Compact Householder factorization of an m x n matrix, m >= n. Reflectors
/// H_j = I - tau_j v_j v_j^T with v_j(j) = 1 are kept below the diagonal.
/// The sign of each column is recorded so that R has a nonnegative diagonal
/// and Q = H_0 ... H_{n-1} [I; 0] diag(sign).
class HouseholderQR {
  public:
    explicit HouseholderQR(const DenseMatrix& a);

    std::size_t rows() const { return factors_.rows(); }
    std::size_t cols() const { return factors_.cols(); }

    /// n x n upper triangular, nonnegative diagonal.
    DenseMatrix r() const;
    /// Explicit m x n orthonormal factor.
    DenseMatrix q() const;
    /// First n entries of Q^T z, applied through the reflectors.
    Vector apply_qt(const Vector& z) const;
    /// Q y for y of length n.
    Vector apply_q(const Vector& y) const;

  private:
    DenseMatrix factors_;  // column-major
    std::vector<double> tau_;
    std::vector<double> sign_;
};

/// Explicit (Q, R) with R's diagonal nonnegative.
std::pair<DenseMatrix, DenseMatrix> householder_qr_economy(const DenseMatrix& a);

// -----------------------------------------------------------------------------
// Spectra

/// All eigenvalues of a small symmetric matrix, descending, by cyclic Jacobi.
/// Throws SymmetryError when asymmetry exceeds 1e-12 relative to max |G|.
Vector sym_eigenvalues(const DenseMatrix& g);

/// Singular values of a tall matrix, descending: Householder QR followed by
/// one-sided Jacobi on R. Accurate to roughly u * sigma_max in absolute terms,
/// which keeps condition numbers up to ~1e12 measurable.
Vector singular_values(const DenseMatrix& a);

}  // namespace sketchla

#endif
