#include "sketchla/blas.hh"

#include "sketchla/errors.hh"

#include <omp.h>

#include <algorithm>
#include <string>
#include <vector>

namespace sketchla {

namespace {

constexpr std::size_t kMR = 4;
constexpr std::size_t kNR = 8;
constexpr std::size_t kMC = 128;
constexpr std::size_t kKC = 256;
constexpr std::size_t kNC = 1024;

// Ap holds ceil(mc / MR) micro-panels, each kc x MR, zero padded.
void pack_a(ConstMatrixView a, std::size_t i0, std::size_t mc, std::size_t p0, std::size_t kc,
            double* ap) {
    for (std::size_t ir = 0; ir < mc; ir += kMR) {
        const std::size_t mr = std::min(kMR, mc - ir);
        double* panel = ap + ir * kc;
        for (std::size_t p = 0; p < kc; ++p) {
            std::size_t i = 0;
            for (; i < mr; ++i)
                panel[p * kMR + i] = a(i0 + ir + i, p0 + p);
            for (; i < kMR; ++i)
                panel[p * kMR + i] = 0.0;
        }
    }
}

// Bp holds ceil(nc / NR) micro-panels, each kc x NR, zero padded.
void pack_b(ConstMatrixView b, std::size_t p0, std::size_t kc, std::size_t j0, std::size_t nc,
            double* bp) {
    const std::size_t panels = (nc + kNR - 1) / kNR;
#pragma omp parallel for schedule(static) if (panels * kc > 4096 && !omp_in_parallel())
    for (std::size_t jp = 0; jp < panels; ++jp) {
        const std::size_t jr = jp * kNR;
        const std::size_t nr = std::min(kNR, nc - jr);
        double* panel = bp + jr * kc;
        for (std::size_t p = 0; p < kc; ++p) {
            std::size_t j = 0;
            for (; j < nr; ++j)
                panel[p * kNR + j] = b(p0 + p, j0 + jr + j);
            for (; j < kNR; ++j)
                panel[p * kNR + j] = 0.0;
        }
    }
}

inline void micro_kernel(std::size_t kc, const double* __restrict a, const double* __restrict b,
                         double* __restrict acc) {
    double c[kMR][kNR] = {};
    for (std::size_t p = 0; p < kc; ++p) {
        const double* ap = a + p * kMR;
        const double* bp = b + p * kNR;
        for (std::size_t i = 0; i < kMR; ++i)
            for (std::size_t j = 0; j < kNR; ++j)
                c[i][j] += ap[i] * bp[j];
    }
    for (std::size_t i = 0; i < kMR; ++i)
        for (std::size_t j = 0; j < kNR; ++j)
            acc[i * kNR + j] = c[i][j];
}

void macro_kernel(double alpha, std::size_t mc, std::size_t nc, std::size_t kc, const double* ap,
                  const double* bp, MatrixView c, std::size_t i0, std::size_t j0) {
    double acc[kMR * kNR];
    for (std::size_t jr = 0; jr < nc; jr += kNR) {
        const std::size_t nr = std::min(kNR, nc - jr);
        for (std::size_t ir = 0; ir < mc; ir += kMR) {
            const std::size_t mr = std::min(kMR, mc - ir);
            micro_kernel(kc, ap + ir * kc, bp + jr * kc, acc);
            for (std::size_t i = 0; i < mr; ++i)
                for (std::size_t j = 0; j < nr; ++j)
                    c(i0 + ir + i, j0 + jr + j) += alpha * acc[i * kNR + j];
        }
    }
}

// C += alpha * A * B with A, B already in op form. Parallel over row blocks of
// each packed panel when called outside a parallel region.
void gemm_accumulate(double alpha, ConstMatrixView a, ConstMatrixView b, MatrixView c) {
    const std::size_t m = a.rows, n = b.cols, k = a.cols;
    std::vector<double> bp(kKC * ((std::min(kNC, n) + kNR - 1) / kNR) * kNR);
    const bool parallel = !omp_in_parallel() && omp_get_max_threads() > 1 && m > kMC;
    for (std::size_t j0 = 0; j0 < n; j0 += kNC) {
        const std::size_t nc = std::min(kNC, n - j0);
        for (std::size_t p0 = 0; p0 < k; p0 += kKC) {
            const std::size_t kc = std::min(kKC, k - p0);
            pack_b(b, p0, kc, j0, nc, bp.data());
            const std::size_t row_blocks = (m + kMC - 1) / kMC;
#pragma omp parallel if (parallel)
            {
                std::vector<double> ap(kMC * kc);
#pragma omp for schedule(dynamic)
                for (std::size_t ib = 0; ib < row_blocks; ++ib) {
                    const std::size_t i0 = ib * kMC;
                    const std::size_t mc = std::min(kMC, m - i0);
                    pack_a(a, i0, mc, p0, kc, ap.data());
                    macro_kernel(alpha, mc, nc, kc, ap.data(), bp.data(), c, i0, j0);
                }
            }
        }
    }
}

void scale_in_place(MatrixView c, double beta) {
    if (beta == 1.0)
        return;
    for (std::size_t j = 0; j < c.cols; ++j)
        for (std::size_t i = 0; i < c.rows; ++i)
            c(i, j) = beta == 0.0 ? 0.0 : beta * c(i, j);
}

}  // namespace

void gemm(double alpha, ConstMatrixView a, Op trans_a, ConstMatrixView b, Op trans_b, double beta,
          MatrixView c) {
    const ConstMatrixView op_a = trans_a == Op::Trans ? a.t() : a;
    const ConstMatrixView op_b = trans_b == Op::Trans ? b.t() : b;
    if (op_a.cols != op_b.rows || op_a.rows != c.rows || op_b.cols != c.cols)
        throw ShapeError("gemm: op(A) is " + std::to_string(op_a.rows) + "x" +
                         std::to_string(op_a.cols) + ", op(B) is " + std::to_string(op_b.rows) +
                         "x" + std::to_string(op_b.cols) + ", C is " + std::to_string(c.rows) +
                         "x" + std::to_string(c.cols));
    scale_in_place(c, beta);
    const std::size_t m = op_a.rows, n = op_b.cols, k = op_a.cols;
    if (alpha == 0.0 || m == 0 || n == 0 || k == 0)
        return;

    const int threads = omp_in_parallel() ? 1 : omp_get_max_threads();
    const std::size_t tiles = ((m + kMC - 1) / kMC) * ((n + kNC - 1) / kNC);
    if (threads > 1 && tiles < static_cast<std::size_t>(threads) && k >= 4 * kKC) {
        // Split the inner dimension; reduce partials in thread order.
        std::vector<std::vector<double>> partial(static_cast<std::size_t>(threads));
#pragma omp parallel num_threads(threads)
        {
            const auto t = static_cast<std::size_t>(omp_get_thread_num());
            const auto nt = static_cast<std::size_t>(omp_get_num_threads());
            const std::size_t chunk = (k + nt - 1) / nt;
            const std::size_t k0 = std::min(k, t * chunk);
            const std::size_t k1 = std::min(k, k0 + chunk);
            partial[t].assign(m * n, 0.0);
            MatrixView p{partial[t].data(), m, n, 1, static_cast<std::ptrdiff_t>(m)};
            if (k1 > k0)
                gemm_accumulate(alpha, op_a.t().row_block(k0, k1).t(), op_b.row_block(k0, k1), p);
        }
        for (const auto& p : partial) {
            if (p.empty())
                continue;
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < m; ++i)
                    c(i, j) += p[j * m + i];
        }
        return;
    }
    gemm_accumulate(alpha, op_a, op_b, c);
}

DenseMatrix gemm(double alpha, const DenseMatrix& a, Op trans_a, const DenseMatrix& b, Op trans_b,
                 double beta, const DenseMatrix& c) {
    DenseMatrix out = c;
    gemm(alpha, a.view(), trans_a, b.view(), trans_b, beta, out.view());
    return out;
}

DenseMatrix multiply(const DenseMatrix& a, Op trans_a, const DenseMatrix& b, Op trans_b,
                     Layout layout) {
    const std::size_t m = trans_a == Op::Trans ? a.cols() : a.rows();
    const std::size_t n = trans_b == Op::Trans ? b.rows() : b.cols();
    DenseMatrix out(m, n, layout);
    gemm(1.0, a.view(), trans_a, b.view(), trans_b, 0.0, out.view());
    return out;
}

Vector gemv(const DenseMatrix& a, Op trans_a, const Vector& x) {
    Vector y(trans_a == Op::Trans ? a.cols() : a.rows());
    gemm(1.0, a.view(), trans_a, x.as_column(), Op::NoTrans, 0.0, y.as_column());
    return y;
}

Vector residual(const DenseMatrix& a, const Vector& x, const Vector& b) {
    if (a.rows() != b.size() || a.cols() != x.size())
        throw ShapeError("residual: shape mismatch");
    Vector r = b;
    const ConstMatrixView av = a.view();
    const std::int64_t m = static_cast<std::int64_t>(a.rows());
#pragma omp parallel for schedule(static) if (m > 4096)
    for (std::int64_t i = 0; i < m; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j)
            s += av(static_cast<std::size_t>(i), j) * x[j];
        r[static_cast<std::size_t>(i)] -= s;
    }
    return r;
}

}  // namespace sketchla
