#include "sketchla/blas.hh"

#include "sketchla/errors.hh"

#include <algorithm>
#include <cmath>
#include <functional>

namespace sketchla {

namespace {

constexpr double kJacobiTolerance = 1e-13;
constexpr int kMaxSweeps = 60;

void sort_descending(Vector& v) {
    auto s = v.span();
    std::sort(s.begin(), s.end(), std::greater<>());
}

}  // namespace

Vector sym_eigenvalues(const DenseMatrix& g) {
    if (g.rows() != g.cols())
        throw ShapeError("sym_eigenvalues: matrix must be square");
    const std::size_t n = g.rows();
    double scale = 0.0;
    for (double v : g.data())
        scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::abs(g(i, j) - g(j, i)) > 1e-12 * scale)
                throw SymmetryError("sym_eigenvalues: matrix is not symmetric");

    // Work on the symmetrized copy.
    std::vector<double> a(n * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i)
            a[j * n + i] = 0.5 * (g(i, j) + g(j, i));
    auto at = [&](std::size_t i, std::size_t j) -> double& { return a[j * n + i]; };

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                const double app = at(p, p), aqq = at(q, q);
                if (std::abs(apq) <= kJacobiTolerance * std::sqrt(std::abs(app * aqq)) ||
                    std::abs(apq) <= 1e-300)
                    continue;
                rotated = true;
                const double theta = (aqq - app) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
                at(p, q) = 0.0;
                at(q, p) = 0.0;
            }
        }
        if (!rotated)
            break;
    }
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = at(i, i);
    sort_descending(out);
    return out;
}

Vector singular_values(const DenseMatrix& a) {
    if (a.rows() < a.cols())
        throw ShapeError("singular_values: expected rows >= cols");
    const std::size_t n = a.cols();
    // One-sided (Hestenes) Jacobi on the columns of R.
    DenseMatrix r = HouseholderQR(a).r();
    auto col = [&](std::size_t j) { return r.major_slice(j); };
    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                auto x = col(p), y = col(q);
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    alpha += x[k] * x[k];
                    beta += y[k] * y[k];
                    gamma += x[k] * y[k];
                }
                if (std::abs(gamma) <= 1e-15 * std::sqrt(alpha * beta) || gamma == 0.0)
                    continue;
                rotated = true;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < n; ++k) {
                    const double xk = x[k], yk = y[k];
                    x[k] = c * xk - s * yk;
                    y[k] = s * xk + c * yk;
                }
            }
        }
        if (!rotated)
            break;
    }
    Vector out(n);
    for (std::size_t j = 0; j < n; ++j)
        out[j] = norm2(col(j));
    sort_descending(out);
    return out;
}

}  // namespace sketchla
