#include "sketchla/blas.hh"

#include "sketchla/errors.hh"

#include <cmath>
#include <string>

namespace sketchla {

namespace {

// Applies H = I - tau v v^T (v(0) = 1 implicit) to x, both of length len.
inline void apply_reflector(const double* v, double tau, double* x, std::size_t len) {
    if (tau == 0.0)
        return;
    double w = x[0];
    for (std::size_t i = 1; i < len; ++i)
        w += v[i] * x[i];
    w *= tau;
    x[0] -= w;
    for (std::size_t i = 1; i < len; ++i)
        x[i] -= w * v[i];
}

}  // namespace

HouseholderQR::HouseholderQR(const DenseMatrix& a)
    : factors_(transpose_to_layout(a, Layout::ColMajor)), tau_(a.cols(), 0.0),
      sign_(a.cols(), 1.0) {
    const std::size_t m = a.rows(), n = a.cols();
    if (m < n)
        throw ShapeError("householder_qr: rows (" + std::to_string(m) + ") < cols (" +
                         std::to_string(n) + ")");
    for (std::size_t j = 0; j < n; ++j) {
        double* col = factors_.major_slice(j).data() + j;
        const std::size_t len = m - j;
        double tail = 0.0;
        for (std::size_t i = 1; i < len; ++i)
            tail += col[i] * col[i];
        const double alpha = col[0];
        if (tail == 0.0) {
            tau_[j] = 0.0;
        } else {
            const double norm = std::sqrt(alpha * alpha + tail);
            const double beta = alpha >= 0.0 ? -norm : norm;
            tau_[j] = (beta - alpha) / beta;
            const double inv = 1.0 / (alpha - beta);
            for (std::size_t i = 1; i < len; ++i)
                col[i] *= inv;
            col[0] = beta;
        }
        const double tau = tau_[j];
        const std::int64_t trailing = static_cast<std::int64_t>(n - j - 1);
#pragma omp parallel for schedule(static) if (trailing > 1 && len * trailing > (1u << 15))
        for (std::int64_t t = 0; t < trailing; ++t) {
            double* x = factors_.major_slice(j + 1 + static_cast<std::size_t>(t)).data() + j;
            // v(0) is stored as R(j, j); use the implicit unit head.
            double w = x[0];
            for (std::size_t i = 1; i < len; ++i)
                w += col[i] * x[i];
            w *= tau;
            x[0] -= w;
            for (std::size_t i = 1; i < len; ++i)
                x[i] -= w * col[i];
        }
        sign_[j] = col[0] < 0.0 ? -1.0 : 1.0;
    }
}

DenseMatrix HouseholderQR::r() const {
    const std::size_t n = cols();
    DenseMatrix out(n, n, Layout::ColMajor);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i <= j; ++i)
            out(i, j) = sign_[i] * factors_(i, j);
    return out;
}

Vector HouseholderQR::apply_qt(const Vector& z) const {
    const std::size_t m = rows(), n = cols();
    if (z.size() != m)
        throw ShapeError("apply_qt: vector length mismatch");
    std::vector<double> w(z.values());
    for (std::size_t j = 0; j < n; ++j)
        apply_reflector(factors_.major_slice(j).data() + j, tau_[j], w.data() + j, m - j);
    Vector out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = sign_[i] * w[i];
    return out;
}

Vector HouseholderQR::apply_q(const Vector& y) const {
    const std::size_t m = rows(), n = cols();
    if (y.size() != n)
        throw ShapeError("apply_q: vector length mismatch");
    std::vector<double> w(m, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        w[i] = sign_[i] * y[i];
    for (std::size_t j = n; j-- > 0;)
        apply_reflector(factors_.major_slice(j).data() + j, tau_[j], w.data() + j, m - j);
    return Vector(std::move(w));
}

DenseMatrix HouseholderQR::q() const {
    const std::size_t m = rows(), n = cols();
    DenseMatrix out(m, n, Layout::ColMajor);
    const std::int64_t nn = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (m * n > (1u << 16))
    for (std::int64_t c = 0; c < nn; ++c) {
        const auto col = static_cast<std::size_t>(c);
        double* x = out.major_slice(col).data();
        x[col] = sign_[col];
        for (std::size_t j = col + 1; j-- > 0;)
            apply_reflector(factors_.major_slice(j).data() + j, tau_[j], x + j, m - j);
    }
    return out;
}

std::pair<DenseMatrix, DenseMatrix> householder_qr_economy(const DenseMatrix& a) {
    HouseholderQR qr(a);
    return {qr.q(), qr.r()};
}

}  // namespace sketchla
