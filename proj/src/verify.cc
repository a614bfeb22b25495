#include "sketchla/verify.hh"

#include "sketchla/blas.hh"
#include "sketchla/errors.hh"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sketchla {

namespace {

// Stream ids used by gen_problem and measure_distortion.
constexpr std::uint64_t kStreamU = 1;
constexpr std::uint64_t kStreamV = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamBasis = 0xB0A515;

double neumaier_sum(std::vector<double>& terms) {
    std::sort(terms.begin(), terms.end(),
              [](double x, double y) { return std::abs(x) < std::abs(y); });
    double sum = 0.0, comp = 0.0;
    for (double t : terms) {
        const double s = sum + t;
        if (std::abs(sum) >= std::abs(t))
            comp += (sum - s) + t;
        else
            comp += (t - s) + sum;
        sum = s;
    }
    return sum + comp;
}

DistortionReport distortion_of_sketched_basis(const DenseMatrix& sq) {
    const DenseMatrix gram = multiply(sq, Op::Trans, sq, Op::NoTrans);
    const Vector eig = sym_eigenvalues(gram);
    const double lmax = std::max(eig[0], 0.0);
    const double lmin = std::max(eig[eig.size() - 1], 0.0);
    DistortionReport out;
    out.sigma_max = std::sqrt(lmax);
    out.sigma_min = std::sqrt(lmin);
    out.epsilon_hat = std::max(std::abs(lmax - 1.0), std::abs(1.0 - lmin));
    return out;
}

}  // namespace

const char* to_string(NoiseMode mode) {
    switch (mode) {
    case NoiseMode::Consistent:
        return "consistent";
    case NoiseMode::Easy:
        return "easy";
    case NoiseMode::Hard:
        return "hard";
    }
    return "?";
}

std::optional<NoiseMode> parse_noise_mode(const std::string& text) {
    if (text == "consistent")
        return NoiseMode::Consistent;
    if (text == "easy")
        return NoiseMode::Easy;
    if (text == "hard")
        return NoiseMode::Hard;
    return std::nullopt;
}

LsqProblem gen_problem(const ProblemSpec& spec) {
    if (spec.n < 1 || spec.d < spec.n)
        throw ShapeError("gen_problem: need d >= n >= 1");
    if (!(spec.kappa >= 1.0))
        throw std::invalid_argument("gen_problem: kappa must be >= 1");
    const std::size_t d = spec.d, n = spec.n;

    RngStream su(spec.seed, kStreamU);
    DenseMatrix u = HouseholderQR(gaussian_fill(d, n, su, Layout::ColMajor)).q();
    RngStream sv(spec.seed, kStreamV);
    const DenseMatrix v = HouseholderQR(gaussian_fill(n, n, sv, Layout::ColMajor)).q();

    for (std::size_t j = 0; j < n; ++j) {
        const double t = n == 1 ? 0.0 : static_cast<double>(j) / static_cast<double>(n - 1);
        const double sigma = std::pow(spec.kappa, -t);
        for (double& x : u.major_slice(j))
            x *= sigma;
    }
    LsqProblem problem;
    problem.a = multiply(u, Op::NoTrans, v, Op::Trans, Layout::RowMajor);
    problem.b = gemv(problem.a, Op::NoTrans, Vector(n, 1.0));

    if (spec.noise != NoiseMode::Consistent) {
        const double mean = spec.noise == NoiseMode::Easy ? 0.0 : 3.0;
        const double stddev = spec.noise == NoiseMode::Easy ? 0.1 : std::sqrt(2.0);
        std::vector<double> eta(d);
        RngStream sn(spec.seed, kStreamNoise);
        gaussian_fill(eta, sn);
        for (std::size_t i = 0; i < d; ++i)
            problem.b[i] += mean + stddev * eta[i];
    }
    return problem;
}

double condition_number(const DenseMatrix& a) {
    const Vector s = singular_values(a);
    return s[0] / s[s.size() - 1];
}

DistortionReport measure_distortion(const SketchOperator& op, std::size_t d, std::size_t n,
                                    std::uint64_t seed) {
    if (input_dim(op) != d)
        throw ShapeError("measure_distortion: operator input dim != d");
    if (n > output_dim(op))
        throw ShapeError("measure_distortion: n exceeds operator output dim");
    RngStream stream(seed, kStreamBasis);
    const DenseMatrix q = HouseholderQR(gaussian_fill(d, n, stream, Layout::ColMajor)).q();
    return distortion_of_sketched_basis(apply_sketch(op, q));
}

DistortionReport measure_distortion_on(const SketchOperator& op, const DenseMatrix& basis) {
    if (input_dim(op) != basis.rows())
        throw ShapeError("measure_distortion_on: operator input dim != basis rows");
    if (basis.cols() > output_dim(op))
        throw ShapeError("measure_distortion_on: basis wider than operator output dim");
    const DenseMatrix q = HouseholderQR(basis).q();
    return distortion_of_sketched_basis(apply_sketch(op, q));
}

double pairwise_distortion_check(const SketchOperator& op, const DenseMatrix& q,
                                 std::size_t trials, RngStream& stream) {
    const DenseMatrix sq = apply_sketch(op, q);
    const std::size_t n = q.cols();
    double worst = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
        Vector alpha(n), beta(n);
        gaussian_fill(alpha.span(), stream);
        if (t % 4 == 0)
            beta = alpha;
        else
            gaussian_fill(beta.span(), stream);
        const Vector x = gemv(q, Op::NoTrans, alpha);
        const Vector y = gemv(q, Op::NoTrans, beta);
        const Vector sx = gemv(sq, Op::NoTrans, alpha);
        const Vector sy = gemv(sq, Op::NoTrans, beta);
        const double gap = std::abs(dot(x.span(), y.span()) - dot(sx.span(), sy.span()));
        const double scale = norm2(x.span()) * norm2(y.span());
        if (scale > 0.0)
            worst = std::max(worst, gap / scale);
    }
    return worst;
}

DenseMatrix brute_force_apply(const SketchOperator& op, const DenseMatrix& a) {
    if (a.rows() != input_dim(op))
        throw ShapeError("brute_force_apply: A rows != operator input dim");
    const DenseMatrix s = densify(op);
    const std::size_t k = s.rows(), d = s.cols(), n = a.cols();
    DenseMatrix out(k, n, Layout::ColMajor);
    std::vector<double> terms;
    terms.reserve(d);
    for (std::size_t c = 0; c < n; ++c)
        for (std::size_t i = 0; i < k; ++i) {
            terms.clear();
            for (std::size_t j = 0; j < d; ++j) {
                const double p = s(i, j) * a(j, c);
                if (p != 0.0)
                    terms.push_back(p);
            }
            out(i, c) = neumaier_sum(terms);
        }
    return out;
}

double distortion_factor(double epsilon_hat) {
    if (!(epsilon_hat < 1.0))
        return std::numeric_limits<double>::infinity();
    return std::sqrt((1.0 + epsilon_hat) / (1.0 - epsilon_hat));
}

}  // namespace sketchla
