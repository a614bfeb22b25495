#include "sketchla/lsq.hh"

#include "sketchla/blas.hh"
#include "sketchla/errors.hh"
#include "sketchla/timer.hh"

#include <cmath>
#include <limits>
#include <string>

namespace sketchla {

const char* to_string(LsqStatus status) {
    switch (status) {
    case LsqStatus::Ok:
        return "OK";
    case LsqStatus::CholeskyFailed:
        return "CholeskyFailed";
    case LsqStatus::SingularR:
        return "SingularR";
    }
    return "?";
}

double LsqReport::phase_seconds(const std::string& name) const {
    for (const auto& ph : phases)
        if (ph.name == name)
            return ph.seconds;
    return 0.0;
}

double LsqReport::phase_total() const {
    double s = 0.0;
    for (const auto& ph : phases)
        s += ph.seconds;
    return s;
}

void validate(const LsqProblem& problem) {
    const std::size_t d = problem.a.rows(), n = problem.a.cols();
    if (n < 1 || d < n)
        throw ShapeError("LsqProblem: need d >= n >= 1, got " + std::to_string(d) + " x " +
                         std::to_string(n));
    if (problem.b.size() != d)
        throw ShapeError("LsqProblem: b has length " + std::to_string(problem.b.size()) +
                         ", expected " + std::to_string(d));
}

SketchDims default_sketch_dims(std::size_t n) {
    return {2 * n, 2 * n, 2 * n * n, 2 * n * n, 2 * n};
}

namespace {

// Times consecutive phases; the residual pass runs after finish().
class PhaseClock {
  public:
    explicit PhaseClock(LsqReport& report) : report_(report) {}
    void mark(const char* name) { report_.phases.push_back({name, lap_.lap()}); }
    void finish() { report_.wall_seconds = wall_.seconds(); }

  private:
    LsqReport& report_;
    Stopwatch wall_;
    Stopwatch lap_;
};

void finalize(LsqReport& report, const LsqProblem& problem) {
    if (!report.x) {
        report.relative_residual = std::numeric_limits<double>::infinity();
        return;
    }
    const Vector r = residual(problem.a, *report.x, problem.b);
    const double bnorm = norm2(problem.b.span());
    const double rnorm = norm2(r.span());
    report.relative_residual = bnorm > 0.0 ? rnorm / bnorm : rnorm;
}

bool rank_deficient(const DenseMatrix& r) {
    const double scale = frobenius_norm(r);
    for (std::size_t i = 0; i < r.rows(); ++i)
        if (!(std::abs(r(i, i)) > kSingularTolerance * scale))
            return true;
    return false;
}

void require_operator(const LsqProblem& problem, const SketchOperator& op) {
    if (input_dim(op) != problem.a.rows())
        throw ShapeError("sketch operator input dim " + std::to_string(input_dim(op)) +
                         " != problem rows " + std::to_string(problem.a.rows()));
    if (output_dim(op) < problem.a.cols())
        throw ShapeError("sketch operator output dim " + std::to_string(output_dim(op)) +
                         " < problem cols " + std::to_string(problem.a.cols()));
}

struct Preconditioned {
    DenseMatrix r0;
    DenseMatrix q0;
    DenseMatrix gram;
};

// Steps shared by rand_cholQR and its least-squares variant, through
// the Gram matrix of Q0.
Preconditioned precondition(const DenseMatrix& a, const SketchOperator& op, PhaseClock* clock) {
    const DenseMatrix y = apply_sketch(op, a);
    if (clock)
        clock->mark("sketch");
    Preconditioned out;
    out.r0 = HouseholderQR(y).r();
    if (clock)
        clock->mark("qr");
    if (rank_deficient(out.r0))
        throw SingularError("rand_cholqr: sketched matrix is rank deficient");
    out.q0 = tri_solve_right(a, out.r0);
    if (clock)
        clock->mark("precondition");
    out.gram = multiply(out.q0, Op::Trans, out.q0, Op::NoTrans);
    return out;
}

}  // namespace

LsqReport solve_normal_equations(const LsqProblem& problem) {
    validate(problem);
    LsqReport report;
    PhaseClock clock(report);
    const DenseMatrix g = multiply(problem.a, Op::Trans, problem.a, Op::NoTrans);
    clock.mark("gram");
    const Vector rhs = gemv(problem.a, Op::Trans, problem.b);
    clock.mark("rhs");
    DenseMatrix r;
    try {
        r = cholesky(g);
    } catch (const NotPositiveDefinite&) {
        clock.mark("cholesky");
        clock.finish();
        report.status = LsqStatus::CholeskyFailed;
        finalize(report, problem);
        return report;
    }
    clock.mark("cholesky");
    report.x = tri_solve(r, Op::NoTrans, tri_solve(r, Op::Trans, rhs));
    clock.mark("solves");
    clock.finish();
    finalize(report, problem);
    return report;
}

LsqReport solve_sketch_and_solve(const LsqProblem& problem, const SketchOperator& op) {
    validate(problem);
    require_operator(problem, op);
    LsqReport report;
    PhaseClock clock(report);
    const DenseMatrix y = apply_sketch(op, problem.a);
    const Vector z = apply_sketch(op, problem.b);
    clock.mark("sketch");
    const HouseholderQR qr(y);
    const DenseMatrix r = qr.r();
    clock.mark("qr");
    if (rank_deficient(r)) {
        clock.finish();
        report.status = LsqStatus::SingularR;
        finalize(report, problem);
        return report;
    }
    const Vector qtz = qr.apply_qt(z);
    clock.mark("apply-q");
    report.x = tri_solve(r, Op::NoTrans, qtz);
    clock.mark("trsv");
    clock.finish();
    finalize(report, problem);
    return report;
}

LsqReport solve_qr_reference(const LsqProblem& problem) {
    validate(problem);
    LsqReport report;
    PhaseClock clock(report);
    const HouseholderQR qr(problem.a);
    const DenseMatrix r = qr.r();
    clock.mark("qr");
    if (rank_deficient(r)) {
        clock.finish();
        report.status = LsqStatus::SingularR;
        finalize(report, problem);
        return report;
    }
    const Vector qtb = qr.apply_qt(problem.b);
    clock.mark("apply-q");
    report.x = tri_solve(r, Op::NoTrans, qtb);
    clock.mark("trsv");
    clock.finish();
    finalize(report, problem);
    return report;
}

RandCholQR rand_cholqr(const DenseMatrix& a, const SketchOperator& op) {
    if (input_dim(op) != a.rows() || output_dim(op) < a.cols())
        throw ShapeError("rand_cholqr: operator dimensions do not fit A");
    Preconditioned pre = precondition(a, op, nullptr);
    const DenseMatrix r1 = cholesky(pre.gram);
    return {tri_solve_right(pre.q0, r1), upper_times_upper(r1, pre.r0)};
}

LsqReport solve_randcholqr_lsq(const LsqProblem& problem, const SketchOperator& op) {
    validate(problem);
    require_operator(problem, op);
    LsqReport report;
    PhaseClock clock(report);
    Preconditioned pre;
    try {
        pre = precondition(problem.a, op, &clock);
    } catch (const SingularError&) {
        clock.finish();
        report.status = LsqStatus::SingularR;
        finalize(report, problem);
        return report;
    }
    const Vector z = gemv(pre.q0, Op::Trans, problem.b);
    clock.mark("gram");
    DenseMatrix r1;
    try {
        r1 = cholesky(pre.gram);
    } catch (const NotPositiveDefinite&) {
        clock.mark("cholesky");
        clock.finish();
        report.status = LsqStatus::CholeskyFailed;
        finalize(report, problem);
        return report;
    }
    clock.mark("cholesky");
    const DenseMatrix r = upper_times_upper(r1, pre.r0);
    const Vector y = tri_solve(r1, Op::Trans, z);
    report.x = tri_solve(r, Op::NoTrans, y);
    clock.mark("solves");
    clock.finish();
    finalize(report, problem);
    return report;
}

}  // namespace sketchla
