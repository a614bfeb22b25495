#ifndef sketchla_lsq_hh
#define sketchla_lsq_hh

#include "sketchla/dense.hh"
#include "sketchla/sketch.hh"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace sketchla {

/// min_x ||A x - b||_2 with A d x n, d >= n >= 1.
struct LsqProblem {
    DenseMatrix a;
    Vector b;
};

/// Throws ShapeError unless the problem invariants hold.
void validate(const LsqProblem& problem);

enum class LsqStatus { Ok, CholeskyFailed, SingularR };

const char* to_string(LsqStatus status);

struct PhaseTiming {
    std::string name;
    double seconds = 0.0;
};

struct LsqReport {
    std::optional<Vector> x;
    /// ||b - A x|| / ||b||, recomputed from the original data. +inf when x is absent.
    double relative_residual = 0.0;
    LsqStatus status = LsqStatus::Ok;
    /// In execution order.
    std::vector<PhaseTiming> phases;
    /// Wall time of the solve itself, excluding the residual pass.
    double wall_seconds = 0.0;

    double phase_seconds(const std::string& name) const;
    double phase_total() const;
};

/// Relative rank threshold for SingularR: |R_ii| <= kSingularTolerance * ||R||_F.
inline constexpr double kSingularTolerance = 1e-14;

/// Cholesky on the Gram matrix: x = R^{-1} (R^{-T} (A^T b)), R^T R = A^T A.
/// Phases: gram, rhs, cholesky, solves.
LsqReport solve_normal_equations(const LsqProblem& problem);

/// Solves min ||S b - S A x||: QR of S A, reflectors applied to S b, one
/// triangular solve. Phases: sketch, qr, apply-q, trsv.
LsqReport solve_sketch_and_solve(const LsqProblem& problem, const SketchOperator& op);

/// Householder QR on the full matrix. Phases: qr, apply-q, trsv.
LsqReport solve_qr_reference(const LsqProblem& problem);

struct RandCholQR {
    DenseMatrix q;
    DenseMatrix r;
};

/// Randomized Cholesky QR: R0 from the QR of S A, Q0 = A R0^{-1},
/// R1 = chol(Q0^T Q0), Q = Q0 R1^{-1}, R = R1 R0. Throws NotPositiveDefinite
/// when the preconditioned Gram matrix is not numerically definite and
/// SingularError when R0 is rank deficient.
RandCholQR rand_cholqr(const DenseMatrix& a, const SketchOperator& op);

/// Least squares through rand_cholQR without forming Q:
/// z = Q0^T b, y = R1^{-T} z, x = (R1 R0)^{-1} y.
/// Phases: sketch, qr, precondition, gram, cholesky, solves.
LsqReport solve_randcholqr_lsq(const LsqProblem& problem, const SketchOperator& op);

/// Default embedding dimensions for an n-column problem.
struct SketchDims {
    std::size_t gaussian;     // 2n
    std::size_t srht;         // 2n
    std::size_t countsketch;  // 2n^2
    std::size_t multi_k1;     // 2n^2
    std::size_t multi_k2;     // 2n
};
SketchDims default_sketch_dims(std::size_t n);

}  // namespace sketchla

#endif
