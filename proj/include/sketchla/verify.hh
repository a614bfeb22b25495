#ifndef sketchla_verify_hh
#define sketchla_verify_hh

#include "sketchla/lsq.hh"
#include "sketchla/sketch.hh"

#include <cstdint>
#include <optional>
#include <string>

namespace sketchla {

enum class NoiseMode { Consistent, Easy, Hard };

const char* to_string(NoiseMode mode);
/// "consistent" | "easy" | "hard"; nullopt otherwise.
std::optional<NoiseMode> parse_noise_mode(const std::string& text);

struct ProblemSpec {
    std::size_t d = 0;
    std::size_t n = 0;
    double kappa = 1.0;
    NoiseMode noise = NoiseMode::Consistent;
    std::uint64_t seed = 0;
};

/// A = U diag(sigma) V^T, sigma geometric from 1 down to 1/kappa, U the
/// economy Q of a seeded d x n Gaussian, V the Q of a seeded n x n Gaussian.
/// b = A e + eta with e all ones and eta_i ~ N(0, 0.01) (Easy), N(3, 2)
/// (Hard), or zero (Consistent). A is row-major. Bitwise deterministic for a given ProblemSpec.
LsqProblem gen_problem(const ProblemSpec& spec);

/// sigma_max(A) / sigma_min(A) via singular_values().
double condition_number(const DenseMatrix& a);

struct DistortionReport {
    /// max(|sigma_max^2 - 1|, |1 - sigma_min^2|) over singular values of S Q.
    double epsilon_hat = 0.0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
};

/// Distortion of `op` on the span of a seeded orthonormal d x n basis.
DistortionReport measure_distortion(const SketchOperator& op, std::size_t d, std::size_t n,
                                    std::uint64_t seed);

/// Distortion of `op` on span(basis); the basis is orthonormalized first.
DistortionReport measure_distortion_on(const SketchOperator& op, const DenseMatrix& basis);

/// Largest |<x,y> - <Sx,Sy>| / (||x|| ||y||) over `trials` random pairs in
/// span(q), q orthonormal. Every fourth trial uses y = x.
double pairwise_distortion_check(const SketchOperator& op, const DenseMatrix& q,
                                 std::size_t trials, RngStream& stream);

/// densify(op) * A by explicit summation: for every output entry the nonzero
/// products are sorted by magnitude and summed with Neumaier compensation.
/// Column-major result. Throws CapacityError like densify.
DenseMatrix brute_force_apply(const SketchOperator& op, const DenseMatrix& a);

/// Upper bound sqrt((1 + eps) / (1 - eps)) on the sketch-and-solve residual
/// inflation; +inf when eps >= 1.
double distortion_factor(double epsilon_hat);

}  // namespace sketchla

#endif
