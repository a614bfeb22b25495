#include "sketchla/blas.hh"
#include "sketchla/errors.hh"
#include "sketchla/lsq.hh"
#include "sketchla/verify.hh"
#include "test_util.hh"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

using namespace sketchla;
using test::naive_product;
using test::orthogonality_error;

namespace {

LsqProblem orthonormal_case() {
    return {DenseMatrix::identity(3).leading_columns(2), Vector{1, 2, 3}};
}

SketchOperator multisketch_for(std::size_t d, std::size_t n, std::uint64_t seed) {
    RngStream stream(seed, 99);
    const auto dims = default_sketch_dims(n);
    return make_multisketch(d, dims.multi_k1, dims.multi_k2, stream);
}

// Independent QR oracle: explicit Q from Gram-Schmidt twice, x = R^{-1} Q^T b.
std::vector<double> mgs_lsq(const DenseMatrix& a, const Vector& b) {
    const std::size_t d = a.rows(), n = a.cols();
    std::vector<std::vector<double>> q(n, std::vector<double>(d));
    std::vector<std::vector<double>> r(n, std::vector<double>(n, 0.0));
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < d; ++i)
            q[j][i] = a(i, j);
        for (int pass = 0; pass < 2; ++pass)
            for (std::size_t p = 0; p < j; ++p) {
                double h = 0.0;
                for (std::size_t i = 0; i < d; ++i)
                    h += q[p][i] * q[j][i];
                r[p][j] += h;
                for (std::size_t i = 0; i < d; ++i)
                    q[j][i] -= h * q[p][i];
            }
        double nrm = 0.0;
        for (double v : q[j])
            nrm += v * v;
        nrm = std::sqrt(nrm);
        r[j][j] = nrm;
        for (double& v : q[j])
            v /= nrm;
    }
    std::vector<double> x(n);
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            x[j] += q[j][i] * b[i];
    }
    for (std::size_t j = n; j-- > 0;) {
        for (std::size_t p = j + 1; p < n; ++p)
            x[j] -= r[j][p] * x[p];
        x[j] /= r[j][j];
    }
    return x;
}

}  // namespace

TEST(Lsq, ValidateRejectsBadShapes) {
    EXPECT_THROW(validate(LsqProblem{DenseMatrix(2, 3), Vector(2)}), ShapeError);
    EXPECT_THROW(validate(LsqProblem{DenseMatrix(3, 2), Vector(2)}), ShapeError);
    EXPECT_THROW(solve_normal_equations(LsqProblem{DenseMatrix(3, 2), Vector(4)}), ShapeError);
}

TEST(NormalEquations, OrthonormalColumns) {
    const auto rep = solve_normal_equations(orthonormal_case());
    ASSERT_EQ(rep.status, LsqStatus::Ok);
    EXPECT_DOUBLE_EQ((*rep.x)[0], 1.0);
    EXPECT_DOUBLE_EQ((*rep.x)[1], 2.0);
    EXPECT_NEAR(rep.relative_residual, 3.0 / std::sqrt(14.0), 1e-15);
    ASSERT_EQ(rep.phases.size(), 4u);
    EXPECT_EQ(rep.phases[0].name, "gram");
    EXPECT_EQ(rep.phases[3].name, "solves");
}

TEST(NormalEquations, ConsistentWellConditioned) {
    const auto p = gen_problem({4096, 16, 1e2, NoiseMode::Consistent, 1});
    const auto rep = solve_normal_equations(p);
    ASSERT_EQ(rep.status, LsqStatus::Ok);
    EXPECT_LE(rep.relative_residual, 1e-12);
}

TEST(NormalEquations, BreaksDownAtKappa1e10) {
    const auto p = gen_problem({8192, 16, 1e10, NoiseMode::Consistent, 2});
    const auto rep = solve_normal_equations(p);
    const auto ref = solve_qr_reference(p);
    if (rep.status == LsqStatus::Ok) {
        EXPECT_GT(rep.relative_residual, 1e3 * ref.relative_residual);
    } else {
        EXPECT_EQ(rep.status, LsqStatus::CholeskyFailed);
        EXPECT_FALSE(rep.x.has_value());
        EXPECT_EQ(rep.relative_residual, std::numeric_limits<double>::infinity());
    }
}

TEST(NormalEquations, CholeskyFailureIsAStatus) {
    // Rank one: A^T A is singular.
    const auto a = DenseMatrix::from_rows({{1, 1}, {1, 1}, {1, 1}});
    const auto rep = solve_normal_equations({a, Vector{1, 2, 3}});
    EXPECT_EQ(rep.status, LsqStatus::CholeskyFailed);
    EXPECT_STREQ(to_string(rep.status), "CholeskyFailed");
}

TEST(QrReference, OrthonormalExact) {
    const auto rep = solve_qr_reference(orthonormal_case());
    EXPECT_NEAR((*rep.x)[0], 1.0, 1e-15);
    EXPECT_NEAR((*rep.x)[1], 2.0, 1e-15);
}

TEST(QrReference, MatchesNormalEquationsAndMgsAtKappa1e2) {
    const auto p = gen_problem({2048, 12, 1e2, NoiseMode::Easy, 3});
    const auto qr = solve_qr_reference(p);
    const auto ne = solve_normal_equations(p);
    const auto oracle = mgs_lsq(p.a, p.b);
    double num = 0.0, den = 0.0, num2 = 0.0;
    for (std::size_t i = 0; i < 12; ++i) {
        num += std::pow((*qr.x)[i] - (*ne.x)[i], 2);
        num2 += std::pow((*qr.x)[i] - oracle[i], 2);
        den += oracle[i] * oracle[i];
    }
    EXPECT_LE(std::sqrt(num / den), 1e-10);
    EXPECT_LE(std::sqrt(num2 / den), 1e-10);
}

TEST(QrReference, AccurateAtKappa1e12) {
    const auto p = gen_problem({4096, 16, 1e12, NoiseMode::Consistent, 4});
    const auto rep = solve_qr_reference(p);
    ASSERT_EQ(rep.status, LsqStatus::Ok);
    EXPECT_LE(rep.relative_residual, 1e-6);
}

TEST(QrReference, RankDeficientIsSingularR) {
    const auto a = DenseMatrix::from_rows({{1, 2}, {2, 4}, {3, 6}});
    const auto rep = solve_qr_reference({a, Vector{1, 0, 0}});
    EXPECT_EQ(rep.status, LsqStatus::SingularR);
    EXPECT_FALSE(rep.x.has_value());
}

TEST(SketchAndSolve, IdentityOperatorIsExactLsq) {
    const auto p = gen_problem({300, 5, 10.0, NoiseMode::Hard, 5});
    const auto rep = solve_sketch_and_solve(p, IdentityOperator{300, 1.0});
    const auto oracle = mgs_lsq(p.a, p.b);
    for (std::size_t i = 0; i < 5; ++i)
        EXPECT_NEAR((*rep.x)[i], oracle[i], 1e-10 * std::abs(oracle[i]) + 1e-12);
}

TEST(SketchAndSolve, MultisketchEasyWithinGenerousBound) {
    const std::size_t d = 1 << 14, n = 16;
    const auto p = gen_problem({d, n, 1e2, NoiseMode::Easy, 6});
    const auto rstar = solve_normal_equations(p).relative_residual;
    const auto rep = solve_sketch_and_solve(p, multisketch_for(d, n, 6));
    ASSERT_EQ(rep.status, LsqStatus::Ok);
    EXPECT_GE(rep.relative_residual, rstar * (1 - 1e-12));
    EXPECT_LE(rep.relative_residual, 1.6 * rstar);
    EXPECT_EQ(rep.phases.size(), 4u);
    EXPECT_EQ(rep.phases[0].name, "sketch");
}

TEST(SketchAndSolve, MultisketchStableAtKappa1e10) {
    const std::size_t d = 1 << 14, n = 16;
    const auto p = gen_problem({d, n, 1e10, NoiseMode::Consistent, 7});
    const auto rep = solve_sketch_and_solve(p, multisketch_for(d, n, 7));
    ASSERT_EQ(rep.status, LsqStatus::Ok);
    EXPECT_LE(rep.relative_residual, 1e-6);
}

TEST(SketchAndSolve, ShortSketchRejected) {
    const auto p = gen_problem({100, 8, 1.0, NoiseMode::Easy, 8});
    RngStream stream(1, 1);
    EXPECT_THROW(solve_sketch_and_solve(p, make_gaussian(4, 100, stream)), ShapeError);
    EXPECT_THROW(solve_sketch_and_solve(p, make_gaussian(16, 99, stream)), ShapeError);
}

TEST(RandCholQr, OrthonormalInputIdentityOperator) {
    const auto a = householder_qr_economy(test::random_matrix(50, 4, 9)).first;
    const auto f = rand_cholqr(a, IdentityOperator{50, 1.0});
    EXPECT_LT(max_abs_difference(f.q, a), 1e-14);
    EXPECT_LT(max_abs_difference(f.r, DenseMatrix::identity(4)), 1e-14);
}

TEST(RandCholQr, FactorQualityKappa1e6) {
    const std::size_t d = 1 << 14, n = 16;
    const auto p = gen_problem({d, n, 1e6, NoiseMode::Consistent, 10});
    const auto f = rand_cholqr(p.a, multisketch_for(d, n, 10));
    EXPECT_LE(orthogonality_error(f.q), 1e-10);
    EXPECT_LE(relative_difference(naive_product(f.q, false, f.r, false), p.a), 1e-13);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j)
            EXPECT_EQ(f.r(i, j), 0.0);
}

TEST(RandCholQr, StillOrthogonalAtKappa1e10) {
    const std::size_t d = 1 << 14, n = 16;
    const auto p = gen_problem({d, n, 1e10, NoiseMode::Consistent, 11});
    const auto f = rand_cholqr(p.a, multisketch_for(d, n, 11));
    EXPECT_LE(orthogonality_error(f.q), 1e-8);
    EXPECT_LE(relative_difference(naive_product(f.q, false, f.r, false), p.a), 1e-12);
}

TEST(RandCholQr, RankDeficientThrows) {
    const auto a = DenseMatrix::from_rows({{1, 2}, {2, 4}, {3, 6}, {1, 2}});
    EXPECT_THROW(rand_cholqr(a, IdentityOperator{4, 1.0}), SingularError);
}

TEST(RandCholQrLsq, IdentityOnOrthonormalGivesAtb) {
    const auto a = householder_qr_economy(test::random_matrix(60, 3, 12)).first;
    const auto bm = test::random_matrix(60, 1, 13);
    const Vector b(std::vector<double>(bm.data().begin(), bm.data().end()));
    const auto rep = solve_randcholqr_lsq({a, b}, IdentityOperator{60, 1.0});
    const Vector atb = gemv(a, Op::Trans, b);
    for (std::size_t i = 0; i < 3; ++i)
        EXPECT_NEAR((*rep.x)[i], atb[i], 1e-14);
    ASSERT_EQ(rep.phases.size(), 6u);
    EXPECT_EQ(rep.phases[2].name, "precondition");
}

TEST(RandCholQrLsq, NoDistortionVersusReference) {
    const std::size_t d = 1 << 13, n = 16;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto p = gen_problem({d, n, 1e2, seed % 2 ? NoiseMode::Hard : NoiseMode::Easy, 20 + seed});
        const auto ref = solve_qr_reference(p);
        const auto rep = solve_randcholqr_lsq(p, multisketch_for(d, n, seed));
        ASSERT_EQ(rep.status, LsqStatus::Ok);
        EXPECT_LE(rep.relative_residual, 1.0000001 * ref.relative_residual);
        EXPECT_GE(rep.relative_residual, ref.relative_residual - 1e-12);
    }
}

TEST(RandCholQrLsq, ConsistentKappa1e10) {
    const std::size_t d = 1 << 14, n = 16;
    const auto p = gen_problem({d, n, 1e10, NoiseMode::Consistent, 30});
    const auto rep = solve_randcholqr_lsq(p, multisketch_for(d, n, 30));
    ASSERT_EQ(rep.status, LsqStatus::Ok);
    EXPECT_LE(rep.relative_residual, 1e-6);
}

TEST(Lsq, OptimalityGapAndPhaseAccounting) {
    const std::size_t d = 1 << 13, n = 8;
    const auto p = gen_problem({d, n, 1e3, NoiseMode::Hard, 31});
    const auto ref = solve_qr_reference(p);
    RngStream stream(31, 5);
    const auto dims = default_sketch_dims(n);
    const std::vector<LsqReport> reports{
        solve_normal_equations(p),
        solve_sketch_and_solve(p, make_gaussian(dims.gaussian, d, stream)),
        solve_sketch_and_solve(p, make_countsketch(d, dims.countsketch, stream)),
        solve_sketch_and_solve(p, make_srht(d, dims.srht, stream)),
        solve_randcholqr_lsq(p, multisketch_for(d, n, 31)), ref};
    for (const auto& rep : reports) {
        ASSERT_EQ(rep.status, LsqStatus::Ok);
        EXPECT_GE(rep.relative_residual, ref.relative_residual - 1e-12);
        EXPECT_GT(rep.wall_seconds, 0.0);
        EXPECT_LE(std::abs(rep.phase_total() - rep.wall_seconds), 0.05 * rep.wall_seconds + 2e-5);
    }
}

TEST(Lsq, DefaultSketchDims) {
    const auto dims = default_sketch_dims(16);
    EXPECT_EQ(dims.gaussian, 32u);
    EXPECT_EQ(dims.srht, 32u);
    EXPECT_EQ(dims.countsketch, 512u);
    EXPECT_EQ(dims.multi_k1, 512u);
    EXPECT_EQ(dims.multi_k2, 32u);
}
