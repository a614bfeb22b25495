#include "sketchla/blas.hh"
#include "sketchla/errors.hh"
#include "sketchla/verify.hh"
#include "test_util.hh"

#include <gtest/gtest.h>

#include <cmath>

using namespace sketchla;

TEST(GenProblem, UnitKappaIsPerfectlyConditioned) {
    const auto p = gen_problem({2048, 8, 1.0, NoiseMode::Consistent, 1});
    EXPECT_NEAR(condition_number(p.a), 1.0, 1e-12);
    EXPECT_EQ(p.a.layout(), Layout::RowMajor);
}

TEST(GenProblem, KappaFromGramEigenvalues) {
    const auto p = gen_problem({4096, 16, 1e2, NoiseMode::Easy, 2});
    const Vector e = sym_eigenvalues(multiply(p.a, Op::Trans, p.a, Op::NoTrans));
    const double kappa = std::sqrt(e[0] / e[e.size() - 1]);
    EXPECT_NEAR(kappa / 1e2, 1.0, 0.01);
}

TEST(GenProblem, MeasuredKappaAcrossRange) {
    for (double kappa : {1.0, 1e2, 1e6, 1e10}) {
        const auto p = gen_problem({1 << 14, 16, kappa, NoiseMode::Consistent, 3});
        EXPECT_NEAR(condition_number(p.a) / kappa, 1.0, 0.01) << kappa;
    }
}

TEST(GenProblem, ConsistentSystemsSolveExactly) {
    for (double kappa : {1.0, 1e2, 1e4}) {
        const auto p = gen_problem({2048, 16, kappa, NoiseMode::Consistent, 4});
        EXPECT_LE(solve_qr_reference(p).relative_residual, 1e-12) << kappa;
    }
}

TEST(GenProblem, NoiseModesHaveStatedMoments) {
    const std::size_t d = 1 << 15;
    const auto clean = gen_problem({d, 4, 10.0, NoiseMode::Consistent, 5});
    for (auto [mode, mu, var] : {std::tuple{NoiseMode::Easy, 0.0, 0.01},
                                 std::tuple{NoiseMode::Hard, 3.0, 2.0}}) {
        const auto p = gen_problem({d, 4, 10.0, mode, 5});
        EXPECT_TRUE(bitwise_equal(p.a, clean.a));
        double m = 0.0, s2 = 0.0;
        for (std::size_t i = 0; i < d; ++i)
            m += (p.b[i] - clean.b[i]) / double(d);
        for (std::size_t i = 0; i < d; ++i)
            s2 += std::pow(p.b[i] - clean.b[i] - m, 2) / double(d - 1);
        EXPECT_NEAR(m, mu, 5 * std::sqrt(var / double(d)));
        EXPECT_NEAR(s2 / var, 1.0, 0.05);
    }
}

TEST(GenProblem, Deterministic) {
    const ProblemSpec spec{1000, 7, 1e3, NoiseMode::Hard, 6};
    const auto p1 = gen_problem(spec), p2 = gen_problem(spec);
    EXPECT_TRUE(bitwise_equal(p1.a, p2.a));
    for (std::size_t i = 0; i < 1000; ++i)
        EXPECT_EQ(p1.b[i], p2.b[i]);
    const auto p3 = gen_problem({1000, 7, 1e3, NoiseMode::Hard, 7});
    EXPECT_FALSE(bitwise_equal(p1.a, p3.a));
}

TEST(GenProblem, InvalidSpecRejected) {
    EXPECT_THROW(gen_problem({4, 8, 1.0, NoiseMode::Easy, 0}), ShapeError);
    EXPECT_THROW(gen_problem({8, 4, 0.5, NoiseMode::Easy, 0}), std::invalid_argument);
}

TEST(NoiseMode, ParseAndPrint) {
    EXPECT_EQ(parse_noise_mode("hard"), NoiseMode::Hard);
    EXPECT_EQ(parse_noise_mode("consistent"), NoiseMode::Consistent);
    EXPECT_FALSE(parse_noise_mode("medium").has_value());
    EXPECT_STREQ(to_string(NoiseMode::Easy), "easy");
}

TEST(Distortion, IdentityAndScaledIdentity) {
    const auto r = measure_distortion(IdentityOperator{500, 1.0}, 500, 6, 8);
    EXPECT_LE(r.epsilon_hat, 1e-13);
    const auto r2 = measure_distortion(IdentityOperator{500, 2.0}, 500, 6, 8);
    EXPECT_NEAR(r2.epsilon_hat, 3.0, 1e-12);
    EXPECT_NEAR(r2.sigma_min, 2.0, 1e-12);
}

TEST(Distortion, ShapeMismatchRejected) {
    EXPECT_THROW(measure_distortion(IdentityOperator{10, 1.0}, 11, 2, 0), ShapeError);
    RngStream s(0, 0);
    EXPECT_THROW(measure_distortion(make_gaussian(3, 100, s), 100, 4, 0), ShapeError);
}

TEST(Distortion, GaussianK16nUsuallyBelowPoint6) {
    const std::size_t d = 4096, n = 8;
    int good = 0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        RngStream s(seed, 1);
        const auto r = measure_distortion(make_gaussian(16 * n, d, s), d, n, seed);
        EXPECT_LE(r.sigma_min, r.sigma_max);
        good += r.epsilon_hat < 0.6;
    }
    EXPECT_GE(good, 95);
}

TEST(Distortion, PairwiseNeverExceedsSingularValueBound) {
    const std::size_t d = 1024, n = 6;
    const auto q = householder_qr_economy(test::random_matrix(d, n, 9)).first;
    RngStream id_trials(1, 1);
    EXPECT_LE(pairwise_distortion_check(IdentityOperator{d, 1.0}, q, 50, id_trials), 1e-13);
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        RngStream s(seed, 2);
        const std::vector<SketchOperator> ops{make_gaussian(8 * n, d, s), make_countsketch(d, 4 * n * n, s),
                                              make_srht(d, 8 * n, s), make_multisketch(d, 4 * n * n, 8 * n, s)};
        for (const auto& op : ops) {
            const double eps = measure_distortion_on(op, q).epsilon_hat;
            RngStream trials(seed, 3);
            const double observed = pairwise_distortion_check(op, q, 1000, trials);
            EXPECT_LE(observed, eps + 1e-10) << operator_name(op) << " seed " << seed;
            EXPECT_GT(observed, 0.0);
        }
    }
}

TEST(Distortion, FactorFormula) {
    EXPECT_DOUBLE_EQ(distortion_factor(0.0), 1.0);
    EXPECT_NEAR(distortion_factor(0.5), std::sqrt(3.0), 1e-15);
    EXPECT_TRUE(std::isinf(distortion_factor(1.0)));
}

TEST(BruteForce, IdentityReturnsInput) {
    const auto a = test::random_matrix(20, 3, 10);
    EXPECT_TRUE(bitwise_equal(brute_force_apply(IdentityOperator{20, 1.0}, a), a));
}

TEST(BruteForce, HandExamples) {
    CountSketchOperator c{4, 2, {0, 1, 0, 1}, {1, 1, 0, 1}};
    const auto y = brute_force_apply(c, DenseMatrix::from_rows({{1}, {2}, {3}, {4}}));
    EXPECT_EQ(y(0, 0), -2.0);
    EXPECT_EQ(y(1, 0), 6.0);

    SrhtOperator s;
    s.d = s.d_pad = 4;
    s.k = 2;
    s.signs = {1, 1, 1, 1};
    s.sample = {0, 2};
    s.scale = 1 / std::sqrt(2.0);
    s.plan = make_fwht_plan(4);
    const auto z = brute_force_apply(s, DenseMatrix::from_rows({{1}, {2}, {3}, {4}}));
    EXPECT_NEAR(z(0, 0), 10 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(z(1, 0), -4 / std::sqrt(2.0), 1e-14);
}

TEST(BruteForce, CapacityGuard) {
    RngStream s(0, 0);
    EXPECT_THROW(brute_force_apply(make_gaussian(5000, 5000, s), DenseMatrix(5000, 1)), CapacityError);
}
