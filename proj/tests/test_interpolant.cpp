#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <mri/interpolant.hpp>
#include <mri/testbeds.hpp>

#include "test_util.hpp"

using namespace mri;
using mri::test::complex_near;
using mri::test::rel_diff;
using mri::test::set_distance;

namespace
{

/// u(mu) = v / (2 - mu) sampled at {1, -1}, ||v|| = 1.
struct SinglePole
{
    SampleSet samples{std::vector<Complex>{1, -1}};
    CVector v;
    CMatrix snapshots;
    InnerProduct inner = InnerProduct::euclidean(3);
    MriConfig config{1, PolyBasis::monomial(0, 1)};

    SinglePole() : v(3), snapshots(3, 2)
    {
        v << 0.6, Complex(0, 0.8), 0;
        snapshots.col(0) = v;
        snapshots.col(1) = v / 3.0;
    }
};

} // namespace

TEST(GramianFactor, SinglePoleByHand)
{
    SinglePole ex;
    const auto snap = orthonormalize(ex.inner, ex.snapshots);
    ASSERT_EQ(snap.rank(), 1);
    const CMatrix psi = build_gramian_factor(snap, ex.samples, ex.config);
    ASSERT_EQ(psi.rows(), 1);
    ASSERT_EQ(psi.cols(), 2);
    // W column is (1, 1/3) up to a unimodular factor
    const Complex phase = snap.components(0, 0);
    EXPECT_NEAR(std::abs(phase), 1.0, 1e-15);
    EXPECT_TRUE(complex_near(psi(0, 0) / phase, 1.0 / 3, 1e-15));
    EXPECT_TRUE(complex_near(psi(0, 1) / phase, 2.0 / 3, 1e-15));
}

TEST(GramianFactor, ConstantSnapshotsHaveZeroLeadingCoefficient)
{
    const auto samples = fejer_nodes(Region::disk(0, 1), 5);
    CMatrix snapshots  = CVector::Ones(4) * Eigen::RowVectorXcd::Ones(5);
    const auto snap    = orthonormalize(InnerProduct::euclidean(4), snapshots);
    const CMatrix psi  = build_gramian_factor(snap, samples, {0, PolyBasis::monomial(0, 0)});
    EXPECT_LT(psi.norm(), 1e-14);
}

TEST(GramianFactor, DimensionMismatch)
{
    SinglePole ex;
    const auto snap = orthonormalize(ex.inner, ex.snapshots);
    const SampleSet three(std::vector<Complex>{0, 1, 2});
    EXPECT_THROW(build_gramian_factor(snap, three, {1, PolyBasis::monomial(0, 1)}), Error);
}

TEST(MinimalDenominator, NullVectorOfRow)
{
    CMatrix psi(1, 2);
    psi << 1.0 / 3, 2.0 / 3;
    const auto fit = minimal_denominator(psi);
    EXPECT_LT(fit.sigma_min, 1e-15);
    EXPECT_TRUE(complex_near(fit.q[0], 2 / std::sqrt(5.0), 1e-15));
    EXPECT_TRUE(complex_near(fit.q[1], -1 / std::sqrt(5.0), 1e-15));
}

TEST(MinimalDenominator, IdentityAndZero)
{
    auto fit = minimal_denominator(CMatrix::Identity(2, 2));
    EXPECT_DOUBLE_EQ(fit.sigma_min, 1);
    EXPECT_DOUBLE_EQ(fit.sigma_gap, 1);
    EXPECT_NEAR(fit.q.norm(), 1, 1e-15);

    fit = minimal_denominator(CMatrix::Zero(3, 3));
    EXPECT_EQ(fit.sigma_min, 0);
    EXPECT_EQ(fit.sigma_gap, 1);
    // tie broken to the first SVD candidate, then phase fixed
    const auto again = minimal_denominator(CMatrix::Zero(3, 3));
    EXPECT_EQ(fit.q, again.q);
    EXPECT_NEAR(fit.q.norm(), 1, 1e-15);
    Eigen::Index best;
    fit.q.cwiseAbs().maxCoeff(&best);
    EXPECT_GT(fit.q[best].real(), 0);
    EXPECT_EQ(fit.q[best].imag(), 0);

    const auto empty_rows = minimal_denominator(CMatrix(0, 3));
    EXPECT_EQ(empty_rows.q, CVector::Unit(3, 0));
}

TEST(MinimalDenominator, GapAndPhase)
{
    CMatrix psi = CMatrix::Zero(3, 3);
    psi.diagonal() << 4, 2, Complex(0, 0.5);
    const auto fit = minimal_denominator(psi);
    EXPECT_NEAR(fit.sigma_min, 0.5, 1e-15);
    EXPECT_NEAR(fit.sigma_gap, 0.25, 1e-15);
    EXPECT_TRUE(complex_near(fit.q[2], 1.0, 1e-15));
}

TEST(Build, SinglePoleRecovery)
{
    SinglePole ex;
    const auto interp = build(ex.snapshots, ex.inner, ex.samples, ex.config);
    EXPECT_LT(interp.sigma_min(), 1e-15);
    const auto p = interp.poles();
    ASSERT_EQ(p.finite.size(), 1u);
    EXPECT_TRUE(complex_near(p.finite[0], 2.0, 1e-12));
    EXPECT_LT(rel_diff(interp.evaluate(0).value, ex.v / 2.0), 1e-14);

    CVector root_poly(2);
    root_poly << -2, 1;
    EXPECT_LT(interp.j_functional(root_poly / std::sqrt(5.0)), 1e-15);
    EXPECT_NEAR(interp.j_functional(interp.denominator().coeffs), interp.sigma_min(), 1e-15);
    EXPECT_NEAR(interp.denominator().coeffs.norm(), 1, 1e-15);
    EXPECT_THROW(interp.j_functional(CVector::Ones(3)), Error);
}

TEST(Build, DegreeZeroIsPolynomialInterpolant)
{
    // u linear in mu, two nodes: exact linear values in between
    const SampleSet samples(std::vector<Complex>{0, 1});
    CVector a(2), b(2);
    a << 1, 2;
    b << Complex(0, 1), -3;
    CMatrix snapshots(2, 2);
    snapshots << a, a + b;
    const auto interp =
        build(snapshots, InnerProduct::euclidean(2), samples, {0, PolyBasis::monomial(0, 0)});
    EXPECT_TRUE(interp.poles().finite.empty());
    EXPECT_TRUE(complex_near(interp.denominator().coeffs[0], 1.0, 0));
    for (Real t : {0.25, 0.5, 0.9, 3.0})
    {
        EXPECT_LT(rel_diff(interp.evaluate(t).value, a + t * b), 1e-14);
    }
}

TEST(Build, SingleSampleIsConstant)
{
    CVector u(3);
    u << 1, -1, Complex(0, 2);
    const auto interp = build(u, InnerProduct::euclidean(3), SampleSet(std::vector<Complex>{0.5}),
                              {0, PolyBasis::monomial(0, 0)});
    EXPECT_EQ(interp.evaluate(7.0).value, u);
    EXPECT_LT(rel_diff(interp.evaluate(Complex(-3, 1)).value, u), 1e-15);
}

TEST(Build, RejectsDegreeTooHigh)
{
    SinglePole ex;
    EXPECT_THROW(build(ex.snapshots, ex.inner, ex.samples, {2, PolyBasis::monomial(0, 2)}), Error);
    EXPECT_THROW(build(ex.snapshots, ex.inner, ex.samples, {1, PolyBasis::monomial(0, 0)}), Error);
}

TEST(Evaluate, NodesReturnSnapshotsExactly)
{
    const auto samples = fejer_nodes(Region::disk(0, 1), 8);
    const auto map     = random_orthogonal_map({1.5, Complex(0, -2), Complex(-1.3, 0.4)}, 10, 17);
    const CMatrix u    = sample_meromorphic(map, samples);
    const auto interp  = build(u, InnerProduct::euclidean(10), samples,
                               {3, PolyBasis::monomial(0, 3)});
    for (std::size_t j = 0; j < samples.size(); ++j)
    {
        const auto e = interp.evaluate(samples[j]);
        EXPECT_TRUE(e.at_node);
        EXPECT_EQ(e.value, u.col(Eigen::Index(j)));
        // a hair off the node the formula itself must agree to roundoff
        const auto near = interp.evaluate(samples[j] + 1e-9);
        EXPECT_FALSE(near.at_node);
        EXPECT_LT(rel_diff(near.value, u.col(Eigen::Index(j))), 1e-7);
    }
}

TEST(Evaluate, NearPoleFlag)
{
    SinglePole ex;
    const auto interp = build(ex.snapshots, ex.inner, ex.samples, ex.config);
    EXPECT_TRUE(interp.evaluate(2.0).near_pole);
    EXPECT_FALSE(interp.evaluate(0.0).near_pole);
}

TEST(Poles, MatchingError)
{
    auto err = pole_matching_error({2}, {2.1, 5});
    EXPECT_NEAR(err[0], 0.1, 1e-15);
    err = pole_matching_error({0}, {Complex(3, 4)});
    EXPECT_DOUBLE_EQ(err[0], 5);
    err = pole_matching_error({1, 2}, {2, 3, 1});
    EXPECT_EQ(err[0], 0);
    EXPECT_EQ(err[1], 0);
    try
    {
        pole_matching_error({1}, {});
        FAIL();
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::EmptyApprox);
    }
}

TEST(Poles, QuadraticDenominator)
{
    // q proportional to mu^2 - 1 in the monomial basis about 0
    CVector q(3);
    q << -1, 0, 1;
    const auto r = roots(PolyCoeffs{PolyBasis::monomial(0, 2), q / std::sqrt(2.0)});
    EXPECT_LT(set_distance(r.finite, {-1, 1}), 1e-15);
}

class ExactRecovery : public ::testing::TestWithParam<int>
{
};

TEST_P(ExactRecovery, PolesValuesAndSigma)
{
    const int seed = GetParam();
    Rng rng{std::uint64_t(seed)};
    const std::size_t poles_n = 1 + std::size_t(seed % 6);
    std::vector<Complex> poles;
    for (std::size_t k = 0; k < poles_n; ++k)
    {
        // outside the unit disk so the nodes stay clear
        poles.push_back(std::polar(rng.uniform(1.2, 2.5), 2 * std::numbers::pi * rng.uniform()));
    }
    const Eigen::Index n = 20;
    // linearly independent, not orthogonal residues
    const CMatrix residues = rng.complex_normal(n, Eigen::Index(poles_n));
    const MeromorphicMap map{poles, residues, false};
    const bool cheb_case     = seed % 2 == 0;
    const std::size_t s      = poles_n + 1 + std::size_t(seed % 4);
    const auto region        = cheb_case ? Region::segment(-1, 1) : Region::disk(0, 1);
    const auto samples       = fejer_nodes(region, s);
    const auto basis         = cheb_case ? PolyBasis::chebyshev(-1, 1, poles_n)
                                         : PolyBasis::monomial(0, poles_n);
    const auto inner         = InnerProduct::euclidean(n);
    const auto interp        = build(sample_meromorphic(map, samples), inner, samples, {poles_n, basis});

    Real max_residue = 0;
    for (Eigen::Index k = 0; k < residues.cols(); ++k)
    {
        max_residue = std::max(max_residue, residues.col(k).norm());
    }
    EXPECT_LT(interp.sigma_min(), 1e-10 * max_residue);
    const auto found = interp.poles();
    ASSERT_EQ(found.finite.size(), poles_n);
    for (Real e : pole_matching_error(poles, found.finite))
    {
        EXPECT_LT(e, 1e-8);
    }

    int tested = 0;
    while (tested < 50)
    {
        const Complex mu(rng.uniform(-3, 3), rng.uniform(-3, 3));
        bool clear = true;
        for (const auto& p : poles)
        {
            clear = clear && std::abs(mu - p) >= 0.1;
        }
        if (!clear)
        {
            continue;
        }
        ++tested;
        const CVector exact = eval_meromorphic(map, mu);
        EXPECT_LT((interp.evaluate(mu).value - exact).norm() / exact.norm(), 1e-8) << mu;
    }
}

INSTANTIATE_TEST_SUITE_P(RandomMaps, ExactRecovery, ::testing::Range(1, 13));

TEST(Properties, OptimalJIdentity)
{
    // j(Q)^2 = sum_lambda ||v_lambda||^2 |Q(lambda)|^2 / |omega(lambda)|^2
    Rng rng(77);
    const Eigen::Index n = 60;
    for (int trial = 0; trial < 6; ++trial)
    {
        const std::size_t pole_count = 10 + std::size_t(trial) * 8;
        std::vector<Complex> poles;
        std::vector<Real> norms;
        for (std::size_t k = 0; k < pole_count; ++k)
        {
            poles.push_back(std::polar(rng.uniform(1.1, 3.0), 2 * std::numbers::pi * rng.uniform()));
            norms.push_back(rng.uniform(0.1, 2.0));
        }
        const auto map     = random_orthogonal_map(poles, n, 1000 + std::uint64_t(trial), norms);
        const auto samples = trial % 2 ? fejer_nodes(Region::disk(0, 1), 9)
                                       : quasi_random_nodes(Region::disk(0, 1), 9);
        const std::size_t degree = 4;
        const auto basis         = PolyBasis::monomial(Complex(0.1, 0.2), degree);
        const auto interp = build(sample_meromorphic(map, samples), InnerProduct::euclidean(n),
                                  samples, {degree, basis});
        for (int k = 0; k < 10; ++k)
        {
            CVector q = rng.complex_normal(Eigen::Index(degree) + 1, 1);
            q /= q.norm();
            Real expected = 0;
            for (std::size_t p = 0; p < pole_count; ++p)
            {
                const Real ratio = std::abs(eval_poly({basis, q}, poles[p])) /
                                   std::abs(samples.nodal_poly(poles[p]));
                expected += norms[p] * norms[p] * ratio * ratio;
            }
            const Real j = interp.j_functional(q);
            EXPECT_LT(std::abs(j * j - expected), 1e-10 * std::max(expected, Real(1e-300)))
                << "trial " << trial;
        }
    }
}

TEST(Properties, Minimality)
{
    Rng rng(5150);
    const auto samples = fejer_nodes(Region::disk(0, 1), 12);
    const CMatrix u    = rng.complex_normal(30, 12);
    for (std::size_t degree : {2u, 5u, 11u})
    {
        const auto interp = build(u, InnerProduct::euclidean(30), samples,
                                  {degree, PolyBasis::monomial(0, degree)});
        const Real best   = interp.j_functional(interp.denominator().coeffs);
        EXPECT_NEAR(best, interp.sigma_min(), 1e-10 * std::max(best, Real(1)));
        for (int k = 0; k < 100; ++k)
        {
            const Eigen::Index len = 1 + Eigen::Index(rng.uniform() * Real(degree + 1));
            CVector q              = rng.complex_normal(len, 1);
            q /= q.norm();
            EXPECT_LE(best, interp.j_functional(q) * (1 + 1e-12));
        }
    }
}

TEST(Properties, ScaleInvariance)
{
    const auto samples = fejer_nodes(Region::segment(-1, 1), 10);
    const auto map     = random_orthogonal_map({1.4, Complex(0.2, 0.6), -1.7, Complex(0, -0.9)}, 12, 3);
    const CMatrix u    = sample_meromorphic(map, samples);
    const MriConfig config{4, PolyBasis::chebyshev(-1, 1, 4)};
    const auto inner   = InnerProduct::euclidean(12);
    const auto base    = build(u, inner, samples, config);
    for (const Complex c : {Complex(3, 0), Complex(0, -2), Complex(1e-5, 1e-5)})
    {
        const auto scaled = build(c * u, inner, samples, config);
        EXPECT_LT((scaled.denominator().coeffs - base.denominator().coeffs).norm(), 1e-12);
        EXPECT_LT(set_distance(scaled.poles().finite, base.poles().finite), 1e-12);
        for (const Complex mu : {Complex(0.3, 0.1), Complex(2, 2)})
        {
            EXPECT_LT(rel_diff(scaled.evaluate(mu).value, c * base.evaluate(mu).value), 1e-10);
        }
    }
}

TEST(Properties, SigmaMinMatchesJFunctional)
{
    Rng rng(8);
    const auto samples = quasi_random_nodes(Region::disk(Complex(1, 1), 2), 15);
    const CMatrix u    = rng.complex_normal(40, 15);
    const auto interp  = build(u, InnerProduct::euclidean(40), samples,
                               {7, PolyBasis::monomial(Complex(1, 1), 7)});
    const Real j       = interp.j_functional(interp.denominator().coeffs);
    EXPECT_LT(std::abs(j - interp.sigma_min()), 1e-10 * interp.sigma_min());
    for (std::size_t k = 0; k < samples.size(); ++k)
    {
        EXPECT_TRUE(complex_near(interp.denominator_at_nodes()[Eigen::Index(k)],
                                 interp.denominator_value(samples[k]), 1e-13));
    }
    EXPECT_GE(interp.sigma_gap(), 0);
    EXPECT_LE(interp.sigma_gap(), 1);
}

TEST(Assemble, MatchesBuild)
{
    SinglePole ex;
    const auto built = build(ex.snapshots, ex.inner, ex.samples, ex.config);
    const auto again = assemble(ex.snapshots, ex.inner, ex.samples, ex.config,
                                built.denominator().coeffs, built.sigma_gap());
    EXPECT_EQ(again.denominator().coeffs, built.denominator().coeffs);
    EXPECT_LT(rel_diff(again.evaluate(0.3).value, built.evaluate(0.3).value), 1e-15);
    EXPECT_THROW(assemble(ex.snapshots, ex.inner, ex.samples, ex.config, CVector::Ones(3), 1),
                 Error);
}
