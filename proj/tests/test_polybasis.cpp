#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include <mri/polybasis.hpp>
#include <mri/testbeds.hpp>

#include "test_util.hpp"

using namespace mri;
using mri::test::complex_near;
using mri::test::set_distance;

namespace
{

/// Expand prod (z - r_k) into monomial coefficients of z, lowest first.
CVector monomial_from_roots(const std::vector<Complex>& roots, Complex lead)
{
    CVector c = CVector::Zero(Eigen::Index(roots.size() + 1));
    c[0]      = lead;
    for (std::size_t k = 0; k < roots.size(); ++k)
    {
        for (Eigen::Index l = Eigen::Index(k) + 1; l > 0; --l)
        {
            c[l] = c[l - 1] - roots[k] * c[l];
        }
        c[0] = -roots[k] * c[0];
    }
    return c;
}

/// Chebyshev coefficients (orthonormal scaling) of prod (z - r_k), by
/// multiplying by z with T_1 T_l = (T_{l+1} + T_{l-1}) / 2 in plain scaling.
CVector chebyshev_from_roots(const std::vector<Complex>& roots, Complex lead)
{
    const auto d = Eigen::Index(roots.size());
    CVector t = CVector::Zero(d + 1);
    t[0]      = 1;
    for (Eigen::Index k = 0; k < d; ++k)
    {
        CVector next = CVector::Zero(d + 1);
        for (Eigen::Index l = 0; l <= k; ++l)
        {
            if (l == 0)
            {
                next[1] += t[0];
            }
            else
            {
                next[l + 1] += 0.5 * t[l];
                next[l - 1] += 0.5 * t[l];
            }
        }
        t = next - roots[std::size_t(k)] * t;
    }
    t *= lead;
    t.tail(d) /= std::numbers::sqrt2;
    return t;
}

} // namespace

TEST(PolyBasis, MonomialValues)
{
    const auto b = PolyBasis::monomial(Complex(1, 1), 3);
    EXPECT_TRUE(complex_near(eval_basis(b, 0, 7.0), 1.0, 0));
    EXPECT_TRUE(complex_near(eval_basis(b, 2, Complex(3, 1)), 4.0, 1e-15));
    EXPECT_THROW(eval_basis(b, 4, 0.0), Error);
}

TEST(PolyBasis, ChebyshevValuesAtEndpoints)
{
    const auto b = PolyBasis::chebyshev(10, 40, 6);
    for (std::size_t l = 1; l <= 6; ++l)
    {
        EXPECT_TRUE(complex_near(eval_basis(b, l, 40.0), std::numbers::sqrt2, 1e-14));
        EXPECT_TRUE(complex_near(eval_basis(b, l, 10.0),
                                 (l % 2 ? -1.0 : 1.0) * std::numbers::sqrt2, 1e-14));
    }
    EXPECT_TRUE(complex_near(eval_basis(b, 0, 12.5), 1.0, 0));
}

TEST(PolyBasis, ChebyshevOrthonormalUnderArcsineMeasure)
{
    // mean over theta of psi_l(cos theta) conj(psi_m(cos theta))
    const auto b = PolyBasis::chebyshev(-1, 1, 10);
    const int count = 2000;
    CMatrix gram = CMatrix::Zero(11, 11);
    for (int k = 0; k < count; ++k)
    {
        const Real theta = std::numbers::pi * (k + 0.5) / count;
        const auto psi   = b.eval_all(10, std::cos(theta));
        for (int l = 0; l <= 10; ++l)
        {
            for (int m = 0; m <= 10; ++m)
            {
                gram(l, m) += psi[l] * std::conj(psi[m]) / Real(count);
            }
        }
    }
    EXPECT_LT((gram - CMatrix::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(PolyBasis, MonomialOrthonormalOnUnitCircle)
{
    const Complex mu0(0.5, -2);
    const auto b    = PolyBasis::monomial(mu0, 10);
    const int count = 2048;
    CMatrix gram    = CMatrix::Zero(11, 11);
    for (int k = 0; k < count; ++k)
    {
        const auto psi = b.eval_all(10, mu0 + std::polar(1.0, 2 * std::numbers::pi * k / count));
        for (int l = 0; l <= 10; ++l)
        {
            for (int m = 0; m <= 10; ++m)
            {
                gram(l, m) += psi[l] * std::conj(psi[m]) / Real(count);
            }
        }
    }
    EXPECT_LT((gram - CMatrix::Identity(11, 11)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PolyBasis, ReferenceCoordinateRoundTrip)
{
    Rng rng(3);
    for (const auto& b : {PolyBasis::monomial(Complex(2, -1), 4),
                          PolyBasis::chebyshev(Complex(0, 1), Complex(3, 5), 4)})
    {
        for (int k = 0; k < 20; ++k)
        {
            const Complex mu = rng.complex_normal();
            EXPECT_TRUE(complex_near(b.from_reference(b.reference_coordinate(mu)), mu, 1e-14));
        }
    }
}

TEST(EffectiveDegree, IgnoresTinyTrailingCoefficients)
{
    CVector q(4);
    q << 1, 2, 1e-14, 0;
    EXPECT_EQ(effective_degree(q), 1u);
    q << 0, 0, 0, 1;
    EXPECT_EQ(effective_degree(q), 3u);
    EXPECT_EQ(effective_degree(CVector::Constant(1, 5.0)), 0u);
}

TEST(Roots, MonomialLinear)
{
    // psi_0 + psi_1 about mu0 = 0: root at -1
    CVector q(2);
    q << 1, 1;
    const auto r = roots(PolyCoeffs{PolyBasis::monomial(0, 1), q});
    ASSERT_EQ(r.finite.size(), 1u);
    EXPECT_TRUE(complex_near(r.finite[0], -1.0, 1e-15));
    EXPECT_EQ(r.infinite, 0u);
}

TEST(Roots, ChebyshevLinearAndQuadratic)
{
    CVector q(2);
    q << 0, 1;
    auto r = roots(PolyCoeffs{PolyBasis::chebyshev(10, 40, 1), q});
    ASSERT_EQ(r.finite.size(), 1u);
    EXPECT_TRUE(complex_near(r.finite[0], 25.0, 1e-13));

    // T_2 has roots +-1/sqrt(2)
    CVector q2(3);
    q2 << 0, 0, 1;
    r = roots(PolyCoeffs{PolyBasis::chebyshev(-1, 1, 2), q2});
    EXPECT_LT(set_distance(r.finite, {std::sqrt(0.5), -std::sqrt(0.5)}), 1e-14);
}

TEST(Roots, TrailingZerosAreInfinite)
{
    CVector q(4);
    q << 2, -1, 0, 0;
    const auto r = roots(PolyCoeffs{PolyBasis::monomial(1, 3), q});
    ASSERT_EQ(r.finite.size(), 1u);
    EXPECT_TRUE(complex_near(r.finite[0], 3.0, 1e-14));
    EXPECT_EQ(r.infinite, 2u);

    const auto c = roots(PolyCoeffs{PolyBasis::monomial(1, 0), CVector::Constant(1, 1.0)});
    EXPECT_TRUE(c.finite.empty());
    EXPECT_EQ(c.infinite, 0u);
}

TEST(Roots, AllZeroThrows)
{
    try
    {
        roots(PolyCoeffs{PolyBasis::monomial(0, 2), CVector::Zero(3)});
        FAIL() << "expected AllZero";
    }
    catch (const Error& e)
    {
        EXPECT_EQ(e.kind(), ErrorKind::AllZero);
    }
}

TEST(Roots, ReconstructionProperty)
{
    // Random root sets in the unit disk, degrees up to 30, both bases.
    Rng rng(20240501);
    for (int trial = 0; trial < 40; ++trial)
    {
        const std::size_t degree = 1 + std::size_t(rng.uniform() * 30);
        std::vector<Complex> true_roots;
        for (std::size_t k = 0; k < degree; ++k)
        {
            true_roots.push_back(std::polar(std::sqrt(rng.uniform()),
                                            2 * std::numbers::pi * rng.uniform()));
        }
        const Complex lead = rng.complex_normal();
        const bool cheb    = trial % 2 == 1;
        PolyBasis basis    = cheb ? PolyBasis::chebyshev(-1, 1, degree)
                                  : PolyBasis::monomial(0, degree);
        CVector q = cheb ? chebyshev_from_roots(true_roots, lead)
                         : monomial_from_roots(true_roots, lead);
        const auto found = roots(PolyCoeffs{basis, q});
        ASSERT_EQ(found.finite.size(), degree);
        // roots are ill conditioned at high degree, so compare the
        // reconstructed polynomial instead of the roots themselves
        // monic z^d has top orthonormal Chebyshev coefficient 2^(1-d) / sqrt(2)
        const Complex top  = q[Eigen::Index(degree)];
        const CVector rebuilt =
            cheb ? chebyshev_from_roots(found.finite,
                                        top * std::numbers::sqrt2 * std::pow(2.0, Real(degree) - 1))
                 : monomial_from_roots(found.finite, top);
        EXPECT_LT((rebuilt - q).norm() / q.norm(), 1e-8)
            << "degree " << degree << (cheb ? " chebyshev" : " monomial");
    }
}

TEST(Roots, ChebyshevShiftedSegment)
{
    const std::vector<Complex> truth = {12.0, 18.5, 33.0, Complex(25, 0.5)};
    std::vector<Complex> reference;
    const auto basis = PolyBasis::chebyshev(10, 40, 4);
    for (const auto& r : truth)
    {
        reference.push_back(basis.reference_coordinate(r));
    }
    const CVector q  = chebyshev_from_roots(reference, 1.0);
    const auto found = roots(PolyCoeffs{basis, q});
    EXPECT_LT(set_distance(found.finite, truth), 1e-11);
}
