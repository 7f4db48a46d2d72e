///
/// \file polybasis.hpp
///
/// Hierarchical orthonormal polynomial bases for the denominator space.
/// The coefficient 2-norm in either basis is the denominator norm, so a unit
/// coefficient vector is a unit-norm polynomial.
///
#ifndef MRI_POLYBASIS_HPP
#define MRI_POLYBASIS_HPP

#include <cmath>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Eigenvalues>

#include <mri/types.hpp>

namespace mri
{

/// Coefficients below this fraction of the 2-norm do not count toward the degree.
inline constexpr Real degree_tolerance = 1e-12;

struct ShiftedMonomial
{
    Complex mu0;
};

struct ChebyshevOnSegment
{
    Complex a;
    Complex b;
};

class PolyBasis
{
public:
    using Variant = std::variant<ShiftedMonomial, ChebyshevOnSegment>;

    PolyBasis() : m_kind(ShiftedMonomial{Complex(0)}), m_max_degree(0) {}

    static PolyBasis monomial(Complex mu0, std::size_t max_degree)
    {
        return PolyBasis(ShiftedMonomial{mu0}, max_degree);
    }

    static PolyBasis chebyshev(Complex a, Complex b, std::size_t max_degree)
    {
        if (a == b)
        {
            throw Error(ErrorKind::InvalidArgument,
                        "Chebyshev basis needs distinct endpoints");
        }
        return PolyBasis(ChebyshevOnSegment{a, b}, max_degree);
    }

    bool is_monomial() const noexcept
    {
        return std::holds_alternative<ShiftedMonomial>(m_kind);
    }

    bool is_chebyshev() const noexcept
    {
        return std::holds_alternative<ChebyshevOnSegment>(m_kind);
    }

    const Variant& kind() const noexcept
    {
        return m_kind;
    }

    std::size_t max_degree() const noexcept
    {
        return m_max_degree;
    }

    PolyBasis with_max_degree(std::size_t degree) const
    {
        return PolyBasis(m_kind, degree);
    }

    /// Affine map of mu onto the reference variable of the basis.
    Complex reference_coordinate(Complex mu) const
    {
        if (const auto* m = std::get_if<ShiftedMonomial>(&m_kind))
        {
            return mu - m->mu0;
        }
        const auto& c = std::get<ChebyshevOnSegment>(m_kind);
        return (2.0 * mu - c.a - c.b) / (c.b - c.a);
    }

    /// Inverse of reference_coordinate.
    Complex from_reference(Complex z) const
    {
        if (const auto* m = std::get_if<ShiftedMonomial>(&m_kind))
        {
            return z + m->mu0;
        }
        const auto& c = std::get<ChebyshevOnSegment>(m_kind);
        return 0.5 * (c.a + c.b) + 0.5 * (c.b - c.a) * z;
    }

    ///
    /// psi_0(mu), ..., psi_degree(mu). Chebyshev values use the three-term
    /// recurrence in z, scaled by sqrt(2) for l >= 1.
    ///
    std::vector<Complex> eval_all(std::size_t degree, Complex mu) const
    {
        std::vector<Complex> out(degree + 1);
        const Complex z = reference_coordinate(mu);
        if (is_monomial())
        {
            out[0] = Complex(1);
            for (std::size_t l = 1; l <= degree; ++l)
            {
                out[l] = out[l - 1] * z;
            }
            return out;
        }
        Complex t_prev(1), t_cur = z;
        out[0] = t_prev;
        if (degree >= 1)
        {
            out[1] = std::numbers::sqrt2 * t_cur;
        }
        for (std::size_t l = 2; l <= degree; ++l)
        {
            const Complex t_next = 2.0 * z * t_cur - t_prev;
            t_prev               = t_cur;
            t_cur                = t_next;
            out[l]               = std::numbers::sqrt2 * t_cur;
        }
        return out;
    }

    friend bool operator==(const PolyBasis& x, const PolyBasis& y)
    {
        if (x.m_max_degree != y.m_max_degree || x.is_monomial() != y.is_monomial())
        {
            return false;
        }
        if (x.is_monomial())
        {
            return std::get<ShiftedMonomial>(x.m_kind).mu0 ==
                   std::get<ShiftedMonomial>(y.m_kind).mu0;
        }
        const auto& cx = std::get<ChebyshevOnSegment>(x.m_kind);
        const auto& cy = std::get<ChebyshevOnSegment>(y.m_kind);
        return cx.a == cy.a && cx.b == cy.b;
    }

private:
    PolyBasis(Variant kind, std::size_t max_degree)
        : m_kind(std::move(kind)), m_max_degree(max_degree)
    {
    }

    Variant m_kind;
    std::size_t m_max_degree;
};

inline Complex eval_basis(const PolyBasis& basis, std::size_t l, Complex mu)
{
    if (l > basis.max_degree())
    {
        throw Error(ErrorKind::InvalidArgument, "basis degree out of range");
    }
    return basis.eval_all(l, mu)[l];
}

/// A polynomial expressed in a PolyBasis.
struct PolyCoeffs
{
    PolyBasis basis;
    CVector coeffs;

    std::size_t degree_bound() const
    {
        return coeffs.size() == 0 ? 0 : std::size_t(coeffs.size() - 1);
    }
};

inline Complex eval_poly(const PolyCoeffs& p, Complex mu)
{
    if (p.coeffs.size() == 0)
    {
        return Complex(0);
    }
    const auto psi = p.basis.eval_all(p.degree_bound(), mu);
    Complex sum(0);
    for (Eigen::Index l = 0; l < p.coeffs.size(); ++l)
    {
        sum += p.coeffs[l] * psi[std::size_t(l)];
    }
    return sum;
}

inline Real norm_n(const PolyCoeffs& p)
{
    return p.coeffs.norm();
}

/// Largest l with |q_l| > degree_tolerance * ||q||_2 (0 for constants).
inline std::size_t effective_degree(const CVector& coeffs)
{
    const Real threshold = degree_tolerance * coeffs.norm();
    for (Eigen::Index l = coeffs.size() - 1; l > 0; --l)
    {
        if (std::abs(coeffs[l]) > threshold)
        {
            return std::size_t(l);
        }
    }
    return 0;
}

struct PolyRoots
{
    std::vector<Complex> finite;
    std::size_t infinite = 0;
};

namespace detail
{

///
/// Diagonal similarity scaling (Parlett-Reinsch, radix 2) applied in place.
/// Leaves the spectrum unchanged and reduces the norm of companion-type
/// matrices whose coefficients span many orders of magnitude.
///
inline void balance(CMatrix& a)
{
    const Eigen::Index n = a.rows();
    constexpr Real radix = 2;
    bool converged       = false;
    while (!converged)
    {
        converged = true;
        for (Eigen::Index i = 0; i < n; ++i)
        {
            Real c = 0, r = 0;
            for (Eigen::Index j = 0; j < n; ++j)
            {
                if (j != i)
                {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            }
            if (c == 0 || r == 0)
            {
                continue;
            }
            Real g = r / radix, f = 1;
            const Real s = c + r;
            while (c < g)
            {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while (c > g)
            {
                f /= radix;
                c /= radix * radix;
            }
            if ((c + r) / f < 0.95 * s)
            {
                converged = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

inline std::vector<Complex> eigenvalues_of(CMatrix a)
{
    balance(a);
    Eigen::ComplexEigenSolver<CMatrix> solver(a, /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success)
    {
        throw Error(ErrorKind::InvalidArgument, "eigenvalue iteration failed");
    }
    const auto& ev = solver.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

} // namespace detail

///
/// Roots of a polynomial given in an orthonormal basis.
///
/// Monomial coefficients go through the companion matrix of the monic
/// polynomial; Chebyshev coefficients through the colleague matrix, so the
/// polynomial is never converted to the monomial basis. Coefficients beyond
/// the effective degree are reported as roots at infinity.
///
inline PolyRoots roots(const PolyCoeffs& p)
{
    if (p.coeffs.size() == 0 || p.coeffs.norm() == 0)
    {
        throw Error(ErrorKind::AllZero, "polynomial has no nonzero coefficient");
    }
    const std::size_t bound  = p.degree_bound();
    const std::size_t degree = effective_degree(p.coeffs);
    PolyRoots out;
    out.infinite = bound - degree;
    if (degree == 0)
    {
        return out;
    }
    const auto d = Eigen::Index(degree);

    CMatrix mat = CMatrix::Zero(d, d);
    if (p.basis.is_monomial())
    {
        const Complex lead = p.coeffs[d];
        for (Eigen::Index i = 1; i < d; ++i)
        {
            mat(i, i - 1) = 1;
        }
        for (Eigen::Index i = 0; i < d; ++i)
        {
            mat(i, d - 1) = -p.coeffs[i] / lead;
        }
    }
    else
    {
        // Plain Chebyshev coefficients c_l of sum c_l T_l(z).
        CVector c = p.coeffs.head(d + 1);
        c.tail(d) *= std::numbers::sqrt2;
        if (d == 1)
        {
            mat(0, 0) = -c[0] / c[1];
        }
        else
        {
            mat(0, 1) = 1;
            for (Eigen::Index i = 1; i < d; ++i)
            {
                mat(i, i - 1) = 0.5;
                if (i + 1 < d)
                {
                    mat(i, i + 1) = 0.5;
                }
            }
            for (Eigen::Index j = 0; j < d; ++j)
            {
                mat(d - 1, j) -= c[j] / (2.0 * c[d]);
            }
        }
    }
    for (const auto& z : detail::eigenvalues_of(std::move(mat)))
    {
        out.finite.push_back(p.basis.from_reference(z));
    }
    return out;
}

} // namespace mri

#endif /* MRI_POLYBASIS_HPP */
