///
/// \file snapshots.hpp
///
/// Snapshot storage under a Hermitian inner product, V-orthonormal basis of
/// the snapshot span, and the component map of each snapshot in that basis.
///
#ifndef MRI_SNAPSHOTS_HPP
#define MRI_SNAPSHOTS_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <mri/types.hpp>

namespace mri
{

inline constexpr Real rank_tolerance = 1e-12;
inline constexpr Real zero_tolerance = 1e-300;

///
/// <u, v>_V = v^H M u, conjugate-linear in the second argument. M is the
/// identity for the Euclidean variant.
///
class InnerProduct
{
public:
    static InnerProduct euclidean(Eigen::Index dim)
    {
        return InnerProduct(dim, std::nullopt);
    }

    /// Throws NotPositiveDefinite unless M is Hermitian positive definite.
    static InnerProduct weighted(CMatrix m)
    {
        if (m.rows() != m.cols())
        {
            throw Error(ErrorKind::DimensionMismatch, "weight matrix must be square");
        }
        const Real scale = m.cwiseAbs().maxCoeff();
        if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-13 * scale)
        {
            throw Error(ErrorKind::NotPositiveDefinite, "weight matrix is not Hermitian");
        }
        Eigen::LLT<CMatrix> llt(m);
        if (llt.info() != Eigen::Success)
        {
            throw Error(ErrorKind::NotPositiveDefinite,
                        "weight matrix is not positive definite");
        }
        const auto dim = m.rows();
        return InnerProduct(dim, std::move(m));
    }

    Eigen::Index dim() const noexcept
    {
        return m_dim;
    }

    bool is_euclidean() const noexcept
    {
        return !m_weight.has_value();
    }

    /// Weight matrix; identity for the Euclidean variant.
    CMatrix matrix() const
    {
        return m_weight ? *m_weight : CMatrix::Identity(m_dim, m_dim);
    }

    template <typename Derived>
    CVector apply(const Eigen::MatrixBase<Derived>& u) const
    {
        check(u.rows());
        if (m_weight)
        {
            return *m_weight * u;
        }
        return u;
    }

    template <typename DerivedU, typename DerivedV>
    Complex operator()(const Eigen::MatrixBase<DerivedU>& u,
                       const Eigen::MatrixBase<DerivedV>& v) const
    {
        check(u.rows());
        check(v.rows());
        if (m_weight)
        {
            return v.dot(*m_weight * u);
        }
        return v.dot(u);
    }

    template <typename Derived>
    Real norm(const Eigen::MatrixBase<Derived>& u) const
    {
        return std::sqrt(std::max(Real(0), std::real((*this)(u, u))));
    }

    /// Y^H M X
    CMatrix gram(const CMatrix& x, const CMatrix& y) const
    {
        check(x.rows());
        check(y.rows());
        if (m_weight)
        {
            return y.adjoint() * (*m_weight * x);
        }
        return y.adjoint() * x;
    }

private:
    InnerProduct(Eigen::Index dim, std::optional<CMatrix> weight)
        : m_dim(dim), m_weight(std::move(weight))
    {
    }

    void check(Eigen::Index rows) const
    {
        if (rows != m_dim)
        {
            throw Error(ErrorKind::DimensionMismatch,
                        "vector dimension does not match the inner product");
        }
    }

    Eigen::Index m_dim;
    std::optional<CMatrix> m_weight;
};

template <typename DerivedU, typename DerivedV>
Complex v_inner(const InnerProduct& inner, const Eigen::MatrixBase<DerivedU>& u,
                const Eigen::MatrixBase<DerivedV>& v)
{
    return inner(u, v);
}

///
/// V-orthonormal basis phi (n x rank) of the snapshot span, and the
/// component map W (S x rank) with row j holding the coordinates of
/// snapshot j: snapshot_j = phi * W.row(j)^T.
///
struct SnapshotBasis
{
    InnerProduct inner;
    CMatrix phi;
    CMatrix components;

    Eigen::Index rank() const noexcept
    {
        return phi.cols();
    }

    Eigen::Index count() const noexcept
    {
        return components.rows();
    }

    CVector reconstruct(Eigen::Index j) const
    {
        return phi * components.row(j).transpose();
    }

    /// Coordinates -> ambient vector.
    CVector lift(const CVector& coords) const
    {
        return phi * coords;
    }
};

///
/// Modified Gram-Schmidt with one reorthogonalization pass in the M inner
/// product. A snapshot whose residual after projection falls below
/// rank_tolerance times its own norm adds no basis vector, but its
/// coordinates are still recorded.
///
inline SnapshotBasis orthonormalize(const InnerProduct& inner, const CMatrix& snapshots)
{
    const Eigen::Index n     = snapshots.rows();
    const Eigen::Index count = snapshots.cols();
    if (count < 1 || n < 1)
    {
        throw Error(ErrorKind::InvalidArgument, "need at least one nonempty snapshot");
    }
    if (n != inner.dim())
    {
        throw Error(ErrorKind::DimensionMismatch,
                    "snapshot length does not match the inner product");
    }

    CMatrix phi(n, count);
    CMatrix m_phi(n, count); // M * phi, so that <w, phi_i> = (M phi_i)^H w
    CMatrix coords = CMatrix::Zero(count, count);
    Eigen::Index rank = 0;

    for (Eigen::Index j = 0; j < count; ++j)
    {
        CVector w              = snapshots.col(j);
        const Real original    = inner.norm(w);
        if (count == 1 && original < zero_tolerance)
        {
            throw Error(ErrorKind::ZeroSnapshot, "the only snapshot has zero norm");
        }
        for (int pass = 0; pass < 2; ++pass)
        {
            for (Eigen::Index i = 0; i < rank; ++i)
            {
                const Complex h = m_phi.col(i).dot(w);
                w -= h * phi.col(i);
                coords(j, i) += h;
            }
        }
        const Real remaining = inner.norm(w);
        if (original >= zero_tolerance && remaining >= rank_tolerance * original)
        {
            phi.col(rank)    = w / remaining;
            m_phi.col(rank)  = inner.apply(phi.col(rank));
            coords(j, rank)  = remaining;
            ++rank;
        }
    }
    return SnapshotBasis{inner, phi.leftCols(rank), coords.leftCols(rank)};
}

} // namespace mri

#endif /* MRI_SNAPSHOTS_HPP */
