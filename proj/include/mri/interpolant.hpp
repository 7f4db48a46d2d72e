///
/// \file interpolant.hpp
///
/// Minimal rational interpolation of a vector-valued map from snapshots.
///
/// Given S snapshots u(mu_j), the surrogate of type [S-1/N] is
///
///     u~(mu) = I(uQ)(mu) / Q(mu),
///
/// where I is polynomial interpolation at the nodes and the unit-norm
/// denominator Q of degree <= N minimizes the V-norm of the leading
/// coefficient of I(uQ). In the snapshot coordinates that leading
/// coefficient is Psi * q, with
///
///     Psi(i, l) = sum_j W(j, i) psi_l(mu_j) / omega'(mu_j),
///
/// so q is the right singular vector of Psi for its smallest singular value.
/// Everything past the orthonormalization step works on S-dimensional
/// coordinates, independently of the ambient dimension.
///
#ifndef MRI_INTERPOLANT_HPP
#define MRI_INTERPOLANT_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/SVD>

#include <mri/polybasis.hpp>
#include <mri/sampling.hpp>
#include <mri/snapshots.hpp>
#include <mri/types.hpp>

namespace mri
{

inline constexpr Real node_tolerance = 1e-14;
inline constexpr Real pole_tolerance = 1e-13;
inline constexpr Real singular_tie_tolerance = 1e-12;

struct MriConfig
{
    std::size_t denominator_degree = 0;
    PolyBasis basis;
};

inline void validate(const MriConfig& config, std::size_t sample_count)
{
    if (sample_count == 0 || config.denominator_degree > sample_count - 1)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "denominator degree N must satisfy N <= S - 1");
    }
    if (config.basis.max_degree() < config.denominator_degree)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "polynomial basis max degree is below N");
    }
}

///
/// Psi (rank x (N+1)): leading interpolation coefficient of w_i * psi_l.
///
inline CMatrix build_gramian_factor(const SnapshotBasis& snap, const SampleSet& samples,
                                    const MriConfig& config)
{
    if (std::size_t(snap.count()) != samples.size())
    {
        throw Error(ErrorKind::DimensionMismatch,
                    "snapshot count differs from node count");
    }
    validate(config, samples.size());
    const auto cols = Eigen::Index(config.denominator_degree + 1);
    // B(j, l) = psi_l(mu_j) / omega'(mu_j)
    CMatrix weighted_basis(Eigen::Index(samples.size()), cols);
    for (std::size_t j = 0; j < samples.size(); ++j)
    {
        const auto psi = config.basis.eval_all(config.denominator_degree, samples[j]);
        for (Eigen::Index l = 0; l < cols; ++l)
        {
            weighted_basis(Eigen::Index(j), l) = psi[std::size_t(l)] / samples.omega_prime()[j];
        }
    }
    return snap.components.transpose() * weighted_basis;
}

struct DenominatorFit
{
    CVector q;
    Real sigma_min = 0;
    /// sigma_min / next-smallest singular value; near 1 flags a non-unique minimizer.
    Real sigma_gap = 1;
};

/// Rotate q so that its largest-modulus entry (first on ties) is real positive.
inline void fix_phase(CVector& q)
{
    Eigen::Index best = 0;
    for (Eigen::Index l = 1; l < q.size(); ++l)
    {
        if (std::abs(q[l]) > std::abs(q[best]))
        {
            best = l;
        }
    }
    const Real mod = std::abs(q[best]);
    if (mod > 0)
    {
        q *= std::conj(q[best]) / mod;
        q[best] = mod;
    }
}

///
/// Minimal right singular vector of Psi. When the smallest singular value
/// is repeated (within a relative 1e-12) the candidate with the smallest
/// index in the SVD ordering is taken.
///
inline DenominatorFit minimal_denominator(const CMatrix& psi)
{
    const Eigen::Index cols = psi.cols();
    if (cols == 0)
    {
        throw Error(ErrorKind::InvalidArgument, "Gramian factor has no columns");
    }
    DenominatorFit fit;
    if (psi.rows() == 0)
    {
        fit.q    = CVector::Unit(cols, 0);
        return fit;
    }

    Eigen::JacobiSVD<CMatrix> svd(psi, Eigen::ComputeFullV);
    // Singular values of the full right basis: missing ones are zero.
    RVector sigma = RVector::Zero(cols);
    sigma.head(svd.singularValues().size()) = svd.singularValues();

    const Real smallest = sigma[cols - 1];
    const Real tie      = singular_tie_tolerance * std::max(sigma[0], Real(0));
    Eigen::Index pick   = cols - 1;
    while (pick > 0 && sigma[pick - 1] - smallest <= tie)
    {
        --pick;
    }
    fit.q         = svd.matrixV().col(pick);
    fit.sigma_min = smallest;
    if (cols == 1)
    {
        fit.sigma_gap = 1;
    }
    else
    {
        const Real next = sigma[cols - 2];
        fit.sigma_gap   = next > 0 ? smallest / next : Real(1);
    }
    fix_phase(fit.q);
    return fit;
}

/// Result of evaluating the surrogate at one point.
struct Evaluation
{
    CVector value;
    bool at_node   = false;
    bool near_pole = false;
};

///
/// The [S-1/N] minimal rational interpolant. Immutable once built; all
/// member functions are const and safe to call concurrently.
///
class RationalInterpolant
{
public:
    RationalInterpolant(SampleSet samples, CMatrix snapshots, SnapshotBasis snap,
                        MriConfig config, CMatrix psi, DenominatorFit fit)
        : m_samples(std::move(samples)), m_snapshots(std::move(snapshots)),
          m_snap(std::move(snap)), m_config(std::move(config)), m_psi(std::move(psi)),
          m_q{m_config.basis, std::move(fit.q)}, m_sigma_min(fit.sigma_min),
          m_sigma_gap(fit.sigma_gap)
    {
        const auto count = m_samples.size();
        m_qnode.resize(Eigen::Index(count));
        m_weights.resize(Eigen::Index(count));
        Real scale = 1;
        for (std::size_t j = 0; j < count; ++j)
        {
            const auto jj = Eigen::Index(j);
            m_qnode[jj]   = eval_poly(m_q, m_samples[j]);
            m_weights[jj] = m_qnode[jj] / m_samples.omega_prime()[j];
            scale         = std::max(scale, std::abs(m_samples[j]));
        }
        m_node_scale  = scale;
        m_leading     = m_psi * m_q.coeffs;
    }

    const SampleSet& samples() const noexcept
    {
        return m_samples;
    }

    const CMatrix& snapshots() const noexcept
    {
        return m_snapshots;
    }

    const SnapshotBasis& snapshot_basis() const noexcept
    {
        return m_snap;
    }

    const MriConfig& config() const noexcept
    {
        return m_config;
    }

    const CMatrix& gramian_factor() const noexcept
    {
        return m_psi;
    }

    const PolyCoeffs& denominator() const noexcept
    {
        return m_q;
    }

    /// Q(mu_j)
    const CVector& denominator_at_nodes() const noexcept
    {
        return m_qnode;
    }

    /// Barycentric weights Q(mu_j) / omega'(mu_j).
    const CVector& barycentric_weights() const noexcept
    {
        return m_weights;
    }

    Real sigma_min() const noexcept
    {
        return m_sigma_min;
    }

    Real sigma_gap() const noexcept
    {
        return m_sigma_gap;
    }

    Eigen::Index dim() const noexcept
    {
        return m_snapshots.rows();
    }

    /// sum_j u(mu_j) Q(mu_j) / omega'(mu_j), the leading coefficient of I(uQ).
    CVector leading_coefficient() const
    {
        return m_snap.lift(m_leading);
    }

    Complex denominator_value(Complex mu) const
    {
        return eval_poly(m_q, mu);
    }

    /// Index of the node within tolerance of mu, or -1.
    Eigen::Index node_index(Complex mu) const
    {
        for (std::size_t j = 0; j < m_samples.size(); ++j)
        {
            if (std::abs(mu - m_samples[j]) < node_tolerance * m_node_scale)
            {
                return Eigen::Index(j);
            }
        }
        return -1;
    }

    ///
    /// omega(mu) / Q(mu), computed as 1 / sum_j rho_j / (mu - mu_j) so that
    /// neither factor is formed. Zero at the nodes.
    ///
    Complex omega_over_denominator(Complex mu) const
    {
        if (node_index(mu) >= 0)
        {
            return Complex(0);
        }
        Complex den(0);
        for (std::size_t j = 0; j < m_samples.size(); ++j)
        {
            den += m_weights[Eigen::Index(j)] / (mu - m_samples[j]);
        }
        return Complex(1) / den;
    }

    ///
    /// Second barycentric form in snapshot coordinates; lifted at the end.
    ///
    Evaluation evaluate(Complex mu) const
    {
        Evaluation out;
        const auto hit = node_index(mu);
        if (hit >= 0)
        {
            out.value   = m_snapshots.col(hit);
            out.at_node = true;
            return out;
        }
        const Eigen::Index count = Eigen::Index(m_samples.size());
        CVector coeff(count);
        Complex den(0);
        Real magnitude = 0;
        for (Eigen::Index j = 0; j < count; ++j)
        {
            coeff[j] = m_weights[j] / (mu - m_samples[std::size_t(j)]);
            den += coeff[j];
            magnitude += std::abs(coeff[j]);
        }
        out.near_pole  = std::abs(den) < pole_tolerance * magnitude;
        CVector coords = m_snap.components.transpose() * coeff;
        out.value      = m_snap.lift(coords / den);
        return out;
    }

    /// ||Psi q|| for any coefficient vector of length <= N + 1.
    Real j_functional(const CVector& q) const
    {
        if (q.size() > m_psi.cols())
        {
            throw Error(ErrorKind::DimensionMismatch,
                        "coefficient vector exceeds denominator degree");
        }
        return (m_psi.leftCols(q.size()) * q).norm();
    }

    PolyRoots poles() const
    {
        return roots(m_q);
    }

private:
    SampleSet m_samples;
    CMatrix m_snapshots;
    SnapshotBasis m_snap;
    MriConfig m_config;
    CMatrix m_psi;
    PolyCoeffs m_q;
    Real m_sigma_min;
    Real m_sigma_gap;
    CVector m_qnode;
    CVector m_weights;
    CVector m_leading;
    Real m_node_scale = 1;
};

///
/// Orthonormalize, assemble Psi, and take its minimal right singular vector.
/// snapshots is n x S with column j the solution at samples[j].
///
inline RationalInterpolant build(const CMatrix& snapshots, const InnerProduct& inner,
                                 const SampleSet& samples, const MriConfig& config)
{
    if (std::size_t(snapshots.cols()) != samples.size())
    {
        throw Error(ErrorKind::DimensionMismatch,
                    "snapshot count differs from node count");
    }
    validate(config, samples.size());
    auto snap = orthonormalize(inner, snapshots);
    auto psi  = build_gramian_factor(snap, samples, config);
    auto fit  = minimal_denominator(psi);
    return RationalInterpolant(samples, snapshots, std::move(snap), config,
                               std::move(psi), std::move(fit));
}

///
/// Rebuild an interpolant around a known denominator (e.g. read back from
/// disk) instead of solving for it. sigma_min is recomputed from Psi.
///
inline RationalInterpolant assemble(const CMatrix& snapshots, const InnerProduct& inner,
                                    const SampleSet& samples, const MriConfig& config,
                                    CVector q, Real sigma_gap)
{
    validate(config, samples.size());
    if (q.size() != Eigen::Index(config.denominator_degree + 1))
    {
        throw Error(ErrorKind::DimensionMismatch, "denominator length is not N + 1");
    }
    auto snap = orthonormalize(inner, snapshots);
    auto psi  = build_gramian_factor(snap, samples, config);
    DenominatorFit fit;
    fit.sigma_min = (psi * q).norm();
    fit.sigma_gap = sigma_gap;
    fit.q         = std::move(q);
    return RationalInterpolant(samples, snapshots, std::move(snap), config,
                               std::move(psi), std::move(fit));
}

inline Real j_functional(const RationalInterpolant& interp, const CVector& q)
{
    return interp.j_functional(q);
}

inline Evaluation evaluate(const RationalInterpolant& interp, Complex mu)
{
    return interp.evaluate(mu);
}

inline PolyRoots poles(const RationalInterpolant& interp)
{
    return interp.poles();
}

/// For each true pole, the distance to the nearest approximate pole.
inline std::vector<Real> pole_matching_error(const std::vector<Complex>& true_poles,
                                             const std::vector<Complex>& approx_poles)
{
    if (approx_poles.empty())
    {
        throw Error(ErrorKind::EmptyApprox, "no approximate poles to match against");
    }
    std::vector<Real> out;
    out.reserve(true_poles.size());
    for (const auto& lambda : true_poles)
    {
        Real best = std::numeric_limits<Real>::infinity();
        for (const auto& approx : approx_poles)
        {
            best = std::min(best, std::abs(approx - lambda));
        }
        out.push_back(best);
    }
    return out;
}

} // namespace mri

#endif /* MRI_INTERPOLANT_HPP */
