///
/// \file estimators.hpp
///
/// A posteriori residuals of a rational surrogate for problems of the form
///
///     F(mu) u = f(mu),   F(mu) = sum_i thetaF_i(mu) F_i,   f(mu) = sum_i thetaf_i(mu) f_i,
///
/// and a greedy driver that adds snapshots where the estimator peaks.
///
/// Besides the direct residual, two algebraically different routes are
/// provided: the separable form built from interpolation errors of the
/// affine terms, and the scalar estimator c |omega(mu) / Q(mu)| which is
/// exact when F(mu) = F0 + mu F1 and f does not depend on mu.
///
#ifndef MRI_ESTIMATORS_HPP
#define MRI_ESTIMATORS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <vector>

#include <Eigen/LU>

#include <mri/interpolant.hpp>
#include <mri/sampling.hpp>
#include <mri/snapshots.hpp>
#include <mri/types.hpp>

namespace mri
{

using ScalarFunction = std::function<Complex(Complex)>;

struct AffineOperator
{
    std::vector<ScalarFunction> theta_matrix;
    std::vector<CMatrix> matrices;
    std::vector<ScalarFunction> theta_rhs;
    std::vector<CVector> rhs;
    bool linear_in_mu = false;

    /// (F0 + mu F1) u = f
    static AffineOperator linear(CMatrix f0, CMatrix f1, CVector f)
    {
        AffineOperator op;
        op.theta_matrix = {[](Complex) { return Complex(1); }, [](Complex mu) { return mu; }};
        op.matrices     = {std::move(f0), std::move(f1)};
        op.theta_rhs    = {[](Complex) { return Complex(1); }};
        op.rhs          = {std::move(f)};
        op.linear_in_mu = true;
        op.validate();
        return op;
    }

    Eigen::Index dim() const
    {
        return matrices.empty() ? 0 : matrices.front().rows();
    }

    void validate() const
    {
        if (matrices.empty() || matrices.size() != theta_matrix.size() ||
            rhs.size() != theta_rhs.size() || rhs.empty())
        {
            throw Error(ErrorKind::DimensionMismatch,
                        "affine operator term counts are inconsistent");
        }
        const auto n = matrices.front().rows();
        for (const auto& m : matrices)
        {
            if (m.rows() != n || m.cols() != n)
            {
                throw Error(ErrorKind::DimensionMismatch,
                            "affine operator matrices must be square and equal-sized");
            }
        }
        for (const auto& v : rhs)
        {
            if (v.size() != n)
            {
                throw Error(ErrorKind::DimensionMismatch,
                            "right-hand side length differs from operator size");
            }
        }
        if (linear_in_mu && (matrices.size() != 2 || rhs.size() != 1))
        {
            throw Error(ErrorKind::InvalidArgument,
                        "a linear-in-mu operator has exactly F0, F1 and one f");
        }
    }

    CMatrix matrix_at(Complex mu) const
    {
        CMatrix out = theta_matrix[0](mu) * matrices[0];
        for (std::size_t i = 1; i < matrices.size(); ++i)
        {
            out += theta_matrix[i](mu) * matrices[i];
        }
        return out;
    }

    CVector rhs_at(Complex mu) const
    {
        CVector out = theta_rhs[0](mu) * rhs[0];
        for (std::size_t i = 1; i < rhs.size(); ++i)
        {
            out += theta_rhs[i](mu) * rhs[i];
        }
        return out;
    }
};

/// Dense LU solve of F(mu) u = f(mu). Throws SingularSystem on a singular pencil.
inline CVector solve_affine(const AffineOperator& op, Complex mu)
{
    const CMatrix a = op.matrix_at(mu);
    Eigen::PartialPivLU<CMatrix> lu(a);
    const CVector b = op.rhs_at(mu);
    CVector x       = lu.solve(b);
    if (!x.allFinite())
    {
        throw Error(ErrorKind::SingularSystem, "operator is singular at this parameter");
    }
    return x;
}

struct ResidualEstimate
{
    Real value     = 0;
    bool at_node   = false;
    bool near_pole = false;
};

namespace detail
{

inline void check_dims(const AffineOperator& op, const RationalInterpolant& interp,
                       const InnerProduct& res_inner)
{
    if (op.dim() != interp.dim() || res_inner.dim() != op.dim())
    {
        throw Error(ErrorKind::DimensionMismatch,
                    "operator, surrogate and residual norm dimensions differ");
    }
}

/// |sum_j rho_j / (mu - mu_j)| small against sum_j |rho_j / (mu - mu_j)|.
inline bool near_pole(const RationalInterpolant& interp, Complex mu)
{
    Complex den(0);
    Real magnitude = 0;
    const auto& w  = interp.barycentric_weights();
    for (std::size_t j = 0; j < interp.samples().size(); ++j)
    {
        const Complex t = w[Eigen::Index(j)] / (mu - interp.samples()[j]);
        den += t;
        magnitude += std::abs(t);
    }
    return std::abs(den) < pole_tolerance * magnitude;
}

} // namespace detail

/// ||F(mu) u~(mu) - f(mu)||_W
inline Real residual_direct(const AffineOperator& op, const RationalInterpolant& interp,
                            Complex mu, const InnerProduct& res_inner)
{
    detail::check_dims(op, interp, res_inner);
    const CVector approx   = interp.evaluate(mu).value;
    const CVector residual = op.matrix_at(mu) * approx - op.rhs_at(mu);
    return res_inner.norm(residual);
}

///
/// Residual through its separable decomposition
///
///   Q(mu) r(mu) = sum_i F_i Delta(thetaF_i I(uQ))(mu) - sum_i Delta(thetaf_i Q)(mu) f_i,
///
/// with Delta(g) = g - I(g) and every interpolant taken in the first
/// barycentric form from node values. Zero at the nodes.
///
inline ResidualEstimate residual_separable(const AffineOperator& op,
                                           const RationalInterpolant& interp, Complex mu,
                                           const InnerProduct& res_inner)
{
    detail::check_dims(op, interp, res_inner);
    ResidualEstimate out;
    if (interp.node_index(mu) >= 0)
    {
        out.at_node = true;
        return out;
    }
    out.near_pole = detail::near_pole(interp, mu);

    const auto& samples = interp.samples();
    const auto& basis   = interp.snapshot_basis();
    const auto& rho     = interp.barycentric_weights();
    const auto count    = Eigen::Index(samples.size());
    const Complex omega = samples.nodal_poly(mu);
    const Complex q_mu  = interp.denominator_value(mu);

    // c_j = omega(mu) rho_j / (mu - mu_j): I(g)(mu) = sum_j c_j g(mu_j) / Q(mu_j)
    CVector cardinal(count);
    for (Eigen::Index j = 0; j < count; ++j)
    {
        cardinal[j] = omega * rho[j] / (mu - samples[std::size_t(j)]);
    }
    const CMatrix& w         = basis.components; // S x rank
    const CVector interp_uq  = w.transpose() * cardinal;

    CVector total = CVector::Zero(op.dim());
    for (std::size_t i = 0; i < op.matrices.size(); ++i)
    {
        CVector theta_nodes(count);
        for (Eigen::Index j = 0; j < count; ++j)
        {
            theta_nodes[j] = op.theta_matrix[i](samples[std::size_t(j)]);
        }
        const CVector interp_theta_uq = w.transpose() * cardinal.cwiseProduct(theta_nodes);
        const CVector delta = op.theta_matrix[i](mu) * interp_uq - interp_theta_uq;
        total += op.matrices[i] * basis.lift(delta);
    }
    for (std::size_t i = 0; i < op.rhs.size(); ++i)
    {
        Complex interp_theta_q(0);
        for (Eigen::Index j = 0; j < count; ++j)
        {
            interp_theta_q += cardinal[j] * op.theta_rhs[i](samples[std::size_t(j)]);
        }
        const Complex delta = op.theta_rhs[i](mu) * q_mu - interp_theta_q;
        total -= delta * op.rhs[i];
    }
    out.value = res_inner.norm(total) / std::abs(q_mu);
    return out;
}

///
/// c |omega(mu) / Q(mu)| with c = ||F1 sum_j u(mu_j) Q(mu_j) / omega'(mu_j)||_W.
/// Construct once per surrogate; each evaluation is then two scalar sums.
///
class LinearResidualEstimator
{
public:
    LinearResidualEstimator(const AffineOperator& op, const RationalInterpolant& interp,
                            const InnerProduct& res_inner)
        : m_interp(&interp)
    {
        if (!op.linear_in_mu)
        {
            throw Error(ErrorKind::InvalidArgument,
                        "linear estimator requires an operator linear in mu");
        }
        detail::check_dims(op, interp, res_inner);
        m_scale = res_inner.norm(op.matrices[1] * interp.leading_coefficient());
    }

    Real scale() const noexcept
    {
        return m_scale;
    }

    ResidualEstimate operator()(Complex mu) const
    {
        ResidualEstimate out;
        if (m_interp->node_index(mu) >= 0)
        {
            out.at_node = true;
            return out;
        }
        out.near_pole = detail::near_pole(*m_interp, mu);
        out.value     = m_scale * std::abs(m_interp->omega_over_denominator(mu));
        return out;
    }

private:
    const RationalInterpolant* m_interp;
    Real m_scale = 0;
};

inline ResidualEstimate residual_estimator_linear(const AffineOperator& op,
                                                  const RationalInterpolant& interp,
                                                  Complex mu, const InnerProduct& res_inner)
{
    return LinearResidualEstimator(op, interp, res_inner)(mu);
}

///
/// C = ||r(mu')||_W |Q(mu') / omega(mu')| from one exact residual.
/// Throws NodePoint at a node and AtPole where Q(mu') vanishes.
///
inline Real calibrate(const AffineOperator& op, const RationalInterpolant& interp,
                      Complex mu_prime, const InnerProduct& res_inner)
{
    if (interp.node_index(mu_prime) >= 0)
    {
        throw Error(ErrorKind::NodePoint, "calibration point coincides with a node");
    }
    if (detail::near_pole(interp, mu_prime) ||
        std::abs(interp.denominator_value(mu_prime)) == 0)
    {
        throw Error(ErrorKind::AtPole, "calibration point is at a surrogate pole");
    }
    const Real residual = residual_direct(op, interp, mu_prime, res_inner);
    return residual / std::abs(interp.omega_over_denominator(mu_prime));
}

inline ResidualEstimate residual_estimator_calibrated(const RationalInterpolant& interp,
                                                      Complex mu, Real constant)
{
    ResidualEstimate out;
    if (interp.node_index(mu) >= 0)
    {
        out.at_node = true;
        return out;
    }
    out.near_pole = detail::near_pole(interp, mu);
    out.value     = constant * std::abs(interp.omega_over_denominator(mu));
    return out;
}

struct Calibration
{
    Real constant = 0;
    Complex point;
};

///
/// Calibrate at the point where |omega / Q| takes its median value over
/// the given points, moving outward from the median while the candidate is
/// a node or a surrogate pole. Empty if no point is usable.
///
inline std::optional<Calibration> calibrate_at_median(const AffineOperator& op,
                                                      const RationalInterpolant& interp,
                                                      const std::vector<Complex>& points,
                                                      const InnerProduct& res_inner)
{
    std::vector<Complex> usable;
    std::vector<Real> shape;
    for (const auto& mu : points)
    {
        if (interp.node_index(mu) < 0)
        {
            usable.push_back(mu);
            shape.push_back(std::abs(interp.omega_over_denominator(mu)));
        }
    }
    std::vector<std::size_t> order(usable.size());
    for (std::size_t i = 0; i < order.size(); ++i)
    {
        order[i] = i;
    }
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return shape[x] < shape[y]; });
    const auto size = std::ptrdiff_t(order.size());
    const auto mid  = size / 2;
    for (std::ptrdiff_t k = 0; k < 2 * size; ++k)
    {
        const auto pos = mid + ((k % 2 == 0) ? -(k / 2) : (k + 1) / 2);
        if (pos < 0 || pos >= size)
        {
            continue;
        }
        const Complex mu = usable[order[std::size_t(pos)]];
        try
        {
            const Real constant = calibrate(op, interp, mu, res_inner);
            if (std::isfinite(constant))
            {
                return Calibration{constant, mu};
            }
        }
        catch (const Error&)
        {
        }
    }
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Greedy sampling
// ---------------------------------------------------------------------------

/// Full-order solver: mu -> solution vector. Must be deterministic in mu.
using FomSolver = std::function<CVector(Complex)>;

struct GreedyStep
{
    std::size_t samples = 0;
    Complex argmax;
    Real estimator_max = 0;
    Real exact_residual = 0;
};

struct GreedyOptions
{
    Real tolerance = 1e-6;
    std::size_t max_samples = 40;
    /// Empty: N = S - 1 at every step.
    std::optional<std::size_t> fixed_degree;
    /// Denominator basis; its max degree is adjusted to N at every step.
    PolyBasis basis;
    /// Candidates closer than this to a node are never selected. Zero picks
    /// half the smallest nearest-neighbour spacing of the candidate grid.
    Real min_separation = 0;
};

struct GreedyResult
{
    RationalInterpolant interpolant;
    std::vector<GreedyStep> history;
    bool converged        = false;
    bool budget_exhausted = false;
};

namespace detail
{

inline Real half_grid_spacing(const std::vector<Complex>& grid)
{
    Real best = std::numeric_limits<Real>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i)
    {
        for (std::size_t k = i + 1; k < grid.size(); ++k)
        {
            const Real d = std::abs(grid[i] - grid[k]);
            if (d > 0)
            {
                best = std::min(best, d);
            }
        }
    }
    return std::isfinite(best) ? best / 2 : Real(0);
}

} // namespace detail

///
/// Build, estimate on the candidate grid, and add the FOM solution at the
/// estimator's argmax until the maximum drops to the tolerance or the
/// sample budget runs out. The calibration constant is refreshed at every
/// step from the exact residual at the candidate where |omega / Q| takes
/// its median value.
///
inline GreedyResult greedy_refine(const FomSolver& solve, const AffineOperator& op,
                                  const InnerProduct& inner, const InnerProduct& res_inner,
                                  SampleSet samples, const std::vector<Complex>& candidates,
                                  const GreedyOptions& options)
{
    if (samples.size() < 2)
    {
        throw Error(ErrorKind::InvalidArgument, "greedy start needs at least two samples");
    }
    if (candidates.empty())
    {
        throw Error(ErrorKind::InvalidArgument, "candidate grid is empty");
    }
    const Real separation = options.min_separation > 0
                                ? options.min_separation
                                : detail::half_grid_spacing(candidates);

    CMatrix snapshots(op.dim(), Eigen::Index(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j)
    {
        snapshots.col(Eigen::Index(j)) = solve(samples[j]);
    }

    auto far_from_nodes = [&](Complex mu) {
        for (const auto& node : samples.nodes())
        {
            if (std::abs(mu - node) <= separation)
            {
                return false;
            }
        }
        return true;
    };

    std::vector<GreedyStep> history;
    while (true)
    {
        const std::size_t count = samples.size();
        const std::size_t degree =
            options.fixed_degree ? std::min(*options.fixed_degree, count - 1) : count - 1;
        MriConfig config{degree, options.basis.with_max_degree(degree)};
        auto interp = build(snapshots, inner, samples, config);

        std::vector<Complex> active;
        std::vector<Real> shape;
        for (const auto& mu : candidates)
        {
            if (far_from_nodes(mu))
            {
                active.push_back(mu);
                shape.push_back(std::abs(interp.omega_over_denominator(mu)));
            }
        }
        if (active.empty())
        {
            GreedyResult result{std::move(interp), std::move(history)};
            result.budget_exhausted = true;
            return result;
        }

        // without a usable calibration point the shape alone picks the next
        // node and the estimate is reported as unknown
        const auto calibration = calibrate_at_median(op, interp, active, res_inner);
        const Real constant    = calibration ? calibration->constant : Real(1);

        std::size_t best = 0;
        Real best_value  = -1;
        for (std::size_t i = 0; i < active.size(); ++i)
        {
            const Real value = constant * shape[i];
            if (!(value <= best_value)) // NaN/inf wins
            {
                best       = i;
                best_value = value;
            }
        }
        if (!calibration)
        {
            best_value = std::numeric_limits<Real>::infinity();
        }
        GreedyStep step;
        step.samples        = count;
        step.argmax         = active[best];
        step.estimator_max  = best_value;
        step.exact_residual = residual_direct(op, interp, active[best], res_inner);
        history.push_back(step);

        if (best_value <= options.tolerance)
        {
            GreedyResult result{std::move(interp), std::move(history)};
            result.converged = true;
            return result;
        }
        if (count >= options.max_samples)
        {
            GreedyResult result{std::move(interp), std::move(history)};
            result.budget_exhausted = true;
            return result;
        }
        const Complex mu_new = active[best];
        snapshots.conservativeResize(Eigen::NoChange, snapshots.cols() + 1);
        snapshots.col(snapshots.cols() - 1) = solve(mu_new);
        samples = samples.with_node(mu_new);
    }
}

} // namespace mri

#endif /* MRI_ESTIMATORS_HPP */
