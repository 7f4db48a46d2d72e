///
/// \file testbeds.hpp
///
/// Synthetic full-order models: meromorphic maps with prescribed poles and
/// residues, the shifted normal eigenproblem (A - mu I) u = v, a damped 1D
/// elastic bar with a quadratic frequency dependence, and a POD projection
/// baseline for pole estimation.
///
#ifndef MRI_TESTBEDS_HPP
#define MRI_TESTBEDS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <mri/estimators.hpp>
#include <mri/sampling.hpp>
#include <mri/snapshots.hpp>
#include <mri/types.hpp>

namespace mri
{

///
/// Reproducible random source. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the distribution transforms are
/// written out here (53-bit uniform, Box-Muller normal) because the
/// standard library ones are implementation-defined.
///
class Rng
{
public:
    explicit Rng(std::uint64_t seed) : m_engine(seed) {}

    /// Uniform on [0, 1).
    Real uniform()
    {
        return Real(m_engine() >> 11) * 0x1.0p-53;
    }

    Real uniform(Real lo, Real hi)
    {
        return lo + (hi - lo) * uniform();
    }

    /// Standard normal.
    Real normal()
    {
        if (m_has_spare)
        {
            m_has_spare = false;
            return m_spare;
        }
        Real u1 = uniform();
        while (u1 <= 0)
        {
            u1 = uniform();
        }
        const Real u2     = uniform();
        const Real radius = std::sqrt(-2 * std::log(u1));
        const Real angle  = 2 * std::numbers::pi * u2;
        m_spare           = radius * std::sin(angle);
        m_has_spare       = true;
        return radius * std::cos(angle);
    }

    /// Real and imaginary parts independent standard normals.
    Complex complex_normal()
    {
        const Real re = normal();
        const Real im = normal();
        return {re, im};
    }

    CMatrix complex_normal(Eigen::Index rows, Eigen::Index cols)
    {
        CMatrix out(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
        {
            for (Eigen::Index i = 0; i < rows; ++i)
            {
                out(i, j) = complex_normal();
            }
        }
        return out;
    }

private:
    std::mt19937_64 m_engine;
    Real m_spare     = 0;
    bool m_has_spare = false;
};

/// Orthonormal columns from Householder QR of a complex Gaussian matrix.
inline CMatrix random_orthonormal(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    const CMatrix g = rng.complex_normal(rows, cols);
    Eigen::HouseholderQR<CMatrix> qr(g);
    return qr.householderQ() * CMatrix::Identity(rows, cols);
}

///
/// Sort by distance from center, ties broken by real then imaginary part.
///
inline void sort_by_distance(std::vector<Complex>& values, Complex center)
{
    std::stable_sort(values.begin(), values.end(), [center](Complex x, Complex y) {
        const Real dx = std::abs(x - center), dy = std::abs(y - center);
        if (dx != dy)
        {
            return dx < dy;
        }
        if (x.real() != y.real())
        {
            return x.real() < y.real();
        }
        return x.imag() < y.imag();
    });
}

// ---------------------------------------------------------------------------
// Meromorphic maps
// ---------------------------------------------------------------------------

///
/// u(mu) = sum_k residues.col(k) / (poles[k] - mu)
///
struct MeromorphicMap
{
    std::vector<Complex> poles;
    CMatrix residues; // n x P
    bool orthogonal = false;

    Eigen::Index dim() const
    {
        return residues.rows();
    }

    void validate(const InnerProduct& inner) const
    {
        if (Eigen::Index(poles.size()) != residues.cols())
        {
            throw Error(ErrorKind::DimensionMismatch, "one residue per pole required");
        }
        for (std::size_t i = 0; i < poles.size(); ++i)
        {
            for (std::size_t k = i + 1; k < poles.size(); ++k)
            {
                if (poles[i] == poles[k])
                {
                    throw Error(ErrorKind::InvalidArgument, "poles must be distinct");
                }
            }
        }
        if (orthogonal)
        {
            const CMatrix g = inner.gram(residues, residues);
            for (Eigen::Index i = 0; i < g.rows(); ++i)
            {
                for (Eigen::Index k = 0; k < g.cols(); ++k)
                {
                    const Real bound = 1e-12 * std::sqrt(std::abs(g(i, i)) * std::abs(g(k, k)));
                    if (i != k && std::abs(g(i, k)) >= bound && bound > 0)
                    {
                        throw Error(ErrorKind::InvalidArgument, "residues are not orthogonal");
                    }
                }
            }
        }
    }
};

inline CVector eval_meromorphic(const MeromorphicMap& map, Complex mu)
{
    CVector out = CVector::Zero(map.dim());
    for (std::size_t k = 0; k < map.poles.size(); ++k)
    {
        const Complex gap = map.poles[k] - mu;
        if (gap == Complex(0))
        {
            throw Error(ErrorKind::AtPole, "evaluation point is a pole");
        }
        out += map.residues.col(Eigen::Index(k)) / gap;
    }
    return out;
}

/// Snapshot matrix of the map at the given nodes.
inline CMatrix sample_meromorphic(const MeromorphicMap& map, const SampleSet& samples)
{
    CMatrix out(map.dim(), Eigen::Index(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j)
    {
        out.col(Eigen::Index(j)) = eval_meromorphic(map, samples[j]);
    }
    return out;
}

///
/// Euclidean-orthogonal residues with prescribed norms (all 1 if norms is
/// empty) along random orthonormal directions. Requires dim >= pole count.
///
inline MeromorphicMap random_orthogonal_map(std::vector<Complex> poles, Eigen::Index dim,
                                            std::uint64_t seed, std::vector<Real> norms = {})
{
    const auto count = Eigen::Index(poles.size());
    if (dim < count)
    {
        throw Error(ErrorKind::InvalidArgument,
                    "orthogonal residues need dim >= number of poles");
    }
    if (!norms.empty() && Eigen::Index(norms.size()) != count)
    {
        throw Error(ErrorKind::DimensionMismatch, "one residue norm per pole required");
    }
    Rng rng(seed);
    CMatrix residues = random_orthonormal(dim, count, rng);
    for (Eigen::Index k = 0; k < count; ++k)
    {
        residues.col(k) *= norms.empty() ? Real(1) : norms[std::size_t(k)];
    }
    MeromorphicMap map{std::move(poles), std::move(residues), true};
    map.validate(InnerProduct::euclidean(dim));
    return map;
}

// ---------------------------------------------------------------------------
// Normal eigenproblem
// ---------------------------------------------------------------------------

///
/// (A - mu I) u = v with A = U diag(lambda) U^H normal.
///
struct NormalEigenFOM
{
    CMatrix a;
    CVector v;
    std::vector<Complex> eigenvalues;
    CMatrix eigenvectors;
    std::uint64_t seed = 0;

    Eigen::Index dim() const
    {
        return a.rows();
    }
};

namespace detail
{

inline NormalEigenFOM normal_fom(std::vector<Complex> eigenvalues, Rng& rng)
{
    const auto n = Eigen::Index(eigenvalues.size());
    if (n < 1)
    {
        throw Error(ErrorKind::InvalidArgument, "spectrum is empty");
    }
    NormalEigenFOM fom;
    fom.eigenvectors = random_orthonormal(n, n, rng);
    CVector diag(n);
    for (Eigen::Index k = 0; k < n; ++k)
    {
        diag[k] = eigenvalues[std::size_t(k)];
    }
    fom.a           = fom.eigenvectors * diag.asDiagonal() * fom.eigenvectors.adjoint();
    fom.v           = rng.complex_normal(n, 1);
    fom.eigenvalues = std::move(eigenvalues);
    return fom;
}

} // namespace detail

///
/// Normal matrix with the given spectrum; eigenvectors and right-hand side
/// are drawn from the seeded generator.
///
inline NormalEigenFOM normal_fom_from_spectrum(std::vector<Complex> eigenvalues,
                                               std::uint64_t seed)
{
    Rng rng(seed);
    auto fom = detail::normal_fom(std::move(eigenvalues), rng);
    fom.seed = seed;
    return fom;
}

///
/// Eigenvalues uniform over [-half_width, half_width]^2, eigenvectors from
/// orthonormalizing a complex Gaussian matrix, v complex Gaussian. Draw
/// order from the single seeded generator: n eigenvalues (real part, then
/// imaginary part), the n x n Gaussian matrix column by column, then v.
///
inline NormalEigenFOM random_normal_fom(Eigen::Index n, Real half_width, std::uint64_t seed)
{
    if (n < 1)
    {
        throw Error(ErrorKind::InvalidArgument, "matrix size must be >= 1");
    }
    Rng rng(seed);
    std::vector<Complex> eigenvalues;
    eigenvalues.reserve(std::size_t(n));
    for (Eigen::Index k = 0; k < n; ++k)
    {
        const Real re = rng.uniform(-half_width, half_width);
        const Real im = rng.uniform(-half_width, half_width);
        eigenvalues.emplace_back(re, im);
    }
    auto fom = detail::normal_fom(std::move(eigenvalues), rng);
    fom.seed = seed;
    return fom;
}

inline CVector solve_fom(const NormalEigenFOM& fom, Complex mu)
{
    for (const auto& lambda : fom.eigenvalues)
    {
        if (std::abs(lambda - mu) < 1e-12)
        {
            throw Error(ErrorKind::SingularSystem, "parameter is an eigenvalue of A");
        }
    }
    CMatrix shifted = fom.a;
    shifted.diagonal().array() -= mu;
    return Eigen::PartialPivLU<CMatrix>(shifted).solve(fom.v);
}

inline CMatrix sample_fom(const NormalEigenFOM& fom, const SampleSet& samples)
{
    CMatrix out(fom.dim(), Eigen::Index(samples.size()));
    for (std::size_t j = 0; j < samples.size(); ++j)
    {
        out.col(Eigen::Index(j)) = solve_fom(fom, samples[j]);
    }
    return out;
}

/// Residues (u_k^H v) u_k at the eigenvalues; orthogonal since A is normal.
inline MeromorphicMap fom_as_meromorphic(const NormalEigenFOM& fom)
{
    MeromorphicMap map;
    map.poles    = fom.eigenvalues;
    map.residues = fom.eigenvectors *
                   (fom.eigenvectors.adjoint() * fom.v).asDiagonal();
    map.orthogonal = true;
    return map;
}

/// (A + mu (-I)) u = v
inline AffineOperator normal_fom_operator(const NormalEigenFOM& fom)
{
    return AffineOperator::linear(fom.a, -CMatrix::Identity(fom.dim(), fom.dim()), fom.v);
}

// ---------------------------------------------------------------------------
// Damped 1D elastic bar
// ---------------------------------------------------------------------------

///
/// Finite-difference bar on [0, length] with m grid points, clamped at the
/// left end (that point is eliminated, leaving m - 1 unknowns) and free at
/// the right end, with a unit load on the free end:
///
///   (K0 + nu 2 pi eta i M0 - nu^2 4 pi^2 M0) u(nu) = e_last,   M0 = rho I.
///
struct HelmholtzBar
{
    AffineOperator op;
    Eigen::MatrixXd stiffness; // K0
    Real rho = 1;
    Real eta = 0;

    Eigen::Index dim() const
    {
        return stiffness.rows();
    }

    ///
    /// Resonant frequencies: for every eigenvalue k of K0, the roots of
    /// 4 pi^2 rho nu^2 - 2 pi i eta rho nu - k = 0, sorted by real part.
    ///
    std::vector<Complex> resonances() const
    {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(stiffness, Eigen::EigenvaluesOnly);
        constexpr Real pi = std::numbers::pi;
        std::vector<Complex> out;
        const Complex a(4 * pi * pi * rho, 0);
        const Complex b(0, -2 * pi * eta * rho);
        for (Eigen::Index k = 0; k < eig.eigenvalues().size(); ++k)
        {
            const Complex c(-eig.eigenvalues()[k], 0);
            const Complex disc = std::sqrt(b * b - 4.0 * a * c);
            out.push_back((-b + disc) / (2.0 * a));
            out.push_back((-b - disc) / (2.0 * a));
        }
        std::sort(out.begin(), out.end(), [](Complex x, Complex y) {
            return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
        });
        return out;
    }

    /// Energy inner product <u, v> = v^H K0 u.
    InnerProduct energy_inner() const
    {
        return InnerProduct::weighted(stiffness.cast<Complex>());
    }
};

///
/// stiffness holds one modulus per element (m - 1 values), or a single value
/// used for every element.
///
inline HelmholtzBar helmholtz_1d_fom(Eigen::Index grid_points, Real eta, Real rho,
                                     std::vector<Real> stiffness, Real length = 1)
{
    if (grid_points < 3)
    {
        throw Error(ErrorKind::InvalidArgument, "bar needs at least 3 grid points");
    }
    if (!(rho > 0) || !(length > 0))
    {
        throw Error(ErrorKind::InvalidArgument, "density and length must be positive");
    }
    const Eigen::Index elements = grid_points - 1;
    if (stiffness.size() == 1)
    {
        stiffness.assign(std::size_t(elements), stiffness.front());
    }
    if (Eigen::Index(stiffness.size()) != elements)
    {
        throw Error(ErrorKind::DimensionMismatch, "need one stiffness value per element");
    }
    const Eigen::Index n = elements;
    const Real h         = length / Real(elements);
    Eigen::MatrixXd k0   = Eigen::MatrixXd::Zero(n, n);
    // element e joins grid points e and e+1; grid point 0 is clamped, so
    // unknown index = grid point - 1
    for (Eigen::Index e = 0; e < elements; ++e)
    {
        const Real ke    = stiffness[std::size_t(e)] / (h * h);
        const auto left  = e - 1;
        const auto right = e;
        k0(right, right) += ke;
        if (left >= 0)
        {
            k0(left, left) += ke;
            k0(left, right) -= ke;
            k0(right, left) -= ke;
        }
    }
    constexpr Real pi = std::numbers::pi;
    const CMatrix mass = rho * CMatrix::Identity(n, n);
    CVector load        = CVector::Zero(n);
    load[n - 1]         = 1;

    HelmholtzBar bar;
    bar.stiffness = k0;
    bar.rho       = rho;
    bar.eta       = eta;
    bar.op.theta_matrix = {[](Complex) { return Complex(1); },
                           [](Complex nu) { return nu; },
                           [](Complex nu) { return nu * nu; }};
    bar.op.matrices     = {k0.cast<Complex>(), Complex(0, 2 * pi * eta) * mass,
                           Complex(-4 * pi * pi, 0) * mass};
    bar.op.theta_rhs    = {[](Complex) { return Complex(1); }};
    bar.op.rhs          = {load};
    bar.op.linear_in_mu = false;
    bar.op.validate();
    return bar;
}

// ---------------------------------------------------------------------------
// POD baseline
// ---------------------------------------------------------------------------

///
/// Eigenvalues of the Galerkin projection of A onto the N dominant left
/// singular directions of the snapshots (singular vectors taken in the
/// inner product, i.e. of L^H X with M = L L^H).
///
inline std::vector<Complex> pod_pole_baseline(const CMatrix& snapshots,
                                              const InnerProduct& inner,
                                              std::size_t count, const CMatrix& a)
{
    if (snapshots.rows() != inner.dim() || a.rows() != inner.dim() || a.cols() != a.rows())
    {
        throw Error(ErrorKind::DimensionMismatch, "POD inputs have inconsistent sizes");
    }
    if (count == 0)
    {
        return {};
    }
    const auto k = Eigen::Index(count);
    CMatrix basis;
    CMatrix mass = inner.matrix();
    if (inner.is_euclidean())
    {
        Eigen::JacobiSVD<CMatrix> svd(snapshots, Eigen::ComputeThinU);
        const auto& s = svd.singularValues();
        if (k > s.size() || !(s[k - 1] > 1e-12 * s[0]))
        {
            throw Error(ErrorKind::RankDeficient, "snapshots have rank below N");
        }
        basis = svd.matrixU().leftCols(k);
    }
    else
    {
        Eigen::LLT<CMatrix> llt(mass);
        const CMatrix lower = llt.matrixL();
        Eigen::JacobiSVD<CMatrix> svd(lower.adjoint() * snapshots, Eigen::ComputeThinU);
        const auto& s = svd.singularValues();
        if (k > s.size() || !(s[k - 1] > 1e-12 * s[0]))
        {
            throw Error(ErrorKind::RankDeficient, "snapshots have rank below N");
        }
        basis = lower.adjoint().triangularView<Eigen::Upper>().solve(
            CMatrix(svd.matrixU().leftCols(k)));
    }
    const CMatrix reduced = basis.adjoint() * mass * a * basis;
    Eigen::ComplexEigenSolver<CMatrix> eig(reduced, false);
    const auto& ev = eig.eigenvalues();
    return std::vector<Complex>(ev.data(), ev.data() + ev.size());
}

} // namespace mri

#endif /* MRI_TESTBEDS_HPP */
